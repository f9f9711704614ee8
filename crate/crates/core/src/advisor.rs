//! Non-optimal multiple traffic light advisor.
//!
//! Each call analyses up to four lights ahead. For light `i` and green phase
//! `j` it builds the admissible target-speed range, intersects it with the
//! range kept for light `i - 1`, and either keeps the current speed (actual
//! velocity check) or picks the range endpoint closest to the current speed,
//! provided the resulting maneuver is comfortable (maneuver check). The plan
//! for the furthest light that passes is returned.

use serde::Serialize;
use thiserror::Error;

use crate::kinematics::{
    uam_fixed_target, velocity_range, MotionSolution, RangeQuery, VelocityInterval,
};
use crate::scenario::{Color, PathGeometry, PhaseSchedule, RoadLimits, Scenario, ScenarioError};

/// Slack kept before the red shift when committing to clear a light, s.
pub const CLEAR_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct AdvisorConfig {
    /// Lights analysed per call; 1 gives a single-light advisor.
    pub max_lights: usize,
    /// Arrival windows are shrunk by up to this much at each phase shift, s.
    /// The margin used for a light never exceeds the time to reach it at the
    /// road speed limit, so it fades out as the stop line gets close and a
    /// plan that met the window earlier keeps meeting it.
    pub window_margin: f64,
    /// Warning dead band on `|v_ref - v|`, m/s.
    pub dead_band: f64,
    /// Strongest deceleration a maneuver may ask for, m/s².
    pub amc_decel_max: f64,
    /// Scales the comfort stopping distance used for the sound warning.
    pub urgency: f64,
    /// Acceleration suggested when pulling away from a stop line on green, m/s².
    pub launch_accel: f64,
    /// Largest accepted distance from the path, m.
    pub lateral_tolerance: f64,
}

impl Default for AdvisorConfig {
    fn default() -> Self {
        AdvisorConfig {
            max_lights: 4,
            window_margin: 0.5,
            dead_band: 0.1,
            amc_decel_max: 1.5,
            urgency: 1.0,
            launch_accel: 1.0,
            lateral_tolerance: 10.0,
        }
    }
}

impl AdvisorConfig {
    /// Arrival-window margin for a stop line `dist` metres ahead, s.
    pub fn margin_for(&self, dist: f64, limits: &RoadLimits) -> f64 {
        self.window_margin.min(dist.max(0.0) / limits.v_max_road)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let checks = [
            ("advisor.max_lights", self.max_lights as f64 >= 1.0),
            ("advisor.window_margin_s", self.window_margin >= 0.0),
            ("advisor.dead_band_mps", self.dead_band >= 0.0),
            ("advisor.amc_decel_max_mps2", self.amc_decel_max > 0.0),
            ("advisor.urgency", self.urgency > 0.0),
            ("advisor.launch_accel_mps2", self.launch_accel > 0.0),
            ("advisor.lateral_tolerance_m", self.lateral_tolerance > 0.0),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((field, _)) => Err(ScenarioError::invalid(*field, "out of range")),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    None,
    /// Speed up.
    Green,
    /// Slow down.
    Red,
    /// About to run a red light.
    RedSound,
}

impl Warning {
    pub fn as_str(self) -> &'static str {
        match self {
            Warning::None => "none",
            Warning::Green => "green",
            Warning::Red => "red",
            Warning::RedSound => "red_sound",
        }
    }
}

#[derive(Debug, Error)]
pub enum AdvisorError {
    #[error("vehicle is {lateral:.2} m from the path (tolerance {tolerance} m)")]
    OffPath { lateral: f64, tolerance: f64 },
}

/// Sensed vehicle state. `s` is the localized abscissa of the vehicle front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub v: f64,
    pub s: f64,
    pub t: f64,
}

impl VehicleState {
    /// State of a vehicle sitting exactly on the path at abscissa `s`.
    pub fn on_path(path: &PathGeometry, s: f64, v: f64, t: f64) -> Self {
        let pose = path.pose_at(s);
        VehicleState {
            x: pose.x,
            y: pose.y,
            psi: pose.psi,
            v,
            s,
            t,
        }
    }
}

/// Abscissa of the orthogonal projection of `(x, y)` onto `path`.
pub fn localize(x: f64, y: f64, path: &PathGeometry, tolerance: f64) -> Result<f64, AdvisorError> {
    let proj = path.project(x, y);
    if proj.lateral > tolerance {
        return Err(AdvisorError::OffPath {
            lateral: proj.lateral,
            tolerance,
        });
    }
    Ok(proj.s)
}

/// Warning implied by moving from `v` to `v_ref`.
pub fn classify(v_ref: f64, v: f64, dead_band: f64) -> Warning {
    if v_ref > v + dead_band {
        Warning::Green
    } else if v_ref < v - dead_band {
        Warning::Red
    } else {
        Warning::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdviceKind {
    /// No light inside the horizon.
    Inactive,
    /// Pass-plan for `n_green` lights.
    Plan,
    /// No green reachable at the first light: stop at its line.
    FullStop,
    /// Pulling away from a stop line while the first light is green.
    Launch,
    /// Too close to stop comfortably but able to clear the line before red.
    Clear,
}

/// Target green phase and admissible range kept for one analysed light.
#[derive(Debug, Clone, PartialEq)]
pub struct LightPlan {
    pub id: String,
    pub stop_line: f64,
    pub green_phase: u8,
    pub v_adm: VelocityInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advice {
    pub warning: Warning,
    pub v_ref: f64,
    pub a_ref: f64,
    pub v_adm: VelocityInterval,
    /// Number of lights the plan passes on green.
    pub n_green: usize,
    /// Green phase targeted at the furthest planned light.
    pub n_pass: u8,
    pub kind: AdviceKind,
    /// Reference profile: UAM to the first light, constant speed after it.
    pub plan: Option<MotionSolution>,
    pub lights: Vec<LightPlan>,
    /// Set when the optimal advisor fell back to this advice.
    pub mpc_fallback: bool,
}

impl Advice {
    fn inactive(v: f64, limits: &RoadLimits) -> Self {
        Advice {
            warning: Warning::None,
            v_ref: v,
            a_ref: 0.0,
            v_adm: VelocityInterval::road(limits),
            n_green: 0,
            n_pass: 1,
            kind: AdviceKind::Inactive,
            plan: None,
            lights: Vec::new(),
            mpc_fallback: false,
        }
    }

    /// Green phase planned for the `i`-th analysed light (1-based).
    pub fn green_phase_for(&self, i: usize) -> Option<u8> {
        self.lights.get(i.checked_sub(1)?).map(|p| p.green_phase)
    }

    /// Reference speed and acceleration `t` seconds into the plan.
    pub fn reference_at(&self, t: f64, v_now: f64) -> (f64, f64) {
        match (&self.kind, &self.plan) {
            (AdviceKind::FullStop, Some(p)) => {
                let v = (p.v0 + p.a * t).max(0.0);
                (v, if v > 0.0 { p.a } else { 0.0 })
            }
            (AdviceKind::FullStop, None) => (0.0, 0.0),
            (_, Some(p))
                if self.warning != Warning::None
                    || matches!(self.kind, AdviceKind::Launch | AdviceKind::Clear) =>
            {
                (p.speed_at(t), p.accel_at(t))
            }
            _ => (v_now, 0.0),
        }
    }
}

/// Advisor instance. The activation latch is its only state.
#[derive(Debug, Clone)]
pub struct Advisor {
    config: AdvisorConfig,
    latched: bool,
}

enum Choice {
    Keep,
    Move(MotionSolution),
}

impl Advisor {
    pub fn new(config: AdvisorConfig) -> Self {
        Advisor {
            config,
            latched: false,
        }
    }

    pub fn config(&self) -> &AdvisorConfig {
        &self.config
    }

    pub fn is_active(&self) -> bool {
        self.latched
    }

    fn horizon(&self, limits: &RoadLimits) -> f64 {
        if self.config.max_lights > 1 {
            limits.horizon_multi
        } else {
            limits.horizon_single
        }
    }

    /// Lights to analyse from abscissa `s`. Once a light has entered the
    /// horizon the advisor stays active until the last light is passed.
    pub fn activation_check<'a>(
        &mut self,
        s: f64,
        lights: &'a [PhaseSchedule],
        horizon: f64,
    ) -> &'a [PhaseSchedule] {
        let first = lights.partition_point(|l| l.stop_line <= s);
        let ahead = &lights[first..];
        let Some(next) = ahead.first() else {
            self.latched = false;
            return &[];
        };
        if !self.latched && next.stop_line - s >= horizon {
            return &[];
        }
        self.latched = true;
        &ahead[..ahead.len().min(self.config.max_lights)]
    }

    pub fn advise(&mut self, state: &VehicleState, scenario: &Scenario) -> Advice {
        let limits = &scenario.limits;
        let horizon = self.horizon(limits);
        let ahead = self.activation_check(state.s, &scenario.lights, horizon);
        if ahead.is_empty() {
            return Advice::inactive(state.v, limits);
        }
        let cfg = &self.config;
        let v = state.v;
        let dist_first = ahead[0].stop_line - state.s;

        let mut adm = VelocityInterval::road(limits);
        let mut stored: Option<(Choice, u8)> = None;
        let mut lights = Vec::new();

        for (k, light) in ahead.iter().enumerate() {
            let color = light.phase_at(state.t);
            let shifts = light.next_shifts(state.t, 3);
            let max_phase = if color == Color::Green { 2 } else { 1 };
            let mut found = None;
            for green_phase in 1..=max_phase {
                let query = RangeQuery {
                    light_index: k + 1,
                    green_phase,
                    color,
                    speed: v,
                    dist_first,
                    dist_light: light.stop_line - state.s,
                    shifts: &shifts,
                };
                let margin = cfg.margin_for(query.dist_light, limits);
                let cand = velocity_range(&query, limits, margin).intersect(&adm);
                if cand.is_empty() {
                    continue;
                }
                if cand.contains(v) {
                    found = Some((Choice::Keep, green_phase, cand));
                    break;
                }
                let end = cand.closest_endpoint(v).expect("non-empty interval");
                let sol = match end.solution {
                    Some(sol) => sol,
                    None => match uam_fixed_target(v, dist_first, end.speed) {
                        Ok(sol) => sol,
                        Err(_) => continue,
                    },
                };
                if self.maneuver_ok(&sol, scenario) {
                    found = Some((Choice::Move(sol), green_phase, cand));
                    break;
                }
            }
            let Some((choice, green_phase, cand)) = found else {
                break;
            };
            adm = cand;
            lights.push(LightPlan {
                id: light.id.clone(),
                stop_line: light.stop_line,
                green_phase,
                v_adm: cand,
            });
            stored = Some((choice, green_phase));
        }

        let Some((choice, n_pass)) = stored else {
            return self.fallback(
                state,
                &ahead[0],
                dist_first,
                limits,
                scenario.vehicle.accel_max,
            );
        };
        let plan = match choice {
            Choice::Keep => MotionSolution::constant(v, dist_first),
            Choice::Move(sol) => sol,
        };
        let warning = classify(plan.v_t, v, cfg.dead_band);
        let (v_ref, a_ref) = if warning == Warning::None {
            (v, 0.0)
        } else {
            (plan.v_t, plan.a)
        };
        Advice {
            warning,
            v_ref,
            a_ref,
            v_adm: adm,
            n_green: lights.len(),
            n_pass,
            kind: AdviceKind::Plan,
            plan: Some(plan),
            lights,
            mpc_fallback: false,
        }
    }

    /// Comfort, safety and road-limit test for a maneuver.
    fn maneuver_ok(&self, sol: &MotionSolution, scenario: &Scenario) -> bool {
        let lim = &scenario.limits;
        let tol = 1e-9;
        sol.a >= -self.config.amc_decel_max - tol
            && sol.a <= scenario.vehicle.accel_max + tol
            && sol.v_t >= lim.v_min_road - tol
            && sol.v_t <= lim.v_max_road + tol
    }

    /// Profile that clears a green first light before it turns red, offered
    /// only when stopping would need more than the comfort deceleration.
    fn clear_line(
        &self,
        state: &VehicleState,
        first: &PhaseSchedule,
        dist: f64,
        limits: &RoadLimits,
        accel_max: f64,
    ) -> Option<MotionSolution> {
        let v = state.v;
        if v <= 0.0 || dist <= 0.0 || first.phase_at(state.t) != Color::Green {
            return None;
        }
        if v * v / (2.0 * dist) <= self.config.amc_decel_max {
            return None;
        }
        let deadline = first.next_shifts(state.t, 1)[0].after - CLEAR_MARGIN;
        if dist / v < deadline {
            return Some(MotionSolution::constant(v, dist));
        }
        if v >= limits.v_max_road {
            return None;
        }
        let sol = uam_fixed_target(v, dist, limits.v_max_road).ok()?;
        (sol.t1 < deadline && sol.a <= accel_max).then_some(sol)
    }

    fn fallback(
        &self,
        state: &VehicleState,
        first: &PhaseSchedule,
        dist: f64,
        limits: &RoadLimits,
        accel_max: f64,
    ) -> Advice {
        let v = state.v;
        let cfg = &self.config;
        let base = Advice {
            n_green: 0,
            n_pass: 1,
            v_adm: VelocityInterval::Empty,
            ..Advice::inactive(v, limits)
        };
        if v < limits.v_min_road && first.phase_at(state.t) == Color::Green {
            let v_cross = (v * v + 2.0 * cfg.launch_accel * dist).sqrt();
            let remaining = first.next_shifts(state.t, 1)[0].after;
            if v_cross <= limits.v_max_road {
                if let Ok(plan) = uam_fixed_target(v, dist, v_cross) {
                    if plan.t1 < remaining - cfg.margin_for(dist, limits) {
                        return Advice {
                            warning: classify(limits.v_min_road, v, cfg.dead_band),
                            v_ref: limits.v_min_road,
                            a_ref: cfg.launch_accel,
                            n_green: 1,
                            kind: AdviceKind::Launch,
                            plan: Some(plan),
                            lights: vec![LightPlan {
                                id: first.id.clone(),
                                stop_line: first.stop_line,
                                green_phase: 1,
                                v_adm: VelocityInterval::Empty,
                            }],
                            ..base
                        };
                    }
                }
            }
        }
        if let Some(clear) = self.clear_line(state, first, dist, limits, accel_max) {
            return Advice {
                warning: classify(clear.v_t, v, cfg.dead_band),
                v_ref: clear.v_t,
                a_ref: clear.a,
                n_green: 1,
                kind: AdviceKind::Clear,
                plan: Some(clear),
                lights: vec![LightPlan {
                    id: first.id.clone(),
                    stop_line: first.stop_line,
                    green_phase: 1,
                    v_adm: VelocityInterval::Empty,
                }],
                ..base
            };
        }
        let (a_ref, plan) = if v > 0.0 && dist > 0.0 {
            (-v * v / (2.0 * dist), uam_fixed_target(v, dist, 0.0).ok())
        } else {
            (0.0, None)
        };
        Advice {
            warning: if v > cfg.dead_band {
                Warning::Red
            } else {
                Warning::None
            },
            v_ref: if v > cfg.dead_band { 0.0 } else { v },
            a_ref,
            kind: AdviceKind::FullStop,
            plan,
            ..base
        }
    }
}

/// Upgrades a red warning to the sound warning when the first light is (or
/// will be, at constant-speed arrival) red and the vehicle is already inside
/// the comfort stopping distance scaled by `urgency`.
pub fn escalate(
    advice: &Advice,
    state: &VehicleState,
    first_light: &PhaseSchedule,
    limits: &RoadLimits,
    urgency: f64,
) -> Warning {
    if advice.warning != Warning::Red {
        return advice.warning;
    }
    let dist = first_light.stop_line - state.s;
    if dist < 0.0 {
        return advice.warning;
    }
    let arrival = if state.v > 0.0 {
        state.t + dist / state.v
    } else {
        state.t
    };
    let red =
        first_light.phase_at(state.t) == Color::Red || first_light.phase_at(arrival) == Color::Red;
    if red && dist < urgency * limits.comfort_stopping_distance(state.v) {
        Warning::RedSound
    } else {
        advice.warning
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{PathGeometry, KMH};

    fn corridor(lights: Vec<PhaseSchedule>) -> Scenario {
        Scenario::new("test", PathGeometry::straight(1500.0).unwrap(), lights).unwrap()
    }

    fn state(s: f64, v: f64, t: f64) -> VehicleState {
        VehicleState::on_path(&PathGeometry::straight(1500.0).unwrap(), s, v, t)
    }

    #[test]
    fn localize_examples() {
        let path = PathGeometry::straight(1500.0).unwrap();
        assert_eq!(localize(100.0, 0.0, &path, 10.0).unwrap(), 100.0);
        assert_eq!(localize(100.0, 3.0, &path, 10.0).unwrap(), 100.0);
        assert!(matches!(
            localize(100.0, 50.0, &path, 10.0),
            Err(AdvisorError::OffPath { .. })
        ));
    }

    #[test]
    fn activation_examples() {
        let lights: Vec<_> = [300.0, 650.0, 1000.0, 1350.0]
            .iter()
            .map(|&s| PhaseSchedule::new("tl", s, 75.0, 40.0, 0.0))
            .collect();
        let mut adv = Advisor::new(AdvisorConfig::default());
        assert_eq!(adv.activation_check(0.0, &lights, 500.0).len(), 4);
        assert_eq!(adv.activation_check(1360.0, &lights, 500.0).len(), 0);
        assert!(!adv.is_active());

        let far: Vec<_> = [600.0, 900.0]
            .iter()
            .map(|&s| PhaseSchedule::new("tl", s, 75.0, 40.0, 0.0))
            .collect();
        let mut adv = Advisor::new(AdvisorConfig::default());
        assert!(adv.activation_check(0.0, &far, 500.0).is_empty());
        assert_eq!(adv.activation_check(150.0, &far, 500.0).len(), 2);
    }

    #[test]
    fn latch_keeps_advisor_active_between_distant_lights() {
        let lights: Vec<_> = [300.0, 1400.0]
            .iter()
            .map(|&s| PhaseSchedule::new("tl", s, 75.0, 40.0, 0.0))
            .collect();
        let mut adv = Advisor::new(AdvisorConfig::default());
        assert_eq!(adv.activation_check(0.0, &lights, 500.0).len(), 2);
        // past the first light the next one is 1090 m away but the latch holds
        assert_eq!(adv.activation_check(310.0, &lights, 500.0).len(), 1);
    }

    #[test]
    fn keeps_speed_when_all_lights_pass() {
        let v = 40.0 * KMH;
        // every light is reached at constant speed 50 s into its current or next green
        let lights: Vec<_> = [300.0, 650.0, 1000.0, 1350.0]
            .iter()
            .map(|&s| {
                let arrival: f64 = s / v;
                let offset = (arrival - 50.0).rem_euclid(200.0);
                PhaseSchedule::new("tl", s, 200.0, 100.0, offset)
            })
            .collect();
        let sc = corridor(lights);
        let mut adv = Advisor::new(sc.advisor.clone());
        let a = adv.advise(&state(0.0, v, 0.0), &sc);
        assert_eq!(a.warning, Warning::None);
        assert_eq!(a.v_ref, v);
        assert_eq!(a.n_green, 4);
        assert_eq!(a.n_pass, 1);
        assert_eq!(a.kind, AdviceKind::Plan);
    }

    #[test]
    fn unreachable_first_green_stops() {
        let v = 40.0 * KMH;
        // red for the next 70 s, green for 5 s: nothing in [20, 50] km/h arrives
        let sc = corridor(vec![PhaseSchedule::new("tl", 300.0, 75.0, 5.0, 70.0)]);
        let mut adv = Advisor::new(sc.advisor.clone());
        let a = adv.advise(&state(0.0, v, 0.0), &sc);
        assert_eq!(a.kind, AdviceKind::FullStop);
        assert_eq!(a.warning, Warning::Red);
        assert_eq!(a.v_ref, 0.0);
        assert!((a.a_ref + v * v / 600.0).abs() < 1e-12);
        assert_eq!(a.n_green, 0);
    }

    #[test]
    fn speeds_up_for_closing_green() {
        let v = 40.0 * KMH;
        // light 1 at 300 m turns red after 25 s; cruising arrives at 27 s
        let sc = corridor(vec![PhaseSchedule::new("tl", 300.0, 75.0, 40.0, 60.0)]);
        let mut adv = Advisor::new(sc.advisor.clone());
        let a = adv.advise(&state(0.0, v, 0.0), &sc);
        assert_eq!(a.kind, AdviceKind::Plan);
        assert_eq!(a.warning, Warning::Green);
        assert!(a.v_ref > v && a.v_ref <= sc.limits.v_max_road + 1e-9);
        let plan = a.plan.unwrap();
        let arrival = plan.time_to_cover(300.0).unwrap();
        assert!(arrival <= 25.0 - sc.advisor.window_margin + 1e-9);
    }

    #[test]
    fn advise_is_idempotent() {
        let sc = Scenario::milan_corridor();
        let mut adv = Advisor::new(sc.advisor.clone());
        let st = state(120.0, 11.0, 9.0);
        assert_eq!(adv.advise(&st, &sc), adv.advise(&st, &sc));
    }

    #[test]
    fn launch_when_stopped_at_green() {
        let sc = corridor(vec![PhaseSchedule::new("tl", 300.0, 75.0, 40.0, 0.0)]);
        let mut adv = Advisor::new(sc.advisor.clone());
        let a = adv.advise(&state(299.8, 0.0, 1.0), &sc);
        assert_eq!(a.kind, AdviceKind::Launch);
        assert_eq!(a.warning, Warning::Green);
        assert_eq!(a.a_ref, sc.advisor.launch_accel);
    }

    #[test]
    fn too_close_to_stop_clears_the_line() {
        // green until 1.8 s; the margin-reduced window is out of reach
        let sc = corridor(vec![PhaseSchedule::new("a", 100.0, 75.0, 40.0, 36.8)]);
        let mut adv = Advisor::new(sc.advisor.clone());
        let out = adv.advise(&state(82.18, 13.3, 0.0), &sc);
        assert_eq!(out.kind, AdviceKind::Clear);
        assert_eq!(out.a_ref, 0.0);
        assert_eq!(out.warning, Warning::None);
        // far enough away to stop comfortably: no commitment
        let mut adv = Advisor::new(sc.advisor.clone());
        let out = adv.advise(&state(20.0, 13.3, 0.0), &sc);
        assert_eq!(out.kind, AdviceKind::FullStop);
    }

    #[test]
    fn escalate_examples() {
        let limits = RoadLimits::default();
        let v = 40.0 * KMH;
        let red = PhaseSchedule::new("tl", 300.0, 75.0, 40.0, 10.0);
        let advice = Advice {
            warning: Warning::Red,
            ..Advice::inactive(v, &limits)
        };
        assert_eq!(
            escalate(&advice, &state(280.0, v, 0.0), &red, &limits, 1.0),
            Warning::RedSound
        );
        assert_eq!(
            escalate(&advice, &state(100.0, v, 0.0), &red, &limits, 1.0),
            Warning::Red
        );
        let green_advice = Advice {
            warning: Warning::Green,
            ..advice.clone()
        };
        let green = PhaseSchedule::new("tl", 300.0, 75.0, 40.0, 0.0);
        assert_eq!(
            escalate(&green_advice, &state(280.0, v, 0.0), &green, &limits, 1.0),
            Warning::Green
        );
    }
}
