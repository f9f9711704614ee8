//! Driver models: an unadvised driver and drivers following the advisors.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::plant::PlantState;
use crate::advisor::{escalate, Advice, AdviceKind, Advisor, VehicleState, Warning};
use crate::mpc::OptimalAdvisor;
use crate::scenario::{Color, Scenario};

/// Distance short of the stop line where stopping drivers aim, m.
pub const STOP_GAP: f64 = 0.5;
/// Deceleration used for the last centimetres of a stop, m/s².
const FINAL_STOP_DECEL: f64 = 3.0;
/// Gain of the speed-holding loop, 1/s.
const CRUISE_GAIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    Baseline,
    AdvisedNonoptimal,
    AdvisedOptimal,
}

impl DriverKind {
    pub const ALL: [DriverKind; 3] = [
        DriverKind::Baseline,
        DriverKind::AdvisedNonoptimal,
        DriverKind::AdvisedOptimal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DriverKind::Baseline => "baseline",
            DriverKind::AdvisedNonoptimal => "advised_nonoptimal",
            DriverKind::AdvisedOptimal => "advised_optimal",
        }
    }

    pub fn is_advised(self) -> bool {
        self != DriverKind::Baseline
    }
}

impl fmt::Display for DriverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownDriver(pub String);

impl fmt::Display for UnknownDriver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown driver kind '{}' (expected baseline, advised_nonoptimal or advised_optimal)",
            self.0
        )
    }
}

impl std::error::Error for UnknownDriver {}

impl FromStr for DriverKind {
    type Err = UnknownDriver;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DriverKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| UnknownDriver(s.to_string()))
    }
}

/// Constant deceleration that brings speed `v` to zero `STOP_GAP` before a
/// line `dist` metres ahead.
pub fn stop_accel(v: f64, dist: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let room = dist - STOP_GAP;
    if room > 0.05 {
        -v * v / (2.0 * room)
    } else {
        -FINAL_STOP_DECEL
    }
}

/// Proportional speed hold toward `v_cruise`, bounded by the launch
/// acceleration and the comfort deceleration.
pub fn cruise_accel(v: f64, v_cruise: f64, launch_accel: f64, d_comfort: f64) -> f64 {
    (CRUISE_GAIN * (v_cruise - v)).clamp(-d_comfort, launch_accel)
}

/// Cruises at the initial speed and reacts to lights only by stopping.
#[derive(Debug, Clone, Default)]
pub struct BaselineDriver {
    /// Stop line being braked for and whether it has been seen red since.
    braking: Option<(f64, bool)>,
}

impl BaselineDriver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn command(&mut self, st: &PlantState, sc: &Scenario) -> f64 {
        let cruise = || {
            cruise_accel(
                st.v,
                sc.sim.initial_speed,
                sc.sim.launch_accel,
                sc.limits.d_comfort,
            )
        };
        let Some(light) = sc.lights_ahead(st.s).first() else {
            self.braking = None;
            return cruise();
        };
        let dist = light.stop_line - st.s;
        let red_now = light.phase_at(st.t) == Color::Red;
        if let Some((line, seen_red)) = self.braking {
            if line == light.stop_line {
                let seen_red = seen_red || red_now;
                if seen_red && !red_now {
                    self.braking = None;
                    return cruise();
                }
                self.braking = Some((line, seen_red));
                return stop_accel(st.v, dist);
            }
            self.braking = None;
        }
        if st.v > 0.0 && dist - STOP_GAP <= sc.limits.comfort_stopping_distance(st.v) {
            let red_on_arrival = light.phase_at(st.t + dist / st.v) == Color::Red;
            if red_now || red_on_arrival {
                self.braking = Some((light.stop_line, red_now));
                return stop_accel(st.v, dist);
            }
        }
        cruise()
    }
}

/// Command of a driver that follows `advice` exactly.
pub fn follow_advice(advice: &Advice, st: &PlantState, sc: &Scenario) -> f64 {
    match advice.kind {
        AdviceKind::Inactive => cruise_accel(
            st.v,
            sc.sim.initial_speed,
            sc.sim.launch_accel,
            sc.limits.d_comfort,
        ),
        AdviceKind::FullStop => match sc.lights_ahead(st.s).first() {
            Some(light) => stop_accel(st.v, light.stop_line - st.s),
            None => 0.0,
        },
        AdviceKind::Launch | AdviceKind::Clear => advice.a_ref,
        AdviceKind::Plan if advice.warning == Warning::None => 0.0,
        AdviceKind::Plan => advice.a_ref,
    }
}

/// One simulated driver with whatever advisory state its kind needs.
#[derive(Debug, Clone)]
pub struct Driver {
    kind: DriverKind,
    baseline: BaselineDriver,
    advisor: Advisor,
    optimal: OptimalAdvisor,
    steps: usize,
    warning: Warning,
}

impl Driver {
    pub fn new(kind: DriverKind, sc: &Scenario) -> Self {
        Driver {
            kind,
            baseline: BaselineDriver::new(),
            advisor: Advisor::new(sc.advisor.clone()),
            optimal: OptimalAdvisor::new(sc.mpc.clone()),
            steps: 0,
            warning: Warning::None,
        }
    }

    pub fn kind(&self) -> DriverKind {
        self.kind
    }

    /// Solves that fell back to the non-optimal advice.
    pub fn mpc_fallbacks(&self) -> usize {
        self.optimal.fallbacks()
    }

    pub fn optimal(&self) -> &OptimalAdvisor {
        &self.optimal
    }

    /// Commanded acceleration and the warning shown to the driver.
    pub fn command(&mut self, st: &PlantState, sc: &Scenario) -> (f64, Warning) {
        let step = self.steps;
        self.steps += 1;
        if self.kind == DriverKind::Baseline {
            return (self.baseline.command(st, sc), Warning::None);
        }
        let vs = VehicleState::on_path(&sc.path, st.s, st.v, st.t);
        let base = self.advisor.advise(&vs, sc);
        let shown = |advice: &Advice| match sc.lights_ahead(st.s).first() {
            Some(first) => escalate(advice, &vs, first, &sc.limits, sc.advisor.urgency),
            None => advice.warning,
        };
        if self.kind == DriverKind::AdvisedNonoptimal || base.kind == AdviceKind::Inactive {
            self.optimal.reset();
            return (follow_advice(&base, st, sc), shown(&base));
        }
        let every = sc.sim.mpc_every.max(1);
        if step.is_multiple_of(every) || self.optimal.plan().is_none() {
            let advice = self.optimal.optimal_advise(&vs, st.a, sc, &base);
            self.warning = shown(&advice);
        }
        match self.optimal.planned_accel(st.t) {
            Some(a) => (a, self.warning),
            None => (follow_advice(&base, st, sc), shown(&base)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::VelocityInterval;
    use crate::scenario::{PathGeometry, PhaseSchedule, KMH};

    fn corridor(lights: Vec<PhaseSchedule>) -> Scenario {
        Scenario::new("t", PathGeometry::straight(1000.0).unwrap(), lights).unwrap()
    }

    fn at(t: f64, s: f64, v: f64) -> PlantState {
        PlantState { t, s, v, a: 0.0 }
    }

    #[test]
    fn kinds_round_trip() {
        for k in DriverKind::ALL {
            assert_eq!(k.as_str().parse::<DriverKind>().unwrap(), k);
        }
        assert!("driver1".parse::<DriverKind>().is_err());
    }

    #[test]
    fn baseline_holds_speed_through_green() {
        let sc = corridor(vec![PhaseSchedule::new("a", 300.0, 75.0, 40.0, 0.0)]);
        let mut d = BaselineDriver::new();
        let a = d.command(&at(0.0, 250.0, sc.sim.initial_speed), &sc);
        assert!(a.abs() < 1e-12);
    }

    #[test]
    fn baseline_brakes_for_red_at_comfort_distance() {
        // red for the next 20 s, 62 m ahead at 40 km/h
        let sc = corridor(vec![PhaseSchedule::new("a", 300.0, 75.0, 40.0, 20.0)]);
        let v = 40.0 * KMH;
        let mut d = BaselineDriver::new();
        let a = d.command(&at(0.0, 238.0, v), &sc);
        assert!((a + v * v / (2.0 * 62.0)).abs() < 0.01, "{a}");
        assert!((a + 1.0).abs() < 0.01);
        // farther out it keeps cruising
        let mut d = BaselineDriver::new();
        assert_eq!(d.command(&at(0.0, 200.0, v), &sc), 0.0);
    }

    #[test]
    fn baseline_holds_at_red_and_launches_on_green() {
        let sc = corridor(vec![PhaseSchedule::new("a", 300.0, 75.0, 40.0, 20.0)]);
        let mut d = BaselineDriver::new();
        let _ = d.command(&at(0.0, 240.0, 11.0), &sc);
        assert_eq!(d.command(&at(15.0, 299.5, 0.0), &sc), 0.0);
        let a = d.command(&at(20.0, 299.5, 0.0), &sc);
        assert_eq!(a, sc.sim.launch_accel);
    }

    #[test]
    fn advice_is_passed_through() {
        let sc = corridor(Vec::new());
        let advice = Advice {
            warning: Warning::Green,
            v_ref: 12.0,
            a_ref: 0.35,
            v_adm: VelocityInterval::Empty,
            n_green: 1,
            n_pass: 1,
            kind: AdviceKind::Plan,
            plan: None,
            lights: Vec::new(),
            mpc_fallback: false,
        };
        assert_eq!(follow_advice(&advice, &at(0.0, 0.0, 11.0), &sc), 0.35);
        let hold = Advice {
            warning: Warning::None,
            ..advice
        };
        assert_eq!(follow_advice(&hold, &at(0.0, 0.0, 11.0), &sc), 0.0);
    }

    #[test]
    fn stop_accel_reaches_gap() {
        let a = stop_accel(10.0, 50.5);
        assert!((a + 1.0).abs() < 1e-12);
        assert_eq!(stop_accel(0.0, 10.0), 0.0);
        assert_eq!(stop_accel(0.01, STOP_GAP), -FINAL_STOP_DECEL);
    }
}
