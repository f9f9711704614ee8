//! Closed-form motion profiles used to build admissible speed ranges.
//!
//! Two profile families are used. A uniformly accelerated leg (UAM) reaches the
//! first stop line at speed `v_t`; for lights further down the road the profile
//! continues at constant speed `v_t` (UAM+CSM). Both families are parametrised
//! by the same `v_t`, so admissible ranges for different lights can be
//! intersected directly.

use thiserror::Error;

use crate::scenario::{Color, RoadLimits, Shift};

/// Absolute tolerance for closed-form/integration comparisons (m, m/s).
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("infeasible profile: {0}")]
    Infeasible(&'static str),
    #[error("degenerate profile: initial and target speed are both zero")]
    Degenerate,
}

/// A UAM leg of duration `t1` followed by constant speed until `t_tot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSolution {
    /// Speed at the start of the maneuver.
    pub v0: f64,
    pub a: f64,
    pub v_t: f64,
    pub t1: f64,
    pub t_tot: f64,
    pub d1: f64,
    pub d2: f64,
}

impl MotionSolution {
    /// Constant speed `v` over distance `d`.
    pub fn constant(v: f64, d: f64) -> Self {
        let t = if v > 0.0 { d / v } else { f64::INFINITY };
        MotionSolution {
            v0: v,
            a: 0.0,
            v_t: v,
            t1: t,
            t_tot: t,
            d1: d,
            d2: 0.0,
        }
    }

    pub fn accel_at(&self, t: f64) -> f64 {
        if t < self.t1 {
            self.a
        } else {
            0.0
        }
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        if t < self.t1 {
            self.v0 + self.a * t
        } else {
            self.v_t
        }
    }

    /// Distance covered after `t`; constant `v_t` is held past the end of the leg.
    pub fn distance_at(&self, t: f64) -> f64 {
        if t < self.t1 {
            self.v0 * t + 0.5 * self.a * t * t
        } else {
            self.d1 + self.v_t * (t - self.t1)
        }
    }

    /// Time needed to cover distance `d`, if it is ever reached.
    pub fn time_to_cover(&self, d: f64) -> Option<f64> {
        if d <= 0.0 {
            return Some(0.0);
        }
        if d <= self.d1 {
            let disc = self.v0 * self.v0 + 2.0 * self.a * d;
            // profiles ending at zero speed on the line give disc = 0 up to rounding
            if disc < -1e-9 * (1.0 + self.v0 * self.v0) {
                return None;
            }
            let denom = self.v0 + disc.max(0.0).sqrt();
            if denom <= 0.0 {
                return None;
            }
            Some(2.0 * d / denom)
        } else if self.v_t > 0.0 {
            Some(self.t1 + (d - self.d1) / self.v_t)
        } else {
            None
        }
    }
}

/// UAM covering `d` in exactly `t`.
pub fn uam_fixed_time(v: f64, d: f64, t: f64) -> Result<MotionSolution, KinematicsError> {
    if !(v >= 0.0 && d > 0.0 && t > 0.0) {
        return Err(KinematicsError::InvalidInput("need v >= 0, d > 0, t > 0"));
    }
    let a = 2.0 * (d - v * t) / (t * t);
    let mut v_t = v + a * t;
    if v_t < -TOLERANCE * 1e-3 {
        return Err(KinematicsError::Infeasible(
            "speed would reach zero before covering the distance",
        ));
    }
    v_t = v_t.max(0.0);
    Ok(MotionSolution {
        v0: v,
        a,
        v_t,
        t1: t,
        t_tot: t,
        d1: d,
        d2: 0.0,
    })
}

/// UAM covering `d` while changing speed from `v` to `v_t`.
pub fn uam_fixed_target(v: f64, d: f64, v_t: f64) -> Result<MotionSolution, KinematicsError> {
    if !(v >= 0.0 && d > 0.0 && v_t >= 0.0) {
        return Err(KinematicsError::InvalidInput(
            "need v >= 0, d > 0, v_t >= 0",
        ));
    }
    if v + v_t <= 0.0 {
        return Err(KinematicsError::Degenerate);
    }
    let a = (v_t * v_t - v * v) / (2.0 * d);
    let t1 = 2.0 * d / (v + v_t);
    Ok(MotionSolution {
        v0: v,
        a,
        v_t,
        t1,
        t_tot: t1,
        d1: d,
        d2: 0.0,
    })
}

/// UAM over `l1`, then constant speed until `li`, arriving after exactly `t_tot`.
///
/// `v_t` is the positive root of
/// `t_tot·v_t² + (t_tot·v − l1 − li)·v_t − (li − l1)·v = 0`; the other root is
/// never positive. `speed_cap` rejects solutions above a plausibility bound.
pub fn uam_csm_fixed_total_time(
    v: f64,
    l1: f64,
    li: f64,
    t_tot: f64,
    speed_cap: Option<f64>,
) -> Result<MotionSolution, KinematicsError> {
    if !(v >= 0.0 && l1 > 0.0 && li > l1 && t_tot > 0.0) {
        return Err(KinematicsError::InvalidInput(
            "need v >= 0, 0 < l1 < li, t_tot > 0",
        ));
    }
    let d2 = li - l1;
    let b = li + l1 - t_tot * v;
    let root = (b * b + 4.0 * t_tot * v * d2).sqrt();
    // (b ± root) / (2 t_tot), written to avoid cancellation
    let (plus, minus) = if b >= 0.0 {
        let plus = (b + root) / (2.0 * t_tot);
        let minus = if plus > 0.0 {
            -d2 * v / (t_tot * plus)
        } else {
            0.0
        };
        (plus, minus)
    } else {
        let minus = (b - root) / (2.0 * t_tot);
        (2.0 * d2 * v / (root - b), minus)
    };
    debug_assert!(minus <= 0.0, "negative root must not be a physical speed");
    let v_t = plus;
    if !(v_t > 0.0) {
        return Err(KinematicsError::Infeasible("no positive target speed"));
    }
    if let Some(cap) = speed_cap {
        if v_t > cap {
            return Err(KinematicsError::Infeasible("target speed above the cap"));
        }
    }
    let t1 = t_tot - d2 / v_t;
    if !(t1 > 0.0) {
        return Err(KinematicsError::Infeasible(
            "constant-speed leg alone exceeds the total time",
        ));
    }
    let a = 2.0 * l1 / (t1 * t1) - 2.0 * v / t1;
    Ok(MotionSolution {
        v0: v,
        a,
        v_t,
        t1,
        t_tot,
        d1: l1,
        d2,
    })
}

/// UAM over `l1` to speed `v_t`, then constant speed until `li`.
pub fn uam_csm_fixed_target(
    v: f64,
    l1: f64,
    li: f64,
    v_t: f64,
) -> Result<MotionSolution, KinematicsError> {
    if !(li > l1) {
        return Err(KinematicsError::InvalidInput("need 0 < l1 < li"));
    }
    if !(v_t > 0.0) {
        return Err(KinematicsError::InvalidInput("need v_t > 0"));
    }
    let leg = uam_fixed_target(v, l1, v_t)?;
    let d2 = li - l1;
    Ok(MotionSolution {
        t_tot: leg.t1 + d2 / v_t,
        d2,
        ..leg
    })
}

/// One end of a [`VelocityInterval`] with the profile that realises it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub speed: f64,
    pub solution: Option<MotionSolution>,
}

impl Endpoint {
    pub fn bare(speed: f64) -> Self {
        Endpoint {
            speed,
            solution: None,
        }
    }

    fn solved(solution: MotionSolution) -> Self {
        Endpoint {
            speed: solution.v_t,
            solution: Some(solution),
        }
    }
}

/// Closed interval of target speeds, or empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityInterval {
    Empty,
    Range { min: Endpoint, max: Endpoint },
}

impl VelocityInterval {
    pub fn new(min: Endpoint, max: Endpoint) -> Self {
        if min.speed <= max.speed {
            VelocityInterval::Range { min, max }
        } else {
            VelocityInterval::Empty
        }
    }

    pub fn from_speeds(min: f64, max: f64) -> Self {
        VelocityInterval::new(Endpoint::bare(min), Endpoint::bare(max))
    }

    /// `[v_min_road, v_max_road]`.
    pub fn road(limits: &RoadLimits) -> Self {
        VelocityInterval::from_speeds(limits.v_min_road, limits.v_max_road)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VelocityInterval::Empty)
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            VelocityInterval::Empty => None,
            VelocityInterval::Range { min, max } => Some((min.speed, max.speed)),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.bounds().is_some_and(|(lo, hi)| lo <= v && v <= hi)
    }

    pub fn intersect(&self, other: &VelocityInterval) -> VelocityInterval {
        match (self, other) {
            (
                VelocityInterval::Range {
                    min: a_lo,
                    max: a_hi,
                },
                VelocityInterval::Range {
                    min: b_lo,
                    max: b_hi,
                },
            ) => {
                let lo = if a_lo.speed >= b_lo.speed { a_lo } else { b_lo };
                let hi = if a_hi.speed <= b_hi.speed { a_hi } else { b_hi };
                VelocityInterval::new(*lo, *hi)
            }
            _ => VelocityInterval::Empty,
        }
    }

    /// Endpoint nearest to `v`; ties go to the lower end.
    pub fn closest_endpoint(&self, v: f64) -> Option<Endpoint> {
        match self {
            VelocityInterval::Empty => None,
            VelocityInterval::Range { min, max } => {
                if (v - min.speed).abs() <= (max.speed - v).abs() {
                    Some(*min)
                } else {
                    Some(*max)
                }
            }
        }
    }
}

/// Inputs of [`velocity_range`] for one light and one green phase.
#[derive(Debug, Clone, Copy)]
pub struct RangeQuery<'a> {
    /// 1-based position of the light among those analysed.
    pub light_index: usize,
    /// 1 for the current/next green, 2 for the one after (green lights only).
    pub green_phase: u8,
    pub color: Color,
    /// Current speed, m/s.
    pub speed: f64,
    /// Distance to the first light ahead, m.
    pub dist_first: f64,
    /// Distance to the light under analysis, m.
    pub dist_light: f64,
    /// Upcoming shifts of the light under analysis, from `next_shifts`.
    pub shifts: &'a [Shift],
}

impl RangeQuery<'_> {
    /// Arrival window `[earliest, latest]` in seconds from now, or `None`.
    fn window(&self) -> Option<(f64, f64)> {
        let at = |k: usize| self.shifts.get(k).map(|s| s.after);
        match (self.color, self.green_phase) {
            (Color::Green, 1) => Some((0.0, at(0)?)),
            (Color::Green, 2) => Some((at(1)?, at(2)?)),
            (Color::Red, 1) => Some((at(0)?, at(1)?)),
            _ => None,
        }
    }

    fn solve_time(&self, t: f64) -> Result<MotionSolution, KinematicsError> {
        if self.light_index == 1 {
            uam_fixed_time(self.speed, self.dist_first, t)
        } else {
            uam_csm_fixed_total_time(self.speed, self.dist_first, self.dist_light, t, None)
        }
    }

    fn solve_target(&self, v_t: f64) -> Result<MotionSolution, KinematicsError> {
        if self.light_index == 1 {
            uam_fixed_target(self.speed, self.dist_first, v_t)
        } else {
            uam_csm_fixed_target(self.speed, self.dist_first, self.dist_light, v_t)
        }
    }
}

/// Target speeds that reach the light inside the requested green window.
///
/// The window is shrunk by `margin` seconds on each side that is bounded by a
/// phase shift. The fastest profile is capped at the road limit. When even the
/// latest arrival cannot be matched without the UAM leg reaching zero speed
/// (first light only), every non-negative target arrives in time and the lower
/// end becomes the profile that reaches the line at zero speed.
pub fn velocity_range(
    query: &RangeQuery<'_>,
    limits: &RoadLimits,
    margin: f64,
) -> VelocityInterval {
    if query.light_index == 0
        || !(query.dist_first > 0.0)
        || (query.light_index > 1 && !(query.dist_light > query.dist_first))
    {
        return VelocityInterval::Empty;
    }
    let Some((open, close)) = query.window() else {
        return VelocityInterval::Empty;
    };
    let earliest = if open > 0.0 { open + margin } else { 0.0 };
    let latest = close - margin;
    if !(latest > earliest) || latest <= 0.0 {
        return VelocityInterval::Empty;
    }

    // Slowest admissible target: arrive exactly at the end of the window.
    let min = match query.solve_time(latest) {
        Ok(sol) => Endpoint::solved(sol),
        Err(KinematicsError::Infeasible(_)) if query.light_index == 1 => {
            match uam_fixed_target(query.speed, query.dist_first, 0.0) {
                Ok(sol) => Endpoint::solved(sol),
                Err(_) => return VelocityInterval::Empty,
            }
        }
        Err(_) => return VelocityInterval::Empty,
    };

    // Fastest admissible target: arrive at the start of the window, or at the
    // road limit if that is slower.
    let fastest = if earliest > 0.0 {
        match query.solve_time(earliest) {
            Ok(sol) => Some(sol),
            // for the UAM+CSM family the window opens too early for any finite speed
            Err(KinematicsError::Infeasible(_)) if query.light_index > 1 => None,
            Err(_) => return VelocityInterval::Empty,
        }
    } else {
        None
    };
    let max = match fastest {
        Some(sol) if sol.v_t <= limits.v_max_road => Endpoint::solved(sol),
        _ => match query.solve_target(limits.v_max_road) {
            Ok(sol) => Endpoint::solved(sol),
            Err(_) => return VelocityInterval::Empty,
        },
    };
    VelocityInterval::new(min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::PhaseSchedule;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Distance covered by the piecewise profile, integrated with small steps.
    fn integrate(sol: &MotionSolution, t_end: f64) -> f64 {
        let n = 20_000;
        let h = t_end / n as f64;
        let mut d = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            d += sol.speed_at(t) * h;
        }
        d
    }

    #[test]
    fn fixed_time_examples() {
        let s = uam_fixed_time(10.0, 100.0, 10.0).unwrap();
        assert!(close(s.a, 0.0, 1e-12) && close(s.v_t, 10.0, 1e-12));

        let s = uam_fixed_time(10.0, 100.0, 5.0).unwrap();
        assert!(close(s.a, 4.0, 1e-12) && close(s.v_t, 30.0, 1e-12));
        assert!(close(integrate(&s, 5.0), 100.0, 1e-6));

        let s = uam_fixed_time(20.0, 100.0, 10.0).unwrap();
        assert!(close(s.a, -2.0, 1e-12) && close(s.v_t, 0.0, 1e-12));
        assert!(close(integrate(&s, 10.0), 100.0, 1e-6));

        assert!(matches!(
            uam_fixed_time(20.0, 100.0, 12.0),
            Err(KinematicsError::Infeasible(_))
        ));
    }

    #[test]
    fn fixed_target_examples() {
        let s = uam_fixed_target(10.0, 100.0, 10.0).unwrap();
        assert!(close(s.a, 0.0, 1e-12) && close(s.t1, 10.0, 1e-12));

        let s = uam_fixed_target(40.0 / 3.6, 100.0, 50.0 / 3.6).unwrap();
        assert!(close(s.a, 0.347222, 1e-6));
        assert!(close(s.t1, 8.0, 1e-9));

        let s = uam_fixed_target(20.0, 100.0, 10.0).unwrap();
        assert!(close(s.a, -1.5, 1e-12));
        assert!(close(s.t1, 20.0 / 3.0, 1e-12));

        assert_eq!(
            uam_fixed_target(0.0, 100.0, 0.0),
            Err(KinematicsError::Degenerate)
        );
    }

    #[test]
    fn total_time_examples() {
        let s = uam_csm_fixed_total_time(10.0, 50.0, 100.0, 10.0, None).unwrap();
        assert!(close(s.v_t, 10.0, 1e-12) && close(s.a, 0.0, 1e-12) && close(s.t1, 5.0, 1e-12));

        let s = uam_csm_fixed_total_time(10.0, 100.0, 200.0, 15.0, None).unwrap();
        assert!(close(s.v_t, 14.574, 1e-3), "{}", s.v_t);
        assert!(close(s.t1, 8.138, 1e-3), "{}", s.t1);
        assert!(close(s.a, 0.562, 1e-3), "{}", s.a);
        assert!(close(integrate(&s, s.t1), 100.0, 1e-6));
        assert!(close(integrate(&s, 15.0), 200.0, 1e-6));

        // the positive root always leaves t1 > 0; what rules this case out is
        // that covering the 100 m constant-speed leg in 5 s needs v_t > 20 m/s
        let fast = uam_csm_fixed_total_time(10.0, 100.0, 200.0, 5.0, None).unwrap();
        assert!(fast.t1 > 0.0 && fast.v_t > 20.0);
        assert!(matches!(
            uam_csm_fixed_total_time(10.0, 100.0, 200.0, 5.0, Some(50.0 / 3.6)),
            Err(KinematicsError::Infeasible(_))
        ));
        assert!(uam_csm_fixed_total_time(10.0, 100.0, 200.0, 15.0, Some(14.0)).is_err());
    }

    #[test]
    fn fixed_target_with_cruise_examples() {
        let s = uam_csm_fixed_target(40.0 / 3.6, 100.0, 300.0, 50.0 / 3.6).unwrap();
        assert!(close(s.t1, 8.0, 1e-9) && close(s.t_tot, 22.4, 1e-9));

        let v = 50.0 / 3.6;
        let s = uam_csm_fixed_target(v, 100.0, 300.0, v).unwrap();
        assert!(close(s.a, 0.0, 1e-12) && close(s.t_tot, 21.6, 1e-9));

        let s = uam_csm_fixed_target(5.0, 50.0, 100.0, 10.0).unwrap();
        assert!(close(s.t1, 20.0 / 3.0, 1e-9) && close(s.t_tot, 35.0 / 3.0, 1e-9));
        assert!(close(integrate(&s, s.t_tot), 100.0, 1e-6));
    }

    #[test]
    fn interval_examples() {
        let a = VelocityInterval::from_speeds(5.0, 10.0);
        assert_eq!(
            a.intersect(&VelocityInterval::from_speeds(8.0, 12.0))
                .bounds(),
            Some((8.0, 10.0))
        );
        assert!(a
            .intersect(&VelocityInterval::from_speeds(11.0, 12.0))
            .is_empty());
        assert!(a.intersect(&VelocityInterval::Empty).is_empty());
        assert_eq!(a.closest_endpoint(4.0).unwrap().speed, 5.0);
        assert_eq!(a.closest_endpoint(11.0).unwrap().speed, 10.0);
    }

    fn limits() -> RoadLimits {
        RoadLimits::default()
    }

    /// Target speeds on a fine grid whose profile reaches the light inside the
    /// window `[open, close]`.
    fn grid_oracle(v: f64, l1: f64, li: f64, open: f64, close_t: f64) -> Option<(f64, f64)> {
        let mut lo = None;
        let mut hi = None;
        let n = 200_000;
        for k in 0..=n {
            let vt = limits().v_max_road * k as f64 / n as f64;
            if v + vt <= 0.0 {
                continue;
            }
            let t1 = 2.0 * l1 / (v + vt);
            let arrival = if li > l1 { t1 + (li - l1) / vt } else { t1 };
            if arrival >= open && arrival <= close_t {
                lo.get_or_insert(vt);
                hi = Some(vt);
            }
        }
        lo.zip(hi)
    }

    #[test]
    fn range_first_light_green_matches_oracle() {
        let v = 40.0 / 3.6;
        let sched = PhaseSchedule::new("tl", 100.0, 75.0, 40.0, 0.0);
        let shifts = sched.next_shifts(20.0, 3); // 20 s of green left
        let q = RangeQuery {
            light_index: 1,
            green_phase: 1,
            color: Color::Green,
            speed: v,
            dist_first: 100.0,
            dist_light: 100.0,
            shifts: &shifts,
        };
        let (lo, hi) = velocity_range(&q, &limits(), 0.0).bounds().unwrap();
        let (olo, ohi) = grid_oracle(v, 100.0, 100.0, 0.0, 20.0).unwrap();
        assert!(
            close(lo, olo, 1e-3) && close(hi, ohi, 1e-3),
            "{lo} {hi} vs {olo} {ohi}"
        );
        assert!(close(hi, 50.0 / 3.6, 1e-9));
    }

    #[test]
    fn range_first_light_red_matches_oracle() {
        let v = 40.0 / 3.6;
        let sched = PhaseSchedule::new("tl", 100.0, 75.0, 40.0, 5.0);
        let shifts = sched.next_shifts(0.0, 3); // green in 5 s, until 45 s
        assert_eq!(shifts[0].color, Color::Green);
        let q = RangeQuery {
            light_index: 1,
            green_phase: 1,
            color: Color::Red,
            speed: v,
            dist_first: 100.0,
            dist_light: 100.0,
            shifts: &shifts,
        };
        let (lo, hi) = velocity_range(&q, &limits(), 0.0).bounds().unwrap();
        let (olo, ohi) = grid_oracle(v, 100.0, 100.0, 5.0, 45.0).unwrap();
        assert!(
            close(lo, olo, 1e-3) && close(hi, ohi, 1e-3),
            "{lo} {hi} vs {olo} {ohi}"
        );
    }

    #[test]
    fn range_unreachable_green_is_empty() {
        let sched = PhaseSchedule::new("tl", 100.0, 75.0, 40.0, 0.0);
        let shifts = sched.next_shifts(38.0, 3); // 2 s of green left
        let q = RangeQuery {
            light_index: 1,
            green_phase: 1,
            color: Color::Green,
            speed: 5.0,
            dist_first: 100.0,
            dist_light: 100.0,
            shifts: &shifts,
        };
        assert!(velocity_range(&q, &limits(), 0.0).is_empty());
        assert!(grid_oracle(5.0, 100.0, 100.0, 0.0, 2.0).is_none());
    }

    #[test]
    fn range_later_light_matches_oracle() {
        let v = 40.0 / 3.6;
        // light 350 m beyond the first one, red for 12 s, then green for 40 s
        let sched = PhaseSchedule::new("tl", 450.0, 75.0, 40.0, 12.0);
        let shifts = sched.next_shifts(0.0, 3);
        let q = RangeQuery {
            light_index: 2,
            green_phase: 1,
            color: Color::Red,
            speed: v,
            dist_first: 100.0,
            dist_light: 450.0,
            shifts: &shifts,
        };
        let (lo, hi) = velocity_range(&q, &limits(), 0.0).bounds().unwrap();
        let (olo, ohi) = grid_oracle(v, 100.0, 450.0, 12.0, 52.0).unwrap();
        assert!(
            close(lo, olo, 1e-3) && close(hi, ohi, 1e-3),
            "{lo} {hi} vs {olo} {ohi}"
        );

        // second green of a green light
        let sched = PhaseSchedule::new("tl", 450.0, 75.0, 40.0, 0.0);
        let shifts = sched.next_shifts(30.0, 3); // red at +10, green at +45, red at +85
        let q = RangeQuery {
            color: Color::Green,
            green_phase: 2,
            shifts: &shifts,
            ..q
        };
        let (lo, hi) = velocity_range(&q, &limits(), 0.0).bounds().unwrap();
        let (olo, ohi) = grid_oracle(v, 100.0, 450.0, 45.0, 85.0).unwrap();
        assert!(
            close(lo, olo, 1e-3) && close(hi, ohi, 1e-3),
            "{lo} {hi} vs {olo} {ohi}"
        );
    }

    #[test]
    fn margin_shrinks_window() {
        let v = 10.0;
        let sched = PhaseSchedule::new("tl", 200.0, 75.0, 40.0, 0.0);
        let shifts = sched.next_shifts(0.0, 3);
        let q = RangeQuery {
            light_index: 1,
            green_phase: 1,
            color: Color::Green,
            speed: v,
            dist_first: 200.0,
            dist_light: 200.0,
            shifts: &shifts,
        };
        let (lo0, _) = velocity_range(&q, &limits(), 0.0).bounds().unwrap();
        let (lo1, _) = velocity_range(&q, &limits(), 1.0).bounds().unwrap();
        assert!(lo1 > lo0);
        let sol = uam_fixed_time(v, 200.0, 39.0).unwrap();
        assert!(close(lo1, sol.v_t, 1e-12));
    }
}
