//! Time–space admissible region derived from the next two lights.

use thiserror::Error;

use crate::advisor::Advice;
use crate::scenario::{Color, PhaseSchedule};
use crate::sim::STOP_GAP;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(
        "admissible region is empty on [{from:.3}, {to:.3}) s: s_min {s_min:.3} > s_max {s_max:.3}"
    )]
    Empty {
        from: f64,
        to: f64,
        s_min: f64,
        s_max: f64,
    },
}

/// Piecewise-constant bounds on the abscissa over `[0, horizon]`.
///
/// Interval `k` covers `[breakpoints[k], breakpoints[k + 1])`; the last one
/// runs to the horizon. Unbounded sides are `±∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionBounds {
    breakpoints: Vec<f64>,
    s_min: Vec<f64>,
    s_max: Vec<f64>,
    horizon: f64,
}

impl PositionBounds {
    pub fn free(horizon: f64) -> Self {
        PositionBounds {
            breakpoints: vec![0.0],
            s_min: vec![f64::NEG_INFINITY],
            s_max: vec![f64::INFINITY],
            horizon,
        }
    }

    /// `bound` applies as an upper limit (`upper = true`) or lower limit on
    /// `[from, horizon]`; before `from` the region is free. `from <= 0` applies it
    /// everywhere.
    pub fn from_time(horizon: f64, from: f64, bound: f64, upper: bool) -> Self {
        let (lo, hi) = if upper {
            (f64::NEG_INFINITY, bound)
        } else {
            (bound, f64::INFINITY)
        };
        if from <= 0.0 {
            return PositionBounds {
                breakpoints: vec![0.0],
                s_min: vec![lo],
                s_max: vec![hi],
                horizon,
            };
        }
        PositionBounds {
            breakpoints: vec![0.0, from],
            s_min: vec![f64::NEG_INFINITY, lo],
            s_max: vec![f64::INFINITY, hi],
            horizon,
        }
    }

    /// `s <= bound` on `[0, until)`, free afterwards.
    pub fn upper_until(horizon: f64, until: f64, bound: f64) -> Self {
        if until >= horizon {
            return PositionBounds {
                breakpoints: vec![0.0],
                s_min: vec![f64::NEG_INFINITY],
                s_max: vec![bound],
                horizon,
            };
        }
        PositionBounds {
            breakpoints: vec![0.0, until],
            s_min: vec![f64::NEG_INFINITY; 2],
            s_max: vec![bound, f64::INFINITY],
            horizon,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn intervals(&self) -> usize {
        self.breakpoints.len()
    }

    fn end_of(&self, k: usize) -> f64 {
        self.breakpoints
            .get(k + 1)
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    /// Bounds in force at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let k = self
            .breakpoints
            .partition_point(|&b| b <= t)
            .saturating_sub(1);
        (self.s_min[k], self.s_max[k])
    }

    pub fn intersect(&self, other: &PositionBounds) -> Result<PositionBounds, BoundsError> {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.dedup();
        let mut out = PositionBounds {
            breakpoints: Vec::new(),
            s_min: Vec::new(),
            s_max: Vec::new(),
            horizon: self.horizon.min(other.horizon),
        };
        for (k, &from) in cuts.iter().enumerate() {
            let (a_lo, a_hi) = self.at(from);
            let (b_lo, b_hi) = other.at(from);
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if lo > hi {
                return Err(BoundsError::Empty {
                    from,
                    to: cuts.get(k + 1).copied().unwrap_or(out.horizon),
                    s_min: lo,
                    s_max: hi,
                });
            }
            // merge equal neighbours so the representation stays minimal
            if out.s_min.last() == Some(&lo) && out.s_max.last() == Some(&hi) {
                continue;
            }
            out.breakpoints.push(from);
            out.s_min.push(lo);
            out.s_max.push(hi);
        }
        Ok(out)
    }

    /// Bounds to impose at grid point `k` of a uniform grid with step `dt`.
    ///
    /// The upper bound is the tightest one in force on `(t_{k-1}, t_k]` and the
    /// lower bound the tightest on `[t_k, t_{k+1})`. Because the abscissa never
    /// decreases, satisfying them at the grid points keeps the continuous
    /// trajectory inside the region between grid points too.
    pub fn at_grid(&self, k: usize, dt: f64) -> (f64, f64) {
        let t = k as f64 * dt;
        let prev = t - dt;
        let next = t + dt;
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..self.breakpoints.len() {
            let (start, end) = (self.breakpoints[i], self.end_of(i));
            let touches_before = if k == 0 {
                start <= t && end > t
            } else {
                start <= t && end > prev
            };
            if touches_before {
                hi = hi.min(self.s_max[i]);
            }
            if start < next && end > t {
                lo = lo.max(self.s_min[i]);
            }
        }
        (lo, hi)
    }
}

/// Region for the next (at most two) lights.
///
/// Red light: stay `STOP_GAP` short of the stop line for the whole horizon if it turns green
/// after the horizon, otherwise until it turns green. Green light: free if it
/// turns red after the horizon; otherwise the vehicle must be past the line at
/// the shift, unless the plan does not pass this light on its current green
/// (`n_green < i` or a later green phase), in which case it must stay
/// `STOP_GAP` short of the line after the shift.
pub fn position_bounds(
    lights_ahead: &[PhaseSchedule],
    t_now: f64,
    horizon: f64,
    advice: &Advice,
) -> Result<PositionBounds, BoundsError> {
    let mut region = PositionBounds::free(horizon);
    for (k, light) in lights_ahead.iter().take(2).enumerate() {
        let i = k + 1;
        let shift = light.next_shifts(t_now, 1)[0].after;
        let hold = light.stop_line - STOP_GAP;
        let single = match light.phase_at(t_now) {
            Color::Red => PositionBounds::upper_until(horizon, shift, hold),
            Color::Green if shift > horizon => PositionBounds::free(horizon),
            Color::Green => {
                let passes_now =
                    advice.n_green >= i && advice.green_phase_for(i).unwrap_or(advice.n_pass) == 1;
                if passes_now {
                    PositionBounds::from_time(horizon, shift, light.stop_line, false)
                } else {
                    PositionBounds::from_time(horizon, shift, hold, true)
                }
            }
        };
        region = region.intersect(&single)?;
    }
    Ok(region)
}
