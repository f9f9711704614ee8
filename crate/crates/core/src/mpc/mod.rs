//! Optimal advisor: smooths the advisor's reference with a receding-horizon
//! jerk-penalising controller.

pub mod bounds;
pub mod ocp;
pub mod qp;

pub use bounds::{position_bounds, BoundsError, PositionBounds};
pub use ocp::{
    grid_bounds, max_violation, objective, rollout, solve_ocp, InitialState, OcpSolution,
    OcpStatus, Reference, Trajectory,
};

use crate::advisor::{classify, Advice, VehicleState};
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq)]
pub struct OcpConfig {
    /// Prediction horizon, s.
    pub horizon: f64,
    pub steps: usize,
    pub w_v: f64,
    pub w_a: f64,
    pub w_j: f64,
    /// Constraint tolerance of the inner QP.
    pub tolerance: f64,
    /// Inner QP iteration cap.
    pub max_iterations: usize,
    /// Drag relinearisation cap.
    pub max_sqp_iterations: usize,
}

impl Default for OcpConfig {
    fn default() -> Self {
        OcpConfig {
            horizon: 6.0,
            steps: 30,
            w_v: 1.0,
            w_a: 1.0,
            w_j: 10.0,
            tolerance: 1e-7,
            max_iterations: 500,
            max_sqp_iterations: 10,
        }
    }
}

impl OcpConfig {
    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        use crate::scenario::ScenarioError as E;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(E::invalid("mpc.horizon_s", "must be positive"));
        }
        if self.steps < 10 {
            return Err(E::invalid("mpc.steps", "must be at least 10"));
        }
        for (name, w) in [("mpc.w_v", self.w_v), ("mpc.w_a", self.w_a)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(E::invalid(name, "must be non-negative"));
            }
        }
        if !(self.w_j.is_finite() && self.w_j > 0.0) {
            return Err(E::invalid("mpc.w_j", "must be positive"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(E::invalid("mpc.tolerance", "must be positive"));
        }
        if self.max_iterations == 0 || self.max_sqp_iterations == 0 {
            return Err(E::invalid("mpc.max_iterations", "must be positive"));
        }
        Ok(())
    }
}

/// One controller per vehicle. Keeps the last plan for warm starts and for
/// following it between re-solves.
#[derive(Debug, Clone)]
pub struct OptimalAdvisor {
    config: OcpConfig,
    last: Option<(f64, OcpSolution)>,
    region: Option<PositionBounds>,
    fallbacks: usize,
}

impl OptimalAdvisor {
    pub fn new(config: OcpConfig) -> Self {
        OptimalAdvisor {
            config,
            last: None,
            region: None,
            fallbacks: 0,
        }
    }

    pub fn config(&self) -> &OcpConfig {
        &self.config
    }

    /// Latest accepted plan and the time it was computed.
    pub fn plan(&self) -> Option<(f64, &OcpSolution)> {
        self.last.as_ref().map(|(t, p)| (*t, p))
    }

    /// Region the latest plan was solved in, relative to its start time.
    pub fn region(&self) -> Option<&PositionBounds> {
        self.region.as_ref()
    }

    /// Number of solves that ended in a fallback to the base advice.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    pub fn reset(&mut self) {
        self.last = None;
        self.region = None;
    }

    /// Planned acceleration at absolute time `t`, if the current plan covers it.
    pub fn planned_accel(&self, t: f64) -> Option<f64> {
        let (t0, plan) = self.last.as_ref()?;
        let tau = t - t0;
        (tau >= 0.0 && tau <= self.config.horizon).then(|| plan.accel_at(tau))
    }

    fn warm_start(&self, t: f64) -> Option<Vec<f64>> {
        let (t0, plan) = self.last.as_ref()?;
        let shift = ((t - t0) / plan.dt).round();
        if shift < 0.0 || shift as usize >= plan.j.len() {
            return None;
        }
        let shift = shift as usize;
        let last = *plan.j.last()?;
        let mut u: Vec<f64> = plan.j[shift..].to_vec();
        u.resize(plan.j.len(), last);
        Some(u)
    }

    /// Solves the tracking problem for `base` and returns advice built from the
    /// optimal plan: `a_ref` is the planned acceleration one grid step ahead,
    /// `v_ref` the speed at the end of the horizon. If the region or the
    /// problem is infeasible, `base` comes back with `mpc_fallback` set.
    pub fn optimal_advise(
        &mut self,
        state: &VehicleState,
        a0: f64,
        scenario: &Scenario,
        base: &Advice,
    ) -> Advice {
        let cfg = &self.config;
        let fallback = |me: &mut Self| {
            me.reset();
            me.fallbacks += 1;
            Advice {
                mpc_fallback: true,
                ..base.clone()
            }
        };
        let region =
            match position_bounds(scenario.lights_ahead(state.s), state.t, cfg.horizon, base) {
                Ok(region) => region,
                Err(err) => {
                    log::debug!("t={:.2}: {err}", state.t);
                    return fallback(self);
                }
            };
        let reference = Reference::from_advice(base, state.v, cfg.dt(), cfg.steps);
        let init = InitialState {
            s: state.s,
            v: state.v,
            a: a0,
        };
        let warm = self.warm_start(state.t);
        let sol = solve_ocp(
            init,
            &reference,
            &region,
            &scenario.vehicle,
            cfg,
            warm.as_deref(),
        );
        if !sol.is_optimal() {
            log::debug!("t={:.2}: optimal control {:?}", state.t, sol.status);
            return fallback(self);
        }
        let a_ref = sol.a[1];
        let v_ref = sol.v[sol.steps()];
        let warning = classify(v_ref, state.v, scenario.advisor.dead_band);
        self.last = Some((state.t, sol));
        self.region = Some(region);
        Advice {
            warning,
            v_ref,
            a_ref,
            mpc_fallback: false,
            ..base.clone()
        }
    }
}
