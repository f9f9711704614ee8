//! Jerk-penalising tracking problem over a receding horizon.
//!
//! Jerk is the only control and is held constant on each grid step, so the
//! states `(s, v, a)` are affine in the control vector. The drag term makes
//! the force constraints nonlinear; it is linearised around the previous
//! iterate and the resulting QP is re-solved until the speed profile settles.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::bounds::PositionBounds;
use super::qp::{solve_qp, QpProblem, QpStatus};
use super::OcpConfig;
use crate::advisor::Advice;
use crate::scenario::VehicleParams;

/// Speed-profile change (m/s) below which the drag linearisation is settled.
const SQP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub s: f64,
    pub v: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OcpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

/// Reference speed and acceleration at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

impl Reference {
    pub fn constant(v: f64, steps: usize) -> Self {
        Reference {
            v: vec![v; steps + 1],
            a: vec![0.0; steps + 1],
        }
    }

    /// Samples the advisor's profile on the grid; past the end of the
    /// maneuver the final speed is held.
    pub fn from_advice(advice: &Advice, v_now: f64, dt: f64, steps: usize) -> Self {
        let (v, a) = (0..=steps)
            .map(|k| advice.reference_at(k as f64 * dt, v_now))
            .unzip();
        Reference { v, a }
    }
}

/// States on the grid for a given jerk sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

pub fn rollout(init: InitialState, jerk: &[f64], dt: f64) -> Trajectory {
    let n = jerk.len();
    let mut tr = Trajectory {
        s: Vec::with_capacity(n + 1),
        v: Vec::with_capacity(n + 1),
        a: Vec::with_capacity(n + 1),
    };
    let (mut s, mut v, mut a) = (init.s, init.v, init.a);
    tr.s.push(s);
    tr.v.push(v);
    tr.a.push(a);
    for &u in jerk {
        s += v * dt + a * dt * dt / 2.0 + u * dt * dt * dt / 6.0;
        v += a * dt + u * dt * dt / 2.0;
        a += u * dt;
        tr.s.push(s);
        tr.v.push(v);
        tr.a.push(a);
    }
    tr
}

/// Trapezoid weight of grid point `k` out of `steps`.
fn trapezoid(k: usize, steps: usize, dt: f64) -> f64 {
    if k == 0 || k == steps {
        dt / 2.0
    } else {
        dt
    }
}

/// Discretised cost of a jerk sequence.
pub fn objective(init: InitialState, reference: &Reference, jerk: &[f64], cfg: &OcpConfig) -> f64 {
    let n = jerk.len();
    let dt = cfg.horizon / n as f64;
    let tr = rollout(init, jerk, dt);
    let tracking: f64 = (0..=n)
        .map(|k| {
            let ev = tr.v[k] - reference.v[k];
            let ea = tr.a[k] - reference.a[k];
            trapezoid(k, n, dt) * (cfg.w_v * ev * ev + cfg.w_a * ea * ea)
        })
        .sum();
    tracking + cfg.w_j * dt * jerk.iter().map(|u| u * u).sum::<f64>()
}

/// Position bounds imposed at each grid point.
pub fn grid_bounds(bounds: &PositionBounds, dt: f64, steps: usize) -> Vec<(f64, f64)> {
    (0..=steps).map(|k| bounds.at_grid(k, dt)).collect()
}

/// Largest violation of the hard constraints for points `1..=steps`, with
/// force violations expressed as acceleration (divided by the mass).
pub fn max_violation(
    init: InitialState,
    jerk: &[f64],
    grid: &[(f64, f64)],
    params: &VehicleParams,
    dt: f64,
) -> f64 {
    let tr = rollout(init, jerk, dt);
    let mut worst = 0.0_f64;
    for &u in jerk {
        worst = worst.max(params.jerk_min - u).max(u - params.jerk_max);
    }
    for k in 1..tr.s.len() {
        let (lo, hi) = grid[k];
        let f = params.force_for(tr.a[k], tr.v[k]);
        worst = worst
            .max(-tr.v[k])
            .max(tr.a[k] - params.accel_max)
            .max(lo - tr.s[k])
            .max(tr.s[k] - hi)
            .max((params.force_min - f) / params.mass)
            .max((f - params.force_max) / params.mass);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OcpSolution {
    pub dt: f64,
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub j: Vec<f64>,
    pub force: Vec<f64>,
    pub objective: f64,
    pub status: OcpStatus,
    /// Total inner QP iterations.
    pub iterations: usize,
    pub sqp_iterations: usize,
}

impl OcpSolution {
    fn from_jerk(
        init: InitialState,
        reference: &Reference,
        jerk: Vec<f64>,
        params: &VehicleParams,
        cfg: &OcpConfig,
        status: OcpStatus,
    ) -> Self {
        let dt = cfg.horizon / jerk.len() as f64;
        let tr = rollout(init, &jerk, dt);
        let force =
            tr.a.iter()
                .zip(&tr.v)
                .map(|(&a, &v)| params.force_for(a, v))
                .collect();
        OcpSolution {
            dt,
            objective: objective(init, reference, &jerk, cfg),
            s: tr.s,
            v: tr.v,
            a: tr.a,
            j: jerk,
            force,
            status,
            iterations: 0,
            sqp_iterations: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.j.len()
    }

    /// Planned acceleration `tau` seconds after the start of the horizon.
    pub fn accel_at(&self, tau: f64) -> f64 {
        let n = self.steps();
        if tau <= 0.0 {
            return self.a[0];
        }
        let k = ((tau / self.dt).floor() as usize).min(n - 1);
        let local = (tau - k as f64 * self.dt).min(self.dt);
        self.a[k] + self.j[k] * local
    }

    pub fn is_optimal(&self) -> bool {
        self.status == OcpStatus::Optimal
    }
}

/// Affine maps from the jerk vector to the grid states.
struct Sensitivities {
    base: Trajectory,
    s: DMatrix<f64>,
    v: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl Sensitivities {
    fn new(init: InitialState, n: usize, dt: f64) -> Self {
        let base = rollout(init, &vec![0.0; n], dt);
        let zero = InitialState {
            s: 0.0,
            v: 0.0,
            a: 0.0,
        };
        let mut s = DMatrix::zeros(n + 1, n);
        let mut v = DMatrix::zeros(n + 1, n);
        let mut a = DMatrix::zeros(n + 1, n);
        let mut unit = vec![0.0; n];
        for j in 0..n {
            unit[j] = 1.0;
            let tr = rollout(zero, &unit, dt);
            for k in 0..=n {
                s[(k, j)] = tr.s[k];
                v[(k, j)] = tr.v[k];
                a[(k, j)] = tr.a[k];
            }
            unit[j] = 0.0;
        }
        Sensitivities { base, s, v, a }
    }
}

struct Transcription<'a> {
    sens: Sensitivities,
    grid: Vec<(f64, f64)>,
    params: &'a VehicleParams,
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
    n: usize,
}

impl<'a> Transcription<'a> {
    fn new(
        init: InitialState,
        reference: &Reference,
        grid: Vec<(f64, f64)>,
        params: &'a VehicleParams,
        cfg: &OcpConfig,
    ) -> Self {
        let n = cfg.steps;
        let dt = cfg.horizon / n as f64;
        let sens = Sensitivities::new(init, n, dt);
        let mut hessian = DMatrix::identity(n, n) * (2.0 * cfg.w_j * dt);
        let mut linear = DVector::zeros(n);
        for k in 1..=n {
            let w = trapezoid(k, n, dt);
            let rv = sens.v.row(k).transpose();
            let ra = sens.a.row(k).transpose();
            hessian += (&rv * rv.transpose()) * (2.0 * w * cfg.w_v);
            hessian += (&ra * ra.transpose()) * (2.0 * w * cfg.w_a);
            linear.axpy(
                2.0 * w * cfg.w_v * (sens.base.v[k] - reference.v[k]),
                &rv,
                1.0,
            );
            linear.axpy(
                2.0 * w * cfg.w_a * (sens.base.a[k] - reference.a[k]),
                &ra,
                1.0,
            );
        }
        Transcription {
            sens,
            grid,
            params,
            hessian,
            linear,
            n,
        }
    }

    /// QP with the drag term linearised around `v_bar`.
    fn qp(&self, v_bar: &[f64]) -> QpProblem {
        let n = self.n;
        let p = self.params;
        let cd = p.drag_factor();
        let mut rows: Vec<(DVector<f64>, f64)> = Vec::with_capacity(8 * n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            rows.push((e.clone(), p.jerk_min));
            rows.push((-e, -p.jerk_max));
        }
        let base = &self.sens.base;
        for k in 1..=n {
            let rs = self.sens.s.row(k).transpose();
            let rv = self.sens.v.row(k).transpose();
            let ra = self.sens.a.row(k).transpose();
            rows.push((rv.clone(), -base.v[k]));
            rows.push((-&ra, base.a[k] - p.accel_max));
            let (lo, hi) = self.grid[k];
            if lo.is_finite() {
                rows.push((rs.clone(), lo - base.s[k]));
            }
            if hi.is_finite() {
                rows.push((-&rs, base.s[k] - hi));
            }
            // F ≈ m a + cd (2 v̄ v − v̄²) + c_r
            let vb = v_bar[k];
            let grad = &ra * p.mass + &rv * (2.0 * cd * vb);
            let f_base =
                p.mass * base.a[k] + cd * (2.0 * vb * base.v[k] - vb * vb) + p.rolling_force();
            rows.push((grad.clone(), p.force_min - f_base));
            rows.push((-grad, f_base - p.force_max));
        }
        let mut constraints = DMatrix::zeros(rows.len(), n);
        let mut lower = DVector::zeros(rows.len());
        for (r, (row, b)) in rows.into_iter().enumerate() {
            constraints.set_row(r, &row.transpose());
            lower[r] = b;
        }
        QpProblem {
            hessian: self.hessian.clone(),
            linear: self.linear.clone(),
            constraints,
            lower,
        }
    }
}

/// Solves the tracking problem. `warm` seeds the drag linearisation.
pub fn solve_ocp(
    init: InitialState,
    reference: &Reference,
    bounds: &PositionBounds,
    params: &VehicleParams,
    cfg: &OcpConfig,
    warm: Option<&[f64]>,
) -> OcpSolution {
    let n = cfg.steps;
    let dt = cfg.horizon / n as f64;
    assert_eq!(reference.v.len(), n + 1, "reference must cover the grid");
    assert_eq!(reference.a.len(), n + 1, "reference must cover the grid");

    let grid = grid_bounds(bounds, dt, n);
    let (lo0, hi0) = grid[0];
    let tol = cfg.tolerance.max(1e-9);
    if init.s < lo0 - tol || init.s > hi0 + tol || init.v < -tol {
        return OcpSolution::from_jerk(
            init,
            reference,
            vec![0.0; n],
            params,
            cfg,
            OcpStatus::Infeasible,
        );
    }

    let problem = Transcription::new(init, reference, grid, params, cfg);
    let mut jerk = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        _ => vec![0.0; n],
    };
    let mut v_bar = rollout(init, &jerk, dt).v;
    let mut iterations = 0;
    let mut status = OcpStatus::MaxIter;
    let mut sqp = 0;
    while sqp < cfg.max_sqp_iterations {
        sqp += 1;
        let qp = problem.qp(&v_bar);
        let sol = solve_qp(&qp, cfg.max_iterations, tol);
        iterations += sol.iterations;
        log::debug!(
            "sqp {sqp}: qp {:?} after {} iterations, {} active",
            sol.status,
            sol.iterations,
            sol.active.len()
        );
        match sol.status {
            QpStatus::Optimal => {}
            QpStatus::Infeasible | QpStatus::NotConvex => {
                status = OcpStatus::Infeasible;
                break;
            }
            QpStatus::MaxIterations => {
                jerk = sol.x.iter().copied().collect();
                break;
            }
        }
        jerk = sol.x.iter().copied().collect();
        let v_new = rollout(init, &jerk, dt).v;
        let change = v_new
            .iter()
            .zip(&v_bar)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        v_bar = v_new;
        if change < SQP_TOLERANCE {
            status = OcpStatus::Optimal;
            break;
        }
    }
    let mut out = OcpSolution::from_jerk(init, reference, jerk, params, cfg, status);
    out.iterations = iterations;
    out.sqp_iterations = sqp;
    out
}
