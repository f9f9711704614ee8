//! Dense strictly convex QP solver (Goldfarb–Idnani dual active set).
//!
//! Solves `min ½ xᵀ G x + cᵀ x  s.t.  C x ≥ b` for positive definite `G`.
//! The method starts from the unconstrained minimum and adds violated
//! constraints one at a time while keeping dual feasibility, so it either
//! reaches the optimum or proves the constraint set infeasible.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    /// `G` is not positive definite.
    NotConvex,
}

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    /// One constraint per row.
    pub constraints: DMatrix<f64>,
    pub lower: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub status: QpStatus,
    pub iterations: usize,
    /// Indices of constraints active at `x`.
    pub active: Vec<usize>,
}

impl QpProblem {
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x)
    }

    /// Largest violation of `C x ≥ b`, in the units of each row.
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        let slack = &self.constraints * x - &self.lower;
        slack.iter().fold(0.0_f64, |acc, &s| acc.max(-s))
    }
}

struct ActiveSet {
    rows: Vec<usize>,
    multipliers: Vec<f64>,
    /// `G⁻¹ n` for every active normal `n`.
    ginv_normals: Vec<DVector<f64>>,
    /// Factorisation of `Nᵀ G⁻¹ N`.
    reduced: Option<DMatrix<f64>>,
}

impl ActiveSet {
    fn new() -> Self {
        ActiveSet {
            rows: Vec::new(),
            multipliers: Vec::new(),
            ginv_normals: Vec::new(),
            reduced: None,
        }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn refresh(&mut self, normals: &DMatrix<f64>) {
        let q = self.len();
        if q == 0 {
            self.reduced = None;
            return;
        }
        let mut s = DMatrix::zeros(q, q);
        for (l, &row) in self.rows.iter().enumerate() {
            for m in 0..q {
                s[(l, m)] = normals.row(row).transpose().dot(&self.ginv_normals[m]);
            }
        }
        self.reduced = s.try_inverse();
    }

    fn push(
        &mut self,
        row: usize,
        multiplier: f64,
        ginv_normal: DVector<f64>,
        normals: &DMatrix<f64>,
    ) {
        self.rows.push(row);
        self.multipliers.push(multiplier);
        self.ginv_normals.push(ginv_normal);
        self.refresh(normals);
    }

    fn remove(&mut self, idx: usize, normals: &DMatrix<f64>) {
        self.rows.remove(idx);
        self.multipliers.remove(idx);
        self.ginv_normals.remove(idx);
        self.refresh(normals);
    }

    /// Primal direction `z = H n` and dual direction `r = N* n` for normal `n`.
    fn directions(
        &self,
        normals: &DMatrix<f64>,
        ginv_n: &DVector<f64>,
    ) -> Option<(DVector<f64>, Vec<f64>)> {
        let q = self.len();
        if q == 0 {
            return Some((ginv_n.clone(), Vec::new()));
        }
        let inv = self.reduced.as_ref()?;
        let w = DVector::from_iterator(
            q,
            self.rows
                .iter()
                .map(|&row| normals.row(row).transpose().dot(ginv_n)),
        );
        let r = inv * w;
        let mut z = ginv_n.clone();
        for (l, g) in self.ginv_normals.iter().enumerate() {
            z.axpy(-r[l], g, 1.0);
        }
        Some((z, r.iter().copied().collect()))
    }
}

/// Solve the QP. `tolerance` applies to constraint rows scaled to unit norm.
pub fn solve_qp(problem: &QpProblem, max_iterations: usize, tolerance: f64) -> QpSolution {
    let n = problem.hessian.nrows();
    let m = problem.constraints.nrows();

    let Some(chol) = problem.hessian.clone().cholesky() else {
        return QpSolution {
            x: DVector::zeros(n),
            status: QpStatus::NotConvex,
            iterations: 0,
            active: Vec::new(),
        };
    };
    let ginv = chol.inverse();

    // unit-norm rows make the violation test scale free
    let mut normals = problem.constraints.clone();
    let mut lower = problem.lower.clone();
    for j in 0..m {
        let norm = normals.row(j).norm();
        if norm > 0.0 {
            normals.row_mut(j).scale_mut(1.0 / norm);
            lower[j] /= norm;
        }
    }

    let mut x = -(&ginv * &problem.linear);
    let mut active = ActiveSet::new();
    let mut iterations = 0;

    let finish = |x: DVector<f64>, status, iterations, active: &ActiveSet| QpSolution {
        x,
        status,
        iterations,
        active: active.rows.clone(),
    };

    loop {
        // most violated constraint
        let mut add = None;
        let mut worst = -tolerance;
        for j in 0..m {
            if active.rows.contains(&j) {
                continue;
            }
            let slack = normals.row(j).transpose().dot(&x) - lower[j];
            if slack < worst {
                worst = slack;
                add = Some(j);
            }
        }
        let Some(p) = add else {
            return finish(x, QpStatus::Optimal, iterations, &active);
        };
        let np: DVector<f64> = normals.row(p).transpose();
        let ginv_np = &ginv * &np;
        let mut u_p = 0.0;

        loop {
            iterations += 1;
            if iterations > max_iterations {
                return finish(x, QpStatus::MaxIterations, iterations, &active);
            }
            let Some((z, r)) = active.directions(&normals, &ginv_np) else {
                return finish(x, QpStatus::MaxIterations, iterations, &active);
            };

            // largest dual step that keeps active multipliers non-negative
            let mut partial = f64::INFINITY;
            let mut drop = None;
            for (l, &rl) in r.iter().enumerate() {
                if rl > 1e-12 {
                    let ratio = active.multipliers[l] / rl;
                    if ratio < partial {
                        partial = ratio;
                        drop = Some(l);
                    }
                }
            }

            let curvature = z.dot(&np);
            let full = if curvature <= 1e-12 * np.dot(&ginv_np).max(f64::MIN_POSITIVE) {
                f64::INFINITY
            } else {
                -(np.dot(&x) - lower[p]) / curvature
            };

            let step = partial.min(full);
            if !step.is_finite() {
                return finish(x, QpStatus::Infeasible, iterations, &active);
            }

            for (mult, rl) in active.multipliers.iter_mut().zip(&r) {
                *mult = (*mult - step * rl).max(0.0);
            }
            u_p += step;

            if full.is_finite() {
                x.axpy(step, &z, 1.0);
            }
            if full <= partial {
                active.push(p, u_p, ginv_np.clone(), &normals);
                break;
            }
            let l = drop.expect("partial step has a blocking constraint");
            active.remove(l, &normals);
        }
    }
}
