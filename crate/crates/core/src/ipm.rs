//! Primal-dual interior-point method for convex programs with a separable
//! quadratic objective:
//!
//! ```text
//!     minimize    sum_j 0.5 q_j x_j^2 + c_j x_j
//!     subject to  A x = b
//!                 x_j >= 0   for bounded j
//! ```
//!
//! Linear programs are the special case `q = 0`. Free variables need
//! `q_j > 0`. Steps use Mehrotra's predictor-corrector scheme and the Newton
//! system is reduced to the normal equations `A M^-1 A^T dy = r`, which is
//! only `m x m`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// Sparse column of the constraint matrix: `(row, coefficient)` pairs.
pub type Column = Vec<(usize, f64)>;

#[derive(Debug, Clone)]
pub struct SeparableQp {
    pub quadratic: Vec<f64>,
    pub linear: Vec<f64>,
    pub bounded: Vec<bool>,
    pub columns: Vec<Column>,
    pub rhs: Vec<f64>,
}

impl SeparableQp {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.quadratic)
            .zip(&self.linear)
            .map(|((x, q), c)| 0.5 * q * x * x + c * x)
            .sum()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.quadratic.len() != n || self.bounded.len() != n || self.columns.len() != n {
            return Err(Error::InvalidConfig("inconsistent problem dimensions".into()));
        }
        for (j, col) in self.columns.iter().enumerate() {
            if col.iter().any(|(row, _)| *row >= self.num_rows()) {
                return Err(Error::InvalidConfig(format!("column {j} references a missing row")));
            }
            if self.quadratic[j] < 0.0 {
                return Err(Error::InvalidConfig(format!("variable {j} has a negative curvature")));
            }
            if !self.bounded[j] && self.quadratic[j] <= 0.0 {
                return Err(Error::InvalidConfig(format!("free variable {j} needs positive curvature")));
            }
        }
        Ok(())
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_rows()];
        for (col, xj) in self.columns.iter().zip(x) {
            for &(row, v) in col {
                out[row] += v * xj;
            }
        }
        out
    }

    fn mul_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|col| col.iter().map(|&(row, v)| v * y[row]).sum())
            .collect()
    }
}

/// Settings for a relaxed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Relative tolerance on residuals and the duality gap.
    pub tolerance: f64,
    pub max_solver_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-8,
            max_solver_iterations: 200,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("solver tolerance must be positive".into()));
        }
        if self.max_solver_iterations == 0 {
            return Err(Error::InvalidConfig("solver needs at least one iteration".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Interface for solvers of [`SeparableQp`] problems.
pub trait ConvexBackend {
    fn solve(&self, problem: &SeparableQp, settings: &SolverSettings) -> Result<BackendSolution>;
}

/// Mehrotra predictor-corrector interior-point method.
#[derive(Debug, Clone, Copy, Default)]
pub struct InteriorPoint;

const STEP_FRACTION: f64 = 0.995;
const DIVERGENCE_LIMIT: f64 = 1e12;
/// Lower bound on the centering parameter. Keeping iterates near the central
/// path makes degenerate problems converge to the middle of the optimal face
/// instead of an arbitrary point on it.
const MIN_CENTERING: f64 = 0.1;

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
}

impl ConvexBackend for InteriorPoint {
    fn solve(&self, p: &SeparableQp, settings: &SolverSettings) -> Result<BackendSolution> {
        settings.validate()?;
        p.validate()?;
        let n = p.num_vars();
        let m = p.num_rows();
        let bounded_count = p.bounded.iter().filter(|b| **b).count().max(1) as f64;

        let mut x: Vec<f64> = p.bounded.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let mut z: Vec<f64> = p.bounded.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let mut y = vec![0.0; m];

        let b_norm = inf_norm(&p.rhs);
        let c_norm = inf_norm(&p.linear);

        for iteration in 0..settings.max_solver_iterations {
            let ax = p.mul(&x);
            let r_p: Vec<f64> = p.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let aty = p.mul_transpose(&y);
            let r_d: Vec<f64> = (0..n)
                .map(|j| p.quadratic[j] * x[j] + p.linear[j] - aty[j] - z[j])
                .collect();
            let gap: f64 = (0..n).filter(|&j| p.bounded[j]).map(|j| x[j] * z[j]).sum();
            let mu = gap / bounded_count;
            let objective = p.objective(&x);

            if inf_norm(&r_p) <= settings.tolerance * (1.0 + b_norm)
                && inf_norm(&r_d) <= settings.tolerance * (1.0 + c_norm)
                && gap <= settings.tolerance * (1.0 + objective.abs())
            {
                return Ok(BackendSolution {
                    x,
                    y,
                    objective,
                    iterations: iteration,
                });
            }
            if inf_norm(&x) > DIVERGENCE_LIMIT || inf_norm(&y) > DIVERGENCE_LIMIT {
                return Err(Error::SolverInfeasible);
            }

            // Diagonal of the reduced Hessian: curvature plus barrier term.
            let diag: Vec<f64> = (0..n)
                .map(|j| {
                    if p.bounded[j] {
                        p.quadratic[j] + z[j] / x[j]
                    } else {
                        p.quadratic[j]
                    }
                })
                .collect();
            let factor = normal_matrix(p, &diag)?;

            let affine_rc: Vec<f64> = (0..n)
                .map(|j| if p.bounded[j] { -x[j] * z[j] } else { 0.0 })
                .collect();
            let affine = newton_direction(p, &factor, &diag, &x, &z, &r_p, &r_d, &affine_rc);
            let alpha_aff = max_step(p, &x, &z, &affine, 1.0);
            let mu_aff = (0..n)
                .filter(|&j| p.bounded[j])
                .map(|j| (x[j] + alpha_aff * affine.dx[j]) * (z[j] + alpha_aff * affine.dz[j]))
                .sum::<f64>()
                / bounded_count;
            let sigma = if mu > 0.0 {
                (mu_aff / mu).powi(3).clamp(MIN_CENTERING, 1.0)
            } else {
                MIN_CENTERING
            };

            let corrector_rc: Vec<f64> = (0..n)
                .map(|j| {
                    if p.bounded[j] {
                        sigma * mu - x[j] * z[j] - affine.dx[j] * affine.dz[j]
                    } else {
                        0.0
                    }
                })
                .collect();
            let step = newton_direction(p, &factor, &diag, &x, &z, &r_p, &r_d, &corrector_rc);
            let alpha = max_step(p, &x, &z, &step, 1.0 / STEP_FRACTION) * STEP_FRACTION;

            for j in 0..n {
                x[j] += alpha * step.dx[j];
                if p.bounded[j] {
                    z[j] += alpha * step.dz[j];
                }
            }
            for (yi, dyi) in y.iter_mut().zip(&step.dy) {
                *yi += alpha * dyi;
            }
            if x.iter().chain(&y).chain(&z).any(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure(format!("non-finite iterate at iteration {iteration}")));
            }
        }
        Err(Error::NumericalFailure(format!(
            "no convergence within {} iterations",
            settings.max_solver_iterations
        )))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Cholesky factor of `A diag^-1 A^T`, regularized if needed.
fn normal_matrix(p: &SeparableQp, diag: &[f64]) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let m = p.num_rows();
    let mut s = DMatrix::<f64>::zeros(m, m);
    for (col, d) in p.columns.iter().zip(diag) {
        let w = 1.0 / d;
        for &(r1, v1) in col {
            for &(r2, v2) in col {
                s[(r1, r2)] += w * v1 * v2;
            }
        }
    }
    let scale = (0..m).map(|i| s[(i, i)]).fold(0.0, f64::max).max(1.0);
    let mut shift = 1e-14 * scale;
    for _ in 0..8 {
        let mut shifted = s.clone();
        for i in 0..m {
            shifted[(i, i)] += shift;
        }
        if let Some(chol) = Cholesky::new(shifted) {
            return Ok(chol);
        }
        shift *= 100.0;
    }
    Err(Error::NumericalFailure("normal equations are not positive definite".into()))
}

#[allow(clippy::too_many_arguments)]
fn newton_direction(
    p: &SeparableQp,
    factor: &Cholesky<f64, nalgebra::Dyn>,
    diag: &[f64],
    x: &[f64],
    z: &[f64],
    r_p: &[f64],
    r_d: &[f64],
    r_c: &[f64],
) -> Direction {
    let n = p.num_vars();
    let rhs: Vec<f64> = (0..n)
        .map(|j| if p.bounded[j] { -r_d[j] + r_c[j] / x[j] } else { -r_d[j] })
        .collect();
    let scaled: Vec<f64> = rhs.iter().zip(diag).map(|(r, d)| r / d).collect();
    let a_scaled = p.mul(&scaled);
    let reduced = DVector::from_iterator(p.num_rows(), r_p.iter().zip(&a_scaled).map(|(r, a)| r - a));
    let dy = factor.solve(&reduced);
    let dy: Vec<f64> = dy.iter().copied().collect();
    let at_dy = p.mul_transpose(&dy);
    let dx: Vec<f64> = (0..n).map(|j| (rhs[j] + at_dy[j]) / diag[j]).collect();
    let dz: Vec<f64> = (0..n)
        .map(|j| if p.bounded[j] { (r_c[j] - z[j] * dx[j]) / x[j] } else { 0.0 })
        .collect();
    Direction { dx, dy, dz }
}

/// Largest step in `(0, cap]` keeping bounded `x` and `z` nonnegative.
fn max_step(p: &SeparableQp, x: &[f64], z: &[f64], d: &Direction, cap: f64) -> f64 {
    let mut alpha = cap;
    for j in 0..p.num_vars() {
        if !p.bounded[j] {
            continue;
        }
        if d.dx[j] < 0.0 {
            alpha = alpha.min(-x[j] / d.dx[j]);
        }
        if d.dz[j] < 0.0 {
            alpha = alpha.min(-z[j] / d.dz[j]);
        }
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(p: &SeparableQp) -> BackendSolution {
        InteriorPoint.solve(p, &SolverSettings::default()).unwrap()
    }

    #[test]
    fn lp_on_simplex_picks_cheapest_vertex() {
        // min 3x0 + x1 + 2x2, x on the simplex
        let p = SeparableQp {
            quadratic: vec![0.0; 3],
            linear: vec![3.0, 1.0, 2.0],
            bounded: vec![true; 3],
            columns: vec![vec![(0, 1.0)]; 3],
            rhs: vec![1.0],
        };
        let sol = solve(&p);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        assert!((sol.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn qp_on_simplex_spreads_evenly() {
        // min x0^2 + x1^2 on the simplex -> (0.5, 0.5)
        let p = SeparableQp {
            quadratic: vec![2.0, 2.0],
            linear: vec![0.0, 0.0],
            bounded: vec![true; 2],
            columns: vec![vec![(0, 1.0)]; 2],
            rhs: vec![1.0],
        };
        let sol = solve(&p);
        assert!((sol.x[0] - 0.5).abs() < 1e-7);
        assert!((sol.objective - 0.5).abs() < 1e-7);
    }

    #[test]
    fn free_variable_with_curvature() {
        // min (l - 0)^2 with l = 2 x0 + x1, x on simplex -> x1 = 1, l = 1
        let p = SeparableQp {
            quadratic: vec![0.0, 0.0, 2.0],
            linear: vec![0.0; 3],
            bounded: vec![true, true, false],
            columns: vec![vec![(0, 1.0), (1, 2.0)], vec![(0, 1.0), (1, 1.0)], vec![(1, -1.0)]],
            rhs: vec![1.0, 0.0],
        };
        let sol = solve(&p);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        assert!((sol.x[1] - 1.0).abs() < 1e-6);
        assert!((sol.x[2] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_free_linear_variable() {
        let p = SeparableQp {
            quadratic: vec![0.0],
            linear: vec![1.0],
            bounded: vec![false],
            columns: vec![vec![(0, 1.0)]],
            rhs: vec![1.0],
        };
        assert!(InteriorPoint.solve(&p, &SolverSettings::default()).is_err());
    }

    #[test]
    fn detects_infeasibility_or_fails() {
        // x0 = -1 with x0 >= 0
        let p = SeparableQp {
            quadratic: vec![0.0],
            linear: vec![1.0],
            bounded: vec![true],
            columns: vec![vec![(0, 1.0)]],
            rhs: vec![-1.0],
        };
        assert!(InteriorPoint.solve(&p, &SolverSettings::default()).is_err());
    }
}
