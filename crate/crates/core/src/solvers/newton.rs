//! Damped inexact Newton iteration shared by the grid solvers.

use super::relax::LinOp;
use super::{SolveOptions, SolveReport};
use crate::error::{MglError, Result};
use crate::grid::GridField;
use crate::par;

/// Smallest step length tried before giving up.
const MIN_STEP: f64 = 1.0 / 1048576.0;
/// The linear residual must fall below this fraction of the Newton residual.
const FORCING: f64 = 1e-2;
const MAX_SWEEPS: usize = 50_000;

/// A nonlinear difference scheme on the interior nodes of an `n x n` grid.
pub(super) trait Scheme: Sync {
    fn n(&self) -> usize;
    fn ncomp(&self) -> usize;
    /// Residual of the scheme at interior node `(i, j)`, one value per
    /// component, written to `out`.
    fn residual_at(&self, x: &[f64], i: usize, j: usize, out: &mut [f64]);
    fn linearize(&self, x: &[f64]) -> LinOp;
    /// Whether `x` lies in the set where the scheme is elliptic.
    fn admissible(&self, _x: &[f64]) -> bool {
        true
    }
}

/// Residuals at all interior nodes, row-major from `(1, 1)`.
pub(super) fn residual<S: Scheme>(s: &S, x: &[f64]) -> Vec<f64> {
    let (n, nc) = (s.n(), s.ncomp());
    let rows: Vec<usize> = (1..n - 1).collect();
    par::map(&rows, |&j| {
        let mut row = vec![0.0; (n - 2) * nc];
        for i in 1..n - 1 {
            s.residual_at(x, i, j, &mut row[(i - 1) * nc..i * nc]);
        }
        row
    })
    .concat()
}

pub(super) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, r| if r.is_finite() { m.max(r.abs()) } else { f64::INFINITY })
}

enum Rejection {
    Residual,
    Admissibility,
}

/// Runs Newton from `x` (boundary entries already set). Residual norms are
/// `max |R| / scale`. `template` supplies the grid geometry of the result.
pub(super) fn newton<S: Scheme>(
    s: &S,
    mut x: Vec<f64>,
    template: &GridField,
    opts: &SolveOptions,
    scale: f64,
) -> Result<SolveReport> {
    let report = |x: Vec<f64>, converged, iterations, norm| -> Result<SolveReport> {
        let (x0, y0) = template.origin();
        Ok(SolveReport {
            converged,
            iterations,
            final_residual_norm: norm,
            solution: GridField::new(s.n(), s.n(), x0, y0, template.hx(), template.hy(), s.ncomp(), x)?,
        })
    };
    let mut r = residual(s, &x);
    let mut rn = max_abs(&r) / scale;
    for it in 0..opts.max_iter {
        if rn <= opts.tol_newton {
            return report(x, true, it, rn);
        }
        let op = s.linearize(&x);
        op.check_dominance()?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let mut dx = vec![0.0; x.len()];
        op.solve(&mut dx, &rhs, FORCING * max_abs(&r), MAX_SWEEPS);

        let was_admissible = s.admissible(&x);
        let mut lam = opts.damping;
        let mut last = Rejection::Residual;
        loop {
            if lam < MIN_STEP {
                let best = Box::new(report(x, false, it, rn)?);
                return Err(match last {
                    Rejection::Admissibility => MglError::ConvexityLost(format!(
                        "no step of length >= 2^-20 keeps the discrete Hessian positive definite (residual {rn:.3e})"
                    )),
                    Rejection::Residual => MglError::NoConvergence {
                        max_iter: opts.max_iter,
                        best,
                    },
                });
            }
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + lam * d).collect();
            if was_admissible && !s.admissible(&trial) {
                last = Rejection::Admissibility;
                lam *= 0.5;
                continue;
            }
            let rt = residual(s, &trial);
            let rtn = max_abs(&rt) / scale;
            if rtn < rn {
                x = trial;
                r = rt;
                rn = rtn;
                break;
            }
            last = Rejection::Residual;
            lam *= 0.5;
        }
    }
    if rn <= opts.tol_newton {
        return report(x, true, opts.max_iter, rn);
    }
    Err(MglError::NoConvergence {
        max_iter: opts.max_iter,
        best: Box::new(report(x, false, opts.max_iter, rn)?),
    })
}

/// Discrete harmonic extension of the boundary entries of `x`, componentwise.
pub(super) fn harmonic_extension(x: &mut [f64], n: usize, ncomp: usize, hx: f64, hy: f64) {
    let op = LinOp::laplace(n, ncomp, hx, hy);
    let rhs = vec![0.0; (n - 2) * (n - 2) * ncomp];
    let scale = 1.0 + max_abs(x);
    op.solve(x, &rhs, 1e-14 * scale, MAX_SWEEPS);
}
