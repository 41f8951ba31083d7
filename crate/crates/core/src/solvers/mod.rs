//! Dirichlet boundary-value solvers on uniform grids: the minimal surface
//! system for maps into R^2 and the Monge-Ampere equation `det D^2 f = 1`,
//! plus the gradient-graph pipeline and radius scans.

mod jorgens;
mod monge_ampere;
mod mse;
mod newton;
mod relax;
mod scan;

pub use jorgens::{jorgens_pipeline, jorgens_pipeline_on, theta_field, JorgensReport};
pub use monge_ampere::solve_monge_ampere;
pub use mse::solve_mse;
pub use scan::{bernstein_scan, ScanRow};

use crate::error::{MglError, Result};
use crate::field::{FieldSource, Rect};
use crate::grid::GridField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol_newton: f64,
    pub max_iter: usize,
    /// Initial step length of every Newton iteration, in `(0, 1]`.
    pub damping: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_newton: 1e-10,
            max_iter: 50,
            damping: 1.0,
        }
    }
}

/// Dirichlet problem on `domain` with `n x n` nodes; `boundary` supplies the
/// values on the edges.
#[derive(Debug, Clone)]
pub struct BvpProblem {
    pub domain: Rect,
    pub n: usize,
    pub boundary: FieldSource,
    pub options: SolveOptions,
}

impl BvpProblem {
    pub fn new(domain: Rect, n: usize, boundary: FieldSource) -> Self {
        Self {
            domain,
            n,
            boundary,
            options: SolveOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SolveOptions) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self, ncomp: usize) -> Result<()> {
        let d = self.domain;
        if ![d.x0, d.x1, d.y0, d.y1].iter().all(|v| v.is_finite()) || !(d.x1 > d.x0 && d.y1 > d.y0) {
            return Err(MglError::Validation(format!("invalid domain {d:?}")));
        }
        if self.n < 9 {
            return Err(MglError::Validation(format!("grid resolution must be at least 9, got {}", self.n)));
        }
        let o = self.options;
        if !(o.tol_newton > 0.0) {
            return Err(MglError::Validation(format!("tol_newton must be positive, got {}", o.tol_newton)));
        }
        if !(o.damping > 0.0 && o.damping <= 1.0) {
            return Err(MglError::Validation(format!("damping must lie in (0, 1], got {}", o.damping)));
        }
        if o.max_iter == 0 {
            return Err(MglError::Validation("max_iter must be positive".into()));
        }
        if self.boundary.ncomp() != ncomp {
            return Err(MglError::DimensionMismatch {
                left: self.boundary.ncomp(),
                right: ncomp,
            });
        }
        Ok(())
    }

    pub fn hx(&self) -> f64 {
        (self.domain.x1 - self.domain.x0) / (self.n - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.domain.y1 - self.domain.y0) / (self.n - 1) as f64
    }

    /// Grid holding the boundary values on the edges and zero inside.
    fn boundary_grid(&self, ncomp: usize) -> Result<GridField> {
        let n = self.n;
        let mut g = GridField::from_fn(n, n, self.domain.x0, self.domain.y0, self.hx(), self.hy(), ncomp, |_, _, _| 0.0)?;
        for j in 0..n {
            for i in 0..n {
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    let p = g.node(i, j);
                    for c in 0..ncomp {
                        let v = self.boundary.value(p, c)?;
                        if !v.is_finite() {
                            return Err(MglError::NonFinite("boundary data"));
                        }
                        g.set(i, j, c, v);
                    }
                }
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    /// Newton steps taken.
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub solution: GridField,
}
