//! Nine-point second-order operators with first-order coupling between
//! components, relaxed by multicolour SOR.

use crate::error::{MglError, Result};

/// Largest off-diagonal to diagonal ratio tolerated in a linearization.
const DOMINANCE_LIMIT: f64 = 10.0;

/// Per-node operator `a D_xx - 2 b D_xy + c D_yy` acting on each component,
/// plus `sum_m alpha[k][m] D_x + beta[k][m] D_y` coupling component `k` to `m`.
#[derive(Debug, Clone, Copy, Default)]
pub(super) struct NodeCoef {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: [[f64; 2]; 2],
    pub beta: [[f64; 2]; 2],
}

/// Linear operator on an `n x n` grid with Dirichlet boundary nodes.
/// Coefficients are stored for interior nodes, row-major from `(1, 1)`.
#[derive(Debug, Clone)]
pub(super) struct LinOp {
    pub n: usize,
    pub ncomp: usize,
    pub hx: f64,
    pub hy: f64,
    pub coef: Vec<NodeCoef>,
}

/// Index of interior node `(i, j)` into per-node arrays.
#[inline]
pub(super) fn inode(n: usize, i: usize, j: usize) -> usize {
    (j - 1) * (n - 2) + (i - 1)
}

#[derive(Debug, Clone, Copy)]
pub(super) struct Derivs {
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

/// Central differences of component `c` at node `(i, j)`.
#[inline]
pub(super) fn derivs(x: &[f64], n: usize, ncomp: usize, hx: f64, hy: f64, i: usize, j: usize, c: usize) -> Derivs {
    let at = |ii: usize, jj: usize| x[(jj * n + ii) * ncomp + c];
    let ctr = at(i, j);
    let (e, w, nn, s) = (at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1));
    Derivs {
        dx: (e - w) / (2.0 * hx),
        dy: (nn - s) / (2.0 * hy),
        dxx: (e - 2.0 * ctr + w) / (hx * hx),
        dyy: (nn - 2.0 * ctr + s) / (hy * hy),
        dxy: (at(i + 1, j + 1) - at(i - 1, j + 1) - at(i + 1, j - 1) + at(i - 1, j - 1)) / (4.0 * hx * hy),
    }
}

impl LinOp {
    /// Operator `a D_xx + c D_yy` with constant coefficients, used for the
    /// harmonic extension of boundary data.
    pub fn laplace(n: usize, ncomp: usize, hx: f64, hy: f64) -> Self {
        let nc = NodeCoef {
            a: 1.0,
            c: 1.0,
            ..NodeCoef::default()
        };
        Self {
            n,
            ncomp,
            hx,
            hy,
            coef: vec![nc; (n - 2) * (n - 2)],
        }
    }

    #[inline]
    fn diag(&self, nc: &NodeCoef) -> f64 {
        -2.0 * nc.a / (self.hx * self.hx) - 2.0 * nc.c / (self.hy * self.hy)
    }

    #[inline]
    fn apply_at(&self, x: &[f64], i: usize, j: usize, k: usize) -> f64 {
        let nc = &self.coef[inode(self.n, i, j)];
        let d = derivs(x, self.n, self.ncomp, self.hx, self.hy, i, j, k);
        let mut v = nc.a * d.dxx - 2.0 * nc.b * d.dxy + nc.c * d.dyy;
        for m in 0..self.ncomp {
            let (am, bm) = (nc.alpha[k][m], nc.beta[k][m]);
            if am != 0.0 || bm != 0.0 {
                let dm = derivs(x, self.n, self.ncomp, self.hx, self.hy, i, j, m);
                v += am * dm.dx + bm * dm.dy;
            }
        }
        v
    }

    /// Rejects operators whose diagonal does not dominate enough for the
    /// relaxation to be meaningful.
    pub fn check_dominance(&self) -> Result<()> {
        let (hx, hy) = (self.hx, self.hy);
        for nc in &self.coef {
            let d = self.diag(nc);
            for k in 0..self.ncomp {
                let mut off = 2.0 * nc.a.abs() / (hx * hx) + 2.0 * nc.c.abs() / (hy * hy) + 2.0 * nc.b.abs() / (hx * hy);
                for m in 0..self.ncomp {
                    off += nc.alpha[k][m].abs() / hx + nc.beta[k][m].abs() / hy;
                }
                let ratio = if d < 0.0 { off / -d } else { f64::INFINITY };
                if !(ratio <= DOMINANCE_LIMIT) {
                    return Err(MglError::SingularLinearization { ratio });
                }
            }
        }
        Ok(())
    }

    /// `max |rhs - L x|` over interior nodes.
    pub fn residual_max(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                for k in 0..self.ncomp {
                    let r = rhs[inode(n, i, j) * self.ncomp + k] - self.apply_at(x, i, j, k);
                    if !r.is_finite() {
                        return f64::INFINITY;
                    }
                    m = m.max(r.abs());
                }
            }
        }
        m
    }

    fn sweep(&self, x: &mut [f64], rhs: &[f64], omega: f64) {
        let n = self.n;
        // colour classes by (i mod 2, j mod 2); no two nodes of a class share a stencil
        for (ci, cj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let mut j = if cj == 1 { 1 } else { 2 };
            while j < n - 1 {
                let mut i = if ci == 1 { 1 } else { 2 };
                while i < n - 1 {
                    let nc = self.coef[inode(n, i, j)];
                    let d = self.diag(&nc);
                    for k in 0..self.ncomp {
                        let r = rhs[inode(n, i, j) * self.ncomp + k] - self.apply_at(x, i, j, k);
                        x[(j * n + i) * self.ncomp + k] += omega * r / d;
                    }
                    i += 2;
                }
                j += 2;
            }
        }
    }

    /// Relaxes `L x = rhs` with the boundary entries of `x` held fixed, until
    /// the residual is at most `tol` (or the rounding floor of the stencil).
    /// Returns the final residual.
    pub fn solve(&self, x: &mut [f64], rhs: &[f64], tol: f64, max_sweeps: usize) -> f64 {
        let n = self.n;
        let dmax = self
            .coef
            .iter()
            .map(|nc| self.diag(nc).abs())
            .fold(0.0f64, f64::max);
        let floor = |x: &[f64]| {
            let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            4.0 * f64::EPSILON * xmax * dmax
        };
        let mut omega = 2.0 / (1.0 + (std::f64::consts::PI / (n - 1) as f64).sin());
        let mut res = self.residual_max(x, rhs);
        let mut best = res;
        let mut since_best = 0;
        let mut sweeps = 0;
        while sweeps < max_sweeps {
            if res <= tol.max(floor(x)) {
                break;
            }
            for _ in 0..4 {
                self.sweep(x, rhs, omega);
            }
            sweeps += 4;
            let prev = res;
            res = self.residual_max(x, rhs);
            if !res.is_finite() {
                return res;
            }
            if res > 2.0 * prev {
                omega = 1.0 + 0.5 * (omega - 1.0);
            }
            if res < 0.999 * best {
                best = res;
                since_best = 0;
            } else {
                since_best += 4;
                if since_best >= 400 {
                    break;
                }
            }
        }
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_extension_reproduces_affine_data() {
        let n = 17;
        let h = 1.0 / 16.0;
        let mut x = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    x[j * n + i] = 1.0 + 2.0 * i as f64 * h - 3.0 * j as f64 * h;
                }
            }
        }
        let op = LinOp::laplace(n, 1, h, h);
        let rhs = vec![0.0; (n - 2) * (n - 2)];
        let r = op.solve(&mut x, &rhs, 1e-13, 10_000);
        assert!(r < 1e-10, "{r}");
        for j in 0..n {
            for i in 0..n {
                let exact = 1.0 + 2.0 * i as f64 * h - 3.0 * j as f64 * h;
                assert!((x[j * n + i] - exact).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn lost_dominance_is_reported() {
        let mut op = LinOp::laplace(9, 1, 0.1, 0.1);
        op.coef[5].a = -1.0;
        assert!(matches!(op.check_dominance(), Err(MglError::SingularLinearization { .. })));
        let mut op = LinOp::laplace(9, 2, 0.1, 0.1);
        op.coef[0].alpha[0][1] = 1e4;
        assert!(matches!(op.check_dominance(), Err(MglError::SingularLinearization { .. })));
        assert!(LinOp::laplace(9, 2, 0.1, 0.1).check_dominance().is_ok());
    }
}
