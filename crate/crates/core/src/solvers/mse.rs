use super::newton::{harmonic_extension, max_abs, newton, Scheme};
use super::relax::{derivs, inode, LinOp, NodeCoef};
use super::{BvpProblem, SolveReport};
#[cfg(test)]
use super::SolveOptions;
use crate::error::Result;

/// Central-difference minimal surface system for `f: R^2 -> R^2`:
/// `(1 + |f_y|^2) f_xx - 2 <f_x, f_y> f_xy + (1 + |f_x|^2) f_yy = 0`.
struct MseScheme {
    n: usize,
    hx: f64,
    hy: f64,
}

impl MseScheme {
    fn node(&self, x: &[f64], i: usize, j: usize) -> [super::relax::Derivs; 2] {
        [0, 1].map(|c| derivs(x, self.n, 2, self.hx, self.hy, i, j, c))
    }
}

impl Scheme for MseScheme {
    fn n(&self) -> usize {
        self.n
    }

    fn ncomp(&self) -> usize {
        2
    }

    fn residual_at(&self, x: &[f64], i: usize, j: usize, out: &mut [f64]) {
        let d = self.node(x, i, j);
        let a = 1.0 + d[0].dy * d[0].dy + d[1].dy * d[1].dy;
        let b = d[0].dx * d[0].dy + d[1].dx * d[1].dy;
        let c = 1.0 + d[0].dx * d[0].dx + d[1].dx * d[1].dx;
        for k in 0..2 {
            out[k] = a * d[k].dxx - 2.0 * b * d[k].dxy + c * d[k].dyy;
        }
    }

    fn linearize(&self, x: &[f64]) -> LinOp {
        let n = self.n;
        let mut coef = vec![NodeCoef::default(); (n - 2) * (n - 2)];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let d = self.node(x, i, j);
                let mut nc = NodeCoef {
                    a: 1.0 + d[0].dy * d[0].dy + d[1].dy * d[1].dy,
                    b: d[0].dx * d[0].dy + d[1].dx * d[1].dy,
                    c: 1.0 + d[0].dx * d[0].dx + d[1].dx * d[1].dx,
                    ..NodeCoef::default()
                };
                for k in 0..2 {
                    for m in 0..2 {
                        nc.alpha[k][m] = 2.0 * (d[k].dyy * d[m].dx - d[k].dxy * d[m].dy);
                        nc.beta[k][m] = 2.0 * (d[k].dxx * d[m].dy - d[k].dxy * d[m].dx);
                    }
                }
                coef[inode(n, i, j)] = nc;
            }
        }
        LinOp {
            n,
            ncomp: 2,
            hx: self.hx,
            hy: self.hy,
            coef,
        }
    }
}

/// Solves the minimal surface system for a map into R^2 with Dirichlet data
/// `problem.boundary`, starting from the discrete harmonic extension.
///
/// `final_residual_norm` is the max-norm of the scheme residual divided by
/// `(1 + max |boundary value|) / min(hx, hy)^2`, the size of a second
/// difference of the data.
pub fn solve_mse(problem: &BvpProblem) -> Result<SolveReport> {
    problem.validate(2)?;
    let g = problem.boundary_grid(2)?;
    let (n, hx, hy) = (problem.n, problem.hx(), problem.hy());
    let mut x = g.data().to_vec();
    let scale = (1.0 + max_abs(&x)) / hx.min(hy).powi(2);
    harmonic_extension(&mut x, n, 2, hx, hy);
    newton(&MseScheme { n, hx, hy }, x, &g, &problem.options, scale)
}
