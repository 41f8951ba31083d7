use super::newton::{harmonic_extension, newton, Scheme};
use super::relax::{derivs, inode, LinOp, NodeCoef};
use super::{BvpProblem, SolveReport};
use crate::error::{MglError, Result};

/// Central-difference `f_xx f_yy - f_xy^2 = 1`.
struct MaScheme {
    n: usize,
    hx: f64,
    hy: f64,
}

impl Scheme for MaScheme {
    fn n(&self) -> usize {
        self.n
    }

    fn ncomp(&self) -> usize {
        1
    }

    fn residual_at(&self, x: &[f64], i: usize, j: usize, out: &mut [f64]) {
        let d = derivs(x, self.n, 1, self.hx, self.hy, i, j, 0);
        out[0] = d.dxx * d.dyy - d.dxy * d.dxy - 1.0;
    }

    fn linearize(&self, x: &[f64]) -> LinOp {
        let n = self.n;
        let mut coef = vec![NodeCoef::default(); (n - 2) * (n - 2)];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let d = derivs(x, n, 1, self.hx, self.hy, i, j, 0);
                coef[inode(n, i, j)] = NodeCoef {
                    a: d.dyy,
                    b: d.dxy,
                    c: d.dxx,
                    ..NodeCoef::default()
                };
            }
        }
        LinOp {
            n,
            ncomp: 1,
            hx: self.hx,
            hy: self.hy,
            coef,
        }
    }

    fn admissible(&self, x: &[f64]) -> bool {
        let n = self.n;
        (1..n - 1).all(|j| {
            (1..n - 1).all(|i| {
                let d = derivs(x, n, 1, self.hx, self.hy, i, j, 0);
                d.dxx > 0.0 && d.dxx * d.dyy - d.dxy * d.dxy > 0.0
            })
        })
    }
}

/// Second differences along each edge must be positive for the data to come
/// from a convex function.
fn check_boundary_convexity(x: &[f64], n: usize) -> Result<()> {
    let edges: [(&str, Box<dyn Fn(usize) -> usize>); 4] = [
        ("y = y0", Box::new(|k| k)),
        ("y = y1", Box::new(move |k| (n - 1) * n + k)),
        ("x = x0", Box::new(move |k| k * n)),
        ("x = x1", Box::new(move |k| k * n + n - 1)),
    ];
    for (name, at) in edges.iter() {
        for k in 1..n - 1 {
            let d2 = x[at(k + 1)] - 2.0 * x[at(k)] + x[at(k - 1)];
            if !(d2 > 0.0) {
                return Err(MglError::ConvexityLost(format!(
                    "boundary data is not convex along the edge {name} (second difference {d2:.3e} at node {k})"
                )));
            }
        }
    }
    Ok(())
}

/// Fixed-point steps `Lap u_new = sqrt((u_xx - u_yy)^2 + 4 u_xy^2 + 4)`, which
/// raise the trace of the Hessian until the iterate is discretely convex.
fn convexify(s: &MaScheme, x: &mut [f64]) {
    let (n, hx, hy) = (s.n, s.hx, s.hy);
    let op = LinOp::laplace(n, 1, hx, hy);
    for _ in 0..WARM_START_STEPS {
        if s.admissible(x) {
            return;
        }
        let mut rhs = vec![0.0; (n - 2) * (n - 2)];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let d = derivs(x, n, 1, hx, hy, i, j, 0);
                let t = d.dxx - d.dyy;
                rhs[inode(n, i, j)] = (t * t + 4.0 * d.dxy * d.dxy + 4.0).sqrt();
            }
        }
        let tol = 1e-10 * rhs.iter().fold(0.0f64, |m, v| m.max(*v));
        op.solve(x, &rhs, tol, 50_000);
    }
}

const WARM_START_STEPS: usize = 100;

/// Solves `det D^2 f = 1` with Dirichlet data from a convex function. The
/// initial guess is `(x^2 + y^2)/2` plus the harmonic extension of the
/// remaining boundary values, pushed towards convexity by Poisson fixed-point
/// steps; accepted Newton steps keep the discrete Hessian positive definite
/// once it is.
///
/// `final_residual_norm` is the unscaled max-norm of the scheme residual.
pub fn solve_monge_ampere(problem: &BvpProblem) -> Result<SolveReport> {
    problem.validate(1)?;
    let g = problem.boundary_grid(1)?;
    let (n, hx, hy) = (problem.n, problem.hx(), problem.hy());
    let mut x = g.data().to_vec();
    check_boundary_convexity(&x, n)?;
    let q = |k: usize| {
        let p = g.node(k % n, k / n);
        0.5 * (p[0] * p[0] + p[1] * p[1])
    };
    for (k, v) in x.iter_mut().enumerate() {
        *v -= q(k);
    }
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            x[j * n + i] = 0.0;
        }
    }
    harmonic_extension(&mut x, n, 1, hx, hy);
    for (k, v) in x.iter_mut().enumerate() {
        *v += q(k);
    }
    // boundary values back exactly as given
    for (k, v) in x.iter_mut().enumerate() {
        let (i, j) = (k % n, k / n);
        if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
            *v = g.data()[k];
        }
    }
    let scheme = MaScheme { n, hx, hy };
    convexify(&scheme, &mut x);
    let rep = newton(&scheme, x, &g, &problem.options, 1.0)?;
    if !scheme.admissible(rep.solution.data()) {
        return Err(MglError::ConvexityLost(
            "converged discrete solution is not convex".into(),
        ));
    }
    Ok(rep)
}
