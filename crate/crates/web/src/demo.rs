//! The computations behind the page, free of any JS types.

use mgl_core::field::Rect;
use mgl_core::geometry::graph_invariants;
use mgl_core::isothermal::min_jacobian_scan;
use mgl_core::solvers::{solve_mse, BvpProblem};
use mgl_core::surfaces::{builtin_surface, HarmonicGraph, Holo};
use mgl_core::{FieldSource, MglError, Result};
use num_complex::Complex64;

/// Curvatures on an `n x n` lattice over `[-half, half]^2`, rows of constant
/// `y` from bottom to top.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvatures {
    pub n: usize,
    pub k: Vec<f64>,
    pub kn: Vec<f64>,
    /// `|K_N| / |K|`, NaN where `K` vanishes.
    pub ratio: Vec<f64>,
}

pub fn curvatures(surface: &str, half: f64, n: usize) -> Result<Curvatures> {
    check_n(n, 2, 201)?;
    if !(half > 0.0 && half.is_finite()) {
        return Err(MglError::Validation(format!("half-width must be positive, got {half}")));
    }
    let src = builtin_surface(surface)?.source;
    let mut out = Curvatures {
        n,
        k: Vec::with_capacity(n * n),
        kn: Vec::with_capacity(n * n),
        ratio: Vec::with_capacity(n * n),
    };
    for p in Rect::square(half).lattice(n) {
        let j = src.jets(p)?;
        let inv = graph_invariants(&j[0], &j[1])?;
        out.k.push(inv.k);
        out.kn.push(inv.kn);
        out.ratio.push(if inv.k != 0.0 { inv.kn.abs() / inv.k.abs() } else { f64::NAN });
    }
    Ok(out)
}

/// `min |J|` of `z^2 + c conj(z)` over the disks of radius
/// `r_max * k / steps`, `k = 1..=steps`.
pub fn jacobian_scan(c: f64, r_max: f64, steps: usize, n: usize) -> Result<Vec<f64>> {
    check_n(n, 5, 401)?;
    if !(r_max > 0.0 && r_max.is_finite()) || steps == 0 || steps > 200 {
        return Err(MglError::Validation("need r_max > 0 and 1..=200 steps".into()));
    }
    let g = HarmonicGraph {
        holo: Holo::monomial(Complex64::new(1.0, 0.0), 2),
        anti: Holo::monomial(Complex64::new(c, 0.0), 1),
        a: 0.0,
        b: 1.0,
    };
    let radii: Vec<f64> = (1..=steps).map(|k| r_max * k as f64 / steps as f64).collect();
    Ok(min_jacobian_scan(&FieldSource::analytic(g), &radii, n)?
        .into_iter()
        .map(|r| r.min_abs_j)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseRun {
    pub n: usize,
    pub iterations: usize,
    pub residual: f64,
    /// Max deviation from the surface that supplied the boundary data.
    pub max_error: f64,
    /// `|u - f|` over all nodes, both components combined.
    pub error: Vec<f64>,
}

/// Solves the minimal surface system on `[-half, half]^2` with boundary data
/// from a builtin surface.
pub fn mse(surface: &str, half: f64, n: usize) -> Result<MseRun> {
    check_n(n, 9, 129)?;
    let src = builtin_surface(surface)?.source;
    let rep = solve_mse(&BvpProblem::new(Rect::square(half), n, src.clone()))?;
    let g = &rep.solution;
    let mut error = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let p = g.node(i, j);
            let e0 = (g.get(i, j, 0) - src.value(p, 0)?).abs();
            let e1 = (g.get(i, j, 1) - src.value(p, 1)?).abs();
            error.push(e0.max(e1));
        }
    }
    Ok(MseRun {
        n,
        iterations: rep.iterations,
        residual: rep.final_residual_norm,
        max_error: error.iter().copied().fold(0.0, f64::max),
        error,
    })
}

fn check_n(n: usize, lo: usize, hi: usize) -> Result<()> {
    if !(lo..=hi).contains(&n) {
        return Err(MglError::Validation(format!("n must lie in {lo}..={hi}, got {n}")));
    }
    Ok(())
}
