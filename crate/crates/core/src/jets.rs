//! Second-order jets of scalar fields and the finite-difference stencils that
//! produce them from sampled grids.

use crate::error::{MglError, Result};
use crate::grid::GridField;

/// Value and partial derivatives up to order two of a scalar field at a point.
///
/// The coordinate names are `u, v`; the same type carries `x, y` jets of a
/// graph map. There is a single mixed partial `duv`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

/// Third partial derivatives, used where a jet of a derived quantity (such as
/// `log E`) has to be formed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Third {
    pub uuu: f64,
    pub uuv: f64,
    pub uvv: f64,
    pub vvv: f64,
}

impl Jet2 {
    pub const fn new(value: f64, du: f64, dv: f64, duu: f64, duv: f64, dvv: f64) -> Self {
        Self {
            value,
            du,
            dv,
            duu,
            duv,
            dvv,
        }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Rejects jets with NaN or infinite entries.
    pub fn checked(self, origin: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(MglError::NonFinite(origin))
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.value, self.du, self.dv, self.duu, self.duv, self.dvv]
    }

    pub fn laplacian(&self) -> f64 {
        self.duu + self.dvv
    }

    pub fn grad_sq(&self) -> f64 {
        self.du * self.du + self.dv * self.dv
    }

    /// Largest first-derivative magnitude.
    pub fn first_max(&self) -> f64 {
        self.du.abs().max(self.dv.abs())
    }

    /// Largest second-derivative magnitude.
    pub fn second_max(&self) -> f64 {
        self.duu.abs().max(self.duv.abs()).max(self.dvv.abs())
    }

    /// Largest entry of the jet in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Jet of `g(u, v) = F(u, p*u + q*v)` from the jet of `F` at the image point.
///
/// The shear chart `x = u, y = a u + b v` uses `(p, q) = (a, b)`; its inverse
/// uses `(p, q) = (-a/b, 1/b)`.
pub fn linear_pullback(jet: &Jet2, p: f64, q: f64) -> Jet2 {
    Jet2 {
        value: jet.value,
        du: jet.du + p * jet.dv,
        dv: q * jet.dv,
        duu: jet.duu + 2.0 * p * jet.duv + p * p * jet.dvv,
        duv: q * (jet.duv + p * jet.dvv),
        dvv: q * q * jet.dvv,
    }
}

/// Third derivatives of the same pullback as [`linear_pullback`].
pub fn linear_pullback_third(t: &Third, p: f64, q: f64) -> Third {
    Third {
        uuu: t.uuu + 3.0 * p * t.uuv + 3.0 * p * p * t.uvv + p * p * p * t.vvv,
        uuv: q * (t.uuv + 2.0 * p * t.uvv + p * p * t.vvv),
        uvv: q * q * (t.uvv + p * t.vvv),
        vvv: q * q * q * t.vvv,
    }
}

/// Central-difference jet of component `c` at node `(i, j)`.
///
/// Only strict interior nodes (two-cell margin) are accepted.
pub fn fd_jet(g: &GridField, i: usize, j: usize, c: usize) -> Result<Jet2> {
    let (nx, ny) = (g.nx(), g.ny());
    if i < 2 || j < 2 || i + 3 > nx || j + 3 > ny {
        return Err(MglError::IndexOutOfInterior { i, j, nx, ny });
    }
    if c >= g.ncomp() {
        return Err(MglError::ComponentOutOfRange {
            c,
            ncomp: g.ncomp(),
        });
    }
    let (hx, hy) = (g.hx(), g.hy());
    let f = |di: isize, dj: isize| {
        g.get((i as isize + di) as usize, (j as isize + dj) as usize, c)
    };
    let centre = f(0, 0);
    Jet2 {
        value: centre,
        du: (f(1, 0) - f(-1, 0)) / (2.0 * hx),
        dv: (f(0, 1) - f(0, -1)) / (2.0 * hy),
        duu: (f(1, 0) - 2.0 * centre + f(-1, 0)) / (hx * hx),
        duv: (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * hx * hy),
        dvv: (f(0, 1) - 2.0 * centre + f(0, -1)) / (hy * hy),
    }
    .checked("fd_jet")
}

/// Floating-point defect of Lagrange's identity
/// `|V|^2 |W|^2 - <V,W>^2 = sum_{i<j} (v_i w_j - v_j w_i)^2`.
pub fn lagrange_gap(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(MglError::DimensionMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let ww: f64 = w.iter().map(|x| x * x).sum();
    let vw: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
    Ok((vv * ww - vw * vw - minor_squares(v, w)).abs())
}

/// `sum_{i<j} (v_i w_j - v_j w_i)^2`, the right-hand side of Lagrange's identity.
pub(crate) fn minor_squares(v: &[f64], w: &[f64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let m = v[i] * w[j] - v[j] * w[i];
            s += m * m;
        }
    }
    s
}
