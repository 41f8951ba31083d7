//! Closed-form fields: real polynomials, graphs of harmonic maps `P(z) +
//! conj(Q(z))` seen through a shear, and an explicit non-quadratic solution of
//! `f_xx f_yy - f_xy^2 = 1`. Also the catalogue of builtin surfaces.

use num_complex::Complex64;

use crate::error::{MglError, Result};
use crate::field::{Evaluator, FieldSource, Rect};
use crate::jets::{linear_pullback, linear_pullback_third, Jet2, Third};

/// Real polynomial in `(x, y)`; `coef[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    coef: Vec<Vec<f64>>,
}

fn falling(k: usize, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, t| acc * (k - t) as f64)
}

impl Poly2 {
    pub fn new(coef: Vec<Vec<f64>>) -> Self {
        Self { coef }
    }

    pub fn zero() -> Self {
        Self { coef: vec![] }
    }

    /// `c0 + cx x + cy y`
    pub fn affine(c0: f64, cx: f64, cy: f64) -> Self {
        Self::new(vec![vec![c0, cy], vec![cx, 0.0]])
    }

    /// `cxx x^2 + cxy x y + cyy y^2`
    pub fn quadratic(cxx: f64, cxy: f64, cyy: f64) -> Self {
        Self::new(vec![vec![0.0, 0.0, cyy], vec![0.0, cxy], vec![cxx]])
    }

    /// Adds `c x^i y^j`.
    pub fn add_term(&mut self, i: usize, j: usize, c: f64) {
        if self.coef.len() <= i {
            self.coef.resize(i + 1, Vec::new());
        }
        let row = &mut self.coef[i];
        if row.len() <= j {
            row.resize(j + 1, 0.0);
        }
        row[j] += c;
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.coef.iter_mut().flatten().for_each(|c| *c *= s);
        self
    }

    /// `d^(p+q) / dx^p dy^q` at `(x, y)`.
    pub fn deriv(&self, p: usize, q: usize, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.coef.iter().enumerate().skip(p) {
            let xi = falling(i, p) * x.powi((i - p) as i32);
            for (j, c) in row.iter().enumerate().skip(q) {
                if *c != 0.0 {
                    s += c * xi * falling(j, q) * y.powi((j - q) as i32);
                }
            }
        }
        s
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet2 {
        Jet2::new(
            self.deriv(0, 0, x, y),
            self.deriv(1, 0, x, y),
            self.deriv(0, 1, x, y),
            self.deriv(2, 0, x, y),
            self.deriv(1, 1, x, y),
            self.deriv(0, 2, x, y),
        )
    }

    pub fn third(&self, x: f64, y: f64) -> Third {
        Third {
            uuu: self.deriv(3, 0, x, y),
            uuv: self.deriv(2, 1, x, y),
            uvv: self.deriv(1, 2, x, y),
            vvv: self.deriv(0, 3, x, y),
        }
    }

    /// Real and imaginary parts of `sum_k c_k (x + i y)^k`.
    pub fn from_complex(coeffs: &[Complex64]) -> (Poly2, Poly2) {
        let mut re = Poly2::zero();
        let mut im = Poly2::zero();
        for (k, ck) in coeffs.iter().enumerate() {
            // (x + iy)^k = sum_m C(k,m) x^(k-m) (iy)^m
            let mut binom = 1.0;
            for m in 0..=k {
                let im_pow = match m % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                let t = ck * im_pow * binom;
                re.add_term(k - m, m, t.re);
                im.add_term(k - m, m, t.im);
                binom = binom * (k - m) as f64 / (m + 1) as f64;
            }
        }
        (re, im)
    }
}

/// Polynomial map `R^2 -> R^n`.
#[derive(Debug, Clone)]
pub struct PolyMap {
    pub comps: Vec<Poly2>,
}

impl PolyMap {
    pub fn new(comps: Vec<Poly2>) -> Self {
        Self { comps }
    }
}

impl Evaluator for PolyMap {
    fn ncomp(&self) -> usize {
        self.comps.len()
    }
    fn jet(&self, p: [f64; 2], c: usize) -> Jet2 {
        self.comps[c].jet(p[0], p[1])
    }
    fn third(&self, p: [f64; 2], c: usize) -> Option<Third> {
        Some(self.comps[c].third(p[0], p[1]))
    }
}

/// One term of an entire holomorphic function.
#[derive(Debug, Clone, PartialEq)]
pub enum HoloTerm {
    /// `sum_k c_k z^k`
    Poly(Vec<Complex64>),
    /// `coef * exp(rate * z)`
    Exp { coef: Complex64, rate: Complex64 },
}

/// Entire holomorphic function as a sum of [`HoloTerm`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Holo(pub Vec<HoloTerm>);

impl Holo {
    pub fn zero() -> Self {
        Holo(vec![])
    }

    pub fn poly(coeffs: &[Complex64]) -> Self {
        Holo(vec![HoloTerm::Poly(coeffs.to_vec())])
    }

    /// `c z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Holo::poly(&v)
    }

    pub fn plus(mut self, other: Holo) -> Self {
        self.0.extend(other.0);
        self
    }

    /// `n`-th complex derivative at `z`.
    pub fn deriv(&self, n: usize, z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.0 {
            match t {
                HoloTerm::Poly(c) => {
                    for (k, ck) in c.iter().enumerate().skip(n) {
                        s += ck * falling(k, n) * z.powu((k - n) as u32);
                    }
                }
                HoloTerm::Exp { coef, rate } => {
                    s += coef * rate.powu(n as u32) * (rate * z).exp();
                }
            }
        }
        s
    }
}

/// Graph of the harmonic map `Phi(u, v) = P(z) + conj(Q(z))`, `z = u + i v`,
/// over the `(x, y)` plane with `x = u`, `y = a u + b v`.
///
/// `f(x, y) = Phi(x, (y - a x) / b)`. With `Q = 0` and `(a, b) = (0, 1)` this is
/// the complex analytic curve of `P`.
#[derive(Debug, Clone)]
pub struct HarmonicGraph {
    pub holo: Holo,
    pub anti: Holo,
    pub a: f64,
    pub b: f64,
}

impl HarmonicGraph {
    pub fn holomorphic(p: Holo) -> Self {
        Self {
            holo: p,
            anti: Holo::zero(),
            a: 0.0,
            b: 1.0,
        }
    }

    pub fn antiholomorphic(q: Holo) -> Self {
        Self {
            holo: Holo::zero(),
            anti: q,
            a: 0.0,
            b: 1.0,
        }
    }

    /// `d^m/du^m d^n/dv^n Phi` at `z`.
    fn d_uv(&self, m: usize, n: usize, z: Complex64) -> Complex64 {
        let i_n = Complex64::i().powu(n as u32);
        i_n * self.holo.deriv(m + n, z) + (i_n * self.anti.deriv(m + n, z)).conj()
    }

    fn chart_point(&self, p: [f64; 2]) -> Complex64 {
        Complex64::new(p[0], (p[1] - self.a * p[0]) / self.b)
    }

    /// Jet of component `c` of `Phi` in the `(u, v)` chart.
    pub fn chart_jet(&self, z: Complex64, c: usize) -> (Jet2, Third) {
        let pick = |w: Complex64| if c == 0 { w.re } else { w.im };
        let d = |m, n| pick(self.d_uv(m, n, z));
        (
            Jet2::new(d(0, 0), d(1, 0), d(0, 1), d(2, 0), d(1, 1), d(0, 2)),
            Third {
                uuu: d(3, 0),
                uuv: d(2, 1),
                uvv: d(1, 2),
                vvv: d(0, 3),
            },
        )
    }
}

impl Evaluator for HarmonicGraph {
    fn ncomp(&self) -> usize {
        2
    }
    fn jet(&self, p: [f64; 2], c: usize) -> Jet2 {
        let (j, _) = self.chart_jet(self.chart_point(p), c);
        linear_pullback(&j, -self.a / self.b, 1.0 / self.b)
    }
    fn third(&self, p: [f64; 2], c: usize) -> Option<Third> {
        let (_, t) = self.chart_jet(self.chart_point(p), c);
        Some(linear_pullback_third(&t, -self.a / self.b, 1.0 / self.b))
    }
}

/// `f = x^2/2 - x^3/6 + y^2 / (2 (1 - x))` on `x < 1`, a convex solution of
/// `f_xx f_yy - f_xy^2 = 1` that is not a quadratic polynomial.
#[derive(Debug, Clone, Copy, Default)]
pub struct MongeAmpereCubic;

impl Evaluator for MongeAmpereCubic {
    fn ncomp(&self) -> usize {
        1
    }
    fn domain(&self) -> Rect {
        Rect {
            x0: f64::NEG_INFINITY,
            x1: 1.0 - 1e-9,
            y0: f64::NEG_INFINITY,
            y1: f64::INFINITY,
        }
    }
    fn jet(&self, p: [f64; 2], _c: usize) -> Jet2 {
        let [x, y] = p;
        let s = 1.0 / (1.0 - x);
        Jet2::new(
            0.5 * x * x - x * x * x / 6.0 + 0.5 * y * y * s,
            x - 0.5 * x * x + 0.5 * y * y * s * s,
            y * s,
            1.0 - x + y * y * s * s * s,
            y * s * s,
            s,
        )
    }
    fn third(&self, p: [f64; 2], _c: usize) -> Option<Third> {
        let [x, y] = p;
        let s = 1.0 / (1.0 - x);
        Some(Third {
            uuu: -1.0 + 3.0 * y * y * s.powi(4),
            uuv: 2.0 * y * s.powi(3),
            uvv: s * s,
            vvv: 0.0,
        })
    }
}

/// The gradient map `g = (f_x, f_y)` of [`MongeAmpereCubic`]; its graph is a
/// minimal surface with `J_g = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MongeAmpereGradient;

impl Evaluator for MongeAmpereGradient {
    fn ncomp(&self) -> usize {
        2
    }
    fn domain(&self) -> Rect {
        MongeAmpereCubic.domain()
    }
    fn jet(&self, p: [f64; 2], c: usize) -> Jet2 {
        let [x, y] = p;
        let s = 1.0 / (1.0 - x);
        let f = MongeAmpereCubic.jet(p, 0);
        if c == 0 {
            // f_x
            Jet2::new(
                f.du,
                f.duu,
                f.duv,
                -1.0 + 3.0 * y * y * s.powi(4),
                2.0 * y * s.powi(3),
                s * s,
            )
        } else {
            // f_y
            Jet2::new(f.dv, f.duv, f.dvv, 2.0 * y * s.powi(3), s * s, 0.0)
        }
    }
    fn third(&self, p: [f64; 2], c: usize) -> Option<Third> {
        let [x, y] = p;
        let s = 1.0 / (1.0 - x);
        Some(if c == 0 {
            Third {
                uuu: 12.0 * y * y * s.powi(5),
                uuv: 6.0 * y * s.powi(4),
                uvv: 2.0 * s.powi(3),
                vvv: 0.0,
            }
        } else {
            Third {
                uuu: 6.0 * y * s.powi(4),
                uuv: 2.0 * s.powi(3),
                uvv: 0.0,
                vvv: 0.0,
            }
        })
    }
}

/// A named builtin surface with the shear `(a, b)` that makes its chart
/// isothermal (when one exists).
#[derive(Debug, Clone)]
pub struct Builtin {
    pub name: &'static str,
    pub source: FieldSource,
    pub shear: Option<(f64, f64)>,
}

pub const SURFACE_NAMES: &[&str] = &[
    "z2",
    "z3",
    "monkey",
    "plane",
    "shear_plane_s1",
    "shear_plane_s2",
    "exp_shear",
    "ma_gradient",
    "z2_3zbar",
];

pub const SCALAR_NAMES: &[&str] = &[
    "quadratic-identity",
    "quadratic-skew",
    "concave",
    "ma-cubic",
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Shear `(a, b)` that makes `x = u, y = a u + b v` isothermal for the affine
/// map with constant gradients `fx`, `fy`.
pub fn affine_shear(fx: [f64; 2], fy: [f64; 2]) -> (f64, f64) {
    let g11 = 1.0 + fx[0] * fx[0] + fx[1] * fx[1];
    let g12 = fx[0] * fy[0] + fx[1] * fy[1];
    let g22 = 1.0 + fy[0] * fy[0] + fy[1] * fy[1];
    let a = -g12 / g22;
    let b = (g11 * g22 - g12 * g12).sqrt() / g22;
    (a, b)
}

/// `Phi = e^z - conj(c) e^{-conj z}` with `c = (b^2 - 1 - a^2)/4 + i a b / 2`
/// is conformal for the shear `(a, b)`, so its graph is an entire minimal
/// surface that is neither a plane nor a complex curve.
pub fn exp_shear_graph(a: f64, b: f64) -> HarmonicGraph {
    let cc = c((b * b - 1.0 - a * a) / 4.0, a * b / 2.0);
    HarmonicGraph {
        holo: Holo(vec![HoloTerm::Exp {
            coef: c(1.0, 0.0),
            rate: c(1.0, 0.0),
        }]),
        anti: Holo(vec![HoloTerm::Exp {
            coef: -cc,
            rate: c(-1.0, 0.0),
        }]),
        a,
        b,
    }
}

pub fn builtin_surface(name: &str) -> Result<Builtin> {
    let zk = |k| HarmonicGraph::holomorphic(Holo::monomial(c(1.0, 0.0), k));
    let (name, source, shear): (&'static str, FieldSource, Option<(f64, f64)>) = match name {
        "z2" => ("z2", FieldSource::analytic(zk(2)), Some((0.0, 1.0))),
        "z3" => ("z3", FieldSource::analytic(zk(3)), Some((0.0, 1.0))),
        "monkey" => (
            "monkey",
            FieldSource::analytic(HarmonicGraph::antiholomorphic(Holo::monomial(c(1.0, 0.0), 3))),
            Some((0.0, 1.0)),
        ),
        "plane" => (
            "plane",
            FieldSource::analytic(PolyMap::new(vec![
                Poly2::affine(0.0, 2.0, 1.0),
                Poly2::affine(0.0, 1.0, -3.0),
            ])),
            Some(affine_shear([2.0, 1.0], [1.0, -3.0])),
        ),
        "shear_plane_s1" => (
            "shear_plane_s1",
            FieldSource::analytic(PolyMap::new(vec![Poly2::affine(0.0, 1.0, 0.0), Poly2::zero()])),
            Some((0.0, 2f64.sqrt())),
        ),
        "shear_plane_s2" => (
            "shear_plane_s2",
            FieldSource::analytic(PolyMap::new(vec![Poly2::zero(), Poly2::affine(0.0, 2.0, -1.0)])),
            Some((1.0, 1.5f64.sqrt())),
        ),
        "exp_shear" => (
            "exp_shear",
            FieldSource::analytic(exp_shear_graph(1.0, 2.0)),
            Some((1.0, 2.0)),
        ),
        "ma_gradient" => ("ma_gradient", FieldSource::analytic(MongeAmpereGradient), None),
        // harmonic but not conformal for any shear; its Jacobian 4|z|^2 - 9 changes sign
        "z2_3zbar" => (
            "z2_3zbar",
            FieldSource::analytic(HarmonicGraph {
                holo: Holo::monomial(c(1.0, 0.0), 2),
                anti: Holo::monomial(c(3.0, 0.0), 1),
                a: 0.0,
                b: 1.0,
            }),
            None,
        ),
        other => return Err(MglError::UnknownSurface(other.to_string())),
    };
    Ok(Builtin {
        name,
        source,
        shear,
    })
}

/// Scalar builtins used as Monge-Ampere boundary data.
pub fn builtin_scalar(name: &str) -> Result<FieldSource> {
    Ok(match name {
        "quadratic-identity" => {
            FieldSource::analytic(PolyMap::new(vec![Poly2::quadratic(0.5, 0.0, 0.5)]))
        }
        "quadratic-skew" => FieldSource::analytic(PolyMap::new(vec![Poly2::quadratic(1.0, 1.0, 0.5)])),
        "concave" => FieldSource::analytic(PolyMap::new(vec![Poly2::quadratic(-0.5, 0.0, -0.5)])),
        "ma-cubic" => FieldSource::analytic(MongeAmpereCubic),
        other => return Err(MglError::UnknownSurface(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_grid;
    use crate::jets::fd_jet;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn poly_jets_match_symbolic_values() {
        // u^2 - v^2 at (0.5, 0)
        let phi = Poly2::quadratic(1.0, 0.0, -1.0);
        assert_eq!(phi.jet(0.5, 0.0), Jet2::new(0.25, 1.0, 0.0, 2.0, 0.0, -2.0));
        // 2uv at (0.5, 0)
        let psi = Poly2::quadratic(0.0, 2.0, 0.0);
        assert_eq!(psi.jet(0.5, 0.0), Jet2::new(0.0, 0.0, 1.0, 0.0, 2.0, 0.0));
        let aff = Poly2::affine(0.0, 3.0, 4.0);
        let j = aff.jet(-2.0, 7.0);
        assert_eq!((j.du, j.dv, j.duu, j.duv, j.dvv), (3.0, 4.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn complex_expansion_of_z_cubed() {
        let (re, im) = Poly2::from_complex(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let (x, y) = (0.7, -0.3);
        assert!(close(re.deriv(0, 0, x, y), x * x * x - 3.0 * x * y * y, 1e-15));
        assert!(close(im.deriv(0, 0, x, y), 3.0 * x * x * y - y * y * y, 1e-15));
    }

    #[test]
    fn harmonic_graph_agrees_with_polynomial_expansion() {
        let coeffs = [c(0.3, -0.2), c(1.1, 0.4), c(-0.5, 0.9), c(0.25, -0.7)];
        let g = HarmonicGraph::holomorphic(Holo::poly(&coeffs));
        let (re, im) = Poly2::from_complex(&coeffs);
        for p in [[0.1, 0.2], [-0.8, 0.55], [0.0, -1.0]] {
            for (k, poly) in [(0, &re), (1, &im)] {
                let a = g.jet(p, k).as_array();
                let b = poly.jet(p[0], p[1]).as_array();
                for (x, y) in a.iter().zip(b) {
                    assert!(close(*x, y, 1e-13), "{a:?} vs {b:?}");
                }
                let ta = g.third(p, k).unwrap();
                let tb = poly.third(p[0], p[1]);
                assert!(close(ta.uuv, tb.uuv, 1e-13) && close(ta.vvv, tb.vvv, 1e-13));
            }
        }
    }

    fn assert_matches_fd(e: &dyn Evaluator, centre: [f64; 2]) {
        let h = 1e-3;
        let rect = Rect::new(centre[0] - 4.0 * h, centre[0] + 4.0 * h, centre[1] - 4.0 * h, centre[1] + 4.0 * h).unwrap();
        let g = sample_grid(e, rect, 9).unwrap();
        for comp in 0..e.ncomp() {
            let fd = fd_jet(&g, 4, 4, comp).unwrap();
            let exact = e.jet(g.node(4, 4), comp);
            let scale = 1.0 + exact.max_abs();
            for (x, y) in fd.as_array().iter().zip(exact.as_array()) {
                assert!((x - y).abs() <= 1e-6 * scale, "comp {comp}: {fd:?} vs {exact:?}");
            }
        }
    }

    #[test]
    fn evaluators_agree_with_finite_differences() {
        assert_matches_fd(&exp_shear_graph(1.0, 2.0), [0.3, -0.4]);
        assert_matches_fd(&MongeAmpereCubic, [0.2, 0.3]);
        assert_matches_fd(&MongeAmpereGradient, [-0.3, 0.25]);
        assert_matches_fd(&HarmonicGraph::antiholomorphic(Holo::monomial(c(1.0, 0.0), 3)), [0.5, 0.5]);
    }

    #[test]
    fn third_derivatives_agree_with_differenced_jets() {
        let h = 1e-5;
        let evals: Vec<Box<dyn Evaluator>> = vec![
            Box::new(exp_shear_graph(1.0, 2.0)),
            Box::new(MongeAmpereCubic),
            Box::new(MongeAmpereGradient),
        ];
        let p = [0.2, -0.35];
        for e in &evals {
            for comp in 0..e.ncomp() {
                let t = e.third(p, comp).unwrap();
                let xp = e.jet([p[0] + h, p[1]], comp);
                let xm = e.jet([p[0] - h, p[1]], comp);
                let yp = e.jet([p[0], p[1] + h], comp);
                let ym = e.jet([p[0], p[1] - h], comp);
                let uuu = (xp.duu - xm.duu) / (2.0 * h);
                let uuv = (xp.duv - xm.duv) / (2.0 * h);
                let uvv = (yp.duv - ym.duv) / (2.0 * h);
                let vvv = (yp.dvv - ym.dvv) / (2.0 * h);
                for (a, b) in [(t.uuu, uuu), (t.uuv, uuv), (t.uvv, uvv), (t.vvv, vvv)] {
                    assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn monge_ampere_cubic_has_unit_hessian_determinant() {
        for p in [[0.0, 0.0], [-0.5, 0.5], [0.5, -0.3], [0.9, 2.0]] {
            let j = MongeAmpereCubic.jet(p, 0);
            assert!((j.duu * j.dvv - j.duv * j.duv - 1.0).abs() < 1e-14 * (1.0 + j.duu * j.dvv));
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(builtin_surface("torus"), Err(MglError::UnknownSurface(_))));
        assert!(matches!(builtin_scalar("z2"), Err(MglError::UnknownSurface(_))));
        for n in SURFACE_NAMES {
            assert_eq!(builtin_surface(n).unwrap().name, *n);
        }
        for n in SCALAR_NAMES {
            builtin_scalar(n).unwrap();
        }
    }

    #[test]
    fn shear_plane_s2_is_f_equal_zero_two_x_minus_y() {
        let b = builtin_surface("shear_plane_s2").unwrap();
        let j = b.source.jet([0.3, 0.7], 1).unwrap();
        assert_eq!((j.du, j.dv), (2.0, -1.0));
        assert_eq!(b.shear, Some((1.0, 1.5f64.sqrt())));
    }
}
