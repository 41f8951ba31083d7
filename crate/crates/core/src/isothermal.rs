//! Shear charts `x = u, y = a u + b v` of two-dimensional graphs and the
//! identities that hold when the chart is isothermal and the pulled-back
//! components `phi, psi` are harmonic.

use num_complex::Complex64;

use crate::error::{MglError, Result};
use crate::field::{FieldSource, Rect};
use crate::geometry::{check_harmonic, Tolerances};
use crate::jets::{linear_pullback, linear_pullback_third, Jet2, Third};
use crate::par;

/// Default `omega` threshold factor for the `M1` mask.
pub const EPS_OMEGA: f64 = 1e-8;

/// A two-component field seen through the shear `x = u, y = a u + b v`.
#[derive(Debug, Clone)]
pub struct ShearChart {
    pub a: f64,
    pub b: f64,
    pub source: FieldSource,
}

/// Jets of the chart components and of the underlying map at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJets {
    pub phi: Jet2,
    pub psi: Jet2,
    /// Jets of `f1, f2` in `(x, y)`.
    pub f: [Jet2; 2],
    /// Image point `(x, y)`.
    pub xy: [f64; 2],
}

impl ChartJets {
    /// `1 + max` first-derivative magnitude of `phi, psi`.
    pub fn scale(&self) -> f64 {
        1.0 + self.phi.first_max().max(self.psi.first_max())
    }
}

pub fn shear_pullback(f: FieldSource, a: f64, b: f64) -> Result<ShearChart> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(MglError::InvalidShear { b });
    }
    if !a.is_finite() {
        return Err(MglError::Validation(format!("shear parameter a = {a}")));
    }
    if f.ncomp() != 2 {
        return Err(MglError::Validation(format!(
            "shear chart needs a map into R^2, got {} components",
            f.ncomp()
        )));
    }
    Ok(ShearChart { a, b, source: f })
}

impl ShearChart {
    pub fn to_xy(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0], self.a * p[0] + self.b * p[1]]
    }

    pub fn to_uv(&self, xy: [f64; 2]) -> [f64; 2] {
        [xy[0], (xy[1] - self.a * xy[0]) / self.b]
    }

    /// Chain-rule jets of `phi(u, v) = f1(u, a u + b v)` and `psi` likewise.
    pub fn jets(&self, p: [f64; 2]) -> Result<ChartJets> {
        self.jets_at_xy(self.to_xy(p))
    }

    /// Chart jets at the chart point whose image is `xy`. Grid sources only
    /// answer at their interior nodes, so scans over grids go through here.
    pub fn jets_at_xy(&self, xy: [f64; 2]) -> Result<ChartJets> {
        let f1 = self.source.jet(xy, 0)?;
        let f2 = self.source.jet(xy, 1)?;
        Ok(ChartJets {
            phi: linear_pullback(&f1, self.a, self.b),
            psi: linear_pullback(&f2, self.a, self.b),
            f: [f1, f2],
            xy,
        })
    }

    pub fn third(&self, p: [f64; 2]) -> Result<(Third, Third)> {
        let xy = self.to_xy(p);
        Ok((
            linear_pullback_third(&self.source.third(xy, 0)?, self.a, self.b),
            linear_pullback_third(&self.source.third(xy, 1)?, self.a, self.b),
        ))
    }

    /// `1 + a^2 + b^2`, recurring in the conformal-factor identities.
    pub fn s(&self) -> f64 {
        1.0 + self.a * self.a + self.b * self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoResidual {
    /// `phi_u phi_v + psi_u psi_v + a b`
    pub r1: f64,
    /// `(1 + a^2 + phi_u^2 + psi_u^2) - (b^2 + phi_v^2 + psi_v^2)`
    pub r2: f64,
    /// `E = 1 + a^2 + phi_u^2 + psi_u^2`
    pub e: f64,
}

pub fn iso_residual_from(a: f64, b: f64, j: &ChartJets) -> IsoResidual {
    let (p, q) = (&j.phi, &j.psi);
    let e = 1.0 + a * a + p.du * p.du + q.du * q.du;
    IsoResidual {
        r1: p.du * p.dv + q.du * q.dv + a * b,
        r2: e - (b * b + p.dv * p.dv + q.dv * q.dv),
        e,
    }
}

pub fn iso_residual(chart: &ShearChart, p: [f64; 2]) -> Result<IsoResidual> {
    Ok(iso_residual_from(chart.a, chart.b, &chart.jets(p)?))
}

/// Laplacians `(phi_uu + phi_vv, psi_uu + psi_vv)`.
pub fn harm_residual(chart: &ShearChart, p: [f64; 2]) -> Result<(f64, f64)> {
    let j = chart.jets(p)?;
    Ok((j.phi.laplacian(), j.psi.laplacian()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobians {
    pub j_phi: f64,
    pub j_f: f64,
}

pub fn jacobians_from(b: f64, j: &ChartJets) -> Result<Jacobians> {
    let j_phi = j.phi.du * j.psi.dv - j.phi.dv * j.psi.du;
    let j_f = j.f[0].du * j.f[1].dv - j.f[0].dv * j.f[1].du;
    let gap = (j_phi - b * j_f).abs() / (1.0 + j_phi.abs());
    if gap > 1e-10 {
        return Err(MglError::IdentityViolation {
            identity: "J_Phi = b J_f",
            gap,
        });
    }
    Ok(Jacobians { j_phi, j_f })
}

/// `(J_Phi, J_f)`, checking `J_Phi = b J_f`.
pub fn jacobians(chart: &ShearChart, p: [f64; 2]) -> Result<Jacobians> {
    jacobians_from(chart.b, &chart.jets(p)?)
}

/// `|J_Phi^2 - E^2 + (1 + a^2 + b^2) E - b^2|`.
pub fn identity_35_gap(e: f64, j_phi: f64, a: f64, b: f64) -> f64 {
    let s = 1.0 + a * a + b * b;
    (j_phi * j_phi - e * e + s * e - b * b).abs()
}

/// Jet of `log E` in `(u, v)`; needs third derivatives of the source.
pub fn log_e_jet(chart: &ShearChart, p: [f64; 2]) -> Result<Jet2> {
    let j = chart.jets(p)?;
    let (tp, tq) = chart.third(p)?;
    let (f, g) = (&j.phi, &j.psi);
    let e = 1.0 + chart.a * chart.a + f.du * f.du + g.du * g.du;
    let eu = 2.0 * (f.du * f.duu + g.du * g.duu);
    let ev = 2.0 * (f.du * f.duv + g.du * g.duv);
    let euu = 2.0 * (f.duu * f.duu + f.du * tp.uuu + g.duu * g.duu + g.du * tq.uuu);
    let euv = 2.0 * (f.duv * f.duu + f.du * tp.uuv + g.duv * g.duu + g.du * tq.uuv);
    let evv = 2.0 * (f.duv * f.duv + f.du * tp.uvv + g.duv * g.duv + g.du * tq.uvv);
    Jet2::new(
        e.ln(),
        eu / e,
        ev / e,
        euu / e - eu * eu / (e * e),
        euv / e - eu * ev / (e * e),
        evv / e - ev * ev / (e * e),
    )
    .checked("log E jet")
}

/// `K = -(log E)_uu + (log E)_vv) / (2 E)`.
pub fn gauss_conformal(log_e: &Jet2, e: f64) -> f64 {
    -log_e.laplacian() / (2.0 * e)
}

/// Conformal route to `K` at a chart point.
pub fn gauss_conformal_at(chart: &ShearChart, p: [f64; 2]) -> Result<f64> {
    let l = log_e_jet(chart, p)?;
    Ok(gauss_conformal(&l, l.value.exp()))
}

/// Gaps of the `u`-derivatives of the isothermality relations after
/// harmonicity has been used.
pub fn eqs_38_gap_from(j: &ChartJets) -> (f64, f64) {
    let (f, g) = (&j.phi, &j.psi);
    (
        f.duu * f.dv + f.du * f.duv + g.duu * g.dv + g.du * g.duv,
        f.duu * f.du - f.dv * f.duv + g.duu * g.du - g.dv * g.duv,
    )
}

pub fn eqs_38_gap(chart: &ShearChart, p: [f64; 2]) -> Result<(f64, f64)> {
    Ok(eqs_38_gap_from(&chart.jets(p)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega {
    /// `(phi_u^2 + phi_v^2)(phi_uu^2 + phi_uv^2)`
    pub omega: f64,
    /// Same quantity from `psi`.
    pub psi_side: f64,
    pub in_m1: bool,
}

pub fn omega_from(j: &ChartJets, eps: f64, identity_tol: f64) -> Result<Omega> {
    let (f, g) = (&j.phi, &j.psi);
    let phi_side = f.grad_sq() * (f.duu * f.duu + f.duv * f.duv);
    let psi_side = g.grad_sq() * (g.duu * g.duu + g.duv * g.duv);
    if (phi_side - psi_side).abs() > identity_tol * (1.0 + phi_side.max(psi_side)) {
        return Err(MglError::Identity39Violation {
            phi_side,
            psi_side,
        });
    }
    Ok(Omega {
        omega: phi_side,
        psi_side,
        in_m1: phi_side > eps * j.scale().powi(4),
    })
}

/// `omega` and membership in `M1`, checking that the `phi` and `psi` forms of
/// `omega` agree.
pub fn omega_and_mask(chart: &ShearChart, p: [f64; 2], eps: f64, tol: &Tolerances) -> Result<Omega> {
    omega_from(&chart.jets(p)?, eps, tol.identity)
}

fn phi_grad_denominator(j: &ChartJets, eps: f64) -> Result<f64> {
    let d = j.phi.grad_sq();
    if d <= eps * j.scale().powi(2) {
        return Err(MglError::DenominatorVanishes {
            what: "phi_u^2 + phi_v^2",
            value: d,
        });
    }
    Ok(d)
}

/// `(phi_uv, phi_uu)` recovered from the `psi` second derivatives, `J_Phi` and
/// the first derivatives; checked against the direct jet values.
pub fn solved_2nd_derivs_from(j: &ChartJets, eps: f64, identity_tol: f64) -> Result<(f64, f64)> {
    let d = phi_grad_denominator(j, eps)?;
    let (f, g) = (&j.phi, &j.psi);
    let cross = f.du * g.du + f.dv * g.dv;
    let jac = f.du * g.dv - f.dv * g.du;
    let phi_uv = (-cross * g.duv - jac * g.duu) / d;
    let phi_uu = (jac * g.duv - cross * g.duu) / d;
    let scale = 1.0 + f.second_max();
    let gap = (phi_uv - f.duv).abs().max((phi_uu - f.duu).abs()) / scale;
    if gap > identity_tol {
        return Err(MglError::IdentityViolation {
            identity: "solved second derivatives of phi",
            gap,
        });
    }
    Ok((phi_uv, phi_uu))
}

pub fn solved_2nd_derivs(chart: &ShearChart, p: [f64; 2], eps: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    solved_2nd_derivs_from(&chart.jets(p)?, eps, tol.identity)
}

/// Closed-form `(K, K_N)` valid where `phi` has nonvanishing gradient.
pub fn curvatures_m1_from(a: f64, b: f64, j: &ChartJets, eps: f64) -> Result<(f64, f64)> {
    let d = phi_grad_denominator(j, eps)?;
    let (f, g) = (&j.phi, &j.psi);
    let e = 1.0 + a * a + f.du * f.du + g.du * g.du;
    let s = 1.0 + a * a + b * b;
    let q = (g.duu * g.duu + g.duv * g.duv) / d;
    let e3 = e * e * e;
    let jac = f.du * g.dv - f.dv * g.du;
    Ok((q * (2.0 * b * b - s * e) / e3, 2.0 * b * q * jac / e3))
}

pub fn curvatures_m1(chart: &ShearChart, p: [f64; 2], eps: f64) -> Result<(f64, f64)> {
    curvatures_m1_from(chart.a, chart.b, &chart.jets(p)?, eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WRatio {
    pub w: f64,
    pub valid: bool,
}

/// `W(t) = (t^2 - (1 + a^2 + b^2) t + b^2) / ((1 + a^2 + b^2) t - 2 b^2)^2`.
pub fn w_ratio(e: f64, a: f64, b: f64) -> WRatio {
    let s = 1.0 + a * a + b * b;
    let den = s * e - 2.0 * b * b;
    if den.abs() < 1e-8 {
        return WRatio {
            w: f64::NAN,
            valid: false,
        };
    }
    // numerator in factored form; its roots b^2 / t_hi <= t_hi are real and
    // coincide at t = 1 when (a, b) = (0, 1)
    let disc = ((b - 1.0) * (b - 1.0) + a * a) * ((b + 1.0) * (b + 1.0) + a * a);
    let t_hi = 0.5 * (s + disc.sqrt());
    let t_lo = b * b / t_hi;
    WRatio {
        w: (e - t_hi) * (e - t_lo) / (den * den),
        valid: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger {
    pub phi_z: Complex64,
    pub phi_zbar: Complex64,
    /// `|Phi_z|^2 - |Phi_zbar|^2`
    pub j: f64,
}

pub fn wirtinger_from(j: &ChartJets) -> Result<Wirtinger> {
    let (f, g) = (&j.phi, &j.psi);
    let phi_z = Complex64::new(0.5 * (f.du + g.dv), 0.5 * (g.du - f.dv));
    let phi_zbar = Complex64::new(0.5 * (f.du - g.dv), 0.5 * (g.du + f.dv));
    let jw = phi_z.norm_sqr() - phi_zbar.norm_sqr();
    let jd = f.du * g.dv - f.dv * g.du;
    let gap = (jw - jd).abs() / (1.0 + jd.abs());
    if gap > 1e-12 {
        return Err(MglError::IdentityViolation {
            identity: "J_Phi = |Phi_z|^2 - |Phi_zbar|^2",
            gap,
        });
    }
    Ok(Wirtinger {
        phi_z,
        phi_zbar,
        j: jw,
    })
}

pub fn wirtinger(chart: &ShearChart, p: [f64; 2]) -> Result<Wirtinger> {
    wirtinger_from(&chart.jets(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianScanRow {
    pub r: f64,
    pub min_abs_j: f64,
}

/// Minimum of `|J|` over the disks `u^2 + v^2 <= R^2` for a harmonic pair
/// `(phi, psi)` given directly in `(u, v)`.
///
/// Analytic sources are sampled on a `grid_n x grid_n` lattice over
/// `[-R_max, R_max]^2`; grid sources use their strict-interior nodes.
pub fn min_jacobian_scan(map: &FieldSource, radii: &[f64], grid_n: usize) -> Result<Vec<JacobianScanRow>> {
    if map.ncomp() != 2 {
        return Err(MglError::Validation("Jacobian scan needs two components".into()));
    }
    check_radii(radii)?;
    let r_max = *radii.last().unwrap();
    let tol = Tolerances::for_source(map);
    let pts: Vec<[f64; 2]> = map
        .sample_points(Rect::square(r_max), grid_n)
        .into_iter()
        .filter(|p| p[0] * p[0] + p[1] * p[1] <= r_max * r_max * (1.0 + 1e-12))
        .collect();
    let vals: Vec<(f64, f64)> = par::map(&pts, |p| -> Result<(f64, f64)> {
        let phi = map.jet(*p, 0)?;
        let psi = map.jet(*p, 1)?;
        check_harmonic(&phi, &psi, tol.harm)?;
        Ok((p[0] * p[0] + p[1] * p[1], (phi.du * psi.dv - phi.dv * psi.du).abs()))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    radii
        .iter()
        .map(|&r| {
            let lim = r * r * (1.0 + 1e-12);
            let m = vals
                .iter()
                .filter(|(r2, _)| *r2 <= lim)
                .fold(f64::INFINITY, |m, (_, j)| m.min(*j));
            if m.is_infinite() {
                return Err(MglError::Validation(format!("no sample points within radius {r}")));
            }
            Ok(JacobianScanRow { r, min_abs_j: m })
        })
        .collect()
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(MglError::Validation("radii list is empty".into()));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| !r.is_finite()) {
        return Err(MglError::Validation(format!("radii must be positive and increasing: {radii:?}")));
    }
    Ok(())
}

/// Candidate isothermal shear with its mean squared isothermality residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearCandidate {
    pub a: f64,
    pub b: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearFit {
    /// Lowest objective found.
    pub best: ShearCandidate,
    /// Every refined local minimum with objective below the acceptance
    /// threshold, sorted by objective.
    pub candidates: Vec<ShearCandidate>,
    pub threshold: f64,
}

/// Means of the products of the induced metric `g_ij = delta_ij + <f_i, f_j>`
/// over the samples; the fit objective is a polynomial in `(a, b)` with these
/// as coefficients.
#[derive(Debug, Clone, Copy, Default)]
struct MetricMoments {
    m11_11: f64,
    m12_12: f64,
    m22_22: f64,
    m11_12: f64,
    m11_22: f64,
    m12_22: f64,
}

impl MetricMoments {
    /// Mean of `r1^2 + r2^2` with `r1 = b (g12 + a g22)`,
    /// `r2 = g11 + 2 a g12 + (a^2 - b^2) g22`.
    fn objective(&self, a: f64, b: f64) -> f64 {
        let c = a * a - b * b;
        let r1 = b * b * (self.m12_12 + 2.0 * a * self.m12_22 + a * a * self.m22_22);
        let r2 = self.m11_11
            + 4.0 * a * a * self.m12_12
            + c * c * self.m22_22
            + 4.0 * a * self.m11_12
            + 2.0 * c * self.m11_22
            + 4.0 * a * c * self.m12_22;
        r1 + r2
    }
}

/// Fits `(a, b)` by a coarse search over `a in [-4, 4]`, `b in (0, 4]`
/// followed by pattern-search refinement of every coarse local minimum.
///
/// The samples are `f.sample_points(region, n)`, so grid sources may be used.
pub fn fit_shear(f: &FieldSource, region: Rect, n: usize) -> Result<ShearFit> {
    if f.ncomp() != 2 {
        return Err(MglError::Validation("shear fit needs two components".into()));
    }
    let pts = f.sample_points(region, n);
    if pts.is_empty() {
        return Err(MglError::Validation("no sample points in region".into()));
    }
    let metrics = pts
        .iter()
        .map(|p| {
            let f1 = f.jet(*p, 0)?;
            let f2 = f.jet(*p, 1)?;
            Ok([
                1.0 + f1.du * f1.du + f2.du * f2.du,
                f1.du * f1.dv + f2.du * f2.dv,
                1.0 + f1.dv * f1.dv + f2.dv * f2.dv,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let inv = 1.0 / metrics.len() as f64;
    let mut m = MetricMoments::default();
    let mut g_scale = 0.0f64;
    for g in &metrics {
        m.m11_11 += g[0] * g[0] * inv;
        m.m12_12 += g[1] * g[1] * inv;
        m.m22_22 += g[2] * g[2] * inv;
        m.m11_12 += g[0] * g[1] * inv;
        m.m11_22 += g[0] * g[2] * inv;
        m.m12_22 += g[1] * g[2] * inv;
        g_scale = g_scale.max(g[0]).max(g[2]);
    }
    let threshold = if f.is_analytic() { 1e-16 } else { 1e-6 } * g_scale * g_scale;

    const NA: usize = 81;
    const NB: usize = 80;
    let a_at = |i: usize| -4.0 + 0.1 * i as f64;
    let b_at = |j: usize| 0.05 * (j + 1) as f64;
    let mut coarse = vec![0.0; NA * NB];
    for i in 0..NA {
        for j in 0..NB {
            coarse[i * NB + j] = m.objective(a_at(i), b_at(j));
        }
    }
    let mut starts = Vec::new();
    for i in 0..NA {
        for j in 0..NB {
            let v = coarse[i * NB + j];
            let mut is_min = true;
            for di in -1i32..=1 {
                for dj in -1i32..=1 {
                    let (ii, jj) = (i as i32 + di, j as i32 + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= NA as i32 || jj >= NB as i32 {
                        continue;
                    }
                    if coarse[ii as usize * NB + jj as usize] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                starts.push((a_at(i), b_at(j)));
            }
        }
    }

    let mut refined: Vec<ShearCandidate> = starts
        .into_iter()
        .map(|(a, b)| {
            gauss_newton(&metrics, pattern_search(&m, a, b))
        })
        .collect();
    refined.sort_by(|x, y| x.objective.total_cmp(&y.objective));
    let best = refined[0];
    let mut candidates: Vec<ShearCandidate> = Vec::new();
    for c in refined.into_iter().filter(|c| c.objective <= threshold) {
        if !candidates
            .iter()
            .any(|d| (d.a - c.a).abs() < 1e-6 && (d.b - c.b).abs() < 1e-6)
        {
            candidates.push(c);
        }
    }
    Ok(ShearFit {
        best,
        candidates,
        threshold,
    })
}

fn direct_objective(metrics: &[[f64; 3]], a: f64, b: f64) -> f64 {
    let sum: f64 = metrics
        .iter()
        .map(|g| {
            let r1 = b * (g[1] + a * g[2]);
            let r2 = g[0] + 2.0 * a * g[1] + (a * a - b * b) * g[2];
            r1 * r1 + r2 * r2
        })
        .sum();
    sum / metrics.len() as f64
}

/// Gauss-Newton on the per-sample residuals `(r1, r2)`.
fn gauss_newton(metrics: &[[f64; 3]], c: ShearCandidate) -> ShearCandidate {
    let (mut a, mut b) = (c.a, c.b);
    let mut val = direct_objective(metrics, a, b);
    for _ in 0..50 {
        // normal equations J^T J d = -J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for g in metrics {
            let r1 = b * (g[1] + a * g[2]);
            let r2 = g[0] + 2.0 * a * g[1] + (a * a - b * b) * g[2];
            let (r1a, r1b) = (b * g[2], g[1] + a * g[2]);
            let (r2a, r2b) = (2.0 * (g[1] + a * g[2]), -2.0 * b * g[2]);
            jaa += r1a * r1a + r2a * r2a;
            jab += r1a * r1b + r2a * r2b;
            jbb += r1b * r1b + r2b * r2b;
            ga += r1a * r1 + r2a * r2;
            gb += r1b * r1 + r2b * r2;
        }
        let det = jaa * jbb - jab * jab;
        if !(det.abs() > 0.0) {
            break;
        }
        let (na, nb) = (a - (jbb * ga - jab * gb) / det, b - (jaa * gb - jab * ga) / det);
        let nv = direct_objective(metrics, na, nb);
        if !(nb > 0.0 && nv < val) {
            break;
        }
        (a, b, val) = (na, nb, nv);
    }
    ShearCandidate { a, b, objective: val }
}

fn pattern_search(m: &MetricMoments, mut a: f64, mut b: f64) -> ShearCandidate {
    const DIRS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (-1.0, -1.0),
    ];
    let mut val = m.objective(a, b);
    let mut step = 0.05;
    let mut iters = 0;
    while step > 1e-15 && iters < 20_000 {
        iters += 1;
        let mut moved = false;
        for (da, db) in DIRS {
            let (na, nb) = (a + step * da, b + step * db);
            if nb <= 0.0 {
                continue;
            }
            let nv = m.objective(na, nb);
            if nv < val {
                a = na;
                b = nb;
                val = nv;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    ShearCandidate { a, b, objective: val }
}
