//! Fundamental forms, the adapted orthonormal frame of a graph in R^4, second
//! fundamental form coefficients and the curvature invariants `K`, `K_N`,
//! `|h|^2`, `H`. Also the minimal surface operator, the minor sum for maps into
//! R^n and the plane / complex-curve classifier.

use crate::error::{MglError, Result};
use crate::field::{FieldSource, Rect};
use crate::jets::{minor_squares, Jet2};
use crate::par;

pub type Vec4 = [f64; 4];

#[inline]
pub fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
fn scale(s: f64, a: &Vec4) -> Vec4 {
    [s * a[0], s * a[1], s * a[2], s * a[3]]
}

#[inline]
fn axpy(s: f64, x: &Vec4, y: &Vec4) -> Vec4 {
    [s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2], s * x[3] + y[3]]
}

/// Relative tolerances for the checks performed along the frame route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `|F|` and `|E - G|` relative to `E`.
    pub iso: f64,
    /// Laplacians relative to `1 + max|jet|`.
    pub harm: f64,
    /// Normal-field identity `|xi|^2 |eta|^2 - <xi,eta>^2 = b^2 E^2`, relative.
    pub frame: f64,
    /// Algebraic chart identities that hold exactly for isothermal harmonic
    /// charts (omega identity, solved second derivatives), relative.
    pub identity: f64,
}

impl Tolerances {
    /// For closed-form jets.
    pub const fn analytic() -> Self {
        Self {
            iso: 1e-9,
            harm: 1e-9,
            frame: 1e-10,
            identity: 1e-9,
        }
    }

    /// For central-difference jets at spacings around 1e-2.
    pub const fn grid() -> Self {
        Self {
            iso: 2e-3,
            harm: 2e-3,
            frame: 1e-2,
            identity: 5e-2,
        }
    }

    pub fn for_source(src: &FieldSource) -> Self {
        if src.is_analytic() {
            Self::analytic()
        } else {
            Self::grid()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

pub fn first_form(xu: &Vec4, xv: &Vec4) -> Result<FirstForm> {
    let e = dot(xu, xu);
    let f = dot(xu, xv);
    let g = dot(xv, xv);
    let det = e * g - f * f;
    if det <= 1e-14 * (e * g).max(f64::MIN_POSITIVE) {
        return Err(MglError::DegenerateImmersion { det });
    }
    Ok(FirstForm { e, f, g })
}

/// Tangent vectors `X_u = (1, a, phi_u, psi_u)`, `X_v = (0, b, phi_v, psi_v)` of
/// the sheared graph chart.
pub fn graph_tangents(a: f64, b: f64, phi: &Jet2, psi: &Jet2) -> Result<(Vec4, Vec4)> {
    if !(b > 0.0) {
        return Err(MglError::InvalidShear { b });
    }
    Ok((
        [1.0, a, phi.du, psi.du],
        [0.0, b, phi.dv, psi.dv],
    ))
}

/// Orthonormal frame `{e1, e2; xi3, xi4}` along the graph in an isothermal
/// shear chart, together with the unnormalised normals it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameR4 {
    pub e1: Vec4,
    pub e2: Vec4,
    pub xi3: Vec4,
    pub xi4: Vec4,
    pub xi: Vec4,
    pub eta: Vec4,
    /// Conformal factor `E = |X_u|^2`.
    pub e: f64,
    pub xi_norm: f64,
    pub xi_dot_eta: f64,
}

impl FrameR4 {
    pub fn vectors(&self) -> [Vec4; 4] {
        [self.e1, self.e2, self.xi3, self.xi4]
    }
}

pub fn frame_r4(a: f64, b: f64, phi: &Jet2, psi: &Jet2, tol: &Tolerances) -> Result<FrameR4> {
    let (xu, xv) = graph_tangents(a, b, phi, psi)?;
    let ff = first_form(&xu, &xv)?;
    let e = ff.e;
    if ff.f.abs() > tol.iso * e || (ff.e - ff.g).abs() > tol.iso * e {
        return Err(MglError::NotIsothermal {
            f: ff.f.abs(),
            e_minus_g: (ff.e - ff.g).abs(),
            e,
        });
    }
    let xi = [-b * phi.du + a * phi.dv, -phi.dv, b, 0.0];
    let eta = [-b * psi.du + a * psi.dv, -psi.dv, 0.0, b];
    let xi_sq = dot(&xi, &xi);
    let xi_norm = xi_sq.sqrt();
    let xe = dot(&xi, &eta);
    let gram = xi_sq * dot(&eta, &eta) - xe * xe;
    let target = b * b * e * e;
    let gap = (gram - target).abs() / target;
    if gap > tol.frame {
        return Err(MglError::IdentityViolation {
            identity: "normal-field Gram determinant b^2 E^2",
            gap,
        });
    }
    let rs = 1.0 / e.sqrt();
    Ok(FrameR4 {
        e1: scale(rs, &xu),
        e2: scale(rs, &xv),
        xi3: scale(1.0 / xi_norm, &xi),
        xi4: scale(1.0 / (b * xi_norm * e), &axpy(-xe, &xi, &scale(xi_sq, &eta))),
        xi,
        eta,
        e,
        xi_norm,
        xi_dot_eta: xe,
    })
}

/// Coefficients `h^alpha_ij` for the normals `alpha = 3, 4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondForm {
    pub h11_3: f64,
    pub h12_3: f64,
    pub h22_3: f64,
    pub h11_4: f64,
    pub h12_4: f64,
    pub h22_4: f64,
}

impl SecondForm {
    pub fn max_abs(&self) -> f64 {
        [self.h11_3, self.h12_3, self.h22_3, self.h11_4, self.h12_4, self.h22_4]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_harmonic(phi: &Jet2, psi: &Jet2, tol: f64) -> Result<()> {
    let (lp, ls) = (phi.laplacian(), psi.laplacian());
    if lp.abs() > tol * (1.0 + phi.max_abs()) || ls.abs() > tol * (1.0 + psi.max_abs()) {
        return Err(MglError::NotHarmonic {
            lap_phi: lp,
            lap_psi: ls,
        });
    }
    Ok(())
}

/// Second fundamental form in the frame of [`frame_r4`]; the `h22` entries come
/// from harmonicity of `phi, psi`, so the chart must be isothermal and harmonic.
pub fn second_form(
    _a: f64,
    b: f64,
    phi: &Jet2,
    psi: &Jet2,
    frame: &FrameR4,
    tol: &Tolerances,
) -> Result<SecondForm> {
    if !(b > 0.0) {
        return Err(MglError::InvalidShear { b });
    }
    check_harmonic(phi, psi, tol.harm)?;
    let e = frame.e;
    let n = frame.xi_norm;
    let xe = frame.xi_dot_eta;
    let h11_3 = -b * phi.duu / (e * n);
    let h12_3 = -b * phi.duv / (e * n);
    let h11_4 = (xe * phi.duu - n * n * psi.duu) / (e * e * n);
    let h12_4 = (xe * phi.duv - n * n * psi.duv) / (e * e * n);
    Ok(SecondForm {
        h11_3,
        h12_3,
        h22_3: -h11_3,
        h11_4,
        h12_4,
        h22_4: -h11_4,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Invariants {
    /// Gauss curvature.
    pub k: f64,
    /// Normal curvature.
    pub kn: f64,
    /// Squared length of the second fundamental form.
    pub h2: f64,
    /// Components of the mean curvature vector along `xi3`, `xi4`.
    pub h: [f64; 2],
}

pub fn curvatures(sf: &SecondForm) -> Invariants {
    let s = sf;
    let h2 = s.h11_3 * s.h11_3
        + 2.0 * s.h12_3 * s.h12_3
        + s.h22_3 * s.h22_3
        + s.h11_4 * s.h11_4
        + 2.0 * s.h12_4 * s.h12_4
        + s.h22_4 * s.h22_4;
    let trace_tol = 1e-12 * (1.0 + sf.max_abs());
    let trace_free =
        (s.h11_3 + s.h22_3).abs() <= trace_tol && (s.h11_4 + s.h22_4).abs() <= trace_tol;
    if trace_free {
        Invariants {
            k: -(s.h11_3 * s.h11_3 + s.h12_3 * s.h12_3 + s.h11_4 * s.h11_4 + s.h12_4 * s.h12_4),
            kn: 2.0 * (s.h11_3 * s.h12_4 - s.h12_3 * s.h11_4),
            h2,
            h: [0.0, 0.0],
        }
    } else {
        Invariants {
            k: s.h11_3 * s.h22_3 - s.h12_3 * s.h12_3 + s.h11_4 * s.h22_4 - s.h12_4 * s.h12_4,
            kn: s.h11_3 * s.h12_4 + s.h12_3 * s.h22_4 - s.h12_3 * s.h11_4 - s.h22_3 * s.h12_4,
            h2,
            h: [0.5 * (s.h11_3 + s.h22_3), 0.5 * (s.h11_4 + s.h22_4)],
        }
    }
}

/// Frame route: jets of `phi, psi` in an isothermal harmonic chart to
/// invariants.
pub fn frame_invariants(
    a: f64,
    b: f64,
    phi: &Jet2,
    psi: &Jet2,
    tol: &Tolerances,
) -> Result<(FrameR4, SecondForm, Invariants)> {
    let frame = frame_r4(a, b, phi, psi, tol)?;
    let sf = second_form(a, b, phi, psi, &frame, tol)?;
    Ok((frame, sf, curvatures(&sf)))
}

/// Invariants of the graph of `(f1, f2)` from its `(x, y)` jets without any
/// isothermality or minimality assumption.
///
/// Tangent frame: Gram-Schmidt of `(X_x, X_y)`; normal frame: Gram-Schmidt of
/// `((-f1_x, -f1_y, 1, 0), (-f2_x, -f2_y, 0, 1))`. This is the same oriented
/// frame the shear-chart route uses, so `K_N` carries the same sign.
pub fn graph_invariants(f1: &Jet2, f2: &Jet2) -> Result<Invariants> {
    let xx: Vec4 = [1.0, 0.0, f1.du, f2.du];
    let xy: Vec4 = [0.0, 1.0, f1.dv, f2.dv];
    let ff = first_form(&xx, &xy)?;
    // e1 = c1x X_x, e2 = c2x X_x + c2y X_y
    let c1x = 1.0 / ff.e.sqrt();
    let n2 = (ff.g - ff.f * ff.f / ff.e).sqrt();
    let c2x = -ff.f / ff.e / n2;
    let c2y = 1.0 / n2;

    let xi: Vec4 = [-f1.du, -f1.dv, 1.0, 0.0];
    let eta: Vec4 = [-f2.du, -f2.dv, 0.0, 1.0];
    let xi_sq = dot(&xi, &xi);
    let xi3 = scale(1.0 / xi_sq.sqrt(), &xi);
    let perp = axpy(-dot(&xi, &eta) / xi_sq, &xi, &eta);
    let xi4 = scale(1.0 / dot(&perp, &perp).sqrt(), &perp);

    // <nu, X_kl> only sees the last two slots since X_kl = (0, 0, f1_kl, f2_kl).
    let proj = |nu: &Vec4, kl: (f64, f64)| nu[2] * kl.0 + nu[3] * kl.1;
    let xxx = (f1.duu, f2.duu);
    let xxy = (f1.duv, f2.duv);
    let xyy = (f1.dvv, f2.dvv);
    let coeffs = |nu: &Vec4| {
        let (pxx, pxy, pyy) = (proj(nu, xxx), proj(nu, xxy), proj(nu, xyy));
        let h11 = -(c1x * c1x * pxx);
        let h12 = -(c1x * c2x * pxx + c1x * c2y * pxy);
        let h22 = -(c2x * c2x * pxx + 2.0 * c2x * c2y * pxy + c2y * c2y * pyy);
        (h11, h12, h22)
    };
    let (h11_3, h12_3, h22_3) = coeffs(&xi3);
    let (h11_4, h12_4, h22_4) = coeffs(&xi4);
    let sf = SecondForm {
        h11_3,
        h12_3,
        h22_3,
        h11_4,
        h12_4,
        h22_4,
    };
    // General formulas; the trace-free specialisation is exact only for minimal inputs.
    let s = &sf;
    let h2 = h11_3 * h11_3 + 2.0 * h12_3 * h12_3 + h22_3 * h22_3 + h11_4 * h11_4 + 2.0 * h12_4 * h12_4 + h22_4 * h22_4;
    Ok(Invariants {
        k: s.h11_3 * s.h22_3 - s.h12_3 * s.h12_3 + s.h11_4 * s.h22_4 - s.h12_4 * s.h12_4,
        kn: s.h11_3 * s.h12_4 + s.h12_3 * s.h22_4 - s.h12_3 * s.h11_4 - s.h22_3 * s.h12_4,
        h2,
        h: [0.5 * (h11_3 + h22_3), 0.5 * (h11_4 + h22_4)],
    })
}

/// Minimal surface operator
/// `(1 + |f_y|^2) f_xx - 2 <f_x, f_y> f_xy + (1 + |f_x|^2) f_yy`, one entry per
/// component.
pub fn mse_residual(f: &[Jet2]) -> Vec<f64> {
    let a = 1.0 + f.iter().map(|j| j.dv * j.dv).sum::<f64>();
    let b = f.iter().map(|j| j.du * j.dv).sum::<f64>();
    let c = 1.0 + f.iter().map(|j| j.du * j.du).sum::<f64>();
    f.iter()
        .map(|j| a * j.duu - 2.0 * b * j.duv + c * j.dvv)
        .collect()
}

/// `sum_{i<j} (df_i/dx df_j/dy - df_j/dx df_i/dy)^2`; equals `J_f^2` for n = 2.
pub fn minor_sum(fx: &[f64], fy: &[f64]) -> Result<f64> {
    if fx.len() != fy.len() {
        return Err(MglError::DimensionMismatch {
            left: fx.len(),
            right: fy.len(),
        });
    }
    if fx.len() < 2 {
        return Err(MglError::Validation("minor sum needs n >= 2".into()));
    }
    Ok(minor_squares(fx, fy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    Plane,
    ComplexAnalytic,
    OtherMinimal,
    NotMinimal,
}

impl SurfaceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceClass::Plane => "Plane",
            SurfaceClass::ComplexAnalytic => "ComplexAnalytic",
            SurfaceClass::OtherMinimal => "OtherMinimal",
            SurfaceClass::NotMinimal => "NotMinimal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Holomorphic,
    Antiholomorphic,
    NotApplicable,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Holomorphic => "holomorphic",
            Branch::Antiholomorphic => "antiholomorphic",
            Branch::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: SurfaceClass,
    pub branch: Branch,
    /// Largest component of the minimal surface operator over the samples.
    pub max_residual: f64,
    /// Smaller of the two Cauchy-Riemann deviations.
    pub cr_deviation: f64,
    pub max_h2: f64,
    pub scale: f64,
}

/// Default classifier tolerance for a source: `1e-6` for closed-form jets,
/// `1e-3` for grid jets.
pub fn default_classify_tol(src: &FieldSource) -> f64 {
    if src.is_analytic() {
        1e-6
    } else {
        1e-3
    }
}

/// Classifies the graph of a two-component source over the samples of
/// `region` (see [`FieldSource::sample_points`]).
pub fn classify(src: &FieldSource, region: Rect, n: usize, tol: f64) -> Result<Classification> {
    if src.ncomp() != 2 {
        return Err(MglError::Validation(format!(
            "classifier needs a map into R^2, got {} components",
            src.ncomp()
        )));
    }
    let pts = src.sample_points(region, n);
    if pts.is_empty() {
        return Err(MglError::Validation("no sample points in region".into()));
    }
    struct Sample {
        residual: f64,
        first: f64,
        h2: f64,
        cr: [f64; 2],
    }
    let samples: Vec<Sample> = par::map(&pts, |p| -> Result<Sample> {
        let f1 = src.jet(*p, 0)?;
        let f2 = src.jet(*p, 1)?;
        let residual = mse_residual(&[f1, f2])
            .into_iter()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        let h2 = graph_invariants(&f1, &f2)?.h2;
        Ok(Sample {
            residual,
            first: f1.first_max().max(f2.first_max()),
            h2,
            cr: [
                (f1.du - f2.dv).abs() + (f1.dv + f2.du).abs(),
                (f1.du + f2.dv).abs() + (f1.dv - f2.du).abs(),
            ],
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let max_residual = samples.iter().fold(0.0f64, |m, s| m.max(s.residual));
    let scale = 1.0 + samples.iter().fold(0.0f64, |m, s| m.max(s.first));
    let max_h2 = samples.iter().fold(0.0f64, |m, s| m.max(s.h2));
    let cr_holo = samples.iter().fold(0.0f64, |m, s| m.max(s.cr[0]));
    let cr_anti = samples.iter().fold(0.0f64, |m, s| m.max(s.cr[1]));
    let cr_deviation = cr_holo.min(cr_anti);

    let (class, branch) = if max_residual > tol * scale {
        (SurfaceClass::NotMinimal, Branch::NotApplicable)
    } else if max_h2 <= tol {
        (SurfaceClass::Plane, Branch::NotApplicable)
    } else if cr_deviation <= tol * scale {
        let b = if cr_holo <= cr_anti {
            Branch::Holomorphic
        } else {
            Branch::Antiholomorphic
        };
        (SurfaceClass::ComplexAnalytic, b)
    } else {
        (SurfaceClass::OtherMinimal, Branch::NotApplicable)
    };
    Ok(Classification {
        class,
        branch,
        max_residual,
        cr_deviation,
        max_h2,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{builtin_surface, Poly2, PolyMap};

    const TOL: Tolerances = Tolerances::analytic();

    fn z2_jets(u: f64, v: f64) -> (Jet2, Jet2) {
        (
            Jet2::new(u * u - v * v, 2.0 * u, -2.0 * v, 2.0, 0.0, -2.0),
            Jet2::new(2.0 * u * v, 2.0 * v, 2.0 * u, 0.0, 2.0, 0.0),
        )
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn first_form_examples() {
        let ff = first_form(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!((ff.e, ff.f, ff.g), (1.0, 0.0, 1.0));
        let (x, y) = (0.3, -0.8);
        let ff = first_form(&[1.0, 0.0, 2.0 * x, 2.0 * y], &[0.0, 1.0, -2.0 * y, 2.0 * x]).unwrap();
        let e = 1.0 + 4.0 * (x * x + y * y);
        assert!(close(ff.e, e, 1e-15) && close(ff.g, e, 1e-15) && ff.f == 0.0);
        let s = 1.5f64.sqrt();
        let ff = first_form(&[1.0, 1.0, 0.0, 1.0], &[0.0, s, 0.0, -s]).unwrap();
        assert!(close(ff.e, 3.0, 1e-15) && close(ff.g, 3.0, 1e-15) && ff.f.abs() < 1e-15);
        assert!(matches!(
            first_form(&[1.0, 2.0, 0.0, 0.0], &[2.0, 4.0, 0.0, 0.0]),
            Err(MglError::DegenerateImmersion { .. })
        ));
    }

    #[test]
    fn tangents_of_shear_plane_s2() {
        let s = 1.5f64.sqrt();
        let psi = Jet2::new(0.0, 1.0, -s, 0.0, 0.0, 0.0);
        let (xu, xv) = graph_tangents(1.0, s, &Jet2::default(), &psi).unwrap();
        assert_eq!(xu, [1.0, 1.0, 0.0, 1.0]);
        assert_eq!(xv, [0.0, s, 0.0, -s]);
        assert!(matches!(
            graph_tangents(0.0, 0.0, &psi, &psi),
            Err(MglError::InvalidShear { .. })
        ));
    }

    #[test]
    fn frame_examples() {
        let (phi, psi) = z2_jets(0.0, 0.0);
        let fr = frame_r4(0.0, 1.0, &phi, &psi, &TOL).unwrap();
        assert_eq!(fr.xi3, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(fr.xi4, [0.0, 0.0, 0.0, 1.0]);

        let flat = frame_r4(0.0, 1.0, &Jet2::default(), &Jet2::default(), &TOL).unwrap();
        assert_eq!(
            flat.vectors(),
            [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
        );

        let s = 1.5f64.sqrt();
        let psi = Jet2::new(0.0, 1.0, -s, 0.0, 0.0, 0.0);
        let fr = frame_r4(1.0, s, &Jet2::default(), &psi, &TOL).unwrap();
        assert_eq!(fr.xi, [0.0, 0.0, s, 0.0]);
        assert_eq!(fr.xi3, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(fr.xi_dot_eta, 0.0);
    }

    #[test]
    fn frame_rejects_non_isothermal_chart() {
        let phi = Jet2::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            frame_r4(0.0, 1.0, &phi, &Jet2::default(), &TOL),
            Err(MglError::NotIsothermal { .. })
        ));
    }

    #[test]
    fn second_form_and_curvatures_of_z2_at_origin() {
        let (phi, psi) = z2_jets(0.0, 0.0);
        let (_, sf, inv) = frame_invariants(0.0, 1.0, &phi, &psi, &TOL).unwrap();
        assert_eq!((sf.h11_3, sf.h12_3, sf.h11_4, sf.h12_4), (-2.0, 0.0, 0.0, -2.0));
        assert_eq!((inv.k, inv.kn, inv.h2, inv.h), (-8.0, 8.0, 16.0, [0.0, 0.0]));
    }

    #[test]
    fn curvatures_of_z2_off_origin() {
        let (phi, psi) = z2_jets(0.5, 0.0);
        let (fr, _, inv) = frame_invariants(0.0, 1.0, &phi, &psi, &TOL).unwrap();
        assert!(close(fr.e, 2.0, 1e-15));
        assert!(close(inv.k, -1.0, 1e-14));
        assert!(close(inv.kn, 1.0, 1e-14));
    }

    #[test]
    fn affine_charts_have_zero_second_form() {
        let phi = Jet2::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        let sf = second_form(0.0, 2f64.sqrt(), &phi, &Jet2::default(),
            &frame_r4(0.0, 2f64.sqrt(), &phi, &Jet2::default(), &TOL).unwrap(), &TOL).unwrap();
        assert_eq!(sf, SecondForm::default());
        assert_eq!(curvatures(&SecondForm::default()), Invariants::default());
    }

    #[test]
    fn second_form_rejects_non_harmonic_jets() {
        let phi = Jet2::new(0.0, 0.0, 0.0, 2.0, 0.0, 0.0);
        let fr = frame_r4(0.0, 1.0, &phi, &Jet2::default(), &TOL).unwrap();
        assert!(matches!(
            second_form(0.0, 1.0, &phi, &Jet2::default(), &fr, &TOL),
            Err(MglError::NotHarmonic { .. })
        ));
    }

    #[test]
    fn general_formulas_used_off_trace() {
        let sf = SecondForm {
            h11_3: 1.0,
            h22_3: 1.0,
            ..Default::default()
        };
        let inv = curvatures(&sf);
        assert_eq!(inv.k, 1.0);
        assert_eq!(inv.h, [1.0, 0.0]);
        assert_eq!(inv.h2, 2.0);
    }

    #[test]
    fn mse_examples() {
        let aff = [Jet2::new(0.0, 2.0, 1.0, 0.0, 0.0, 0.0), Jet2::new(0.0, 1.0, -1.0, 0.0, 0.0, 0.0)];
        assert_eq!(mse_residual(&aff), vec![0.0, 0.0]);
        let (a, b) = z2_jets(0.7, -0.4);
        let r = mse_residual(&[a, b]);
        assert!(r[0].abs() < 1e-14 && r[1].abs() < 1e-14);
        let sq = [Jet2::new(0.25, 1.0, 0.0, 2.0, 0.0, 0.0), Jet2::default()];
        assert_eq!(mse_residual(&sq), vec![2.0, 0.0]);
    }

    #[test]
    fn minor_sum_examples() {
        assert_eq!(minor_sum(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let (a, b) = z2_jets(0.6, 0.8);
        let r2: f64 = 1.0;
        assert!(close(minor_sum(&[a.du, b.du], &[a.dv, b.dv]).unwrap(), 16.0 * r2 * r2, 1e-14));
        assert_eq!(minor_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 54.0);
        assert!(matches!(minor_sum(&[1.0], &[1.0, 2.0]), Err(MglError::DimensionMismatch { .. })));
    }

    #[test]
    fn classifier_examples() {
        let sq = FieldSource::analytic(PolyMap::new(vec![
            Poly2::quadratic(1.0, 0.0, 0.0),
            Poly2::quadratic(0.0, 0.0, 1.0),
        ]));
        let c = classify(&sq, Rect::square(1.0), 21, 1e-6).unwrap();
        assert_eq!(c.class, SurfaceClass::NotMinimal);

        let z3 = builtin_surface("z3").unwrap().source;
        let c = classify(&z3, Rect::square(1.0), 21, 1e-6).unwrap();
        assert_eq!((c.class, c.branch), (SurfaceClass::ComplexAnalytic, Branch::Holomorphic));

        let monkey = builtin_surface("monkey").unwrap().source;
        let c = classify(&monkey, Rect::square(1.0), 21, 1e-6).unwrap();
        assert_eq!((c.class, c.branch), (SurfaceClass::ComplexAnalytic, Branch::Antiholomorphic));

        let plane = builtin_surface("plane").unwrap().source;
        assert_eq!(classify(&plane, Rect::square(1.0), 21, 1e-6).unwrap().class, SurfaceClass::Plane);

        let exp = builtin_surface("exp_shear").unwrap().source;
        assert_eq!(classify(&exp, Rect::square(1.0), 21, 1e-6).unwrap().class, SurfaceClass::OtherMinimal);
    }

    /// `h^alpha_ij = -<xi_alpha, X_ij> / E` computed directly, including `h22`
    /// from `X_vv`; independent of the closed-form coefficients.
    fn second_form_oracle(phi: &Jet2, psi: &Jet2, fr: &FrameR4) -> SecondForm {
        let xuu = [0.0, 0.0, phi.duu, psi.duu];
        let xuv = [0.0, 0.0, phi.duv, psi.duv];
        let xvv = [0.0, 0.0, phi.dvv, psi.dvv];
        let h = |nu: &Vec4, x: &Vec4| -dot(nu, x) / fr.e;
        SecondForm {
            h11_3: h(&fr.xi3, &xuu),
            h12_3: h(&fr.xi3, &xuv),
            h22_3: h(&fr.xi3, &xvv),
            h11_4: h(&fr.xi4, &xuu),
            h12_4: h(&fr.xi4, &xuv),
            h22_4: h(&fr.xi4, &xvv),
        }
    }

    #[test]
    fn closed_form_coefficients_match_projection_oracle() {
        let ex = crate::surfaces::exp_shear_graph(1.0, 2.0);
        for p in [[0.2, 0.1], [-0.7, 0.4], [0.9, -0.9]] {
            let z = num_complex::Complex64::new(p[0], p[1]);
            let (phi, _) = ex.chart_jet(z, 0);
            let (psi, _) = ex.chart_jet(z, 1);
            let fr = frame_r4(1.0, 2.0, &phi, &psi, &TOL).unwrap();
            let sf = second_form(1.0, 2.0, &phi, &psi, &fr, &TOL).unwrap();
            let or = second_form_oracle(&phi, &psi, &fr);
            let s = 1.0 + or.max_abs();
            for (x, y) in [
                (sf.h11_3, or.h11_3), (sf.h12_3, or.h12_3), (sf.h22_3, or.h22_3),
                (sf.h11_4, or.h11_4), (sf.h12_4, or.h12_4), (sf.h22_4, or.h22_4),
            ] {
                assert!((x - y).abs() < 1e-12 * s, "{sf:?} vs {or:?}");
            }
        }
    }

    #[test]
    fn graph_route_agrees_with_frame_route_on_sheared_chart() {
        let b = builtin_surface("exp_shear").unwrap();
        let (a, bb) = b.shear.unwrap();
        let ex = crate::surfaces::exp_shear_graph(a, bb);
        for p in [[0.3, -0.2], [-0.5, 0.8]] {
            let z = num_complex::Complex64::new(p[0], p[1]);
            let (phi, _) = ex.chart_jet(z, 0);
            let (psi, _) = ex.chart_jet(z, 1);
            let (_, _, inv) = frame_invariants(a, bb, &phi, &psi, &TOL).unwrap();
            let xy = [p[0], a * p[0] + bb * p[1]];
            let g = graph_invariants(&b.source.jet(xy, 0).unwrap(), &b.source.jet(xy, 1).unwrap()).unwrap();
            assert!(close(g.k, inv.k, 1e-10), "{g:?} {inv:?}");
            assert!(close(g.kn, inv.kn, 1e-10), "{g:?} {inv:?}");
            assert!(g.h[0].abs() < 1e-10 && g.h[1].abs() < 1e-10);
        }
    }
}
