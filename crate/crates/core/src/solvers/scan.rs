use crate::error::{MglError, Result};
use crate::field::{FieldSource, Rect};
use crate::geometry::{default_classify_tol, frame_invariants, mse_residual, Tolerances};
use crate::isothermal::{check_radii, fit_shear, iso_residual_from, omega_from, shear_pullback, EPS_OMEGA};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub r: f64,
    pub sup_abs_j: f64,
    /// Largest conformal factor `E` of the shear chart.
    pub sup_e: f64,
    /// Smallest `E` over the `M1` points, if any.
    pub min_e_m1: Option<f64>,
    /// `inf |K_N| / |K|` over `M1` points with `K < 0`; `None` when there are
    /// no such points.
    pub inf_ratio: Option<f64>,
}

struct Sample {
    r2: f64,
    abs_j: f64,
    e: f64,
    m1: bool,
    ratio: Option<f64>,
}

/// Growth of `|J_f|`, the conformal factor and the curvature ratio over the
/// disks `x^2 + y^2 <= R^2`. The shear is fitted when not supplied.
pub fn bernstein_scan(f: &FieldSource, shear: Option<(f64, f64)>, radii: &[f64], grid_n: usize) -> Result<Vec<ScanRow>> {
    if f.ncomp() != 2 {
        return Err(MglError::Validation("scan needs a map into R^2".into()));
    }
    check_radii(radii)?;
    let r_max = *radii.last().unwrap();
    let region = Rect::square(r_max);
    let (a, b) = match shear {
        Some(s) => s,
        None => {
            let fit = fit_shear(f, region, grid_n.min(41))?;
            (fit.best.a, fit.best.b)
        }
    };
    let chart = shear_pullback(f.clone(), a, b)?;
    let tol = Tolerances::for_source(f);
    let min_tol = default_classify_tol(f);
    let pts: Vec<[f64; 2]> = f
        .sample_points(region, grid_n)
        .into_iter()
        .filter(|p| p[0] * p[0] + p[1] * p[1] <= r_max * r_max * (1.0 + 1e-12))
        .collect();
    if pts.is_empty() {
        return Err(MglError::Validation("no sample points within the largest radius".into()));
    }
    let samples: Vec<Sample> = par::map(&pts, |p| -> Result<Sample> {
        let cj = chart.jets_at_xy(*p)?;
        let [f1, f2] = cj.f;
        let scale = 1.0 + f1.first_max().max(f2.first_max());
        let residual = mse_residual(&cj.f).into_iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if residual > min_tol * scale {
            return Err(MglError::NotMinimal { residual });
        }
        let e = iso_residual_from(a, b, &cj).e;
        let m1 = omega_from(&cj, EPS_OMEGA, tol.identity)?.in_m1;
        let ratio = if m1 {
            let (_, _, inv) = frame_invariants(a, b, &cj.phi, &cj.psi, &tol)?;
            (inv.k < 0.0).then(|| inv.kn.abs() / inv.k.abs())
        } else {
            None
        };
        Ok(Sample {
            r2: p[0] * p[0] + p[1] * p[1],
            abs_j: (f1.du * f2.dv - f1.dv * f2.du).abs(),
            e,
            m1,
            ratio,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    Ok(radii
        .iter()
        .map(|&r| {
            let lim = r * r * (1.0 + 1e-12);
            let mut row = ScanRow {
                r,
                sup_abs_j: 0.0,
                sup_e: 0.0,
                min_e_m1: None,
                inf_ratio: None,
            };
            for s in samples.iter().filter(|s| s.r2 <= lim) {
                row.sup_abs_j = row.sup_abs_j.max(s.abs_j);
                row.sup_e = row.sup_e.max(s.e);
                if s.m1 {
                    row.min_e_m1 = Some(row.min_e_m1.map_or(s.e, |m| m.min(s.e)));
                }
                if let Some(q) = s.ratio {
                    row.inf_ratio = Some(row.inf_ratio.map_or(q, |m| m.min(q)));
                }
            }
            row
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{builtin_surface, Poly2, PolyMap};

    #[test]
    fn z2_growth_and_ratio() {
        let rows = bernstein_scan(&builtin_surface("z2").unwrap().source, Some((0.0, 1.0)), &[1.0, 2.0, 4.0], 65).unwrap();
        for (row, want) in rows.iter().zip([4.0, 16.0, 64.0]) {
            assert!((row.sup_abs_j - want).abs() <= 1e-6 * want, "{row:?}");
            assert!((row.inf_ratio.unwrap() - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn z3_on_the_unit_disk() {
        let rows = bernstein_scan(&builtin_surface("z3").unwrap().source, None, &[1.0], 41).unwrap();
        assert!((rows[0].sup_abs_j - 9.0).abs() < 1e-9);
        assert!((rows[0].inf_ratio.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn affine_maps_have_no_ratio() {
        let plane = builtin_surface("plane").unwrap();
        let rows = bernstein_scan(&plane.source, plane.shear, &[1.0, 2.0], 21).unwrap();
        assert_eq!(rows[0].sup_abs_j, rows[1].sup_abs_j);
        assert!(rows.iter().all(|r| r.inf_ratio.is_none() && r.min_e_m1.is_none()));
    }

    #[test]
    fn non_minimal_input_is_rejected() {
        let f = FieldSource::analytic(PolyMap::new(vec![Poly2::quadratic(1.0, 0.0, 0.0), Poly2::quadratic(0.0, 0.0, 1.0)]));
        assert!(matches!(
            bernstein_scan(&f, Some((0.0, 1.0)), &[1.0], 9),
            Err(MglError::NotMinimal { .. })
        ));
    }
}
