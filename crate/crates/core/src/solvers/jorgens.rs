use crate::error::{MglError, Result};
use crate::field::Rect;
use crate::geometry::mse_residual;
use crate::grid::GridField;
use crate::jets::{fd_jet, Jet2};

/// `(f_xx f_yy - f_xy^2 - 1) / (f_xx + f_yy)`.
pub fn theta_field(f: &Jet2) -> Result<f64> {
    let tr = f.duu + f.dvv;
    if !(tr.abs() > 1e-10) {
        return Err(MglError::DenominatorVanishes {
            what: "f_xx + f_yy",
            value: tr,
        });
    }
    Ok((f.duu * f.dvv - f.duv * f.duv - 1.0) / tr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JorgensReport {
    /// `max |J_g - 1|` for `g = (f_x, f_y)`.
    pub max_j_gap: f64,
    /// Max-norm of the minimal surface residual of `g`.
    pub max_mse_residual: f64,
    /// Both maxima at most the tolerance passed in.
    pub within_tol: bool,
    /// The gradient map `g` on the nodes two cells inside `f`'s grid.
    pub gradient: GridField,
}

/// Forms `g = (f_x, f_y)` by central differences and measures how far it is
/// from a minimal graph with unit Jacobian, over the nodes four cells inside
/// the grid of `f`.
pub fn jorgens_pipeline(f: &GridField, tol: f64) -> Result<JorgensReport> {
    jorgens_pipeline_on(f, tol, Rect::PLANE)
}

/// [`jorgens_pipeline`] with the maxima taken only over nodes inside `region`.
pub fn jorgens_pipeline_on(f: &GridField, tol: f64, region: Rect) -> Result<JorgensReport> {
    if f.ncomp() != 1 {
        return Err(MglError::Validation(format!(
            "gradient pipeline needs a scalar field, got {} components",
            f.ncomp()
        )));
    }
    if f.nx() < 9 || f.ny() < 9 {
        return Err(MglError::Validation(format!(
            "gradient pipeline needs at least 9x9 nodes, got {}x{}",
            f.nx(),
            f.ny()
        )));
    }
    let (x0, y0) = f.origin();
    let (hx, hy) = (f.hx(), f.hy());
    let g = GridField::from_fn(
        f.nx() - 4,
        f.ny() - 4,
        x0 + 2.0 * hx,
        y0 + 2.0 * hy,
        hx,
        hy,
        2,
        |x, y, c| {
            let (i, j) = f.locate([x, y]).expect("node of the inner grid");
            if c == 0 {
                (f.get(i + 1, j, 0) - f.get(i - 1, j, 0)) / (2.0 * hx)
            } else {
                (f.get(i, j + 1, 0) - f.get(i, j - 1, 0)) / (2.0 * hy)
            }
        },
    )?;
    let mut max_j_gap = 0.0f64;
    let mut max_mse_residual = 0.0f64;
    let mut count = 0usize;
    for (i, j) in g.interior_nodes(2) {
        if !region.contains(g.node(i, j)) {
            continue;
        }
        count += 1;
        let g1 = fd_jet(&g, i, j, 0)?;
        let g2 = fd_jet(&g, i, j, 1)?;
        let jac = g1.du * g2.dv - g1.dv * g2.du;
        max_j_gap = max_j_gap.max((jac - 1.0).abs());
        for r in mse_residual(&[g1, g2]) {
            max_mse_residual = max_mse_residual.max(r.abs());
        }
    }
    if count == 0 {
        return Err(MglError::Validation("no pipeline nodes inside the region".into()));
    }
    if !(max_j_gap.is_finite() && max_mse_residual.is_finite()) {
        return Err(MglError::NonFinite("gradient pipeline"));
    }
    Ok(JorgensReport {
        max_j_gap,
        max_mse_residual,
        within_tol: max_j_gap <= tol && max_mse_residual <= tol,
        gradient: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_grid;
    use crate::surfaces::{Poly2, PolyMap};

    #[test]
    fn theta_examples() {
        assert_eq!(theta_field(&Jet2::new(0.0, 0.0, 0.0, 1.0, 0.0, 1.0)).unwrap(), 0.0);
        assert_eq!(theta_field(&Jet2::new(0.0, 0.0, 0.0, 2.0, 0.0, 2.0)).unwrap(), 0.75);
        assert!(matches!(
            theta_field(&Jet2::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0)),
            Err(MglError::DenominatorVanishes { .. })
        ));
    }

    #[test]
    fn quadratics_give_affine_gradients() {
        for (q, jac) in [(Poly2::quadratic(0.5, 0.0, 0.5), 1.0), (Poly2::quadratic(1.0, 1.0, 0.5), 1.0)] {
            let f = sample_grid(&PolyMap::new(vec![q]), Rect::square(1.0), 33).unwrap();
            let r = jorgens_pipeline(&f, 1e-12).unwrap();
            assert!(r.max_j_gap <= 1e-12 * jac && r.max_mse_residual <= 1e-12, "{r:?}");
            assert!(r.within_tol);
        }
        let f = sample_grid(&PolyMap::new(vec![Poly2::quadratic(1.0, 0.0, 1.0)]), Rect::square(1.0), 17).unwrap();
        let r = jorgens_pipeline(&f, 1e-6).unwrap();
        assert!((r.max_j_gap - 3.0).abs() < 1e-10 && !r.within_tol);
    }
}
