use mgl_core::MglError;
use mgl_web::demo;

#[test]
fn heatmap_of_z2_has_closed_form_values() {
    let h = demo::curvatures("z2", 0.5, 3).unwrap();
    assert_eq!(h.k.len(), 9);
    // centre node is the origin, right-middle node is (0.5, 0)
    assert!((h.k[4] + 8.0).abs() <= 1e-10);
    assert!((h.k[5] + 1.0).abs() <= 1e-10);
    for (k, kn) in h.k.iter().zip(&h.kn) {
        assert!((k + kn).abs() <= 1e-10);
    }
    assert!(h.ratio.iter().all(|r| (r - 1.0).abs() <= 1e-10));
}

#[test]
fn heatmap_marks_flat_points() {
    let h = demo::curvatures("z3", 1.0, 3).unwrap();
    assert!(h.ratio[4].is_nan());
    assert_eq!(h.k[4], 0.0);
}

#[test]
fn jacobian_scan_matches_closed_form() {
    // J = 4 r^2 - 9 for z^2 + 3 conj z
    let rows = demo::jacobian_scan(3.0, 2.0, 4, 257).unwrap();
    let want = [9.0 - 1.0, 5.0, 0.0, 0.0];
    for (got, w) in rows.iter().zip(want) {
        assert!((got - w).abs() <= 1e-2, "{rows:?}");
    }
}

#[test]
fn mse_reproduces_z2() {
    let run = demo::mse("z2", 0.5, 17).unwrap();
    assert_eq!(run.error.len(), 17 * 17);
    assert!(run.max_error <= 1e-10, "{}", run.max_error);
    assert!(run.residual <= 1e-10);
}

#[test]
fn bad_arguments_are_validation_errors() {
    assert!(matches!(demo::curvatures("z2", -1.0, 9), Err(MglError::Validation(_))));
    assert!(matches!(demo::curvatures("z2", 1.0, 1000), Err(MglError::Validation(_))));
    assert!(matches!(demo::jacobian_scan(1.0, 1.0, 0, 33), Err(MglError::Validation(_))));
    assert!(matches!(demo::mse("torus", 0.5, 17), Err(MglError::UnknownSurface(_))));
}
