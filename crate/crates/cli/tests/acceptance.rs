//! Acceptance suite. Prints one PASS/FAIL line per criterion straight to the
//! process's stderr so the lines appear even when test output is captured.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mgl_cli::report::strip_timing;
use mgl_cli::run_with;
use mgl_core::field::{sample_grid, FieldSource, Rect};
use mgl_core::geometry::{classify, frame_invariants, SurfaceClass, Tolerances};
use mgl_core::grid::fmt17;
use mgl_core::isothermal::{min_jacobian_scan, shear_pullback, w_ratio};
use mgl_core::surfaces::{HarmonicGraph, Holo, Poly2, PolyMap};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const MINIMAL_BUILTINS: [&str; 7] = ["z2", "z3", "monkey", "plane", "shear_plane_s1", "shear_plane_s2", "exp_shear"];

/// Runs CLI commands and library checks, keeping every report and every
/// numeric result for the determinism comparison.
struct Harness {
    dir: PathBuf,
    records: Vec<(String, String)>,
}

impl Harness {
    fn cli(&mut self, args: &[&str]) -> Value {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("mgl").chain(args.iter().copied()), &mut out, &mut err);
        let out = String::from_utf8(out).unwrap();
        assert_eq!(code, 0, "mgl {}: {}", args.join(" "), String::from_utf8_lossy(&err));
        self.records.push((args.join(" "), strip_timing(&out)));
        serde_json::from_str(&out).unwrap()
    }

    fn record(&mut self, label: impl Into<String>, values: &[f64]) {
        let text = values.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(" ");
        self.records.push((label.into(), text));
    }

    fn path(&self, name: &str) -> String {
        self.dir.join(name).to_str().unwrap().to_string()
    }
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_cubic(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = (0..4)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    // keep the degree exactly three
    if c[3].norm() < 0.25 {
        c[3] += Complex64::new(0.5, 0.0);
    }
    c
}

fn write_grid(path: &Path, src: &FieldSource, rect: Rect, n: usize) {
    let FieldSource::Analytic(e) = src else { unreachable!() };
    let g = sample_grid(e.as_ref(), rect, n).unwrap();
    std::fs::write(path, g.to_text()).unwrap();
}

const DOMAIN: [&str; 4] = ["-1", "1", "-1", "1"];

fn verify_args<'a>(surface: &'a str, n: &'a str) -> Vec<&'a str> {
    let mut v = vec!["verify", "--surface", surface, "--n", n, "--domain"];
    v.extend(DOMAIN);
    v
}

fn c1(h: &mut Harness) -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for s in ["z2", "z3", "shear_plane_s1", "shear_plane_s2"] {
        let r = h.cli(&verify_args(s, "41"));
        let gaps = r["results"]["max_gaps"].as_object().unwrap();
        worst = gaps.values().map(num).fold(worst, f64::max);
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(worst <= 1e-9 && secs < 5.0, format!("max relative identity gap {worst:.2e} (<= 1e-9), {secs:.2} s (< 5 s)"))
}

fn c2(h: &mut Harness) -> Outcome {
    let mut route: f64 = 0.0;
    let mut ok = true;
    for s in ["z2", "z3"] {
        let r = h.cli(&verify_args(s, "41"));
        let c = &r["results"]["curvature"];
        ok &= c["conformal_route_checked"] == true && c["m1_points"].as_u64().unwrap() > 0;
        route = route.max(num(&c["max_route_disagreement"]));
    }
    let mut args = vec!["invariants", "--surface", "z2", "--n", "5", "--domain"];
    args.extend(DOMAIN);
    let r = h.cli(&args);
    let rows = r["results"]["table"]["rows"].as_array().unwrap();
    let k_at = |x: f64, y: f64| {
        rows.iter()
            .find(|row| num(&row[0]) == x && num(&row[1]) == y)
            .map(|row| num(&row[2]))
            .unwrap()
    };
    let (k0, k5) = (k_at(0.0, 0.0), k_at(0.5, 0.0));
    ok &= route <= 1e-8 && (k0 + 8.0).abs() <= 1e-8 && (k5 + 1.0).abs() <= 1e-8;
    outcome(ok, format!("route disagreement {route:.2e} (<= 1e-8); K(0,0) = {k0}, K(0.5,0) = {k5}"))
}

fn c3(h: &mut Harness) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = Tolerances::analytic();
    let (mut analytic_dev, mut grid_dev): (f64, f64) = (0.0, 0.0);
    let mut classes_ok = true;
    // h = 1/64 on [-1, 1]^2
    let rect = Rect::square(1.0);
    let grid_n = 129;

    for s in ["z2", "z3"] {
        let r = h.cli(&verify_args(s, "41"));
        analytic_dev = analytic_dev.max(num(&r["results"]["complex_curve"]["max_abs_ratio_deviation"]));
        let src = mgl_core::surfaces::builtin_surface(s).unwrap().source;
        let path = h.path(&format!("{s}.grid"));
        write_grid(Path::new(&path), &src, rect, grid_n);
        let r = h.cli(&["invariants", "--input", &path]);
        grid_dev = grid_dev.max(num(&r["results"]["summary"]["max_abs_ratio_deviation"]));
        let r = h.cli(&["classify", "--surface", s]);
        classes_ok &= r["results"]["class"] == "ComplexAnalytic";
    }
    for k in 0..20 {
        let c = random_cubic(&mut rng);
        let src = FieldSource::analytic(HarmonicGraph::holomorphic(Holo::poly(&c)));
        let ch = shear_pullback(src.clone(), 0.0, 1.0).unwrap();
        for p in rect.lattice(41) {
            let j = ch.jets(p).unwrap();
            let (_, _, inv) = frame_invariants(0.0, 1.0, &j.phi, &j.psi, &tol).unwrap();
            if inv.k.abs() > mgl_cli::commands::RATIO_K_FLOOR {
                analytic_dev = analytic_dev.max((inv.kn.abs() / inv.k.abs() - 1.0).abs());
            }
        }
        let path = h.path(&format!("cubic{k}.grid"));
        write_grid(Path::new(&path), &src, rect, grid_n);
        let r = h.cli(&["invariants", "--input", &path]);
        grid_dev = grid_dev.max(num(&r["results"]["summary"]["max_abs_ratio_deviation"]));
        let cl = classify(&src, rect, 21, 1e-6).unwrap();
        classes_ok &= cl.class == SurfaceClass::ComplexAnalytic;
        h.record(format!("cubic {k}"), &[cl.max_residual, cl.cr_deviation]);
    }
    for k in 0..20 {
        let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let src = FieldSource::analytic(PolyMap::new(vec![
            Poly2::affine(v[0], v[1], v[2]),
            Poly2::affine(v[3], v[4], v[5]),
        ]));
        let cl = classify(&src, rect, 21, 1e-6).unwrap();
        classes_ok &= cl.class == SurfaceClass::Plane;
        h.record(format!("affine {k}"), &[cl.max_residual, cl.max_h2]);
    }
    let squares = FieldSource::analytic(PolyMap::new(vec![
        Poly2::quadratic(1.0, 0.0, 0.0),
        Poly2::quadratic(0.0, 0.0, 1.0),
    ]));
    classes_ok &= classify(&squares, rect, 21, 1e-6).unwrap().class == SurfaceClass::NotMinimal;
    h.record("ratio deviations", &[analytic_dev, grid_dev]);

    outcome(
        analytic_dev <= 1e-8 && grid_dev <= 1e-3 && classes_ok,
        format!(
            "max ||K_N|/|K| - 1|: analytic {analytic_dev:.2e} (<= 1e-8), grid {grid_dev:.2e} (<= 1e-3); classes {}",
            if classes_ok { "as expected" } else { "WRONG" }
        ),
    )
}

fn c4(h: &mut Harness) -> Outcome {
    let mut gap: f64 = 0.0;
    let mut points = 0u64;
    for s in MINIMAL_BUILTINS {
        let r = h.cli(&verify_args(s, "41"));
        gap = gap.max(num(&r["results"]["curvature"]["max_ratio_identity_gap"]));
        points += r["results"]["curvature"]["ratio_identity_points"].as_u64().unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut monotone = true;
    let shears = [(1.0, 2.0), (0.0, 2f64.sqrt()), (1.0, 1.5f64.sqrt()), (-0.7, 0.3), (2.5, 1.0), (0.0, 0.5)];
    for (a, b) in shears {
        let s = 1.0 + a * a + b * b;
        let mut t: Vec<f64> = (0..1000).map(|_| s / 2.0 + rng.gen_range(0.0..100.0)).collect();
        t.sort_by(f64::total_cmp);
        let w: Vec<f64> = t.iter().map(|&t| w_ratio(t, a, b).w).collect();
        monotone &= w.windows(2).zip(t.windows(2)).all(|(w, t)| t[1] == t[0] || w[1] > w[0]);
        h.record(format!("W {a} {b}"), &w[..5]);
    }
    outcome(
        gap <= 1e-8 && monotone,
        format!(
            "max |K_N^2/K^2 - 4b^2 W(E)| / (1 + W) = {gap:.2e} over {points} M1 points (<= 1e-8); W increasing on 1000 samples for {} shears: {monotone}",
            shears.len()
        ),
    )
}

fn order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

fn c5(h: &mut Harness) -> Outcome {
    let t0 = Instant::now();
    let half = ["--domain", "-0.5", "0.5", "-0.5", "0.5"];
    let errors = |h: &mut Harness, s: &str| -> Vec<f64> {
        ["17", "33", "65"]
            .iter()
            .map(|n| {
                let mut a = vec!["solve-mse", "--surface", s, "--n", n];
                a.extend(half);
                let r = h.cli(&a);
                assert_eq!(r["results"]["manufactured_solution"], true);
                num(&r["results"]["max_error_vs_source"])
            })
            .collect()
    };
    let z2 = errors(h, "z2");
    let z3 = errors(h, "z3");
    // z^2 is reproduced to rounding, which leaves no truncation error to measure
    let z2_exact = z2.iter().all(|e| *e <= 1e-12);
    let z2_order = order(z2[1], z2[2]);
    let z3_order = order(z3[1], z3[2]).min(order(z3[0], z3[1]));
    let mut a = vec!["solve-mse", "--surface", "plane", "--n", "33", "--tol", "1e-12"];
    a.extend(half);
    let aff = h.cli(&a);
    let aff_iters = aff["results"]["iterations"].as_u64().unwrap();
    let aff_res = num(&aff["results"]["final_residual_norm"]);
    let secs = t0.elapsed().as_secs_f64();
    let pass = z2[2] <= 5e-3
        && (z2_order >= 1.8 || z2_exact)
        && z3_order >= 1.8
        && aff_iters <= 2
        && aff_res <= 1e-12
        && secs < 60.0;
    outcome(
        pass,
        format!(
            "z2 error at n=65 {:.2e} (<= 5e-3){}; z3 errors {:.2e}/{:.2e}/{:.2e}, order {z3_order:.2} (>= 1.8); affine {aff_iters} steps, residual {aff_res:.2e}; {secs:.1} s (< 60 s)",
            z2[2],
            if z2_exact { ", exact at every n so order is undefined" } else { "" },
            z3[0],
            z3[1],
            z3[2],
        ),
    )
}

fn c6(h: &mut Harness) -> Outcome {
    let mut quad_err: f64 = 0.0;
    let mut quad_gap: f64 = 0.0;
    for s in ["quadratic-identity", "quadratic-skew"] {
        let r = h.cli(&["solve-ma", "--boundary", s, "--n", "33", "--tol", "1e-12"]);
        quad_err = quad_err.max(num(&r["results"]["max_error_vs_source"]));
        let r = h.cli(&["jorgens", "--surface", s, "--solve", "--n", "65", "--tol", "1e-11"]);
        quad_gap = quad_gap
            .max(num(&r["results"]["max_j_gap"]))
            .max(num(&r["results"]["max_mse_residual"]));
    }
    let mut j = Vec::new();
    let mut m = Vec::new();
    for n in ["17", "33", "65"] {
        let r = h.cli(&[
            "jorgens", "--surface", "ma-cubic", "--solve", "--n", n, "--tol", "1e-11", "--domain", "-0.5", "0.5", "-0.5",
            "0.5", "--region", "-0.25", "0.25", "-0.25", "0.25",
        ]);
        j.push(num(&r["results"]["max_j_gap"]));
        m.push(num(&r["results"]["max_mse_residual"]));
    }
    let oj = order(j[0], j[1]).min(order(j[1], j[2]));
    let om = order(m[0], m[1]).min(order(m[1], m[2]));
    outcome(
        quad_err <= 1e-10 && quad_gap <= 1e-6 && oj >= 1.8 && om >= 1.8,
        format!(
            "quadratic data: error {quad_err:.2e} (<= 1e-10), n=65 gradient gaps {quad_gap:.2e} (<= 1e-6); ma-cubic |J_g - 1| {:.2e}/{:.2e}/{:.2e} order {oj:.2}, MSE residual {:.2e}/{:.2e}/{:.2e} order {om:.2} (>= 1.8)",
            j[0], j[1], j[2], m[0], m[1], m[2]
        ),
    )
}

fn c7(h: &mut Harness) -> Outcome {
    let rows = |r: &Value| -> Vec<f64> {
        r["results"]["table"]["rows"].as_array().unwrap().iter().map(|row| num(&row[1])).collect()
    };
    let series = rows(&h.cli(&["scan", "--kind", "jacobian", "--surface", "z2_3zbar", "--radii", "1,1.5,2", "--n", "257"]));
    let scan_ok = series.iter().zip([5.0, 0.0, 0.0]).all(|(v, w)| (v - w).abs() <= 1e-2);
    let affine = rows(&h.cli(&["scan", "--kind", "jacobian", "--surface", "plane", "--radii", "0.5,1,2,4", "--n", "65"]));
    let affine_ok = affine.iter().all(|v| *v == affine[0]);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut monotone = true;
    let radii = [0.25, 0.5, 1.0, 1.5, 2.0];
    for k in 0..20 {
        let poly = |rng: &mut ChaCha8Rng| {
            let deg = rng.gen_range(2..=4);
            let c: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            Holo::poly(&c)
        };
        let g = HarmonicGraph {
            holo: poly(&mut rng),
            anti: poly(&mut rng),
            a: 0.0,
            b: 1.0,
        };
        let s = min_jacobian_scan(&FieldSource::analytic(g), &radii, 65).unwrap();
        monotone &= s.windows(2).all(|w| w[1].min_abs_j <= w[0].min_abs_j);
        h.record(format!("harmonic {k}"), &s.iter().map(|r| r.min_abs_j).collect::<Vec<_>>());
    }
    outcome(
        scan_ok && affine_ok && monotone,
        format!("z^2 + 3 conj z: {series:?} vs (5, 0, 0) within 1e-2; affine series constant: {affine_ok}; 20 random maps non-increasing: {monotone}"),
    )
}

fn c8(h: &mut Harness) -> Outcome {
    let r = h.cli(&["scan", "--surface", "z2", "--radii", "1,2,4", "--n", "65"]);
    let rows = r["results"]["table"]["rows"].as_array().unwrap();
    let sup_j: Vec<f64> = rows.iter().map(|row| num(&row[1])).collect();
    let j_ok = sup_j.iter().zip([4.0, 16.0, 64.0]).all(|(v, w)| (v - w).abs() <= 1e-6);
    let ratio_dev = rows.iter().map(|row| (num(&row[4]) - 1.0).abs()).fold(0.0, f64::max);
    let mut bound = true;
    for s in MINIMAL_BUILTINS {
        let r = h.cli(&verify_args(s, "41"));
        bound &= r["results"]["conformal_factor"]["bound_holds"] == true;
    }
    outcome(
        j_ok && ratio_dev <= 1e-6 && bound,
        format!("sup|J_f| = {sup_j:?} vs (4, 16, 64); inf ratio deviation {ratio_dev:.2e} (<= 1e-6); E >= (1+a^2+b^2)/2 on all builtin charts: {bound}"),
    )
}

type Criterion = fn(&mut Harness) -> Outcome;

const CRITERIA: [(&str, Criterion); 8] = [
    ("identity suite", c1),
    ("triple curvature agreement", c2),
    ("complex-curve characterization", c3),
    ("ratio identity and W monotonicity", c4),
    ("MSE solver convergence", c5),
    ("Monge-Ampere and gradient graph", c6),
    ("Jacobian scan", c7),
    ("Bernstein scan", c8),
];

fn run_all(dir: &Path) -> (Vec<Outcome>, Vec<(String, String)>) {
    let mut h = Harness {
        dir: dir.to_path_buf(),
        records: Vec::new(),
    };
    let outcomes = CRITERIA
        .iter()
        .map(|(_, f)| {
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut h))).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                outcome(false, format!("aborted: {msg}"))
            })
        })
        .collect();
    (outcomes, h.records)
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let (first, rec1) = run_all(dir.path());
    let (_, rec2) = run_all(dir.path());
    let mismatches: Vec<&str> = rec1
        .iter()
        .zip(&rec2)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let same_len = rec1.len() == rec2.len();
    let det = outcome(
        same_len && mismatches.is_empty(),
        format!("{} reports and results compared across two runs, {} differ {mismatches:?}", rec1.len(), mismatches.len()),
    );

    let mut err = std::io::stderr().lock();
    let mut all = true;
    for (k, o) in first.iter().chain(std::iter::once(&det)).enumerate() {
        let name = CRITERIA.get(k).map_or("determinism", |c| c.0);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(err, "acceptance {} [{tag}] {name}: {}", k + 1, o.detail).unwrap();
        all &= o.pass;
    }
    assert!(all, "acceptance criteria failed");
}
