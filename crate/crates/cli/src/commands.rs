use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use mgl_core::field::sample_grid;
use mgl_core::geometry::{
    classify, default_classify_tol, frame_invariants, frame_r4, graph_invariants, mse_residual, SurfaceClass,
    Tolerances,
};
use mgl_core::isothermal::{
    eqs_38_gap_from, fit_shear, gauss_conformal_at, identity_35_gap, iso_residual_from, min_jacobian_scan,
    omega_from, shear_pullback, w_ratio, curvatures_m1_from, EPS_OMEGA,
};
use mgl_core::jets::fd_jet;
use mgl_core::solvers::{
    bernstein_scan, jorgens_pipeline_on, solve_monge_ampere, solve_mse, BvpProblem, SolveOptions, SolveReport,
};
use mgl_core::surfaces::{builtin_scalar, builtin_surface};
use mgl_core::{FieldSource, GridField, MglError, Rect};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::report::{num, opt, Report, Table};

/// Points with `|K|` at or below this are left out of `|K_N| / |K|`.
pub const RATIO_K_FLOOR: f64 = 1e-10;

const N_RANGE: std::ops::RangeInclusive<usize> = 5..=4097;

/// A loaded input with the shear recorded for builtins.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub source: FieldSource,
    pub shear: Option<(f64, f64)>,
    pub label: Value,
}

/// Builtin or `mgl-grid v1` file with `ncomp` components (1 for the
/// Monge-Ampere commands, 2 otherwise).
pub fn load_surface(cfg: &SourceArgs, ncomp: usize) -> CliResult<Loaded> {
    match (&cfg.surface, &cfg.input) {
        (Some(name), None) => {
            let (source, shear) = if ncomp == 1 {
                (builtin_scalar(name)?, None)
            } else {
                let b = builtin_surface(name)?;
                (b.source, b.shear)
            };
            Ok(Loaded {
                source,
                shear,
                label: json!({ "surface": name }),
            })
        }
        (None, Some(path)) => {
            let f = File::open(path).map_err(|e| CliError::io(path, e))?;
            let g = GridField::read_text(BufReader::new(f))?;
            if g.ncomp() != ncomp {
                return Err(MglError::DimensionMismatch {
                    left: g.ncomp(),
                    right: ncomp,
                }
                .into());
            }
            Ok(Loaded {
                source: FieldSource::grid(g),
                shear: None,
                label: json!({ "input": path.display().to_string() }),
            })
        }
        _ => Err(CliError::Usage("give exactly one of --surface or --input".into())),
    }
}

pub fn execute(cmd: &Command) -> CliResult<(Report, Option<PathBuf>)> {
    match cmd {
        Command::Invariants(a) => Ok((invariants(a)?, a.common.output.clone())),
        Command::Verify(a) => Ok((verify(a)?, a.common.output.clone())),
        Command::SolveMse(a) => Ok((solve(a, false)?, a.common.output.clone())),
        Command::SolveMa(a) => Ok((solve(a, true)?, a.common.output.clone())),
        Command::Jorgens(a) => Ok((jorgens(a)?, a.common.output.clone())),
        Command::Scan(a) => Ok((scan(a)?, a.output.clone())),
        Command::Classify(a) => Ok((classify_cmd(a)?, a.common.output.clone())),
        Command::FitShear(a) => Ok((fit_shear_cmd(a)?, a.common.output.clone())),
    }
}

fn check_n(n: usize) -> CliResult<usize> {
    if !N_RANGE.contains(&n) {
        return Err(CliError::Usage(format!(
            "--n must lie in {}..={}, got {n}",
            N_RANGE.start(),
            N_RANGE.end()
        )));
    }
    Ok(n)
}

fn rect_arg(v: &Option<Vec<f64>>, default: Rect) -> CliResult<Rect> {
    match v {
        Some(v) => Ok(Rect::new(v[0], v[1], v[2], v[3])?),
        None => Ok(default),
    }
}

/// Default sampling rectangle: the given square for builtins, everything for grids.
fn default_domain(l: &Loaded, half: f64) -> Rect {
    if l.source.is_analytic() {
        Rect::square(half)
    } else {
        Rect::PLANE
    }
}

fn rect_value(r: Rect) -> Value {
    json!([num(r.x0), num(r.x1), num(r.y0), num(r.y1)])
}

fn echo_source(r: &mut Report, l: &Loaded) {
    if let Value::Object(m) = &l.label {
        for (k, v) in m {
            r.input(k, v.clone());
        }
    }
}

enum ShearChoice {
    Given(f64, f64),
    Fit,
    Default,
}

fn parse_shear(arg: &ShearArg) -> CliResult<ShearChoice> {
    match arg.shear.as_deref() {
        None => Ok(ShearChoice::Default),
        Some([s]) if s == "fit" => Ok(ShearChoice::Fit),
        Some([a, b]) => {
            let p = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--shear expects numbers or `fit`, got `{s}`")))
            };
            Ok(ShearChoice::Given(p(a)?, p(b)?))
        }
        Some(other) => Err(CliError::Usage(format!("--shear expects `A B` or `fit`, got {other:?}"))),
    }
}

/// The shear to use and how it was obtained.
fn resolve_shear(arg: &ShearArg, l: &Loaded, region: Rect, n: usize) -> CliResult<(f64, f64, &'static str)> {
    let fit = || -> CliResult<(f64, f64, &'static str)> {
        let f = fit_shear(&l.source, region, n.min(41))?;
        match f.candidates.first() {
            Some(c) => Ok((c.a, c.b, "fitted")),
            None => Err(MglError::Validation(format!(
                "no isothermal shear found (best objective {:.3e} above {:.3e})",
                f.best.objective, f.threshold
            ))
            .into()),
        }
    };
    match parse_shear(arg)? {
        ShearChoice::Given(a, b) => Ok((a, b, "given")),
        ShearChoice::Fit => fit(),
        ShearChoice::Default => match l.shear {
            Some((a, b)) => Ok((a, b, "builtin")),
            None => fit(),
        },
    }
}

fn echo_shear(r: &mut Report, (a, b, how): (f64, f64, &str)) {
    r.input("shear", json!({ "a": num(a), "b": num(b), "origin": how }));
}

fn invariants(args: &InvariantsArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 2)?;
    let region = rect_arg(&args.common.domain, default_domain(&l, 1.0))?;
    let n = check_n(args.common.n.unwrap_or(21))?;
    let shear = match (&args.shear.shear, l.shear) {
        (None, None) => None,
        _ => Some(resolve_shear(&args.shear, &l, region, n)?),
    };
    let chart = shear.map(|(a, b, _)| shear_pullback(l.source.clone(), a, b)).transpose()?;

    let mut table = Table::new(&["x", "y", "K", "K_N", "h2", "abs_KN_over_K", "mse_residual", "E", "omega", "in_M1"]);
    let (mut max_dev, mut ratio_points, mut max_mse, mut m1_points) = (0.0f64, 0usize, 0.0f64, 0usize);
    for p in l.source.sample_points(region, n) {
        let jets = l.source.jets(p)?;
        let inv = graph_invariants(&jets[0], &jets[1])?;
        let mse = mse_residual(&jets).into_iter().fold(0.0f64, |m, r| m.max(r.abs()));
        max_mse = max_mse.max(mse);
        let ratio = (inv.k.abs() > RATIO_K_FLOOR).then(|| inv.kn.abs() / inv.k.abs());
        if let Some(q) = ratio {
            ratio_points += 1;
            max_dev = max_dev.max((q - 1.0).abs());
        }
        let (e, omega, m1) = match &chart {
            Some(ch) => {
                let cj = ch.jets_at_xy(p)?;
                let om = omega_from(&cj, EPS_OMEGA, f64::INFINITY)?;
                m1_points += om.in_m1 as usize;
                (
                    Some(iso_residual_from(ch.a, ch.b, &cj).e),
                    Some(om.omega),
                    Some(if om.in_m1 { 1.0 } else { 0.0 }),
                )
            }
            None => (None, None, None),
        };
        table.push(vec![Some(p[0]), Some(p[1]), Some(inv.k), Some(inv.kn), Some(inv.h2), ratio, Some(mse), e, omega, m1]);
    }
    if let Some(path) = &args.csv {
        table.write_csv(path)?;
    }

    let mut r = Report::new("invariants");
    echo_source(&mut r, &l);
    r.input("domain", rect_value(region)).input("n", n);
    if let Some(s) = shear {
        echo_shear(&mut r, s);
    }
    r.result(
        "summary",
        json!({
            "points": table.rows.len(),
            "ratio_points": ratio_points,
            "max_abs_ratio_deviation": num(max_dev),
            "max_mse_residual": num(max_mse),
            "m1_points": chart.as_ref().map(|_| m1_points),
        }),
    )
    .result("table", table.to_value());
    Ok(r)
}

#[derive(Default)]
struct Gaps {
    iso: f64,
    harm: f64,
    identity_35: f64,
    eqs_38: f64,
    omega: f64,
    normal_field: f64,
    jacobian: f64,
}

impl Gaps {
    fn max(&self) -> f64 {
        [self.iso, self.harm, self.identity_35, self.eqs_38, self.omega, self.normal_field, self.jacobian]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn verify(args: &VerifyArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 2)?;
    let region = rect_arg(&args.common.domain, default_domain(&l, 1.0))?;
    let n = check_n(args.common.n.unwrap_or(41))?;
    let shear = resolve_shear(&args.shear, &l, region, n)?;
    let (a, b, _) = shear;
    let ch = shear_pullback(l.source.clone(), a, b)?;
    let tol = Tolerances::for_source(&l.source);
    let s = ch.s();

    let mut g = Gaps::default();
    let (mut m1_points, mut route, mut ratio_gap, mut ratio_id_points) = (0usize, 0.0f64, 0.0f64, 0usize);
    let (mut complex_dev, mut complex_points) = (0.0f64, 0usize);
    let mut min_e = f64::INFINITY;
    let mut conformal_route = l.source.is_analytic();
    let pts = l.source.sample_points(region, n);
    for &xy in &pts {
        let cj = ch.jets_at_xy(xy)?;
        let (phi, psi) = (&cj.phi, &cj.psi);
        let iso = iso_residual_from(a, b, &cj);
        let second = 1.0 + phi.second_max().max(psi.second_max());
        let scale = cj.scale() + second;
        g.iso = g.iso.max(iso.r1.abs().max(iso.r2.abs()) / iso.e);
        g.harm = g.harm.max(phi.laplacian().abs().max(psi.laplacian().abs()) / second);
        let j_phi = phi.du * psi.dv - phi.dv * psi.du;
        let j_f = cj.f[0].du * cj.f[1].dv - cj.f[0].dv * cj.f[1].du;
        g.jacobian = g.jacobian.max((j_phi - b * j_f).abs() / (1.0 + j_phi.abs()));
        g.identity_35 = g.identity_35.max(identity_35_gap(iso.e, j_phi, a, b) / (iso.e * iso.e));
        let (g1, g2) = eqs_38_gap_from(&cj);
        g.eqs_38 = g.eqs_38.max(g1.abs().max(g2.abs()) / scale.powi(3));
        let om = omega_from(&cj, EPS_OMEGA, f64::INFINITY)?;
        g.omega = g.omega.max((om.omega - om.psi_side).abs() / (1.0 + om.omega.max(om.psi_side)));
        let fr = frame_r4(a, b, phi, psi, &tol)?;
        let gram = mgl_core::geometry::dot(&fr.xi, &fr.xi) * mgl_core::geometry::dot(&fr.eta, &fr.eta)
            - fr.xi_dot_eta * fr.xi_dot_eta;
        let b2e2 = b * b * iso.e * iso.e;
        g.normal_field = g.normal_field.max((gram - b2e2).abs() / b2e2);
        min_e = min_e.min(iso.e);

        let (_, _, inv) = frame_invariants(a, b, phi, psi, &tol)?;
        if inv.k.abs() > RATIO_K_FLOOR {
            complex_points += 1;
            complex_dev = complex_dev.max((inv.kn.abs() / inv.k.abs() - 1.0).abs());
        }
        if om.in_m1 {
            m1_points += 1;
            let (k_m1, kn_m1) = curvatures_m1_from(a, b, &cj, EPS_OMEGA)?;
            route = route.max(rel(k_m1, inv.k)).max(rel(kn_m1, inv.kn));
            if conformal_route {
                match gauss_conformal_at(&ch, ch.to_uv(xy)) {
                    Ok(k_c) => route = route.max(rel(k_c, inv.k)),
                    Err(MglError::MissingThirdDerivatives) => conformal_route = false,
                    Err(e) => return Err(e.into()),
                }
            }
            let w = w_ratio(iso.e, a, b);
            if w.valid && inv.k != 0.0 {
                ratio_id_points += 1;
                let lhs = inv.kn * inv.kn / (inv.k * inv.k);
                ratio_gap = ratio_gap.max((lhs - 4.0 * b * b * w.w).abs() / (1.0 + w.w));
            }
        }
    }
    let bound = s / 2.0;
    let margin = (min_e - bound) / bound;
    let e_bound_holds = margin >= -1e-12;
    let identities_ok = g.max() <= args.tol;
    let curvature_ok = route <= args.curvature_tol && ratio_gap <= args.curvature_tol;

    let mut r = Report::new("verify");
    echo_source(&mut r, &l);
    echo_shear(&mut r, shear);
    r.input("domain", rect_value(region))
        .input("n", n)
        .input("tol", num(args.tol))
        .input("curvature_tol", num(args.curvature_tol));
    r.result("points", pts.len())
        .result(
            "max_gaps",
            json!({
                "isothermal": num(g.iso),
                "harmonic": num(g.harm),
                "identity_35": num(g.identity_35),
                "eqs_38": num(g.eqs_38),
                "omega": num(g.omega),
                "normal_field": num(g.normal_field),
                "jacobian_phi_vs_f": num(g.jacobian),
            }),
        )
        .result(
            "curvature",
            json!({
                "m1_points": m1_points,
                "conformal_route_checked": conformal_route,
                "max_route_disagreement": num(route),
                "ratio_identity_points": ratio_id_points,
                "max_ratio_identity_gap": num(ratio_gap),
            }),
        )
        .result(
            "complex_curve",
            json!({
                "points": complex_points,
                "max_abs_ratio_deviation": num(complex_dev),
            }),
        )
        .result(
            "conformal_factor",
            json!({
                "min_e": num(min_e),
                "lower_bound": num(bound),
                "min_relative_margin": num(margin),
                "bound_holds": e_bound_holds,
            }),
        )
        .result("identities_ok", identities_ok)
        .result("curvature_ok", curvature_ok)
        .result("passed", identities_ok && curvature_ok && e_bound_holds);
    Ok(r)
}

fn solve_options(a: &NewtonArgs) -> SolveOptions {
    SolveOptions {
        tol_newton: a.tol,
        max_iter: a.max_iter,
        damping: a.damping,
    }
}

/// Max-norm of the central-difference residual over the strict-interior nodes:
/// the minimal surface operator for two components, `det D^2 f - 1` for one.
pub fn residual_stats(g: &GridField) -> CliResult<f64> {
    let mut m = 0.0f64;
    for (i, j) in g.interior_nodes(2) {
        if g.ncomp() == 2 {
            let jets = [fd_jet(g, i, j, 0)?, fd_jet(g, i, j, 1)?];
            m = mse_residual(&jets).into_iter().fold(m, |m, r| m.max(r.abs()));
        } else {
            let f = fd_jet(g, i, j, 0)?;
            m = m.max((f.duu * f.dvv - f.duv * f.duv - 1.0).abs());
        }
    }
    Ok(m)
}

/// Max deviation from the source at interior nodes; `None` if the source
/// cannot be evaluated there.
fn error_vs_source(rep: &SolveReport, src: &FieldSource) -> Option<f64> {
    let g = &rep.solution;
    let mut e = 0.0f64;
    for (i, j) in g.interior_nodes(1) {
        for c in 0..g.ncomp() {
            e = e.max((g.get(i, j, c) - src.value(g.node(i, j), c).ok()?).abs());
        }
    }
    Some(e)
}

/// Whether the source is itself a solution of the equation being solved, so
/// that the error against it measures discretization error.
fn is_manufactured(src: &FieldSource, domain: Rect, ma: bool) -> CliResult<bool> {
    if !src.is_analytic() {
        return Ok(false);
    }
    if ma {
        for p in domain.lattice(9) {
            let f = src.jet(p, 0)?;
            let det = f.duu * f.dvv - f.duv * f.duv;
            if !(f.duu > 0.0 && (det - 1.0).abs() <= 1e-8 * (1.0 + f.duu * f.dvv)) {
                return Ok(false);
            }
        }
        Ok(true)
    } else {
        Ok(classify(src, domain, 9, 1e-6)?.class != SurfaceClass::NotMinimal)
    }
}

fn solve(args: &SolveArgs, ma: bool) -> CliResult<Report> {
    let l = load_surface(&args.source, if ma { 1 } else { 2 })?;
    let domain = rect_arg(&args.common.domain, Rect::square(if ma { 1.0 } else { 0.5 }))?;
    let n = check_n(args.common.n.unwrap_or(33))?;
    let problem = BvpProblem::new(domain, n, l.source.clone()).with_options(solve_options(&args.newton));
    let rep = if ma { solve_monge_ampere(&problem)? } else { solve_mse(&problem)? };
    if let Some(path) = &args.grid_out {
        let f = File::create(path).map_err(|e| CliError::io(path, e))?;
        rep.solution.write_text(std::io::BufWriter::new(f)).map_err(|e| match e {
            MglError::Io(io) => CliError::io(path, io),
            other => other.into(),
        })?;
    }

    let mut r = Report::new(if ma { "solve-ma" } else { "solve-mse" });
    echo_source(&mut r, &l);
    r.input("domain", rect_value(domain))
        .input("n", n)
        .input("tol_newton", num(args.newton.tol))
        .input("max_iter", args.newton.max_iter)
        .input("damping", num(args.newton.damping));
    r.result("converged", rep.converged)
        .result("iterations", rep.iterations)
        .result("final_residual_norm", num(rep.final_residual_norm))
        .result("grid_file", args.grid_out.as_ref().map(|p| p.display().to_string()))
        .result("max_fd_residual", num(residual_stats(&rep.solution)?))
        .result("manufactured_solution", is_manufactured(&l.source, domain, ma)?)
        .result("max_error_vs_source", opt(error_vs_source(&rep, &l.source)));
    Ok(r)
}

fn jorgens(args: &JorgensArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 1)?;
    let domain = rect_arg(&args.common.domain, Rect::square(0.5))?;
    let n = check_n(args.common.n.unwrap_or(65))?;
    let region = rect_arg(&args.region, Rect::PLANE)?;
    let (f, solve) = if args.solve {
        let p = BvpProblem::new(domain, n, l.source.clone()).with_options(solve_options(&args.newton));
        let rep = solve_monge_ampere(&p)?;
        let info = json!({
            "converged": rep.converged,
            "iterations": rep.iterations,
            "final_residual_norm": num(rep.final_residual_norm),
        });
        (rep.solution, info)
    } else {
        let g = match &l.source {
            FieldSource::Analytic(e) => sample_grid(e.as_ref(), domain, n)?,
            FieldSource::Grid(g) => (**g).clone(),
        };
        (g, Value::Null)
    };
    let rep = jorgens_pipeline_on(&f, args.gap_tol, region)?;

    let mut r = Report::new("jorgens");
    echo_source(&mut r, &l);
    r.input("solve", args.solve).input("gap_tol", num(args.gap_tol));
    if l.source.is_analytic() || args.solve {
        r.input("domain", rect_value(domain)).input("n", n);
    }
    if args.region.is_some() {
        r.input("region", rect_value(region));
    }
    r.result("solve", solve)
        .result("max_j_gap", num(rep.max_j_gap))
        .result("max_mse_residual", num(rep.max_mse_residual))
        .result("within_tol", rep.within_tol);
    Ok(r)
}

fn scan(args: &ScanArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 2)?;
    let n = check_n(args.n.unwrap_or(129))?;
    let mut r = Report::new("scan");
    echo_source(&mut r, &l);
    r.input("n", n)
        .input("radii", args.radii.iter().map(|v| num(*v)).collect::<Vec<_>>());
    let table = match args.kind {
        ScanKind::Jacobian => {
            r.input("kind", "jacobian");
            let mut t = Table::new(&["R", "min_abs_J"]);
            for row in min_jacobian_scan(&l.source, &args.radii, n)? {
                t.push(vec![Some(row.r), Some(row.min_abs_j)]);
            }
            t
        }
        ScanKind::Bernstein => {
            r.input("kind", "bernstein");
            let shear = match parse_shear(&args.shear)? {
                ShearChoice::Given(a, b) => Some((a, b, "given")),
                ShearChoice::Fit => None,
                ShearChoice::Default => l.shear.map(|(a, b)| (a, b, "builtin")),
            };
            match shear {
                Some(s) => echo_shear(&mut r, s),
                None => {
                    r.input("shear", json!({ "origin": "fitted" }));
                }
            }
            let mut t = Table::new(&["R", "sup_abs_J", "sup_E", "min_E_M1", "inf_ratio"]);
            for row in bernstein_scan(&l.source, shear.map(|(a, b, _)| (a, b)), &args.radii, n)? {
                t.push(vec![Some(row.r), Some(row.sup_abs_j), Some(row.sup_e), row.min_e_m1, row.inf_ratio]);
            }
            t
        }
    };
    if let Some(path) = &args.csv {
        table.write_csv(path)?;
    }
    r.result("table", table.to_value());
    Ok(r)
}

fn classify_cmd(args: &ClassifyArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 2)?;
    let region = rect_arg(&args.common.domain, default_domain(&l, 1.0))?;
    let n = check_n(args.common.n.unwrap_or(41))?;
    let tol = args.tol.unwrap_or_else(|| default_classify_tol(&l.source));
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let c = classify(&l.source, region, n, tol)?;
    let mut r = Report::new("classify");
    echo_source(&mut r, &l);
    r.input("domain", rect_value(region)).input("n", n).input("tol", num(tol));
    r.result("class", c.class.as_str())
        .result("branch", c.branch.as_str())
        .result("max_residual", num(c.max_residual))
        .result("cr_deviation", num(c.cr_deviation))
        .result("max_h2", num(c.max_h2));
    Ok(r)
}

fn fit_shear_cmd(args: &FitShearArgs) -> CliResult<Report> {
    let l = load_surface(&args.source, 2)?;
    let region = rect_arg(&args.common.domain, default_domain(&l, 1.0))?;
    let n = check_n(args.common.n.unwrap_or(21))?;
    let fit = fit_shear(&l.source, region, n)?;
    let cand = |c: &mgl_core::isothermal::ShearCandidate| {
        json!({ "a": num(c.a), "b": num(c.b), "objective": num(c.objective) })
    };
    let mut r = Report::new("fit-shear");
    echo_source(&mut r, &l);
    r.input("domain", rect_value(region)).input("n", n);
    r.result("best", cand(&fit.best))
        .result("candidates", fit.candidates.iter().map(cand).collect::<Vec<_>>())
        .result("threshold", num(fit.threshold))
        .result("isothermal_shear_found", !fit.candidates.is_empty());
    Ok(r)
}
