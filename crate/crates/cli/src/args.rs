use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mgl", version, about = "Invariants, identity checks and solvers for minimal graphs in R^4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-point curvature table of a surface.
    Invariants(InvariantsArgs),
    /// Identity suite on the isothermal chart of a minimal surface.
    Verify(VerifyArgs),
    /// Dirichlet problem for the minimal surface system.
    SolveMse(SolveArgs),
    /// Dirichlet problem for det D^2 f = 1.
    SolveMa(SolveArgs),
    /// Gradient-graph check: is (f_x, f_y) a minimal graph with unit Jacobian?
    Jorgens(JorgensArgs),
    /// Radius scans of Jacobians and conformal factors.
    Scan(ScanArgs),
    /// Plane, complex curve, other minimal surface or not minimal.
    Classify(ClassifyArgs),
    /// Fit the shear (a, b) that makes the chart isothermal.
    FitShear(FitShearArgs),
}

/// Exactly one input: a builtin name or an `mgl-grid v1` file.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Builtin surface (z2, z3, monkey, plane, shear_plane_s1, shear_plane_s2,
    /// exp_shear, ma_gradient, z2_3zbar) or, for solve-ma and jorgens, builtin
    /// scalar (quadratic-identity, quadratic-skew, concave, ma-cubic).
    #[arg(long, visible_alias = "boundary")]
    pub surface: Option<String>,
    /// Grid file in `mgl-grid v1` format.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Rectangle `x0 x1 y0 y1`.
    #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    /// Nodes per side, 5 to 4097.
    #[arg(long)]
    pub n: Option<usize>,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ShearArg {
    /// Shear `a b` with b > 0, or `fit`. Defaults to the builtin's shear, else a fit.
    #[arg(long, num_args = 1..=2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub shear: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct InvariantsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub shear: ShearArg,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub shear: ShearArg,
    /// Bound on the relative identity gaps.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Bound on the relative disagreement between curvature routes.
    #[arg(long, default_value_t = 1e-8)]
    pub curvature_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NewtonArgs {
    /// Newton stopping tolerance on the residual max-norm.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Initial Newton step length in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub newton: NewtonArgs,
    /// Write the solution grid here.
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JorgensArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub newton: NewtonArgs,
    /// Solve det D^2 f = 1 with the source as boundary data first.
    #[arg(long)]
    pub solve: bool,
    /// Take the maxima only over this rectangle `x0 x1 y0 y1`.
    #[arg(long, num_args = 4, value_names = ["X0", "X1", "Y0", "Y1"], allow_negative_numbers = true)]
    pub region: Option<Vec<f64>>,
    /// Bound on both maxima.
    #[arg(long, default_value_t = 1e-6)]
    pub gap_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    /// min |J| of a harmonic map over disks.
    Jacobian,
    /// sup |J_f|, sup E and inf |K_N|/|K| of a minimal graph over disks.
    Bernstein,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Nodes per side of the sampling lattice, 5 to 4097.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScanKind::Bernstein)]
    pub kind: ScanKind,
    /// Increasing positive radii.
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    pub radii: Vec<f64>,
    #[command(flatten)]
    pub shear: ShearArg,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Classifier tolerance; 1e-6 for builtins and 1e-3 for grids by default.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitShearArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
