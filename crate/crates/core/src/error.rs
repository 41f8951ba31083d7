use thiserror::Error;

use crate::solvers::SolveReport;

pub type Result<T, E = MglError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MglError {
    #[error("stencil at ({i}, {j}) touches the two-cell boundary margin of a {nx}x{ny} grid")]
    IndexOutOfInterior {
        i: usize,
        j: usize,
        nx: usize,
        ny: usize,
    },

    #[error("component {c} out of range for a field with {ncomp} components")]
    ComponentOutOfRange { c: usize, ncomp: usize },

    #[error("point ({x}, {y}) is outside the field domain")]
    DomainError { x: f64, y: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate immersion: EG - F^2 = {det}")]
    DegenerateImmersion { det: f64 },

    #[error("shear parameter b must be positive, got {b}")]
    InvalidShear { b: f64 },

    #[error("chart is not isothermal: |F| = {f}, |E - G| = {e_minus_g}, E = {e}")]
    NotIsothermal { f: f64, e_minus_g: f64, e: f64 },

    #[error("components are not harmonic: laplacians ({lap_phi}, {lap_psi})")]
    NotHarmonic { lap_phi: f64, lap_psi: f64 },

    #[error("denominator vanishes in {what}: {value}")]
    DenominatorVanishes { what: &'static str, value: f64 },

    #[error("omega identity violated: phi side {phi_side}, psi side {psi_side}")]
    Identity39Violation { phi_side: f64, psi_side: f64 },

    #[error("identity `{identity}` violated by relative gap {gap}")]
    IdentityViolation { identity: &'static str, gap: f64 },

    #[error("third derivatives are not available for this field source")]
    MissingThirdDerivatives,

    #[error("input is not minimal: max residual {residual}")]
    NotMinimal { residual: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("Newton iteration did not converge in {max_iter} iterations")]
    NoConvergence {
        max_iter: usize,
        best: Box<SolveReport>,
    },

    #[error("linearized operator lost diagonal dominance (off-diagonal/diagonal = {ratio})")]
    SingularLinearization { ratio: f64 },

    #[error("convexity lost: {0}")]
    ConvexityLost(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
