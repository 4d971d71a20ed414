//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds reversal order {order}")]
    DegreeAboveOrder { degree: usize, order: usize },

    #[error("root extraction needs degree >= 1")]
    ConstantPolynomial,

    #[error(
        "root iteration stalled after {iterations} iterations (worst residual {residual:.3e}); \
         best iterate attached"
    )]
    RootsDiverged {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error("root residual {residual:.3e} exceeds gate {gate:.1e} at degree {degree}")]
    RootResiduals {
        degree: usize,
        residual: f64,
        gate: f64,
    },

    #[error("grid size {0} must be a power of two, at least 16")]
    BadGridSize(usize),

    #[error("grid sizes disagree: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("expected a real-valued grid function (max |imag| = {0:.3e})")]
    ComplexInput(f64),

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("measure is not normalized (total mass {0}); call normalize first")]
    NotNormalized(f64),

    #[error("density must be nonnegative (min sample {0:.3e})")]
    NegativeDensity(f64),

    #[error("trigonometric density has a boundary zero of odd multiplicity near angle {0:.6}")]
    OddBoundaryZero(f64),

    #[error("atom mass must be positive (got {0})")]
    BadAtomMass(f64),

    #[error("moment order {order} aliases on a grid of {grid} points (need order < grid/2)")]
    MomentAliasing { order: usize, grid: usize },

    #[error(
        "|z| = {radius:.8} too close to the unit circle; keep |z| <= {max_radius:.8} \
         (grid of {grid} points)"
    )]
    RadiusTooLarge {
        radius: f64,
        max_radius: f64,
        grid: usize,
    },

    #[error("density below floor {floor:.1e} on the grid (min sample {min:.3e})")]
    DensityFloor { min: f64, floor: f64 },

    #[error(
        "clamping log-density near its zeros would move the integral by {delta:.3e} \
         (budget {budget:.1e}); supply a finer grid or a closed-form density"
    )]
    ClampedLog { delta: f64, budget: f64 },

    #[error("Schur function is not a contraction: |f(0)| = {0}")]
    NotContractive(f64),

    #[error(
        "reflection coefficient {index} has modulus {modulus:.12}; \
         the measure is numerically supported on a finite set"
    )]
    FinitelySupported { index: usize, modulus: f64 },

    #[error("Toeplitz positivity lost at step {index} (1 - |a|^2 = {gap:.3e})")]
    PositivityLoss { index: usize, gap: f64 },

    #[error("series too short: need {needed} Taylor coefficients, have {have}")]
    SeriesTooShort { needed: usize, have: usize },

    #[error("Carathéodory series division broke down (constant term {0})")]
    SeriesDivision(Complex64),

    #[error("internal consistency failure: {what} residual {residual:.3e} exceeds {gate:.1e}")]
    ConsistencyGate {
        what: &'static str,
        residual: f64,
        gate: f64,
    },

    #[error("forward iterate evaluation is interior-only; use the Wall path on the circle")]
    ForwardOnBoundary,

    #[error("singular point: denominator modulus {denom:.3e} at z = {z}")]
    SingularPoint { z: Complex64, denom: f64 },

    #[error("iterate index {index} out of budget {budget}")]
    IterateBudget { index: usize, budget: usize },

    #[error("empty region mesh: delta too small for the mesh resolution")]
    EmptyMesh,

    #[error("eta is below its floor over the whole grid; the norm is undefined")]
    UndefinedNorm,

    #[error("boundary point required (|xi| = {0})")]
    NotOnCircle(f64),

    #[error("{1} expects |z| <= {0}")]
    OutsideWorkingDisk(f64, &'static str),

    #[error("point sits at a density zero or atom (w = {0:.3e})")]
    AtDensityZero(f64),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
