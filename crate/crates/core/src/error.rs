use thiserror::Error;

/// Reason an (A1)-style well assumption fails for a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum A1Violation {
    /// `|A(x)| = lambda0` has no real solution on the sampled range.
    NoCrossings,
    /// Exactly one crossing; the well is not closed on one side.
    MissingCrossing,
    /// More than two crossings.
    ExtraCrossings(usize),
    /// `|A| < lambda0` outside or `|A| > lambda0` inside the crossings.
    NotAWell,
    /// `A'` vanishes (numerically) at a crossing.
    ZeroSlope,
    /// `|A|` at the sampling cutoffs does not exceed `lambda0`.
    NoMarginAtInfinity,
}

impl std::fmt::Display for A1Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            A1Violation::NoCrossings => write!(f, "no-crossings"),
            A1Violation::MissingCrossing => write!(f, "missing-crossing"),
            A1Violation::ExtraCrossings(n) => write!(f, "extra-crossings ({n})"),
            A1Violation::NotAWell => write!(f, "not-a-well"),
            A1Violation::ZeroSlope => write!(f, "zero-slope"),
            A1Violation::NoMarginAtInfinity => write!(f, "no-margin-at-infinity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point with Im z = {im} lies outside the analyticity strip |Im z| < {strip}")]
    OutOfStrip { im: f64, strip: f64 },
    #[error("assumption (A1) violated: {0}")]
    A1Violated(A1Violation),

    #[error("{stage}: no convergence after {iterations} iterations")]
    NoConvergence { stage: &'static str, iterations: usize },
    #[error("turning-point iterate left the analyticity strip")]
    LeftStrip,
    #[error("turning points collide (|alpha - beta| = {distance:e})")]
    Collision { distance: f64 },
    #[error("turning-point branches swapped along the continuation path at step {step}")]
    BranchSwap { step: usize },

    #[error("action quadrature did not converge with {nodes} nodes (estimate {estimate:e})")]
    QuadratureNoConvergence { nodes: usize, estimate: f64 },
    #[error("square-root branch ambiguous at theta = {theta}")]
    BranchAmbiguity { theta: f64 },
    #[error("integration segment degenerate (|beta - alpha| = {length:e})")]
    DegenerateSegment { length: f64 },
    #[error("operation requires an (A2) symmetric potential")]
    SymmetryRequired,

    #[error("no quantization index fits the spectral window")]
    EmptyWindow,
    #[error("iterate left the spectral window")]
    LeftWindow,

    #[error("cutoff x = {x} is not in the classically forbidden region for this lambda")]
    InsideWell { x: f64 },
    #[error("ODE step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("Wronskian phase tracking lost near lambda = {lambda}")]
    PhaseTrackingLost { lambda: f64 },
    #[error("Wronskian vanishes on the counting contour")]
    BoundaryZero,
    #[error("contour phase could not be resolved within {samples} samples")]
    PhaseResolution { samples: usize },

    #[error("turning point is degenerate (|f'| = {derivative:e})")]
    DegenerateTurningPoint { derivative: f64 },
    #[error("Stokes line tracing failed: {0}")]
    StepFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
