use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SieError {
    /// Grid or discretization parameters out of range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Medium parameters outside the admissible class.
    #[error("inadmissible medium: {0}")]
    Parameter(String),

    /// Caller-supplied data violates an operation precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Operation only defined on sphere grids.
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// Kernel evaluated on its singular set.
    #[error("singular kernel evaluation at coincident points")]
    SingularEvaluation,

    /// Operator shapes or provenance do not match.
    #[error("assembly mismatch: {0}")]
    Assembly(String),

    /// The dense system is numerically singular.
    #[error("near-singular system (sigma_min = {sigma_min:.3e}, sigma_min/sigma_max = {ratio:.3e})")]
    NearSingular { sigma_min: f64, ratio: f64 },

    /// Newton iteration failed to converge; carries the iterate history.
    #[error("root not found after {} iterates", iterates.len())]
    RootNotFound { iterates: Vec<(f64, f64, f64)> },

    /// A series expansion did not converge to the requested accuracy.
    #[error("series not converged: {0}")]
    Accuracy(String),

    /// Input vectors or options malformed.
    #[error("invalid input: {0}")]
    Input(String),

    /// Pencil hypotheses not satisfied by the given matrices.
    #[error("pencil hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for SieError {
    fn from(e: std::io::Error) -> Self {
        SieError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SieError>;
