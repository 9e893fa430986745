use thiserror::Error;

use crate::qp::FarkasCertificate;

/// Errors produced by the controllers, the solver and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two agent centers coincide, so the pair barrier has no gradient.
    #[error("degenerate geometry: agents {i} and {j} share the same center")]
    DegenerateGeometry { i: usize, j: usize },

    #[error("constraint row has an all-zero coefficient vector")]
    ZeroCoefficients,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The working-set normal matrix could not be factored.
    #[error("numerical degeneracy in active-set solve (working set size {size})")]
    NumericalDegeneracy { size: usize },

    #[error("quadratic program is infeasible")]
    Infeasible(FarkasCertificate),

    #[error("brute-force oracle supports at most {max} rows, got {got}")]
    TooManyRows { max: usize, got: usize },

    #[error("brute-force oracle found neither a KKT point nor a Farkas certificate")]
    OracleInconclusive,

    #[error("simulation aborted at sample {step} (t = {time:.4} s): {source}")]
    SimulationAbort {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("margin bisection bracket failed: the largest margin {margin} m still collides")]
    MarginBracket { margin: f64 },

    #[error("margin search needs at least two agents")]
    MarginScenario,

    #[error("empty sampling-time list")]
    EmptySweep,
}

pub type Result<T> = std::result::Result<T, Error>;
