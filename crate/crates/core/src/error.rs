use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population must contain at least 2 units, got {0}")]
    EmptyPopulation(usize),

    #[error("degenerate population: {0}")]
    DegeneratePopulation(&'static str),

    #[error("sample is empty")]
    EmptySample,

    #[error("invalid unit: {0}")]
    InvalidUnit(String),

    #[error("invalid design: sample size {n} with population size {population}")]
    InvalidDesign { n: usize, population: usize },

    #[error("relative deviation undefined: {0}")]
    UndefinedDeviation(&'static str),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("auxiliary coefficient of variation is zero")]
    DegenerateAuxiliary,

    #[error("singular MSE quadratic: det = {det:e}, threshold = {threshold:e}")]
    SingularSystem { det: f64, threshold: f64 },

    #[error("Taylor coefficient {name} mismatch: analytic {analytic}, numeric {numeric}")]
    CoefficientMismatch {
        name: &'static str,
        analytic: f64,
        numeric: f64,
    },

    #[error("{count} samples exceed the enumeration limit of {limit}")]
    TooManySamples { count: u128, limit: u64 },

    #[error("estimator {label} failed in replicate {replicate}: {source}")]
    Replicate {
        label: String,
        replicate: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("estimator {label} failed on subset {subset:?}: {source}")]
    Subset {
        label: String,
        subset: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("target unreachable: {0}")]
    UnreachableTarget(String),
}
