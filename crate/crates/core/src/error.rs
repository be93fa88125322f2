use thiserror::Error;

/// Errors raised anywhere in the lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator index {0} out of range (expected 0..=4)")]
    IndexOutOfRange(usize),

    #[error("Fuchs relation violated: 2k0+k1+k2+k3+k4-1 = {defect}")]
    FuchsRelation { defect: String },

    #[error("time points must be pairwise distinct")]
    CoincidentTimes,

    #[error("pole: {0}")]
    Pole(String),

    #[error("chart condition violated: q coincides with t{0}")]
    Chart(usize),

    #[error("operation requires finite t4, got infinity")]
    Infinity,

    #[error("operation requires t4 = infinity")]
    FiniteT4,

    #[error("letter {index} of word failed: {source}")]
    WordLetter {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory approached a singularity at arclength {arclength:.6e}: {reason}")]
    Singularity { arclength: f64, reason: String },

    #[error("step size underflow at arclength {arclength:.6e}")]
    Step { arclength: f64 },

    #[error("loop geometry: {0}")]
    Geometry(String),

    #[error("accuracy certificate failed: {0}")]
    Accuracy(String),

    #[error("exponent difference at {at} is not the integer {expected}")]
    NotResonant { at: String, expected: usize },

    #[error("irregular singular point at {0}")]
    Irregular(String),

    #[error("accumulation guard violated at rung {rung}: {reason}")]
    Accumulation { rung: usize, reason: String },

    #[error("gamma curve is empty: {0}")]
    EmptyCurve(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
