use num_bigint::BigUint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed spec: {0}")]
    MalformedSpec(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// The carry left the top tower; the map is undefined there at this truncation.
    #[error("orbit escapes the top tower of a depth-{max_stage} construction")]
    OrbitEscape { max_stage: usize },

    #[error("stage {stage} out of range 1..={max}")]
    StageOutOfRange { stage: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("selection window empty at stage {stage}: [{lower}, {upper}]")]
    ConstructionFailure {
        stage: usize,
        lower: BigUint,
        upper: BigUint,
    },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::MalformedSpec(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }
}
