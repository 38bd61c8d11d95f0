use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: cannot parse {text:?} as a number")]
    Parse { line: usize, text: String },

    #[error("line {line}: value {value} lies outside [0, 1)")]
    OutOfDomain { line: usize, value: f64 },

    #[error("value {value} is outside the domain of the {mode} compactification")]
    CompactifyDomain { value: f64, mode: &'static str },

    #[error("point {0} lies outside [0, 1)")]
    PointOutOfDomain(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("dimension cutoff must be at least 1")]
    InvalidCutoff,

    #[error("recursion depth cap of {cap} exceeded")]
    DepthCapExceeded { cap: u32 },

    #[error("log-gamma is undefined for non-positive argument {0}")]
    GammaDomain(f64),

    #[error("grid size must be at least 100, got {0}")]
    GridTooSmall(usize),

    #[error("predictive density diverges at grid point {0}")]
    DivergentGridPoint(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
