use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("form is not alternating at ({row}, {col})")]
    NotAlternating { row: usize, col: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("order {n} is too small (need at least {min})")]
    OrderTooSmall { n: usize, min: usize },

    #[error("order {n} is too large (at most {max} supported)")]
    OrderTooLarge { n: usize, max: usize },

    #[error("generator g({i},{j}) is not valid for n = {n}")]
    InvalidGenerator { i: usize, j: usize, n: usize },

    #[error(
        "state space of dimension {dim} exceeds the enumeration guard of {limit} \
         (a dense visited bitmap would need {bytes} bytes)"
    )]
    StateSpaceTooLarge { dim: usize, limit: usize, bytes: u128 },

    #[error("height has {found} entries, expected {expected}")]
    HeightLength { expected: usize, found: usize },

    #[error("action kind {0} has no stratum heights")]
    NoHeights(&'static str),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("prediction not licensed: {0}")]
    NotLicensed(String),

    #[error("no closed-form census for n = {n} (closed forms start at n = 5)")]
    NoClosedForm { n: usize },

    #[error("pattern construction disagrees with the kernel: {0}")]
    PatternDiscrepancy(String),

    #[error("orbit labelling failed: {0}")]
    Labelling(String),

    #[error("census and prediction describe different actions")]
    SpecMismatch,

    #[error("cannot parse {0}")]
    Parse(String),
}
