use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("radix {radix} at digit position {position} is below 2")]
    RadixTooSmall { position: usize, radix: u32 },

    #[error("digit system needs depth at least 1")]
    EmptyDigitSystem,

    #[error("block size overflows at depth {depth}")]
    BlockOverflow { depth: usize },

    #[error("requested depth {requested} exceeds working depth {available}")]
    DepthExceeded { requested: usize, available: usize },

    #[error("residue {residue} is outside [0, {modulus})")]
    ResidueOutOfRange { residue: u64, modulus: u64 },

    #[error("digit {digit} at position {position} is not below radix {radix}")]
    DigitOutOfRange { position: usize, digit: u32, radix: u32 },

    #[error("negative lag {0} rejected")]
    NegativeLag(i64),

    #[error("lag {lag} must be below {bound}")]
    LagTooLarge { lag: u64, bound: u64 },

    #[error("fiber moduli differ: {left} vs {right}")]
    FiberMismatch { left: u32, right: u32 },

    #[error("fiber element {element} is outside Z_{modulus}")]
    FiberElementOutOfRange { element: u32, modulus: u32 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("stage {requested} requested but stages start at 1")]
    StageZero { requested: usize },

    #[error("level {level} is outside the stage-{stage} tower of height {height}")]
    LevelOutOfRange { stage: usize, level: u64, height: u64 },

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("cocycle configuration: {0}")]
    Cocycle(String),

    #[error("cocycle table line {line}: {message}")]
    CocycleTable { line: usize, message: String },

    #[error("need at least two usable iterates, got {0}")]
    TooFewIterates(usize),

    #[error("sequence must be strictly increasing and positive")]
    NonIncreasingSequence,

    #[error("empty cylinder family")]
    EmptyFamily,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
