use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(
        "coefficient of t^{requested} requested but series is only known below t^{truncation}"
    )]
    QueryBeyondTruncation { requested: i64, truncation: i64 },

    #[error("division by zero ({0})")]
    ZeroDivision(String),

    #[error("duplicate pole location {0}")]
    DuplicateLocation(String),

    #[error("principal part at infinity is not supported here; place poles at finite points")]
    InfiniteLocation,

    #[error("denominator has an irreducible factor of degree {degree} over the rationals; poles are not all rational")]
    NonSplitDenominator { degree: usize },

    #[error("rational root search exceeded its integer-factoring limit")]
    RootSearchLimit,

    #[error("dual graph is disconnected")]
    DisconnectedGraph,

    #[error("component {0} has positive genus; explicit differentials need a rational component")]
    NonRationalComponent(String),

    #[error("unknown component {0}")]
    UnknownComponent(String),

    #[error("unknown edge {0}")]
    UnknownEdge(String),

    #[error("duplicate identifier {0}")]
    DuplicateId(String),

    #[error("node slot coordinate {coord} used twice on component {component}")]
    DuplicateSlot { component: String, coord: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("truncation order {truncation} is too small: {reason}")]
    TruncationTooSmall { truncation: usize, reason: String },

    #[error("branch {0} is not a primitive parametrization")]
    NonPrimitiveBranch(usize),

    #[error("branches {0} and {1} coincide up to truncation")]
    DuplicateBranch(usize, usize),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("top-order descent space has dimension {0}, expected 1 for a Gorenstein singularity")]
    NotGorensteinDetected(usize),

    #[error("unsupported tensor power k = {0} for this operation")]
    UnsupportedK(u32),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no differential for k = {0} in the document")]
    MissingDifferential(u32),

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
