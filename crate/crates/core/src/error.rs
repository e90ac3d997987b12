use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank must be at least 2, got {0}")]
    InvalidRank(usize),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("vector {0} is not in the root lattice Q")]
    NotInRootLattice(String),
    #[error("vector {0} has a component outside the sector of the requested mode")]
    SectorMismatch(String),
    #[error("mode degree {0} has the wrong sign for this operation")]
    ModeDegree(String),
    #[error("zero modes exist only for vectors in span(α_1..α_l)")]
    ZeroModeOutsideH,
    #[error("degree window must have a finite lower bound")]
    UnboundedWindow,
    #[error("lattice height {height} does not certify completeness of the window")]
    InsufficientHeight { height: i64 },
    #[error("bracket case hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
