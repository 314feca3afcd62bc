use thiserror::Error;

/// Errors raised by the exact constructions in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not nilpotent: its {dim}-th power is nonzero")]
    NotNilpotent { dim: usize },

    #[error("form is not positive definite")]
    NotPositiveDefinite,

    #[error("holonomy closure exceeded {bound} elements")]
    HolonomyBound { bound: usize },

    #[error("translations span a rank-{rank} lattice in dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("unknown catalog name `{0}`")]
    UnknownName(String),

    #[error("generator {generator} does not preserve the base form")]
    NotFormIsometry { generator: usize },

    #[error("generator {generator} has a non-integral linear part; no hyperbolic conjugation makes it integral")]
    NotIntegralizable { generator: usize },

    #[error("gamma generator {generator} is not unipotent")]
    UnipotentViolation { generator: usize },

    #[error("form is not invariant under the holonomy")]
    NotInvariant,

    #[error("catalog entry `{name}` failed verification: {reason}")]
    CatalogCorrupt { name: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
