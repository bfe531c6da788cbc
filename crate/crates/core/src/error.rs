use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variant names are part of the public contract: the CLI renders them
/// verbatim in reports, so keep them stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotSquare: expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("NotHermitian: relative Hermiticity residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("NoConvergence: Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("NotPsd: eigenvalue {eigenvalue:.3e} is below -{tolerance:.3e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("Singular: smallest magnitude {magnitude:.3e} is not above {tolerance:.3e}")]
    Singular { magnitude: f64, tolerance: f64 },

    #[error("DimensionMismatch: {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("NonFinite: {0} contains NaN or infinite entries")]
    NonFinite(&'static str),

    #[error("EmptyFrame: a frame needs at least one element")]
    EmptyFrame,

    #[error("NotAFrame: lower frame bound {lower:.3e} is not above {tolerance:.3e}")]
    NotAFrame { lower: f64, tolerance: f64 },

    #[error("SpaceMismatch: coefficient field and frame live on different measure spaces")]
    SpaceMismatch,

    #[error("InvalidMeasureSpace: {0}")]
    InvalidMeasureSpace(String),

    #[error("InvalidBounds: need 0 < lower <= upper, got lower={lower}, upper={upper}")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("UnknownAtom: `{0}` is not an atom of this space")]
    UnknownAtom(String),

    #[error("NotUnitVector: norm {norm} differs from 1")]
    NotUnitVector { norm: f64 },

    #[error("SequenceDoesNotSpan: reference sequence has numerical rank {rank} < {dim}")]
    SequenceDoesNotSpan { rank: usize, dim: usize },

    #[error("SequenceOutsideUnitBall: vector {index} has norm {norm} > 1")]
    SequenceOutsideUnitBall { index: usize, norm: f64 },

    #[error("InvalidPovm: {0}")]
    InvalidPovm(String),

    #[error("NotFramed: lambda_min of the total operator {lower:.3e} is not above {tolerance:.3e}")]
    NotFramed { lower: f64, tolerance: f64 },

    #[error("AtomMismatch: the two decompositions share no atom labels")]
    AtomMismatch,

    #[error("LimitExceeded: {0}")]
    LimitExceeded(String),
}

impl Error {
    /// Stable short name of the variant, e.g. `"NotPsd"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotPsd { .. } => "NotPsd",
            Error::Singular { .. } => "Singular",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::EmptyFrame => "EmptyFrame",
            Error::NotAFrame { .. } => "NotAFrame",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::InvalidMeasureSpace(_) => "InvalidMeasureSpace",
            Error::InvalidBounds { .. } => "InvalidBounds",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::UnknownAtom(_) => "UnknownAtom",
            Error::NotUnitVector { .. } => "NotUnitVector",
            Error::SequenceDoesNotSpan { .. } => "SequenceDoesNotSpan",
            Error::SequenceOutsideUnitBall { .. } => "SequenceOutsideUnitBall",
            Error::InvalidPovm(_) => "InvalidPovm",
            Error::NotFramed { .. } => "NotFramed",
            Error::AtomMismatch => "AtomMismatch",
            Error::LimitExceeded(_) => "LimitExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
