use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("base space mismatch: {0}")]
    BaseMismatch(String),
    #[error("arity {arity} exceeds cutoff {cutoff}")]
    CutoffOverflow { arity: usize, cutoff: usize },
    #[error("relation arity {arity} exceeds the bracket window {window}")]
    WindowExceeded { arity: usize, window: usize },
    #[error("argument is not in the abelian subalgebra: {0}")]
    NotInAbelian(String),
    #[error("curved V-data is not accepted here")]
    CurvedRejected,
    #[error("twist element is not Maurer-Cartan")]
    NotMaurerCartan,
    #[error("series did not terminate within the certified bound {bound}")]
    SeriesNotTerminating { bound: usize },
    #[error("unverifiable truncation: {0}")]
    UnverifiableTruncation(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("singular Jacobian at iterate {iterate:?}")]
    SingularJacobian { iterate: Vec<f64> },
    #[error("malformed input: {0}")]
    Input(String),
    #[error("invalid V-data: {0}")]
    InvalidVData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
