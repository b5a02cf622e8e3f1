use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("not an ideal: {0}")]
    NotAnIdeal(String),

    #[error("ideal is not closed under the differential: {0}")]
    NotDgIdeal(String),

    #[error("ideal is not nilpotent within {0} steps")]
    NotNilpotent(usize),

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid relation: {0}")]
    InvalidRelation(String),

    #[error("path `{path}` of length {bound} is not in the relation ideal; raise the truncation bound")]
    NotNilpotentAtBound { bound: usize, path: String },

    #[error("missing augmentation on {0}")]
    MissingAugmentation(String),

    #[error("twisting map check failed: {0}")]
    TwistingFailure(String),

    #[error("differential check failed: {0}")]
    DifferentialFailure(String),

    #[error("algebra is not basic S-split: {0}")]
    NotSplit(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid subspace family: {0}")]
    InvalidFamily(String),

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("determinant is {0}, expected 1")]
    NotSpecialLinear(String),

    #[error("unsupported quadratic form {form}: {reason}")]
    UnsupportedForm { form: String, reason: String },

    #[error("{0}")]
    Other(String),
}
