//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid hyperparameter for `{family}`: {message}")]
    InvalidHyperparameter { family: String, message: String },

    #[error("unknown hyperparameter `{name}` for family `{family}`")]
    UnknownHyperparameter { family: String, name: String },

    #[error("parameter point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter component {index} = {value} lies outside the open interval ({lo}, {hi})")]
    ParameterOutOfDomain {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("transform is not strictly monotone over the new support")]
    NonMonotoneTransform,

    #[error("supports are incompatible: both divergence directions are infinite")]
    IncompatibleSupports,

    #[error("{context}: quadrature did not converge (requested {requested:.3e}, achieved {achieved:.3e})")]
    QuadratureNonConvergent {
        context: String,
        requested: f64,
        achieved: f64,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("posterior is improper: {diagnostic}")]
    ImproperPosterior { diagnostic: String },

    #[error("posterior properness is undetermined: {diagnostic}")]
    UndeterminedPosterior { diagnostic: String },

    #[error("spread prior `{label}` is not proper: {diagnostic}")]
    ImproperSpread { label: String, diagnostic: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
