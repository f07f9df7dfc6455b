use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("|kappa| = {0} must be < 1/2 for the weight to be integrable")]
    NotIntegrable(f64),

    #[error("hypergeometric series did not converge after {terms} terms (last term magnitude {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("denominator parameter {param} hits a nonpositive integer at index {index}")]
    DenominatorPole { param: f64, index: usize },

    #[error("series is not terminating: no numerator parameter is a nonpositive integer")]
    NotTerminating,

    #[error("argument {0} outside the allowed domain")]
    Domain(String),

    #[error("point {re}+{im}i lies within the margin of a mirror line or the origin")]
    OnMirror { re: f64, im: f64 },

    #[error("degree {n} is not exceptional for family {family}")]
    NotExceptional { family: u8, n: usize },

    #[error("invalid basis label: {0}")]
    InvalidLabel(String),

    #[error("pairing inconsistency: residual nonconstant term of magnitude {0:e}")]
    PairingResidual(f64),

    #[error("circle pairing requires homogeneous inputs of even total degree: {0}")]
    CirclePairing(String),

    #[error("exponent overflow in polynomial arithmetic")]
    ExponentOverflow,
}

pub type Result<T> = std::result::Result<T, Error>;
