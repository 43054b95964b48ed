use thiserror::Error;

use crate::quadrature::CertifiedResult;

/// Errors raised by bound evaluation, function evaluation, quadrature and
/// the verification harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The arguments are in-domain but the bound is not defined for them.
    #[error("validity error: {0}")]
    Validity(String),

    /// Supplied data is mutually inconsistent (e.g. a Lipschitz constant
    /// smaller than the observed secant slope).
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("unsupported derivative order {order} for {family}")]
    UnsupportedOrder { order: u8, family: &'static str },

    /// The reference integrator could not reach its tolerance.
    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// The certified driver ran out of refinements before meeting the target.
    #[error("refinement budget exhausted: best certificate {:.3e} after n = {}", .best.certificate.total, .best.partition.len())]
    BudgetExhausted { best: Box<CertifiedResult> },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validity(msg: impl Into<String>) -> Self {
        Error::Validity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
