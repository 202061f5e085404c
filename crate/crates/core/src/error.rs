// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("system has no modes")]
    ZeroModes,

    #[error("matrix is not symmetric ({what}, relative deviation {deviation:.3e})")]
    NotSymmetric { what: &'static str, deviation: f64 },

    #[error("matrix is not Hermitian ({what}, relative deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("drift is not asymptotically stable (spectral abscissa {abscissa:.6e})")]
    NotAsymptoticallyStable { abscissa: f64 },

    #[error("drift is marginally stable (spectral abscissa {abscissa:.6e})")]
    MarginallyStable { abscissa: f64 },

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error("not realizable as a Lindblad generator: Υ has eigenvalue {eigenvalue:.6e}")]
    NotRealizable { eigenvalue: f64 },

    #[error("matrix is not positive definite ({what}, smallest eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveDefinite { what: &'static str, min_eigenvalue: f64 },

    #[error("matrix is not symplectic (deviation {deviation:.3e})")]
    NotSymplectic { deviation: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("quantity undefined: {0}")]
    UndefinedQuantity(String),

    #[error("numerical failure: {0}")]
    SolverFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value at step {step}")]
    NonFinite { step: usize },

    #[error("integration horizon {horizon:.3e} is shorter than {minimum:.3e}")]
    HorizonTooShort { horizon: f64, minimum: f64 },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
