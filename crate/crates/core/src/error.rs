use thiserror::Error;

/// Errors produced by the numerical kernels and the model builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("linear system is singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("Bloch vector has norm {norm:.12} > 1")]
    OutsideBlochBall { norm: f64 },
    #[error("state has population {population:.3e} outside the (2,3) block")]
    LeakyState { population: f64 },
    #[error("steady state is not unique")]
    NonUniqueSteadyState,
    #[error("adaptive step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("closed-form expression requires y = 0 (got y = {y})")]
    RequiresZeroY { y: f64 },
    #[error("closed-form steady state requires f > 0")]
    NonUnique,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
