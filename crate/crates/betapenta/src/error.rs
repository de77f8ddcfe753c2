use thiserror::Error;

/// Errors shared by the quadrature engine and the identity verifiers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("integral did not converge: {0}")]
    NonConvergent(String),
    #[error("integrand returned a non-finite value at {at}")]
    DomainError { at: f64 },
    #[error("argument outside analyticity strip: |Im x| = {im} >= {halfwidth}")]
    OutsideStrip { im: f64, halfwidth: f64 },
    #[error("evaluation point within {dist:.3e} of a pole")]
    PoleHit { dist: f64 },
    #[error("q-Pochhammer nome must satisfy |q| < 1, got |q| = {0}")]
    DivergentParameter(f64),
    #[error("tuple has a distributional Fourier transform; identity applies to square-integrable tuples")]
    DistributionalInput,
    #[error("family is not declared integrable over the group")]
    NotIntegrable,
    #[error("h does not satisfy the bilinear compatibility condition: {0}")]
    InvalidHomomorphism(String),
    #[error("input family violates the automorphicity condition: residual {0:.3e}")]
    AutomorphicityViolation(f64),
    #[error("configuration error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
