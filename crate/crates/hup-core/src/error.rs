use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The adaptive scheme exhausted its panel budget before reaching the
    /// requested tolerance. Carries the best value obtained and the error
    /// actually achieved.
    #[error("quadrature did not converge (achieved {achieved:.3e}, requested {requested:.3e})")]
    NonConvergence {
        partial: Complex64,
        achieved: f64,
        requested: f64,
    },

    /// The f_y factorisation has a singular prefactor on the line eta = 0.
    #[error("eta = {eta:.3e} is too close to zero for the f_y route")]
    DegenerateEta { eta: f64 },

    /// An argument lies outside the domain of an exponent formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on a spec object was violated.
    #[error("spec error: {0}")]
    Spec(String),

    /// The Moebius point map was evaluated at its pole a + b*eta = 0.
    #[error("pole of the Moebius map at eta = {eta}")]
    Pole { eta: f64 },

    /// A regression had no spread in the abscissas.
    #[error("degenerate fit: all abscissas equal")]
    DegenerateFit,

    /// A density transform that has no representation in the closed kinds.
    #[error("unsupported density operation: {0}")]
    Unsupported(String),

    /// Malformed serialized input (JSON document or CSV table).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
