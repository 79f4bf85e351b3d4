//! Hasse-Witt (Cartier-Manin) matrices of hyperelliptic curves y^2 = f(x)
//! over Q, computed at all odd primes of good reduction p <= N simultaneously
//! in average polynomial time via accumulating remainder forests, or at a
//! single prime by a low-memory linear scan.
//!
//! The entry points most callers want are [`driver::compute_matrices`] (all
//! good primes up to a bound) and [`driver::compute_matrix_single`] (one
//! prime). Zeta-function data (characteristic polynomial mod p, lifted
//! Frobenius traces, Sato-Tate a1 statistics) is derived in [`zeta`].

pub mod curve;
pub mod driver;
pub mod firstrow;
pub mod modarith;
pub mod reconstruct;
pub mod recurrence;
pub mod remtree;
pub mod sieve;
pub mod zeta;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("polynomial is not squarefree over Q")]
    NotSquarefree,
    #[error("degree {0} out of range: need degree >= 3")]
    DegreeOutOfRange(usize),
    #[error("x^2 divides f, so f is not squarefree")]
    TooDivisibleByX,
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
    #[error("reduction modulo {0} does not define a hyperelliptic curve")]
    NotHyperelliptic(u64),
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("translation points coincide modulo {0}")]
    DuplicateTranslations(u64),
    #[error("genus {0} exceeds prime {1}")]
    GenusExceedsPrime(usize, u64),
    #[error("empty input")]
    EmptyInput,
    #[error("recurrence divisor k*h0 vanishes modulo {0} at step {1}")]
    DivisorVanishes(u64, u64),
}

pub type Result<T> = std::result::Result<T, Error>;
