use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Expression could not be parsed; `pos` is a byte offset into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A materialized polynomial would exceed the configured degree guard.
    #[error("degree guard exceeded: required degree {required} > guard {guard}")]
    DegreeGuard { required: u128, guard: u64 },

    /// A value claimed to be prime failed the primality check.
    #[error("{0} is not a prime in the supported range")]
    NotPrime(u64),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Res(f^(n), f') vanished: the iterate shares a root with the derivative.
    #[error("zero resultant: iterate {n} shares a root with the derivative")]
    ZeroResultant { n: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
