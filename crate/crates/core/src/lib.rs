//! Decide and filter dynamical irreducibility (stability) of integer
//! polynomials modulo primes, and run the surrounding desk-scale
//! experiments: square-sieve sums over dyadic prime intervals, character
//! sums over almost-primes, pre-periodicity decisions over Q, and height
//! diagnostics for iterates and resultants.
//!
//! The crate is organized around exact arithmetic: `poly` works over Z
//! and Q with arbitrary precision, `modp` over prime fields and small
//! extensions, `stability` combines both into per-prime verdicts, and
//! `scan`/`sieve` drive the bulk experiments.

pub mod error;
pub mod modp;
pub mod orbit;
pub mod poly;
pub mod scan;
pub mod sieve;
pub mod stability;

pub use error::{Error, Result};
pub use modp::{ExtField, ModPoly, Prime};
pub use poly::{detect_shape, parse_poly, parse_rational, IntPoly, QPoly, ShapeData};
pub use stability::{Policy, Verdict, VerdictKind};
