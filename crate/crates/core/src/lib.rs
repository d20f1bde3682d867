//! Computing π with the self-correcting map `α ↦ α + sin α`.
//!
//! Each application roughly triples the number of correct digits of an
//! approximation to π. The crate provides the arbitrary-precision substrate
//! ([`mpfix`]), binary-splitting sine/cosine ([`series`]), the precision
//! ladder ([`corrector`]), digit verification by one re-correcting step
//! ([`verifier`]), orbits of `a ↦ a + sin a` from arbitrary starts
//! ([`dynamics`]), and the timing harness and self-test used by the CLI.

pub mod bench;
pub mod corrector;
pub mod dynamics;
pub mod error;
pub mod mpfix;
pub mod selftest;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
pub use mpfix::{DigitString, FixedReal, Precision};
