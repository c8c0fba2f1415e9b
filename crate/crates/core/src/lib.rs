//! Exact K-theory bookkeeping for crossed products by the integers, applied to
//! the solvable Baumslag-Solitar groups `BS(1,n) = <a, b | a b a^-1 = b^n>`.
//!
//! The analytic side is computed with the Pimsner-Voiculescu six-term sequence
//! ([`pv`]), the topological side from the presentation complex
//! ([`presentation`]), and [`bc`] matches the two generator by generator.

pub mod abelian;
pub mod bc;
pub mod cli;
pub mod colimit;
pub mod error;
pub mod json;
pub mod presentation;
pub mod pv;
pub mod solenoid;

pub use error::{Error, Result};
