//! Rearrangement-invariant norms on the half-line.
//!
//! Functions live on `(0, ∞)` as nonnegative step functions on a grid. On
//! top of that the crate computes decreasing rearrangements, Lorentz-type
//! norms and their associate norms, weight conditions, representation
//! measures and reverse Hardy constants, and brute-force duality checks.

pub mod associate;
pub mod cli;
pub mod error;
pub mod extreal;
pub mod funcspace;
pub mod hardy;
pub mod measures;
pub mod rearrangement;
pub mod report;
pub mod sampling;
pub mod weights;

pub use error::{Error, Result};
