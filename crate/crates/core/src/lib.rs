//! Exact simulation and equilibrium analysis of the EWL quantum
//! Prisoner's Dilemma, its high-frequency-trading reading, noisy channels,
//! and an iterated tournament harness.

pub mod error;
pub mod ewl;
pub mod games;
pub mod hft;
mod linsolve;
pub mod noise;
pub mod qcore;
pub mod search;

pub use error::{Error, Result};
