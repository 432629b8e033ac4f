//! Exact solver for a two-period evidence-acquisition model.
//!
//! A principal assigns a binary decision at the end of period two and wants
//! it to match the second-period state. An agent, who always prefers the
//! assignment, can buy a fully revealing test in each period and chooses
//! which results to disclose. A mechanism recommends tests and maps report
//! pairs to assignments. The crate computes agent best responses, exact play
//! distributions, optimal mechanisms by exhaustive search, and the closed-form
//! optima for each parameter region.

pub mod agent;
pub mod closed_form;
pub mod error;
pub mod ic;
pub mod mechanism;
pub mod outcomes;
pub mod params;
pub mod rat;
pub mod sampling;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use mechanism::{Mechanism, TestingPolicy};
pub use params::{Params, RegionLabel, Report, Thresholds};
pub use rat::Rat;
