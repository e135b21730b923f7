//! Citation-curve analysis.
//!
//! An author's per-publication citation counts, ranked in decreasing order,
//! empirically follow the decay law `c_n ≈ c0·e^{-P·n^A}` with A near 0.5.
//! This crate models that curve end to end:
//!
//! - [`core`]: validated ranked citation lists and the classical scalar
//!   metrics (total citations, h-index, i_k-indices, first-digit histogram).
//! - [`fit`]: the decay model, four estimators for the multiplier P, the
//!   joint (A, P) log-log regression, and metric predictions (i10/i20 ratio,
//!   h-index) derived from a fitted model.
//! - [`dist`]: distributional diagnostics — Benford first-digit frequencies,
//!   normalized log statistics and the λ parameter of the log-normal
//!   citation model, the standard normal quantile function, expected order
//!   statistics, and the large-N slope asymptote.
//! - [`sim`]: a seeded, fully deterministic Monte Carlo engine that draws
//!   synthetic citation lists from the log-normal model and reproduces the
//!   reference slope tables (slope vs λ at N = 200, slope vs N up to 10^6).

pub mod core;
pub mod dist;
mod error;
pub mod fit;
pub mod sim;

pub use error::{Error, Result};
