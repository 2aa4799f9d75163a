//! A laboratory for one-dimensional, memoryless, zero-sum rating systems.
//!
//! A rating system is a skill curve `σ(x, y)` (the probability that a player
//! of true rating `x` beats one of true rating `y`) paired with a symmetric
//! K-function giving the total stake of a match. The adjustment awarded to a
//! winner and the expected gain of a player follow from those two pieces.
//!
//! The crate is organised around four layers:
//!
//! - [`curves`]: skill curves (thresholded logistic, Sonas-like, separable,
//!   tabulated, trivial) and bisectors.
//! - [`system`]: K-functions, adjustments, expected gain and match updates.
//! - [`verifier`]: grid-based decision procedures that certify or refute
//!   opponent-indifference style properties, skill-chain construction and
//!   max-gain opponent search.
//! - [`sim`]: seeded Monte-Carlo experiments measuring how much an attacker
//!   can inflate their rating by choosing opponents.
//!
//! [`config`] holds the JSON documents every layer reads and writes, and
//! [`cli`] drives everything from the `ratinglab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod cli;
pub mod config;
pub mod curves;
mod error;
pub mod plot;
pub mod sim;
pub mod system;
pub mod verifier;

pub use curves::{BisectorTable, SkillCurve, TabulatedCurve};
pub use error::{Error, Result};
pub use system::{GainQuery, KFunction, RatingSystem};

/// Ratings and rating-point amounts are plain doubles; no integer rounding.
pub type Rating = f64;
