//! Exact arithmetic for mod-p Kisin modules with coefficients: truncated power
//! series over finite fields, a tamely ramified local-field model, and the
//! canonical-form and shape-factorization algorithms built on them.
//!
//! Every algorithm here returns data that can be checked by multiplying back;
//! the `suites` module packages those checks as seeded, replayable campaigns.

#![allow(clippy::needless_range_loop)]

pub mod canonical;
pub mod error;
pub mod filtration;
pub mod kisin;
pub mod localfield;
pub mod rings;
pub mod shape;
pub mod suites;

pub use error::{Error, Result};
