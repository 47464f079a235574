//! Differential-evolution tuning of software defect predictors.
//!
//! The crate ingests PROMISE-style CK metric releases, trains four learners
//! (CART, Random Forest, WHERE and logistic regression), tunes the tree
//! learners with a single-objective differential evolution that stops after
//! a fixed number of non-improving generations, and reproduces the
//! release-ordered train/tune/test protocol with CSV and markdown reports.

pub mod dataset;
pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod seed;
pub mod stats;
pub mod tuner;

pub use error::{Error, Result};
