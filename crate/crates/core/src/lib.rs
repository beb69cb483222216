//! Link prediction on text-attributed graphs.
//!
//! The crate bundles a graph store with negative sampling and stratified
//! splits, lexical relevance features, a graph text network trained with
//! exact hand-written gradients, confidence-based curriculum weighting
//! (SuperLoss and its trend-aware extension), and diagnostics over the
//! per-epoch difficulty trace.

pub mod cli;
pub mod config;
pub mod curriculum;
pub mod diagnostics;
pub mod error;
pub mod graphstore;
pub mod model;
pub mod rng;
pub mod textfeat;
pub mod trainer;

pub use error::{Error, Result};
