//! Estimators of algorithmic (Kolmogorov-Chaitin) complexity built on
//! exhaustive simulation of small Turing machines.
//!
//! The crate is organised around one pipeline:
//!
//! 1. [`turing`] enumerates and runs every machine of a `(states, symbols)`
//!    rule space, started on a blank tape or grid, under a step cutoff.
//! 2. [`ctm`] aggregates the halting outputs into an empirical frequency
//!    distribution and converts it into a lookup table mapping each small
//!    block to a complexity value in bits (`-log2` of its production
//!    frequency). Tables persist to a plain text format with a checksum.
//! 3. [`bdm`] estimates the complexity of objects far larger than any
//!    enumerable output by decomposing them into blocks covered by a table
//!    and summing block values plus `log2` of multiplicities, with several
//!    boundary strategies and weighting variants, plus a size-normalized
//!    score.
//! 4. [`entropy`] provides the Shannon, block-entropy and mutual-information
//!    baselines the decomposition estimates are compared against.
//! 5. [`harness`] holds the evaluation machinery: rank correlations between
//!    estimators, report generation, and exact graph-spectrum tooling used
//!    to exercise the estimators on structurally related objects.

pub mod bdm;
pub mod block;
pub mod ctm;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod turing;

pub use block::Block;
pub use ctm::{CtmTable, OutputDistribution};
pub use error::{Error, Result};
pub use turing::{RuleSpace, SimulationResult, TuringMachine};
