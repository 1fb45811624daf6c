//! Core algorithms for measuring how strongly a word's co-occurrence
//! context changes over time in a diachronic corpus.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] — tokenization, vocabulary construction and bucketing of
//!   dated documents into contiguous time slices;
//! * [`cooccurrence`] — sparse per-slice term-term count matrices,
//!   significance weighting (dice, log-likelihood ratio, mutual
//!   information) and the corpus-global statistic used for gap filling;
//! * [`volatility`] — five per-word volatility estimators over a sliding
//!   history of slices, including the gap-aware MinMax estimator;
//! * [`synthgen`] — a synthetic corpus generator with factor-driven,
//!   target-function-controlled context change for benchmarking;
//! * [`evaluation`] — normalization and mean-distance scoring of estimator
//!   output against the generator's ground truth.
//!
//! The crate is `no_std` (with `alloc`); IO, parallel orchestration and
//! file formats live in the companion `volatext` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cooccurrence;
pub mod corpus;
pub mod evaluation;
mod rng;
mod stats;
pub mod synthgen;
pub mod volatility;

/// Dense 0-based vocabulary index of a term.
pub type TermId = u32;
