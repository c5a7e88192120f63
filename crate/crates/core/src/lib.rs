//! Orthographic profiling of text corpora and the rank-based significance
//! tests used to compare them.
//!
//! The pipeline runs bottom-up: [`ingest`] reads a manifest of corpora,
//! [`tokenize`] turns each document into a [`tokenize::TokenTable`] under an
//! explicit policy, [`ortho`] derives length, vowel and character features,
//! [`calib`] corrects type-token ratios for agglutinative morphology, and
//! [`stats`] tests whether corpora differ. [`report`] ties these together for
//! the command-line tool.

pub mod calib;
pub mod error;
pub mod ingest;
pub mod ortho;
pub mod report;
pub mod stats;
pub mod tokenize;

pub use error::{Error, Result};
