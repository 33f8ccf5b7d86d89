//! Allocation-only core of `streetlens`.
//!
//! Everything here is pure computation over in-memory values: the profile
//! data model and discovery operations, text normalization (tokenizer,
//! Porter stemmer, emoji extraction), block-structured term-frequency
//! vectors, the four classifiers, stratified cross-validation, and the
//! exploratory corpus statistics. File formats, fixture loading, the HTTP
//! service, and the CLI live in the `streetlens` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod clients;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod scoring;
pub mod textprep;

mod fingerprint;

pub use error::{Error, Result};
pub use fingerprint::Fingerprint;
