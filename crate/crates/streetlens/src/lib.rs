//! Standard-library side of streetlens: corpus and fixture files, the label
//! log, live client adapters, configuration, the synthetic corpus
//! generator, the triage queue, and the HTTP service. The computation lives
//! in [`streetlens_core`].

pub mod config;
mod error;
pub mod fixtures;
pub mod io;
pub mod labels;
pub mod live;
pub mod model_file;
pub mod service;
pub mod synth;
pub mod triage;

pub use error::{Error, Result};
pub use streetlens_core as core;
