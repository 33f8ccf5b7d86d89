//! Model files: a pretty-printed JSON [`ModelArtifact`].

use std::path::Path;

use streetlens_core::models::ModelArtifact;

use crate::error::{Error, Result};
use crate::io::{read_text, write_file};

pub fn save(path: &Path, artifact: &ModelArtifact) -> Result<()> {
    write_file(path, &artifact.to_json())
}

/// Load and validate a model file.
pub fn load(path: &Path) -> Result<ModelArtifact> {
    ModelArtifact::from_json(&read_text(path)?).map_err(|e| match e {
        streetlens_core::Error::InvalidRecord { reason, .. } => {
            Error::Line { path: path.to_path_buf(), line: 0, message: reason }
        }
        other => Error::Core(other),
    })
}
