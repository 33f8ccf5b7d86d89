use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use super::TrainedModel;
use crate::features::{BlockSet, FusionMode, Vocabulary};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Everything needed to score new profiles: the fitted model together with
/// the vocabulary that defines its columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub blocks: BlockSet,
    pub mode: FusionMode,
    pub vocabulary: Vocabulary,
    pub model: TrainedModel,
}

impl ModelArtifact {
    pub fn new(vocabulary: Vocabulary, model: TrainedModel, mode: FusionMode) -> Result<Self> {
        let artifact =
            ModelArtifact { format_version: MODEL_FORMAT_VERSION, blocks: vocabulary.blocks(), mode, vocabulary, model };
        artifact.validate()?;
        Ok(artifact)
    }

    /// Rejects unknown format versions and a model fitted on a different
    /// column space than the embedded vocabulary.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidRecord {
                id: "model".to_string(),
                reason: alloc::format!(
                    "format version {} unsupported (expected {MODEL_FORMAT_VERSION})",
                    self.format_version
                ),
            });
        }
        if self.model.fingerprint != self.vocabulary.fingerprint() {
            return Err(Error::FingerprintMismatch {
                expected: self.vocabulary.fingerprint().to_hex(),
                found: self.model.fingerprint.to_hex(),
            });
        }
        if self.model.dim as usize != self.vocabulary.dim() || self.blocks != self.vocabulary.blocks() {
            return Err(Error::DimensionMismatch { expected: self.vocabulary.dim(), found: self.model.dim as usize });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        // every field is a plain struct, map with string keys, or number
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let artifact: ModelArtifact = serde_json::from_str(text)
            .map_err(|e| Error::InvalidRecord { id: "model".to_string(), reason: e.to_string() })?;
        artifact.validate()?;
        Ok(artifact)
    }
}
