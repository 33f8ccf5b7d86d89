//! Fitting a deployable model on a whole labeled set, and batch scoring.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{ClassLabel, Label};
use crate::eval::eligible;
use crate::features::{assemble_vector, build_vocabulary, BlockSet, FusionMode, MinDf, ProfileDoc};
use crate::models::{self, ModelArtifact, ModelSpec, Prediction};
use crate::{Error, Result};

/// Train on every eligible labeled doc, with the same filtering a
/// cross-validation run would apply.
pub fn fit_artifact(
    docs: &[ProfileDoc],
    spec: &ModelSpec,
    blocks: BlockSet,
    mode: FusionMode,
    min_df: MinDf,
) -> Result<ModelArtifact> {
    if blocks.is_empty() {
        return Err(Error::EmptyBlockSet);
    }
    let pool = eligible(docs, blocks, mode);
    let vocab = build_vocabulary(pool.iter().copied(), blocks, min_df)?;
    let mut x = Vec::with_capacity(pool.len());
    let mut y: Vec<ClassLabel> = Vec::with_capacity(pool.len());
    for d in &pool {
        if let (Some(v), Some(c)) = (assemble_vector(d, &vocab, mode), d.label.class()) {
            x.push(v);
            y.push(c);
        }
    }
    let model = models::train(spec, &x, &y)?;
    ModelArtifact::new(vocab, model, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredProfile {
    pub profile_id: String,
    pub prediction: Prediction,
    /// Set when a Model(2) artifact scored a profile lacking some selected
    /// block; the profile was vectorized with missing blocks zeroed instead.
    pub partial_features: bool,
}

/// Score one doc. Never skips: incomplete profiles under Model(2) fall back
/// to the zero-filled vector and are flagged.
pub fn score_doc(artifact: &ModelArtifact, doc: &ProfileDoc) -> Result<ScoredProfile> {
    let (vector, partial) = match assemble_vector(doc, &artifact.vocabulary, artifact.mode) {
        Some(v) => (v, false),
        None => {
            let v = assemble_vector(doc, &artifact.vocabulary, FusionMode::Model1)
                .expect("model1 assembly always yields a vector");
            (v, true)
        }
    };
    Ok(ScoredProfile {
        profile_id: doc.profile_id.clone(),
        prediction: artifact.model.predict(&vector)?,
        partial_features: partial,
    })
}

/// Score docs in id order. Labeled profiles (including `unsure`) are left
/// out unless `include_labeled` is set.
pub fn score_docs(artifact: &ModelArtifact, docs: &[ProfileDoc], include_labeled: bool) -> Result<Vec<ScoredProfile>> {
    let mut picked: Vec<&ProfileDoc> =
        docs.iter().filter(|d| include_labeled || d.label == Label::Unlabeled).collect();
    picked.sort_by(|a, b| a.profile_id.cmp(&b.profile_id));
    picked.into_iter().map(|d| score_doc(artifact, d)).collect()
}
