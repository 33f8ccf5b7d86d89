use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Block, BlockSet, FusionMode, ProfileDoc, Vocabulary};
use crate::Fingerprint;

/// Sparse term-count vector in a vocabulary's column space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// `(column, count)` pairs, strictly increasing by column, counts > 0.
    pub entries: Vec<(u32, u32)>,
    /// The profile's availability mask.
    pub availability: BlockSet,
    /// Fingerprint of the vocabulary that defined the columns.
    pub fingerprint: Fingerprint,
    pub dim: u32,
}

impl FeatureVector {
    pub fn get(&self, column: u32) -> u32 {
        self.entries
            .binary_search_by_key(&column, |&(c, _)| c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().copied()
    }

    /// Dense copy as floats, for tests and small oracles.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = alloc::vec![0.0; self.dim as usize];
        for &(c, n) in &self.entries {
            dense[c as usize] = f64::from(n);
        }
        dense
    }
}

/// In-vocabulary counts of one block, as `(global column, count)` pairs in
/// column order. Empty when the block is not part of the vocabulary.
pub fn extract_block(doc: &ProfileDoc, block: Block, vocab: &Vocabulary) -> Vec<(u32, u32)> {
    if !vocab.blocks().contains(block) {
        return Vec::new();
    }
    let offset = vocab.block_range(block).start;
    let terms = vocab.block(block);
    // doc counts iterate in term order, so local indices come out sorted
    doc.counts(block)
        .iter()
        .filter_map(|(term, &n)| terms.index_of(term).map(|i| (offset + i, n)))
        .collect()
}

/// Vector for a profile, or `None` (the skip marker) when Model(2) is asked
/// for a profile lacking one of the vocabulary's blocks.
pub fn assemble_vector(doc: &ProfileDoc, vocab: &Vocabulary, mode: FusionMode) -> Option<FeatureVector> {
    let availability = doc.availability();
    if mode == FusionMode::Model2 && !availability.is_superset(vocab.blocks()) {
        return None;
    }
    let mut entries = Vec::new();
    for block in vocab.blocks().iter() {
        if availability.contains(block) {
            entries.extend(extract_block(doc, block, vocab));
        }
    }
    Some(FeatureVector { entries, availability, fingerprint: vocab.fingerprint(), dim: vocab.dim() as u32 })
}
