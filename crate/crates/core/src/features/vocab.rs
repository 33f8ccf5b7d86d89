use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::{Block, BlockSet, MinDf, ProfileDoc};
use crate::{Error, Fingerprint, Result};

/// Terms kept for one block, sorted, with their training document frequency.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockVocab {
    pub terms: Vec<String>,
    pub df: Vec<u32>,
}

impl BlockVocab {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of a term within the block.
    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok().map(|i| i as u32)
    }
}

/// Column space for a set of blocks, built from one training set.
///
/// Block order is fixed (T, P, E, I, Y); blocks outside [`Vocabulary::blocks`]
/// have no columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr")]
pub struct Vocabulary {
    blocks: BlockSet,
    min_df: MinDf,
    training_size: usize,
    per_block: [BlockVocab; 5],
    fingerprint: Fingerprint,
}

#[derive(Deserialize)]
struct VocabularyRepr {
    blocks: BlockSet,
    min_df: MinDf,
    training_size: usize,
    per_block: [BlockVocab; 5],
    fingerprint: Fingerprint,
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> core::result::Result<Self, String> {
        for block in Block::ALL {
            let v = &r.per_block[block.index()];
            if v.terms.len() != v.df.len() {
                return Err(format!("block {block}: {} terms but {} df values", v.terms.len(), v.df.len()));
            }
            if !r.blocks.contains(block) && !v.is_empty() {
                return Err(format!("block {block} is not selected but has terms"));
            }
            if v.terms.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("block {block}: terms not strictly sorted"));
            }
        }
        Ok(Vocabulary {
            blocks: r.blocks,
            min_df: r.min_df,
            training_size: r.training_size,
            per_block: r.per_block,
            fingerprint: r.fingerprint,
        })
    }
}

/// Build a vocabulary from training docs. A term is kept when it appears in
/// at least `min_df` distinct training profiles (0 behaves like 1).
pub fn build_vocabulary<'a, I>(training: I, blocks: BlockSet, min_df: MinDf) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a ProfileDoc>,
{
    if blocks.is_empty() {
        return Err(Error::EmptyBlockSet);
    }
    let mut ids: Vec<&str> = Vec::new();
    let mut df: [BTreeMap<&str, u32>; 5] = Default::default();
    for doc in training {
        ids.push(&doc.profile_id);
        for block in blocks.iter() {
            for term in doc.counts(block).keys() {
                *df[block.index()].entry(term.as_str()).or_insert(0) += 1;
            }
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    ids.sort_unstable();

    let mut per_block: [BlockVocab; 5] = Default::default();
    for block in blocks.iter() {
        let threshold = min_df.get(block).max(1);
        let vocab = &mut per_block[block.index()];
        for (term, &n) in &df[block.index()] {
            if n >= threshold {
                vocab.terms.push(String::from(*term));
                vocab.df.push(n);
            }
        }
    }

    let fingerprint = fingerprint(&ids, blocks, &min_df, &per_block);
    Ok(Vocabulary { blocks, min_df, training_size: ids.len(), per_block, fingerprint })
}

fn fingerprint(ids: &[&str], blocks: BlockSet, min_df: &MinDf, per_block: &[BlockVocab; 5]) -> Fingerprint {
    let mut parts: Vec<Vec<u8>> = Vec::new();
    parts.push(b"streetlens-vocabulary/1".to_vec());
    parts.push(format!("{blocks}").into_bytes());
    for block in Block::ALL {
        parts.push(min_df.get(block).to_le_bytes().to_vec());
    }
    parts.push((ids.len() as u64).to_le_bytes().to_vec());
    parts.extend(ids.iter().map(|id| id.as_bytes().to_vec()));
    for block in blocks.iter() {
        let vocab = &per_block[block.index()];
        parts.push(format!("{block}:{}", vocab.len()).into_bytes());
        for (term, df) in vocab.terms.iter().zip(&vocab.df) {
            parts.push(term.as_bytes().to_vec());
            parts.push(df.to_le_bytes().to_vec());
        }
    }
    Fingerprint::of_parts(parts.iter().map(Vec::as_slice))
}

impl Vocabulary {
    pub fn blocks(&self) -> BlockSet {
        self.blocks
    }

    pub fn min_df(&self) -> MinDf {
        self.min_df
    }

    pub fn training_size(&self) -> usize {
        self.training_size
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn block(&self, block: Block) -> &BlockVocab {
        &self.per_block[block.index()]
    }

    /// Total number of columns.
    pub fn dim(&self) -> usize {
        self.per_block.iter().map(BlockVocab::len).sum()
    }

    /// Global column range occupied by a block (empty if not selected).
    pub fn block_range(&self, block: Block) -> Range<u32> {
        let start: usize = Block::ALL[..block.index()].iter().map(|b| self.block(*b).len()).sum();
        let end = start + self.block(block).len();
        start as u32..end as u32
    }

    pub fn column(&self, block: Block, term: &str) -> Option<u32> {
        let local = self.block(block).index_of(term)?;
        Some(self.block_range(block).start + local)
    }

    /// Block, term, and training df behind a global column.
    pub fn term_at(&self, column: u32) -> Option<(Block, &str, u32)> {
        let mut start = 0u32;
        for block in Block::ALL {
            let vocab = self.block(block);
            let end = start + vocab.len() as u32;
            if column < end {
                let i = (column - start) as usize;
                return Some((block, vocab.terms[i].as_str(), vocab.df[i]));
            }
            start = end;
        }
        None
    }

    /// Tab-separated export: `block term index column df`, one row per term,
    /// after `#` header lines carrying the fingerprint and thresholds.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let m = &self.min_df;
        let _ = writeln!(out, "# fingerprint\t{}", self.fingerprint);
        let _ = writeln!(out, "# blocks\t{}", self.blocks);
        let _ = writeln!(out, "# min_df\tT={} P={} E={} I={} Y={}", m.t, m.p, m.e, m.i, m.y);
        let _ = writeln!(out, "# training_profiles\t{}", self.training_size);
        out.push_str("block\tterm\tindex\tcolumn\tdf\n");
        for block in self.blocks.iter() {
            let start = self.block_range(block).start;
            let vocab = self.block(block);
            for (i, (term, df)) in vocab.terms.iter().zip(&vocab.df).enumerate() {
                let _ = writeln!(out, "{block}\t{}\t{i}\t{}\t{df}", escape_tsv(term), start + i as u32);
            }
        }
        out
    }
}

fn escape_tsv(term: &str) -> String {
    term.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}
