//! The score-ordered verification queue and the evidence shown per item.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use streetlens_core::clients::MediaSource;
use streetlens_core::corpus::{ClassLabel, Label, ProfileRecord, Provenance};
use streetlens_core::features::{Block, ProfileDoc};
use streetlens_core::models::ModelArtifact;
use streetlens_core::scoring::ScoredProfile;
use streetlens_core::textprep::{chain_bigrams, detect_chains, extract_emoji_occurrences};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Pending,
    Labeled,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEvidence {
    pub term: String,
    pub count: u32,
    /// `count * weight` for linear models; absent for forests or terms
    /// outside the model's vocabulary.
    pub contribution: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEvidence {
    pub first: String,
    pub second: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoEvidence {
    pub video_id: String,
    /// `None` when the video could not be resolved.
    pub description: Option<String>,
    pub keyword_hits: Vec<String>,
}

/// The signal families an analyst checks: words per block, emoji chains,
/// image tags, and linked videos.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub description: String,
    pub top_terms: BTreeMap<Block, Vec<TermEvidence>>,
    /// Sum of term contributions per block, linear models only.
    pub block_contributions: BTreeMap<Block, f64>,
    pub emoji_chains: Vec<ChainEvidence>,
    pub image_tags: Vec<String>,
    pub videos: Vec<VideoEvidence>,
}

#[derive(Clone, Copy)]
pub struct EvidenceSources<'a> {
    pub media: &'a dyn MediaSource,
    pub keywords: &'a [String],
    pub terms_per_block: usize,
}

impl Evidence {
    pub fn collect(record: &ProfileRecord, doc: &ProfileDoc, artifact: &ModelArtifact, src: EvidenceSources<'_>) -> Self {
        let weights = artifact.model.params.linear_weights();
        let vocab = &artifact.vocabulary;
        let mut top_terms = BTreeMap::new();
        let mut block_contributions = BTreeMap::new();
        for block in Block::ALL {
            let mut terms: Vec<TermEvidence> = doc
                .counts(block)
                .iter()
                .map(|(term, &count)| {
                    let contribution = weights
                        .as_ref()
                        .zip(vocab.column(block, term))
                        .map(|(w, c)| f64::from(count) * w[c as usize]);
                    TermEvidence { term: term.clone(), count, contribution }
                })
                .collect();
            if terms.is_empty() {
                continue;
            }
            if weights.is_some() {
                block_contributions.insert(block, terms.iter().filter_map(|t| t.contribution).sum());
            }
            let key = |t: &TermEvidence| t.contribution.unwrap_or(f64::NEG_INFINITY);
            terms.sort_by(|a, b| {
                key(b).total_cmp(&key(a)).then_with(|| b.count.cmp(&a.count)).then_with(|| a.term.cmp(&b.term))
            });
            terms.truncate(src.terms_per_block);
            top_terms.insert(block, terms);
        }

        let mut chains: BTreeMap<(String, String), u32> = BTreeMap::new();
        for tweet in &record.tweets {
            let found = detect_chains(&extract_emoji_occurrences(&tweet.text));
            for (a, b) in chain_bigrams(&found) {
                *chains.entry((a.to_string(), b.to_string())).or_insert(0) += 1;
            }
        }
        let mut emoji_chains: Vec<ChainEvidence> =
            chains.into_iter().map(|((first, second), count)| ChainEvidence { first, second, count }).collect();
        emoji_chains.sort_by_key(|c| core::cmp::Reverse(c.count));

        let image_tags: BTreeSet<String> = record
            .image_refs()
            .filter_map(|r| src.media.tag_image(r))
            .flat_map(|t| t.tags.into_iter().map(|t| t.term))
            .collect();

        let keywords: Vec<String> = src.keywords.iter().map(|k| k.to_lowercase()).collect();
        let ids: BTreeSet<&str> = record.video_ids().collect();
        let videos = ids
            .into_iter()
            .map(|id| {
                let description = src.media.fetch_video_metadata(id).map(|v| v.description);
                let lower = description.as_deref().unwrap_or("").to_lowercase();
                let keyword_hits = keywords.iter().filter(|k| lower.contains(k.as_str())).cloned().collect();
                VideoEvidence { video_id: id.to_string(), description, keyword_hits }
            })
            .collect();

        Evidence {
            description: record.description.clone(),
            top_terms,
            block_contributions,
            emoji_chains,             image_tags: image_tags.into_iter().collect(),
            videos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageItem {
    pub profile_id: String,
    pub score: f64,
    pub predicted: ClassLabel,
    pub partial_features: bool,
    pub provenance: Provenance,
    pub status: ItemStatus,
    /// Label submitted through the queue, once there is one.
    pub label: Option<Label>,
    pub evidence: Evidence,
}

impl TriageItem {
    pub fn new(scored: &ScoredProfile, provenance: Provenance, evidence: Evidence) -> Self {
        TriageItem {
            profile_id: scored.profile_id.clone(),
            score: scored.prediction.score,
            predicted: scored.prediction.label,
            partial_features: scored.partial_features,
            provenance,
            status: ItemStatus::Pending,
            label: None,
            evidence,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueueFilter {
    pub min_score: Option<f64>,
    pub max_score: Option<f64>,
    pub status: Option<ItemStatus>,
    pub provenance: Option<Provenance>,
}

impl QueueFilter {
    fn admits(&self, item: &TriageItem) -> bool {
        self.min_score.is_none_or(|m| item.score >= m)
            && self.max_score.is_none_or(|m| item.score <= m)
            && self.status.is_none_or(|s| item.status == s)
            && self.provenance.is_none_or(|p| item.provenance == p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueuePage {
    /// Items matching the filter, before paging.
    pub total: usize,
    pub offset: usize,
    pub items: Vec<TriageItem>,
}

/// Items ordered by score descending, then profile id ascending.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriageQueue {
    items: Vec<TriageItem>,
}

impl TriageQueue {
    pub fn new(mut items: Vec<TriageItem>) -> Self {
        items.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.profile_id.cmp(&b.profile_id)));
        TriageQueue { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pending(&self) -> usize {
        self.items.iter().filter(|i| i.status == ItemStatus::Pending).count()
    }

    pub fn items(&self) -> &[TriageItem] {
        &self.items
    }

    pub fn get(&self, id: &str) -> Option<&TriageItem> {
        self.items.iter().find(|i| i.profile_id == id)
    }

    /// Highest-scoring pending item.
    pub fn next(&self) -> Option<&TriageItem> {
        self.items.iter().find(|i| i.status == ItemStatus::Pending)
    }

    pub fn page(&self, filter: &QueueFilter, offset: usize, limit: usize) -> QueuePage {
        let matching: Vec<&TriageItem> = self.items.iter().filter(|i| filter.admits(i)).collect();
        QueuePage {
            total: matching.len(),
            offset,
            items: matching.into_iter().skip(offset).take(limit).cloned().collect(),
        }
    }

    /// Record a label against a queued item: `unsure` marks it skipped,
    /// a class label marks it labeled. Ids not in the queue are ignored.
    pub fn mark(&mut self, id: &str, label: Label) {
        if let Some(item) = self.items.iter_mut().find(|i| i.profile_id == id) {
            item.status = if label.class().is_some() { ItemStatus::Labeled } else { ItemStatus::Skipped };
            item.label = Some(label);
        }
    }
}

/// What a label submission should do given the profile's current label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Apply,
    /// The profile already carries this label; nothing is written.
    Unchanged,
    /// The profile already carries a different class label. The first
    /// class label wins.
    Conflict,
}

pub fn decide(current: Label, requested: Label) -> Decision {
    if current == requested {
        Decision::Unchanged
    } else if current.class().is_some() {
        Decision::Conflict
    } else {
        Decision::Apply
    }
}
