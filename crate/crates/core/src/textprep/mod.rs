//! Deterministic text normalization.
//!
//! [`TextPipeline::normalize`] lowercases and tokenizes a text, drops URLs
//! and mentions, removes stopwords and seed terms, and Porter-stems what is
//! left. Hashtags contribute their `#`-less body as a word term. Emoji are
//! collected separately, in order, with skin tones folded.

mod emoji;
pub mod porter;
mod tokenize;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub use emoji::{
    chain_bigrams, detect_chains, extract_emoji_occurrences, extract_emoji_tokens, fold_emoji, is_emoji_cluster,
    is_skin_tone_modifier, EmojiOccurrence,
};
pub use porter::stem;
pub use tokenize::{tokenize, Token, TokenKind};

/// Shipped English stopword list (179 terms).
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
/// Shipped discovery hashtags.
pub const DEFAULT_SEED_TERMS: &str = include_str!("../../data/seed_terms.txt");
/// Shipped spelling-variant groups.
pub const DEFAULT_VARIANTS: &str = include_str!("../../data/variants.txt");
/// Shipped curse lexicon.
pub const DEFAULT_CURSE_LEXICON: &str = include_str!("../../data/curse_words.txt");

/// Parse a term list: one term per line, trimmed and lowercased; blank lines
/// are skipped. A leading `#` is part of the term.
pub fn parse_term_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.to_lowercase())
        .collect()
}

/// Spelling-variant table: each line holds whitespace-separated fragments
/// that are interchangeable inside a term (`da the`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariantTable {
    groups: Vec<Vec<String>>,
}

impl VariantTable {
    pub fn parse(text: &str) -> Self {
        let groups = text
            .lines()
            .map(|l| l.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>())
            .filter(|g| g.len() >= 2)
            .collect();
        VariantTable { groups }
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    /// The term plus every spelling reachable by swapping fragments within a
    /// group, all lowercase. Substitution replaces every occurrence of a
    /// fragment at once.
    pub fn expand(&self, term: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut frontier = alloc::vec![term.to_lowercase()];
        seen.insert(term.to_lowercase());
        // bounded: each round only adds terms built from finitely many swaps
        while let Some(current) = frontier.pop() {
            for group in &self.groups {
                for from in group {
                    if !current.contains(from.as_str()) {
                        continue;
                    }
                    for to in group.iter().filter(|t| *t != from) {
                        let candidate = current.replace(from.as_str(), to);
                        if seen.len() < 256 && seen.insert(candidate.clone()) {
                            frontier.push(candidate);
                        }
                    }
                }
            }
        }
        seen
    }
}

/// Normalized form of one text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizedDoc {
    /// Stemmed word and hashtag terms, in order of appearance.
    pub stems: Vec<String>,
    /// Folded emoji tokens, in order of appearance.
    pub emoji_tokens: Vec<String>,
}

impl NormalizedDoc {
    pub fn is_empty(&self) -> bool {
        self.stems.is_empty() && self.emoji_tokens.is_empty()
    }

    pub fn stem_counts(&self) -> BTreeMap<String, u32> {
        count_terms(self.stems.iter().map(String::as_str))
    }
}

pub(crate) fn count_terms<'a>(terms: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for t in terms {
        *counts.entry(t.to_string()).or_insert(0) += 1;
    }
    counts
}

/// Stopword and seed-term configuration for [`TextPipeline::normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextPipeline {
    stopwords: BTreeSet<String>,
    seed_terms: BTreeSet<String>,
    seed_stems: BTreeSet<String>,
}

impl Default for TextPipeline {
    /// Shipped stopwords, and the shipped seed terms with their variants.
    fn default() -> Self {
        let variants = VariantTable::parse(DEFAULT_VARIANTS);
        let seeds = parse_term_list(DEFAULT_SEED_TERMS)
            .iter()
            .flat_map(|t| variants.expand(t))
            .collect::<BTreeSet<_>>();
        TextPipeline::new(parse_term_list(DEFAULT_STOPWORDS), seeds)
    }
}

fn strip_hash(term: &str) -> &str {
    term.strip_prefix('#').unwrap_or(term)
}

impl TextPipeline {
    /// Seed terms match with or without their leading `#`.
    pub fn new<S, T>(stopwords: S, seed_terms: T) -> Self
    where
        S: IntoIterator,
        S::Item: AsRef<str>,
        T: IntoIterator,
        T::Item: AsRef<str>,
    {
        let stopwords = stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        let seed_terms: BTreeSet<String> = seed_terms
            .into_iter()
            .map(|s| strip_hash(&s.as_ref().to_lowercase()).to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let seed_stems = seed_terms.iter().map(|s| stem(s)).collect();
        TextPipeline { stopwords, seed_terms, seed_stems }
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn seed_terms(&self) -> &BTreeSet<String> {
        &self.seed_terms
    }

    /// Stem of a surface term if it survives stopword and seed removal.
    pub fn normalize_term(&self, surface: &str) -> Option<String> {
        let term = strip_hash(surface);
        if term.is_empty() || self.stopwords.contains(term) || self.seed_terms.contains(term) {
            return None;
        }
        let stemmed = stem(term);
        if self.seed_stems.contains(&stemmed) {
            return None;
        }
        Some(stemmed)
    }

    pub fn normalize(&self, text: &str) -> NormalizedDoc {
        let mut doc = NormalizedDoc::default();
        for token in tokenize(text) {
            match token.kind {
                TokenKind::Word | TokenKind::Hashtag => {
                    if let Some(s) = self.normalize_term(&token.surface) {
                        doc.stems.push(s);
                    }
                }
                TokenKind::Emoji => doc.emoji_tokens.push(token.surface),
                TokenKind::Url | TokenKind::Mention | TokenKind::Other => {}
            }
        }
        doc
    }

    /// Stems of free text with no emoji bookkeeping (video text, image tags).
    pub fn stems(&self, text: &str) -> Vec<String> {
        self.normalize(text).stems
    }
}
