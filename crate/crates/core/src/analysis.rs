//! Exploratory per-class corpus statistics.
//!
//! Each statistic is computed for one class at a time; [`Comparison`] pairs
//! the gang and nongang results. Every result exports as a TSV table.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clients::MediaSource;
use crate::corpus::{ClassLabel, CorpusSnapshot, ProfileRecord};
use crate::features::{Block, ProfileDoc};
use crate::textprep::{chain_bigrams, detect_chains, extract_emoji_occurrences, fold_emoji, tokenize, TokenKind};
use crate::{Error, Result};

/// The same statistic for both classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison<T> {
    pub gang: T,
    pub nongang: T,
}

impl<T> Comparison<T> {
    pub fn compute(mut f: impl FnMut(ClassLabel) -> T) -> Self {
        Comparison { gang: f(ClassLabel::Gang), nongang: f(ClassLabel::NonGang) }
    }

    pub fn try_compute(mut f: impl FnMut(ClassLabel) -> Result<T>) -> Result<Self> {
        Ok(Comparison { gang: f(ClassLabel::Gang)?, nongang: f(ClassLabel::NonGang)? })
    }
}

fn in_class(p: &ProfileRecord, class: ClassLabel) -> bool {
    p.label.class() == Some(class)
}

fn frac(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Descending by count, then ascending by key.
fn rank<K: Ord + Clone>(counts: &BTreeMap<K, u64>) -> Vec<(K, u64)> {
    let mut ranked: Vec<(K, u64)> = counts.iter().map(|(k, &n)| (k.clone(), n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    pub count: u64,
}

/// Most frequent normalized terms of a block over one class's profiles.
pub fn top_terms(docs: &[ProfileDoc], class: ClassLabel, block: Block, k: usize) -> Vec<RankedTerm> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for doc in docs.iter().filter(|d| d.label.class() == Some(class)) {
        for (term, &n) in doc.counts(block) {
            *counts.entry(term.clone()).or_insert(0) += u64::from(n);
        }
    }
    rank(&counts).into_iter().take(k).map(|(term, count)| RankedTerm { term, count }).collect()
}

pub fn top_terms_tsv(terms: &Comparison<Vec<RankedTerm>>) -> String {
    let mut out = String::from("class\trank\tterm\tcount\n");
    for (name, list) in [("gang", &terms.gang), ("nongang", &terms.nongang)] {
        for (i, t) in list.iter().enumerate() {
            let _ = writeln!(out, "{name}\t{}\t{}\t{}", i + 1, t.term, t.count);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurseRate {
    pub curse_tokens: u64,
    pub word_tokens: u64,
    pub rate: f64,
}

/// Share of lowercased word tokens in a class's tweets that appear in the
/// lexicon. Counted before stopword removal or stemming; hashtags, mentions,
/// URLs and emoji are not word tokens.
pub fn curse_rate(corpus: &CorpusSnapshot, class: ClassLabel, lexicon: &BTreeSet<String>) -> Result<CurseRate> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    let mut curse_tokens = 0;
    let mut word_tokens = 0;
    for profile in corpus.iter().filter(|p| in_class(p, class)) {
        for tweet in &profile.tweets {
            for token in tokenize(&tweet.text).into_iter().filter(|t| t.kind == TokenKind::Word) {
                word_tokens += 1;
                if lexicon.contains(&token.surface) {
                    curse_tokens += 1;
                }
            }
        }
    }
    Ok(CurseRate { curse_tokens, word_tokens, rate: frac(curse_tokens, word_tokens) })
}

pub fn curse_rate_tsv(rates: &Comparison<CurseRate>) -> String {
    let mut out = String::from("class\tcurse_tokens\tword_tokens\trate\n");
    for (name, r) in [("gang", &rates.gang), ("nongang", &rates.nongang)] {
        let _ = writeln!(out, "{name}\t{}\t{}\t{}", r.curse_tokens, r.word_tokens, r.rate);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmojiShare {
    pub emoji: String,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBigram {
    pub first: String,
    pub second: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmojiStats {
    pub total_tokens: u64,
    /// Ranked by count; fractions are of all emoji tokens in the class.
    pub distribution: Vec<EmojiShare>,
    /// Ordered adjacent pairs inside chains, ranked by count.
    pub chain_bigrams: Vec<ChainBigram>,
}

/// Emoji frequency distribution and chain-bigram counts for a class,
/// truncated to `top_k` entries each when given.
pub fn emoji_stats(corpus: &CorpusSnapshot, class: ClassLabel, top_k: Option<usize>) -> EmojiStats {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut bigrams: BTreeMap<(String, String), u64> = BTreeMap::new();
    for profile in corpus.iter().filter(|p| in_class(p, class)) {
        for tweet in &profile.tweets {
            let occurrences = extract_emoji_occurrences(&tweet.text);
            for o in &occurrences {
                *counts.entry(o.emoji.clone()).or_insert(0) += 1;
            }
            let chains = detect_chains(&occurrences);
            for (a, b) in chain_bigrams(&chains) {
                *bigrams.entry((a.into(), b.into())).or_insert(0) += 1;
            }
        }
    }
    let total_tokens: u64 = counts.values().sum();
    let limit = top_k.unwrap_or(usize::MAX);
    EmojiStats {
        total_tokens,
        distribution: rank(&counts)
            .into_iter()
            .take(limit)
            .map(|(emoji, count)| EmojiShare { emoji, count, fraction: frac(count, total_tokens) })
            .collect(),
        chain_bigrams: rank(&bigrams)
            .into_iter()
            .take(limit)
            .map(|((first, second), count)| ChainBigram { first, second, count })
            .collect(),
    }
}

pub fn emoji_stats_tsv(stats: &Comparison<EmojiStats>) -> String {
    let mut out = String::from("class\tkind\trank\temoji\tcount\tfraction\n");
    for (name, s) in [("gang", &stats.gang), ("nongang", &stats.nongang)] {
        for (i, e) in s.distribution.iter().enumerate() {
            let _ = writeln!(out, "{name}\temoji\t{}\t{}\t{}\t{}", i + 1, e.emoji, e.count, e.fraction);
        }
        for (i, b) in s.chain_bigrams.iter().enumerate() {
            let _ = writeln!(out, "{name}\tchain\t{}\t{} {}\t{}\t", i + 1, b.first, b.second, b.count);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCooccurrence {
    pub profiles_with_pair: u64,
    pub class_size: u64,
    pub fraction: f64,
}

/// Fraction of a class's profiles with at least one chain containing `a`
/// immediately followed by `b`. Skin tones in the arguments are folded.
pub fn chain_cooccurrence(corpus: &CorpusSnapshot, class: ClassLabel, a: &str, b: &str) -> ChainCooccurrence {
    let (a, b) = (fold_emoji(a), fold_emoji(b));
    let mut class_size = 0;
    let mut profiles_with_pair = 0;
    for profile in corpus.iter().filter(|p| in_class(p, class)) {
        class_size += 1;
        let found = profile.tweets.iter().any(|t| {
            let chains = detect_chains(&extract_emoji_occurrences(&t.text));
            let hit = chain_bigrams(&chains).any(|(x, y)| x == a && y == b);
            hit
        });
        if found {
            profiles_with_pair += 1;
        }
    }
    ChainCooccurrence { profiles_with_pair, class_size, fraction: frac(profiles_with_pair, class_size) }
}

pub fn chain_cooccurrence_tsv(a: &str, b: &str, stats: &Comparison<ChainCooccurrence>) -> String {
    let mut out = String::from("class\tfirst\tsecond\tprofiles_with_pair\tclass_size\tfraction\n");
    for (name, s) in [("gang", &stats.gang), ("nongang", &stats.nongang)] {
        let _ = writeln!(out, "{name}\t{a}\t{b}\t{}\t{}\t{}", s.profiles_with_pair, s.class_size, s.fraction);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoutubeStats {
    pub class_size: u64,
    pub sharing_profiles: u64,
    pub share_fraction: f64,
    /// Every link occurrence across the class's tweets.
    pub total_links: u64,
    /// Links whose video the client could resolve.
    pub resolved_links: u64,
    pub keyword_links: u64,
    /// keyword_links / resolved_links.
    pub keyword_fraction: f64,
    /// total_links / sharing_profiles, 0 when nobody shares.
    pub mean_links_per_sharing_profile: f64,
}

/// YouTube sharing statistics for a class. A link matches when its video
/// description contains any keyword, case-insensitively.
pub fn youtube_stats(
    corpus: &CorpusSnapshot,
    class: ClassLabel,
    keywords: &[String],
    media: &dyn MediaSource,
) -> YoutubeStats {
    let keywords: Vec<String> = keywords.iter().map(|k| k.to_lowercase()).filter(|k| !k.is_empty()).collect();
    // one lookup per distinct id
    let mut matches: BTreeMap<String, Option<bool>> = BTreeMap::new();
    let mut s = YoutubeStats {
        class_size: 0,
        sharing_profiles: 0,
        share_fraction: 0.0,
        total_links: 0,
        resolved_links: 0,
        keyword_links: 0,
        keyword_fraction: 0.0,
        mean_links_per_sharing_profile: 0.0,
    };
    for profile in corpus.iter().filter(|p| in_class(p, class)) {
        s.class_size += 1;
        let mut links = 0;
        for id in profile.video_ids() {
            links += 1;
            let matched = *matches.entry(id.into()).or_insert_with(|| {
                let meta = media.fetch_video_metadata(id);
                if meta.is_none() {
                    log::info!("video {id} unresolvable; left out of keyword fraction");
                }
                meta.map(|m| {
                    let d = m.description.to_lowercase();
                    keywords.iter().any(|k| d.contains(k.as_str()))
                })
            });
            if let Some(hit) = matched {
                s.resolved_links += 1;
                if hit {
                    s.keyword_links += 1;
                }
            }
        }
        if links > 0 {
            s.sharing_profiles += 1;
            s.total_links += links;
        }
    }
    s.share_fraction = frac(s.sharing_profiles, s.class_size);
    s.keyword_fraction = frac(s.keyword_links, s.resolved_links);
    s.mean_links_per_sharing_profile = frac(s.total_links, s.sharing_profiles);
    s
}

pub fn youtube_stats_tsv(stats: &Comparison<YoutubeStats>) -> String {
    let mut out = String::from(
        "class\tclass_size\tsharing_profiles\tshare_fraction\ttotal_links\tresolved_links\tkeyword_links\tkeyword_fraction\tmean_links_per_sharing_profile\n",
    );
    for (name, s) in [("gang", &stats.gang), ("nongang", &stats.nongang)] {
        let _ = writeln!(
            out,
            "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.class_size,
            s.sharing_profiles,
            s.share_fraction,
            s.total_links,
            s.resolved_links,
            s.keyword_links,
            s.keyword_fraction,
            s.mean_links_per_sharing_profile
        );
    }
    out
}
