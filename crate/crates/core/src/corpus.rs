//! Profile records, corpus snapshots, and the offline discovery workflow.
//!
//! A [`CorpusSnapshot`] is an immutable value. Operations that change labels
//! return a new snapshot together with the [`LabelEvent`] that the caller
//! appends to the persistent label log.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clients::{GeocodeResult, Geocoder};
use crate::textprep::VariantTable;
use crate::{Error, Result};

pub const MAX_TWEETS: usize = 3_200;
pub const MAX_DESCRIPTION_CHARS: usize = 160;
pub const DEFAULT_EXPANSION_LIMIT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Gang,
    Nongang,
    #[default]
    Unlabeled,
    Unsure,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Gang, Label::Nongang, Label::Unlabeled, Label::Unsure];

    /// Training class, for the two definitive labels.
    pub fn class(self) -> Option<ClassLabel> {
        match self {
            Label::Gang => Some(ClassLabel::Gang),
            Label::Nongang => Some(ClassLabel::NonGang),
            Label::Unlabeled | Label::Unsure => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Gang => "gang",
            Label::Nongang => "nongang",
            Label::Unlabeled => "unlabeled",
            Label::Unsure => "unsure",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| alloc::format!("unknown label `{s}`"))
    }
}

/// The two classes a classifier distinguishes. `Gang` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "gang")]
    Gang,
    #[serde(rename = "nongang")]
    NonGang,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Gang => "gang",
            ClassLabel::NonGang => "nongang",
        }
    }

    pub fn is_gang(self) -> bool {
        self == ClassLabel::Gang
    }
}

impl From<ClassLabel> for Label {
    fn from(c: ClassLabel) -> Self {
        match c {
            ClassLabel::Gang => Label::Gang,
            ClassLabel::NonGang => Label::Nongang,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SeedTerm,
    RapperSeed,
    RetweetExpansion,
    FollowExpansion,
    StreamSample,
    #[default]
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub text: String,
    #[serde(default)]
    pub retweeted_author_id: Option<String>,
    #[serde(default)]
    pub youtube_video_ids: Vec<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl TweetRecord {
    pub fn new(tweet_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        TweetRecord {
            tweet_id: tweet_id.into(),
            youtube_video_ids: extract_youtube_ids(&text),
            text,
            retweeted_author_id: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub profile_id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub location_raw: String,
    #[serde(default)]
    pub tweets: Vec<TweetRecord>,
    #[serde(default)]
    pub follower_ids: BTreeSet<String>,
    #[serde(default)]
    pub followee_ids: BTreeSet<String>,
    #[serde(default)]
    pub profile_image_ref: Option<String>,
    #[serde(default)]
    pub cover_image_ref: Option<String>,
    #[serde(default)]
    pub label: Label,
    #[serde(default)]
    pub provenance: Provenance,
    #[serde(default)]
    pub annotator: Option<String>,
    #[serde(default)]
    pub labeled_at: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl ProfileRecord {
    pub fn new(profile_id: impl Into<String>) -> Self {
        ProfileRecord {
            profile_id: profile_id.into(),
            description: String::new(),
            location_raw: String::new(),
            tweets: Vec::new(),
            follower_ids: BTreeSet::new(),
            followee_ids: BTreeSet::new(),
            profile_image_ref: None,
            cover_image_ref: None,
            label: Label::Unlabeled,
            provenance: Provenance::Imported,
            annotator: None,
            labeled_at: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn image_refs(&self) -> impl Iterator<Item = &str> {
        self.profile_image_ref.iter().chain(self.cover_image_ref.iter()).map(String::as_str)
    }

    pub fn video_ids(&self) -> impl Iterator<Item = &str> {
        self.tweets.iter().flat_map(|t| t.youtube_video_ids.iter().map(String::as_str))
    }

    /// Enforce record invariants for ingestion. Returns human-readable
    /// warnings for anything that was repaired.
    pub fn canonicalize(&mut self, cap_policy: CapPolicy) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.tweets.len() > MAX_TWEETS {
            match cap_policy {
                CapPolicy::Reject => {
                    return Err(Error::TweetCapExceeded {
                        id: self.profile_id.clone(),
                        count: self.tweets.len(),
                        cap: MAX_TWEETS,
                    })
                }
                CapPolicy::Truncate => {
                    warnings.push(alloc::format!(
                        "profile `{}`: {} tweets truncated to {MAX_TWEETS}",
                        self.profile_id,
                        self.tweets.len()
                    ));
                    self.tweets.truncate(MAX_TWEETS);
                }
            }
        }
        let normalized = normalize_whitespace(&self.description);
        let char_count = normalized.chars().count();
        if char_count > MAX_DESCRIPTION_CHARS {
            warnings.push(alloc::format!(
                "profile `{}`: description of {char_count} characters truncated to {MAX_DESCRIPTION_CHARS}",
                self.profile_id
            ));
            self.description = normalized.chars().take(MAX_DESCRIPTION_CHARS).collect();
        } else {
            self.description = normalized;
        }
        for tweet in &mut self.tweets {
            let extracted = extract_youtube_ids(&tweet.text);
            if tweet.youtube_video_ids.is_empty() {
                tweet.youtube_video_ids = extracted;
            } else if tweet.youtube_video_ids != extracted {
                return Err(Error::InvalidRecord {
                    id: self.profile_id.clone(),
                    reason: alloc::format!(
                        "tweet `{}` lists video ids {:?} but its text yields {:?}",
                        tweet.tweet_id,
                        tweet.youtube_video_ids,
                        extracted
                    ),
                });
            }
        }
        Ok(warnings)
    }
}

/// What to do with a record above the tweet cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapPolicy {
    #[default]
    Reject,
    Truncate,
}

impl FromStr for CapPolicy {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "reject" => Ok(CapPolicy::Reject),
            "truncate" => Ok(CapPolicy::Truncate),
            other => Err(alloc::format!("unknown cap policy `{other}`")),
        }
    }
}

/// Collapse whitespace runs to one space and trim.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

fn is_video_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn take_id(rest: &str) -> Option<&str> {
    let end = rest.find(|c: char| !is_video_id_char(c)).unwrap_or(rest.len());
    (end > 0).then(|| &rest[..end])
}

/// YouTube video ids linked from a text, in order of appearance.
///
/// Recognises `youtu.be/<id>`, `youtube.com/watch?...v=<id>`, and the
/// `/embed/`, `/shorts/`, `/v/` path forms, on any subdomain.
pub fn extract_youtube_ids(text: &str) -> Vec<String> {
    let mut ids = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_ascii_lowercase();
        let rest_of = |needle: &str| lower.find(needle).map(|i| &chunk[i + needle.len()..]);
        let id = if let Some(rest) = rest_of("youtu.be/") {
            take_id(rest)
        } else if lower.contains("youtube.com/") {
            let path_forms = ["youtube.com/embed/", "youtube.com/shorts/", "youtube.com/v/"];
            if let Some(rest) = path_forms.iter().find_map(|p| rest_of(p)) {
                take_id(rest)
            } else if let Some(q) = lower.find("youtube.com/watch?").map(|i| i + "youtube.com/watch?".len()) {
                chunk[q..]
                    .split('&')
                    .find_map(|kv| kv.strip_prefix("v="))
                    .and_then(take_id)
            } else {
                None
            }
        } else {
            None
        };
        if let Some(id) = id {
            ids.push(id.to_string());
        }
    }
    ids
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelCounts {
    pub gang: usize,
    pub nongang: usize,
    pub unlabeled: usize,
    pub unsure: usize,
}

impl LabelCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Gang => self.gang,
            Label::Nongang => self.nongang,
            Label::Unlabeled => self.unlabeled,
            Label::Unsure => self.unsure,
        }
    }

    fn slot(&mut self, label: Label) -> &mut usize {
        match label {
            Label::Gang => &mut self.gang,
            Label::Nongang => &mut self.nongang,
            Label::Unlabeled => &mut self.unlabeled,
            Label::Unsure => &mut self.unsure,
        }
    }

    pub fn total(&self) -> usize {
        self.gang + self.nongang + self.unlabeled + self.unsure
    }
}

/// One entry of the append-only label log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEvent {
    pub profile_id: String,
    pub old_label: Label,
    pub new_label: Label,
    pub annotator: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscoveryMethod {
    SeedTerms,
    Retweet,
    Follow,
}

impl FromStr for DiscoveryMethod {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "seed_terms" | "seed-terms" => Ok(DiscoveryMethod::SeedTerms),
            "retweet" => Ok(DiscoveryMethod::Retweet),
            "follow" => Ok(DiscoveryMethod::Follow),
            other => Err(alloc::format!("unknown discovery method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryQuery {
    pub method: DiscoveryMethod,
    /// Terms for `SeedTerms`, profile ids otherwise.
    pub seeds: Vec<String>,
    #[serde(default)]
    pub expand_variants: bool,
    /// Maximum ids returned; `None` for no cap.
    #[serde(default = "default_limit")]
    pub limit: Option<usize>,
}

fn default_limit() -> Option<usize> {
    Some(DEFAULT_EXPANSION_LIMIT)
}

impl DiscoveryQuery {
    pub fn new(method: DiscoveryMethod, seeds: impl IntoIterator<Item = impl Into<String>>) -> Self {
        DiscoveryQuery {
            method,
            seeds: seeds.into_iter().map(Into::into).collect(),
            expand_variants: false,
            limit: default_limit(),
        }
    }

    pub fn with_variants(mut self, on: bool) -> Self {
        self.expand_variants = on;
        self
    }

    pub fn with_limit(mut self, limit: Option<usize>) -> Self {
        self.limit = limit;
        self
    }
}

/// Immutable collection of profiles keyed by id, with per-label counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusSnapshot {
    profiles: BTreeMap<String, Arc<ProfileRecord>>,
    counts: LabelCounts,
}

impl CorpusSnapshot {
    pub fn from_records(records: impl IntoIterator<Item = ProfileRecord>) -> Result<Self> {
        let mut profiles = BTreeMap::new();
        for record in records {
            let id = record.profile_id.clone();
            if profiles.insert(id.clone(), Arc::new(record)).is_some() {
                return Err(Error::DuplicateProfile(id));
            }
        }
        let counts = recount(profiles.values().map(|p| p.label));
        Ok(CorpusSnapshot { profiles, counts })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn counts(&self) -> LabelCounts {
        self.counts
    }

    pub fn get(&self, id: &str) -> Option<&ProfileRecord> {
        self.profiles.get(id).map(Arc::as_ref)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.profiles.contains_key(id)
    }

    /// Profiles in id order.
    pub fn iter(&self) -> impl Iterator<Item = &ProfileRecord> {
        self.profiles.values().map(Arc::as_ref)
    }

    pub fn with_label(&self, label: Label) -> impl Iterator<Item = &ProfileRecord> {
        self.iter().filter(move |p| p.label == label)
    }

    pub fn recount(&self) -> LabelCounts {
        recount(self.iter().map(|p| p.label))
    }

    /// Set the label of one profile. The returned event is the label-log
    /// entry for the change.
    pub fn apply_label(
        &self,
        id: &str,
        label: Label,
        annotator: &str,
        timestamp: &str,
    ) -> Result<(CorpusSnapshot, LabelEvent)> {
        let current = self.profiles.get(id).ok_or_else(|| Error::UnknownProfile(id.to_string()))?;
        let old_label = current.label;
        let mut updated = ProfileRecord::clone(current);
        updated.label = label;
        updated.annotator = Some(annotator.to_string());
        updated.labeled_at = Some(timestamp.to_string());

        let mut next = self.clone();
        next.profiles.insert(id.to_string(), Arc::new(updated));
        *next.counts.slot(old_label) -= 1;
        *next.counts.slot(label) += 1;
        let event = LabelEvent {
            profile_id: id.to_string(),
            old_label,
            new_label: label,
            annotator: annotator.to_string(),
            timestamp: timestamp.to_string(),
        };
        Ok((next, event))
    }

    /// Apply logged label events in order.
    pub fn replay<'a>(&self, events: impl IntoIterator<Item = &'a LabelEvent>) -> Result<CorpusSnapshot> {
        let mut snap = self.clone();
        for e in events {
            snap = snap.apply_label(&e.profile_id, e.new_label, &e.annotator, &e.timestamp)?.0;
        }
        Ok(snap)
    }

    /// Candidate profile ids for manual verification, sorted and capped.
    ///
    /// Seed-term search is a case-insensitive substring match on the raw
    /// description. Retweet expansion returns authors retweeted by the seeds;
    /// follow expansion returns their followers and followees. Results never
    /// include a seed id or a profile that already carries a label.
    pub fn discover_candidates(&self, query: &DiscoveryQuery, variants: &VariantTable) -> Result<Vec<String>> {
        let found: BTreeSet<String> = match query.method {
            DiscoveryMethod::SeedTerms => {
                let terms: BTreeSet<String> = query
                    .seeds
                    .iter()
                    .map(|t| t.trim())
                    .filter(|t| !t.is_empty())
                    .flat_map(|t| {
                        if query.expand_variants {
                            variants.expand(t)
                        } else {
                            BTreeSet::from([t.to_lowercase()])
                        }
                    })
                    .collect();
                if terms.is_empty() {
                    return Err(Error::EmptySeedTerms);
                }
                self.iter()
                    .filter(|p| {
                        let desc = p.description.to_lowercase();
                        terms.iter().any(|t| desc.contains(t.as_str()))
                    })
                    .map(|p| p.profile_id.clone())
                    .collect()
            }
            DiscoveryMethod::Retweet | DiscoveryMethod::Follow => {
                let mut out = BTreeSet::new();
                for seed in &query.seeds {
                    let p = self.get(seed).ok_or_else(|| Error::UnknownProfile(seed.clone()))?;
                    if query.method == DiscoveryMethod::Retweet {
                        out.extend(p.tweets.iter().filter_map(|t| t.retweeted_author_id.clone()));
                    } else {
                        out.extend(p.follower_ids.iter().cloned());
                        out.extend(p.followee_ids.iter().cloned());
                    }
                }
                for seed in &query.seeds {
                    out.remove(seed);
                }
                out
            }
        };
        let limit = query.limit.unwrap_or(usize::MAX);
        Ok(found
            .into_iter()
            .filter(|id| self.get(id).is_none_or(|p| p.label == Label::Unlabeled))
            .take(limit)
            .collect())
    }

    /// Keep only profiles whose location geocodes to the US. Failures count
    /// as unknown and are discarded.
    pub fn filter_us_profiles(&self, geocoder: &dyn Geocoder) -> CorpusSnapshot {
        let profiles: BTreeMap<String, Arc<ProfileRecord>> = self
            .profiles
            .iter()
            .filter(|(id, p)| match geocoder.geocode(&p.location_raw) {
                Ok(GeocodeResult::Us) => true,
                Ok(_) => false,
                Err(e) => {
                    log::warn!("geocoding failed for profile `{id}`: {e}");
                    false
                }
            })
            .map(|(id, p)| (id.clone(), p.clone()))
            .collect();
        let counts = recount(profiles.values().map(|p| p.label));
        CorpusSnapshot { profiles, counts }
    }
}

fn recount(labels: impl Iterator<Item = Label>) -> LabelCounts {
    let mut counts = LabelCounts::default();
    for l in labels {
        *counts.slot(l) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clients::GeocodeFixtures;
    use crate::textprep::DEFAULT_VARIANTS;
    use alloc::vec;
    use proptest::prelude::*;

    fn profile(id: &str, desc: &str) -> ProfileRecord {
        let mut p = ProfileRecord::new(id);
        p.description = desc.into();
        p
    }

    fn snapshot(records: Vec<ProfileRecord>) -> CorpusSnapshot {
        CorpusSnapshot::from_records(records).unwrap()
    }

    #[test]
    fn empty_and_identity() {
        assert!(snapshot(vec![]).is_empty());
        let s = snapshot(vec![profile("a", ""), profile("b", "")]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.counts(), LabelCounts { unlabeled: 2, ..Default::default() });
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = CorpusSnapshot::from_records(vec![profile("a", ""), profile("a", "")]).unwrap_err();
        assert_eq!(err, Error::DuplicateProfile("a".into()));
    }

    #[test]
    fn tweet_cap_policies() {
        let mut p = profile("big", "");
        p.tweets = (0..MAX_TWEETS + 1).map(|i| TweetRecord::new(alloc::format!("{i}"), "x")).collect();
        let err = p.clone().canonicalize(CapPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::TweetCapExceeded { ref id, count: 3201, .. } if id == "big"));
        let warnings = p.canonicalize(CapPolicy::Truncate).unwrap();
        assert_eq!(p.tweets.len(), MAX_TWEETS);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn description_normalized_and_truncated() {
        let mut p = profile("p", "  a\t\tb \n c ");
        assert!(p.canonicalize(CapPolicy::Reject).unwrap().is_empty());
        assert_eq!(p.description, "a b c");
        let mut long = profile("q", &"é".repeat(200));
        assert_eq!(long.canonicalize(CapPolicy::Reject).unwrap().len(), 1);
        assert_eq!(long.description.chars().count(), MAX_DESCRIPTION_CHARS);
    }

    #[test]
    fn youtube_ids() {
        let text = "new heat https://www.youtube.com/watch?v=dQw4w9WgXcQ&t=3 and youtu.be/abc_DEF-123) \
                    m.youtube.com/shorts/XyZ https://example.com/watch?v=nope";
        assert_eq!(extract_youtube_ids(text), vec!["dQw4w9WgXcQ", "abc_DEF-123", "XyZ"]);
        assert!(extract_youtube_ids("no links").is_empty());
    }

    #[test]
    fn listed_video_ids_must_match_text() {
        let mut p = profile("p", "");
        let mut t = TweetRecord::new("1", "youtu.be/abc");
        t.youtube_video_ids = vec!["other".into()];
        p.tweets.push(t);
        assert!(matches!(p.canonicalize(CapPolicy::Reject), Err(Error::InvalidRecord { .. })));
    }

    #[test]
    fn seed_term_search() {
        let variants = VariantTable::parse(DEFAULT_VARIANTS);
        let s = snapshot(vec![
            profile("a", "FreeDaGuys #RIPDaGuys"),
            profile("b", "#FreeTheGuys forever"),
            profile("c", "beach life"),
        ]);
        let q = DiscoveryQuery::new(DiscoveryMethod::SeedTerms, ["#RIPDaGuys"]);
        assert_eq!(s.discover_candidates(&q, &variants).unwrap(), vec!["a"]);
        let q = DiscoveryQuery::new(DiscoveryMethod::SeedTerms, ["#FreeDaGuys"]);
        assert!(s.discover_candidates(&q, &variants).unwrap().is_empty());
        let q = q.with_variants(true);
        assert_eq!(s.discover_candidates(&q, &variants).unwrap(), vec!["b"]);
        let empty = DiscoveryQuery::new(DiscoveryMethod::SeedTerms, Vec::<String>::new());
        assert_eq!(s.discover_candidates(&empty, &variants), Err(Error::EmptySeedTerms));
    }

    #[test]
    fn retweet_and_follow_expansion() {
        let mut a = profile("a", "");
        let mut rt = TweetRecord::new("t1", "RT something");
        rt.retweeted_author_id = Some("b".into());
        a.tweets.push(rt);
        a.followee_ids.insert("c".into());
        a.follower_ids.insert("a".into());
        a.follower_ids.insert("d".into());
        let mut d = profile("d", "");
        d.label = Label::Nongang;
        let s = snapshot(vec![a, profile("b", ""), profile("c", ""), d]);
        let v = VariantTable::default();
        let q = DiscoveryQuery::new(DiscoveryMethod::Retweet, ["a"]);
        assert_eq!(s.discover_candidates(&q, &v).unwrap(), vec!["b"]);
        let q = DiscoveryQuery::new(DiscoveryMethod::Follow, ["a"]);
        assert_eq!(s.discover_candidates(&q, &v).unwrap(), vec!["c"]);
        let q = DiscoveryQuery::new(DiscoveryMethod::Follow, ["zz"]);
        assert_eq!(s.discover_candidates(&q, &v), Err(Error::UnknownProfile("zz".into())));
    }

    #[test]
    fn expansion_limit_applies() {
        let mut a = profile("a", "");
        a.follower_ids = (0..150).map(|i| alloc::format!("f{i:03}")).collect();
        let s = snapshot(vec![a]);
        let q = DiscoveryQuery::new(DiscoveryMethod::Follow, ["a"]);
        let found = s.discover_candidates(&q, &VariantTable::default()).unwrap();
        assert_eq!(found.len(), DEFAULT_EXPANSION_LIMIT);
        assert_eq!(found[0], "f000");
    }

    #[test]
    fn labeling_updates_counts() {
        let s = snapshot(vec![profile("a", ""), profile("b", "")]);
        let (s1, e1) = s.apply_label("a", Label::Gang, "ann", "t0").unwrap();
        assert_eq!(s1.counts().gang, 1);
        assert_eq!(s1.counts().unlabeled, 1);
        assert_eq!(e1.old_label, Label::Unlabeled);
        let (s2, _) = s1.apply_label("a", Label::Nongang, "ann", "t1").unwrap();
        assert_eq!(s2.counts(), LabelCounts { nongang: 1, unlabeled: 1, ..Default::default() });
        assert_eq!(s2.get("a").unwrap().annotator.as_deref(), Some("ann"));
        assert_eq!(s.apply_label("zz", Label::Gang, "ann", "t").unwrap_err(), Error::UnknownProfile("zz".into()));
        assert_eq!(s.counts().unlabeled, 2);
    }

    #[test]
    fn us_filter() {
        let mut geo = GeocodeFixtures::default();
        geo.insert("Chicago, IL", GeocodeResult::Us);
        geo.insert("London", GeocodeResult::NonUs);
        let mut a = profile("a", "");
        a.location_raw = "chicago, il".into();
        let mut b = profile("b", "");
        b.location_raw = "London".into();
        let s = snapshot(vec![a, b, profile("c", "")]);
        let us = s.filter_us_profiles(&geo);
        assert_eq!(us.iter().map(|p| p.profile_id.as_str()).collect::<Vec<_>>(), vec!["a"]);
        let none = snapshot(vec![profile("c", "")]).filter_us_profiles(&geo);
        assert!(none.is_empty());
    }

    #[test]
    fn unknown_keys_round_trip() {
        let line = r#"{"profile_id":"x","zeta":1,"tweets":[{"tweet_id":"1","text":"hi","lang":"en"}]}"#;
        let p: ProfileRecord = serde_json::from_str(line).unwrap();
        assert_eq!(p.extra.get("zeta"), Some(&Value::from(1)));
        assert_eq!(p.tweets[0].extra.get("lang"), Some(&Value::from("en")));
        let out = serde_json::to_string(&p).unwrap();
        let again: ProfileRecord = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), out);
    }

    fn arb_label() -> impl Strategy<Value = Label> {
        proptest::sample::select(Label::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn counts_match_recount_after_any_labeling(
            ops in proptest::collection::vec((0usize..6, arb_label()), 0..30)
        ) {
            let base = snapshot((0..6).map(|i| profile(&alloc::format!("p{i}"), "")).collect());
            let mut s = base.clone();
            let mut log = Vec::new();
            for (i, label) in ops {
                let (next, event) = s.apply_label(&alloc::format!("p{i}"), label, "a", "t").unwrap();
                s = next;
                log.push(event);
                prop_assert_eq!(s.counts(), s.recount());
            }
            let replayed = base.replay(&log).unwrap();
            prop_assert_eq!(replayed, s);
        }

        #[test]
        fn seed_search_is_monotone(
            descs in proptest::collection::vec("[a-c#]{0,6}", 1..10),
            terms in proptest::collection::vec("[a-c#]{1,3}", 1..4),
            extra in "[a-c#]{1,3}",
        ) {
            let s = snapshot(descs.iter().enumerate().map(|(i, d)| profile(&alloc::format!("p{i}"), d)).collect());
            let v = VariantTable::default();
            let q = DiscoveryQuery::new(DiscoveryMethod::SeedTerms, terms.clone()).with_limit(None);
            let before = s.discover_candidates(&q, &v).unwrap();
            let mut more = terms.clone();
            more.push(extra);
            let q = DiscoveryQuery::new(DiscoveryMethod::SeedTerms, more).with_limit(None);
            let after = s.discover_candidates(&q, &v).unwrap();
            for id in &before {
                prop_assert!(after.contains(id));
            }
        }
    }
}
