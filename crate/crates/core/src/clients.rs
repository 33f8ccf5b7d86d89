//! Interfaces to the external capabilities the pipeline consumes: image
//! tagging, video metadata, and geocoding.
//!
//! Lookups return `None` when the service has nothing for a key. That is a
//! normal outcome, distinct from a malformed fixture, and only clears
//! feature-availability bits downstream. The fixture stores here are plain
//! in-memory maps; loading them from files is the companion crate's job.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_IMAGE_TAGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTag {
    pub term: String,
    pub score: f64,
}

impl ScoredTag {
    pub fn new(term: &str, score: f64) -> Self {
        ScoredTag { term: term.to_string(), score }
    }
}

/// Tags for one image: at most 20, lowercase, score-descending with
/// lexicographic tie-break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageTags {
    pub media_ref: String,
    pub tags: Vec<ScoredTag>,
}

impl ImageTags {
    pub fn new(media_ref: impl Into<String>, tags: Vec<ScoredTag>) -> Result<Self> {
        let media_ref = media_ref.into();
        if tags.len() > MAX_IMAGE_TAGS {
            return Err(Error::InvalidFixture {
                key: media_ref,
                reason: alloc::format!("{} tags, at most {MAX_IMAGE_TAGS} allowed", tags.len()),
            });
        }
        let mut tags: Vec<ScoredTag> = tags
            .into_iter()
            .map(|t| ScoredTag { term: t.term.trim().to_lowercase(), score: t.score })
            .collect();
        if let Some(bad) = tags.iter().find(|t| !(0.0..=1.0).contains(&t.score) || t.term.is_empty()) {
            return Err(Error::InvalidFixture {
                key: media_ref,
                reason: alloc::format!("tag `{}` has score {} or empty term", bad.term, bad.score),
            });
        }
        tags.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        Ok(ImageTags { media_ref, tags })
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(|t| t.term.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMetadata {
    pub video_id: String,
    pub description: String,
    #[serde(default)]
    pub comments: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeocodeResult {
    Us,
    NonUs,
    Unknown,
}

/// Source of image tags and video metadata.
pub trait MediaSource {
    fn tag_image(&self, media_ref: &str) -> Option<ImageTags>;
    fn fetch_video_metadata(&self, video_id: &str) -> Option<VideoMetadata>;
}

/// Maps a free-form location string to a country class.
pub trait Geocoder {
    /// `Err` is a transport or service failure; callers treat it as unknown.
    fn geocode(&self, location: &str) -> core::result::Result<GeocodeResult, String>;
}

/// A media source with nothing in it.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoMedia;

impl MediaSource for NoMedia {
    fn tag_image(&self, _: &str) -> Option<ImageTags> {
        None
    }

    fn fetch_video_metadata(&self, _: &str) -> Option<VideoMetadata> {
        None
    }
}

/// Exact-key image tag fixtures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImageTagFixtures {
    entries: BTreeMap<String, ImageTags>,
}

impl ImageTagFixtures {
    pub fn insert(&mut self, tags: ImageTags) {
        self.entries.insert(tags.media_ref.clone(), tags);
    }

    pub fn get(&self, media_ref: &str) -> Option<&ImageTags> {
        self.entries.get(media_ref)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ImageTags> {
        self.entries.values()
    }
}

/// Exact-key video fixtures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VideoFixtures {
    entries: BTreeMap<String, VideoMetadata>,
}

impl VideoFixtures {
    pub fn insert(&mut self, video: VideoMetadata) {
        self.entries.insert(video.video_id.clone(), video);
    }

    pub fn get(&self, video_id: &str) -> Option<&VideoMetadata> {
        self.entries.get(video_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VideoMetadata> {
        self.entries.values()
    }
}

/// Both media fixture stores together.
#[derive(Debug, Clone, Default)]
pub struct FixtureMedia {
    pub images: ImageTagFixtures,
    pub videos: VideoFixtures,
}

impl MediaSource for FixtureMedia {
    fn tag_image(&self, media_ref: &str) -> Option<ImageTags> {
        self.images.get(media_ref).cloned()
    }

    fn fetch_video_metadata(&self, video_id: &str) -> Option<VideoMetadata> {
        self.videos.get(video_id).cloned()
    }
}

/// Location fixtures keyed by the trimmed, lowercased location string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeocodeFixtures {
    entries: BTreeMap<String, GeocodeResult>,
}

fn location_key(location: &str) -> String {
    location.trim().to_lowercase()
}

impl GeocodeFixtures {
    pub fn insert(&mut self, location: &str, result: GeocodeResult) {
        self.entries.insert(location_key(location), result);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, GeocodeResult)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn lookup(&self, location: &str) -> GeocodeResult {
        let key = location_key(location);
        if key.is_empty() {
            return GeocodeResult::Unknown;
        }
        self.entries.get(&key).copied().unwrap_or(GeocodeResult::Unknown)
    }
}

impl Geocoder for GeocodeFixtures {
    fn geocode(&self, location: &str) -> core::result::Result<GeocodeResult, String> {
        Ok(self.lookup(location))
    }
}

impl<M: MediaSource + ?Sized> MediaSource for &M {
    fn tag_image(&self, media_ref: &str) -> Option<ImageTags> {
        (**self).tag_image(media_ref)
    }

    fn fetch_video_metadata(&self, video_id: &str) -> Option<VideoMetadata> {
        (**self).fetch_video_metadata(video_id)
    }
}

impl<G: Geocoder + ?Sized> Geocoder for &G {
    fn geocode(&self, location: &str) -> core::result::Result<GeocodeResult, String> {
        (**self).geocode(location)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tag(term: &str, score: f64) -> ScoredTag {
        ScoredTag::new(term, score)
    }

    #[test]
    fn tags_sorted_and_lowercased() {
        let t = ImageTags::new("img1", vec![tag("People", 0.8), tag("trigger", 0.9), tag("adult", 0.8)]).unwrap();
        assert_eq!(t.terms().collect::<Vec<_>>(), vec!["trigger", "adult", "people"]);
    }

    #[test]
    fn more_than_twenty_tags_rejected() {
        let tags = (0..21).map(|i| tag(&alloc::format!("t{i}"), 0.5)).collect();
        assert!(matches!(ImageTags::new("img", tags), Err(Error::InvalidFixture { .. })));
        let tags = (0..20).map(|i| tag(&alloc::format!("t{i}"), 0.5)).collect();
        assert!(ImageTags::new("img", tags).is_ok());
    }

    #[test]
    fn out_of_range_score_rejected() {
        assert!(ImageTags::new("img", vec![tag("x", 1.5)]).is_err());
    }

    #[test]
    fn fixture_lookup_exact_key() {
        let mut media = FixtureMedia::default();
        media.images.insert(ImageTags::new("a", vec![tag("trigger", 0.9)]).unwrap());
        media.videos.insert(VideoMetadata { video_id: "v".into(), description: "gangsta".into(), comments: vec![] });
        assert!(media.tag_image("a").is_some());
        assert!(media.tag_image("A").is_none());
        assert!(media.fetch_video_metadata("v").is_some());
        assert!(media.fetch_video_metadata("w").is_none());
    }

    #[test]
    fn geocode_rules() {
        let mut geo = GeocodeFixtures::default();
        geo.insert("Los Angeles, CA", GeocodeResult::Us);
        assert_eq!(geo.lookup("  los angeles, ca "), GeocodeResult::Us);
        assert_eq!(geo.lookup(""), GeocodeResult::Unknown);
        assert_eq!(geo.lookup("Atlantis"), GeocodeResult::Unknown);
    }
}
