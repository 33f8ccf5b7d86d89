//! Offline fixture files for the image tagger, video metadata, and geocoder.
//!
//! A fixtures directory holds up to three JSONL files; a missing file is an
//! empty store:
//!
//! - `image_tags.jsonl`: `{"media_ref": "...", "tags": [{"term": "...", "score": 0.9}]}`
//! - `videos.jsonl`: `{"video_id": "...", "description": "...", "comments": ["..."]}`
//! - `geocode.jsonl`: `{"location": "chicago, il", "result": "us"}`

use std::path::Path;

use serde::{Deserialize, Serialize};
use streetlens_core::clients::{FixtureMedia, GeocodeFixtures, GeocodeResult, ImageTags, VideoMetadata};

use crate::error::{Error, Result};
use crate::io::{read_jsonl, write_file};

pub const IMAGE_TAGS_FILE: &str = "image_tags.jsonl";
pub const VIDEOS_FILE: &str = "videos.jsonl";
pub const GEOCODE_FILE: &str = "geocode.jsonl";

#[derive(Debug, Clone, Default)]
pub struct Fixtures {
    pub media: FixtureMedia,
    pub geocode: GeocodeFixtures,
}

#[derive(Serialize, Deserialize)]
struct GeocodeEntry {
    location: String,
    result: GeocodeResult,
}

fn read_if_present<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    if path.exists() {
        read_jsonl(path)
    } else {
        Ok(Vec::new())
    }
}

/// Load every fixture file in `dir`. Entries are validated (at most 20 tags,
/// scores in [0, 1]) and duplicate keys are rejected.
pub fn load_fixtures(dir: &Path) -> Result<Fixtures> {
    let mut fx = Fixtures::default();

    let path = dir.join(IMAGE_TAGS_FILE);
    for (line, raw) in read_if_present::<ImageTags>(&path)? {
        let at = |message: String| Error::Line { path: path.clone(), line, message };
        let tags = ImageTags::new(raw.media_ref, raw.tags).map_err(|e| at(e.to_string()))?;
        if fx.media.images.get(&tags.media_ref).is_some() {
            return Err(at(format!("duplicate media_ref `{}`", tags.media_ref)));
        }
        fx.media.images.insert(tags);
    }

    let path = dir.join(VIDEOS_FILE);
    for (line, video) in read_if_present::<VideoMetadata>(&path)? {
        if fx.media.videos.get(&video.video_id).is_some() {
            return Err(Error::Line { path, line, message: format!("duplicate video_id `{}`", video.video_id) });
        }
        fx.media.videos.insert(video);
    }

    let path = dir.join(GEOCODE_FILE);
    for (line, entry) in read_if_present::<GeocodeEntry>(&path)? {
        if fx.geocode.iter().any(|(k, _)| k == entry.location.trim().to_lowercase()) {
            return Err(Error::Line { path, line, message: format!("duplicate location `{}`", entry.location) });
        }
        fx.geocode.insert(&entry.location, entry.result);
    }

    log::info!(
        "fixtures from {}: {} images, {} videos, {} locations",
        dir.display(),
        fx.media.images.len(),
        fx.media.videos.len(),
        fx.geocode.len()
    );
    Ok(fx)
}

fn jsonl<T: Serialize>(items: impl Iterator<Item = T>) -> String {
    items.map(|i| serde_json::to_string(&i).expect("fixtures serialize") + "\n").collect()
}

/// Write all three fixture files into `dir`, in key order.
pub fn write_fixtures(dir: &Path, fx: &Fixtures) -> Result<()> {
    write_file(&dir.join(IMAGE_TAGS_FILE), &jsonl(fx.media.images.iter()))?;
    write_file(&dir.join(VIDEOS_FILE), &jsonl(fx.media.videos.iter()))?;
    let geo = fx.geocode.iter().map(|(location, result)| GeocodeEntry { location: location.to_string(), result });
    write_file(&dir.join(GEOCODE_FILE), &jsonl(geo))
}
