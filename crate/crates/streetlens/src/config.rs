//! TOML configuration and the resources it names.
//!
//! Every key is optional. Relative paths resolve against the directory of
//! the config file.
//!
//! ```toml
//! seed = 7
//! corpus = "corpus.jsonl"
//! label_log = "labels.jsonl"
//! fixtures_dir = "fixtures"
//! cap_policy = "truncate"
//!
//! [text]
//! stopwords = "stopwords.txt"
//! curse_lexicon = "curses.txt"
//!
//! [features]
//! comment_cap = 200
//! min_df = { T = 2, P = 1, E = 1, I = 1, Y = 2 }
//!
//! [service]
//! bind = "127.0.0.1:8080"
//! token = "secret"
//!
//! [live]
//! image_url = "http://localhost:9000/tags"
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use reqwest::Url;
use serde::Deserialize;
use streetlens_core::clients::{FixtureMedia, GeocodeFixtures, Geocoder, MediaSource};
use streetlens_core::corpus::CapPolicy;
use streetlens_core::features::{MinDf, DEFAULT_COMMENT_CAP};
use streetlens_core::textprep::{
    parse_term_list, TextPipeline, VariantTable, DEFAULT_CURSE_LEXICON, DEFAULT_SEED_TERMS, DEFAULT_STOPWORDS,
    DEFAULT_VARIANTS,
};

use crate::error::{Error, Result};
use crate::fixtures::load_fixtures;
use crate::io::read_text;
use crate::live::{HttpGeocoder, HttpMedia, RetryPolicy};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub corpus: Option<PathBuf>,
    pub label_log: Option<PathBuf>,
    pub fixtures_dir: Option<PathBuf>,
    #[serde(default)]
    pub cap_policy: CapPolicy,
    #[serde(default)]
    pub text: TextConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub service: ServiceConfig,
    #[serde(default)]
    pub live: LiveConfig,
}

/// Term-list files replacing the shipped defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextConfig {
    pub stopwords: Option<PathBuf>,
    pub seed_terms: Option<PathBuf>,
    pub variants: Option<PathBuf>,
    pub curse_lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub comment_cap: usize,
    pub min_df: MinDf,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { comment_cap: DEFAULT_COMMENT_CAP, min_df: MinDf::default() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub youtube_keywords: Vec<String>,
    pub top_k: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { youtube_keywords: vec!["gangsta".into(), "hip-hop".into()], top_k: 20 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceConfig {
    pub bind: String,
    /// Shared bearer token; unset means no authentication.
    pub token: Option<String>,
    /// Where trained models are written and loaded from.
    pub model: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { bind: "127.0.0.1:8080".into(), token: None, model: None }
    }
}

/// Live service endpoints. Any URL set here replaces that fixture store.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiveConfig {
    pub image_url: Option<String>,
    pub video_url: Option<String>,
    pub geocode_url: Option<String>,
    pub attempts: u32,
    pub timeout_ms: u64,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig { image_url: None, video_url: None, geocode_url: None, attempts: 3, timeout_ms: 5000 }
    }
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p.as_mut() {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut config: Config =
            toml::from_str(text).map_err(|e| Error::Config { path: path.to_path_buf(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.corpus,
            &mut config.label_log,
            &mut config.fixtures_dir,
            &mut config.text.stopwords,
            &mut config.text.seed_terms,
            &mut config.text.variants,
            &mut config.text.curse_lexicon,
            &mut config.service.model,
        ] {
            resolve(base, p);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Config::parse(&read_text(path)?, path)
    }

    fn list_or(&self, path: &Option<PathBuf>, default: &str) -> Result<String> {
        match path {
            Some(p) => read_text(p),
            None => Ok(default.to_string()),
        }
    }

    pub fn variants(&self) -> Result<VariantTable> {
        Ok(VariantTable::parse(&self.list_or(&self.text.variants, DEFAULT_VARIANTS)?))
    }

    /// Stopwords plus seed terms with their variant spellings.
    pub fn pipeline(&self) -> Result<TextPipeline> {
        let stopwords = parse_term_list(&self.list_or(&self.text.stopwords, DEFAULT_STOPWORDS)?);
        let variants = self.variants()?;
        let seeds: BTreeSet<String> = parse_term_list(&self.list_or(&self.text.seed_terms, DEFAULT_SEED_TERMS)?)
            .iter()
            .flat_map(|t| variants.expand(t))
            .collect();
        Ok(TextPipeline::new(stopwords, seeds))
    }

    pub fn curse_lexicon(&self) -> Result<BTreeSet<String>> {
        Ok(parse_term_list(&self.list_or(&self.text.curse_lexicon, DEFAULT_CURSE_LEXICON)?))
    }

    fn retry(&self) -> (Duration, RetryPolicy) {
        let retry = RetryPolicy { attempts: self.live.attempts.max(1), ..RetryPolicy::default() };
        (Duration::from_millis(self.live.timeout_ms), retry)
    }

    fn url(&self, raw: &Option<String>) -> Result<Option<Url>> {
        raw.as_deref()
            .map(|u| {
                Url::parse(u).map_err(|e| Error::Config { path: "live".into(), message: format!("`{u}`: {e}") })
            })
            .transpose()
    }

    /// Media lookups: live endpoints where configured, otherwise fixtures.
    pub fn media(&self) -> Result<Arc<dyn MediaSource + Send + Sync>> {
        let (image, video) = (self.url(&self.live.image_url)?, self.url(&self.live.video_url)?);
        if image.is_none() && video.is_none() {
            return Ok(Arc::new(self.fixture_media()?));
        }
        let (timeout, retry) = self.retry();
        let live = HttpMedia::new(image.clone(), video.clone(), timeout, retry);
        let fx = self.fixture_media()?;
        Ok(Arc::new(Layered { live, fixtures: fx, live_images: image.is_some(), live_videos: video.is_some() }))
    }

    fn fixture_media(&self) -> Result<FixtureMedia> {
        Ok(match &self.fixtures_dir {
            Some(dir) => load_fixtures(dir)?.media,
            None => FixtureMedia::default(),
        })
    }

    pub fn geocoder(&self) -> Result<Arc<dyn Geocoder + Send + Sync>> {
        if let Some(url) = self.url(&self.live.geocode_url)? {
            let (timeout, retry) = self.retry();
            return Ok(Arc::new(HttpGeocoder::new(url, timeout, retry)));
        }
        Ok(Arc::new(match &self.fixtures_dir {
            Some(dir) => load_fixtures(dir)?.geocode,
            None => GeocodeFixtures::default(),
        }))
    }
}

struct Layered {
    live: HttpMedia,
    fixtures: FixtureMedia,
    live_images: bool,
    live_videos: bool,
}

impl MediaSource for Layered {
    fn tag_image(&self, media_ref: &str) -> Option<streetlens_core::clients::ImageTags> {
        if self.live_images {
            self.live.tag_image(media_ref)
        } else {
            self.fixtures.tag_image(media_ref)
        }
    }

    fn fetch_video_metadata(&self, video_id: &str) -> Option<streetlens_core::clients::VideoMetadata> {
        if self.live_videos {
            self.live.fetch_video_metadata(video_id)
        } else {
            self.fixtures.fetch_video_metadata(video_id)
        }
    }
}
