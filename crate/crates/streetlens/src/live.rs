//! Thin HTTP adapters for a live image tagger, video metadata service, and
//! geocoder, behind the same traits as the fixture stores.
//!
//! Wire format, all JSON over GET:
//!
//! - `{image_url}/{media_ref}` returns an `ImageTags` object
//! - `{video_url}/{video_id}` returns a `VideoMetadata` object
//! - `{geocode_url}?q={location}` returns `{"result": "us" | "non_us" | "unknown"}`
//!
//! A 404 means the service has nothing for the key. Transport errors, 429,
//! and 5xx responses are retried with capped exponential backoff and full
//! jitter; once the attempts are spent the key is treated as unavailable.

use std::thread;
use std::time::Duration;

use rand::Rng;
use reqwest::blocking::Client;
use reqwest::{StatusCode, Url};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use streetlens_core::clients::{GeocodeResult, Geocoder, ImageTags, MediaSource, VideoMetadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Total tries per request, at least one.
    pub attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay: Duration::from_millis(200), max_delay: Duration::from_secs(2) }
    }
}

impl RetryPolicy {
    /// Sleep before retry number `retry` (0-based): uniform in
    /// `[0, min(max, base * 2^retry)]`.
    pub fn backoff(&self, retry: u32, rng: &mut impl Rng) -> Duration {
        let cap = self.base_delay.saturating_mul(1u32 << retry.min(16)).min(self.max_delay);
        cap.mul_f64(rng.gen::<f64>())
    }
}

#[derive(Debug)]
enum Fetch<T> {
    Found(T),
    Missing,
    Failed(String),
}

#[derive(Debug, Clone)]
struct HttpJson {
    client: Client,
    retry: RetryPolicy,
}

impl HttpJson {
    fn new(timeout: Duration, retry: RetryPolicy) -> Self {
        let client = Client::builder().timeout(timeout).build().expect("http client builds");
        HttpJson { client, retry }
    }

    fn get<T: DeserializeOwned>(&self, url: Url) -> Fetch<T> {
        let mut last = String::new();
        let attempts = self.retry.attempts.max(1);
        for attempt in 0..attempts {
            if attempt > 0 {
                thread::sleep(self.retry.backoff(attempt - 1, &mut rand::thread_rng()));
            }
            match self.client.get(url.clone()).send() {
                Ok(resp) if resp.status() == StatusCode::NOT_FOUND => return Fetch::Missing,
                Ok(resp) if resp.status().is_success() => {
                    return match resp.json::<T>() {
                        Ok(v) => Fetch::Found(v),
                        Err(e) => Fetch::Failed(format!("{url}: bad body: {e}")),
                    }
                }
                Ok(resp) if resp.status().is_server_error() || resp.status() == StatusCode::TOO_MANY_REQUESTS => {
                    last = format!("{url}: status {}", resp.status());
                }
                Ok(resp) => return Fetch::Failed(format!("{url}: status {}", resp.status())),
                Err(e) => last = format!("{url}: {e}"),
            }
            log::debug!("attempt {} of {attempts} failed: {last}", attempt + 1);
        }
        Fetch::Failed(last)
    }
}

fn keyed(base: &Url, key: &str) -> Url {
    let mut url = base.clone();
    if let Ok(mut segs) = url.path_segments_mut() {
        segs.pop_if_empty().push(key);
    }
    url
}

fn optional<T>(what: &str, key: &str, fetch: Fetch<T>) -> Option<T> {
    match fetch {
        Fetch::Found(v) => Some(v),
        Fetch::Missing => None,
        Fetch::Failed(e) => {
            log::warn!("{what} `{key}` unavailable: {e}");
            None
        }
    }
}

/// Image tagging and video metadata over HTTP. Either service may be left
/// unconfigured, in which case its lookups return nothing.
#[derive(Debug, Clone)]
pub struct HttpMedia {
    http: HttpJson,
    image_url: Option<Url>,
    video_url: Option<Url>,
}

impl HttpMedia {
    pub fn new(image_url: Option<Url>, video_url: Option<Url>, timeout: Duration, retry: RetryPolicy) -> Self {
        HttpMedia { http: HttpJson::new(timeout, retry), image_url, video_url }
    }
}

impl MediaSource for HttpMedia {
    fn tag_image(&self, media_ref: &str) -> Option<ImageTags> {
        let base = self.image_url.as_ref()?;
        let raw: ImageTags = optional("image", media_ref, self.http.get(keyed(base, media_ref)))?;
        match ImageTags::new(raw.media_ref, raw.tags) {
            Ok(tags) => Some(tags),
            Err(e) => {
                log::warn!("image `{media_ref}` unavailable: {e}");
                None
            }
        }
    }

    fn fetch_video_metadata(&self, video_id: &str) -> Option<VideoMetadata> {
        let base = self.video_url.as_ref()?;
        optional("video", video_id, self.http.get(keyed(base, video_id)))
    }
}

#[derive(Deserialize)]
struct GeocodeBody {
    result: GeocodeResult,
}

#[derive(Debug, Clone)]
pub struct HttpGeocoder {
    http: HttpJson,
    url: Url,
}

impl HttpGeocoder {
    pub fn new(url: Url, timeout: Duration, retry: RetryPolicy) -> Self {
        HttpGeocoder { http: HttpJson::new(timeout, retry), url }
    }
}

impl Geocoder for HttpGeocoder {
    fn geocode(&self, location: &str) -> Result<GeocodeResult, String> {
        if location.trim().is_empty() {
            return Ok(GeocodeResult::Unknown);
        }
        let mut url = self.url.clone();
        url.query_pairs_mut().append_pair("q", location.trim());
        match self.http.get::<GeocodeBody>(url) {
            Fetch::Found(b) => Ok(b.result),
            Fetch::Missing => Ok(GeocodeResult::Unknown),
            Fetch::Failed(e) => Err(e),
        }
    }
}
