use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reqwest::Url;
use streetlens::core::clients::{GeocodeResult, Geocoder, MediaSource};
use streetlens::live::{HttpGeocoder, HttpMedia, RetryPolicy};

/// Serves the scripted `(status, body)` replies in order, one per
/// connection, then 500s. Returns the base URL and the request lines seen.
fn server(script: Vec<(u16, &'static str)>) -> (Url, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = Url::parse(&format!("http://{}/", listener.local_addr().unwrap())).unwrap();
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        let mut replies = script.into_iter();
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                    break;
                }
            }
            log.lock().unwrap().push(request_line.trim().to_string());
            let (status, body) = replies.next().unwrap_or((500, "{}"));
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(reply.as_bytes());
        }
    });
    (url, seen)
}

fn quick(attempts: u32) -> RetryPolicy {
    RetryPolicy { attempts, base_delay: Duration::from_millis(1), max_delay: Duration::from_millis(5) }
}

const TAGS: &str = r#"{"media_ref": "img/a", "tags": [{"term": "Trigger", "score": 0.9}, {"term": "worship", "score": 0.95}]}"#;
const VIDEO: &str = r#"{"video_id": "abcdefghijk", "description": "hip-hop", "comments": ["fire"]}"#;

#[test]
fn retries_server_errors_then_succeeds() {
    let (url, seen) = server(vec![(503, "{}"), (429, "{}"), (200, TAGS)]);
    let media = HttpMedia::new(Some(url.join("tags").unwrap()), None, Duration::from_secs(2), quick(3));
    let tags = media.tag_image("img/a").unwrap();
    let terms: Vec<&str> = tags.terms().collect();
    assert_eq!(terms, ["worship", "trigger"], "validated: lowercased, score-descending");
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 3);
    assert!(seen.iter().all(|l| l == "GET /tags/img%2Fa HTTP/1.1"), "{seen:?}");
}

#[test]
fn not_found_is_unavailable_without_retry() {
    let (url, seen) = server(vec![(404, "{}")]);
    let media = HttpMedia::new(None, Some(url), Duration::from_secs(2), quick(3));
    assert!(media.fetch_video_metadata("abcdefghijk").is_none());
    assert_eq!(seen.lock().unwrap().len(), 1);
    assert!(media.tag_image("img/a").is_none(), "unconfigured service");
}

#[test]
fn exhausted_retries_and_bad_bodies_are_unavailable() {
    let (url, seen) = server(vec![(500, "{}"), (502, "{}")]);
    let media = HttpMedia::new(None, Some(url.clone()), Duration::from_secs(2), quick(2));
    assert!(media.fetch_video_metadata("x").is_none());
    assert_eq!(seen.lock().unwrap().len(), 2);

    let (url, _) = server(vec![(200, "not json"), (400, "{}")]);
    let media = HttpMedia::new(None, Some(url), Duration::from_secs(2), quick(3));
    assert!(media.fetch_video_metadata("x").is_none());
    assert!(media.fetch_video_metadata("y").is_none());

    let tags: Vec<String> = (0..21).map(|i| format!(r#"{{"term": "t{i}", "score": 0.5}}"#)).collect();
    let body: &'static str = Box::leak(format!(r#"{{"media_ref": "a", "tags": [{}]}}"#, tags.join(",")).into_boxed_str());
    let (url, _) = server(vec![(200, body)]);
    let media = HttpMedia::new(Some(url), None, Duration::from_secs(2), quick(1));
    assert!(media.tag_image("a").is_none(), "more than 20 tags");
}

#[test]
fn video_metadata_verbatim() {
    let (url, _) = server(vec![(200, VIDEO)]);
    let media = HttpMedia::new(None, Some(url), Duration::from_secs(2), quick(1));
    let v = media.fetch_video_metadata("abcdefghijk").unwrap();
    assert_eq!(v.description, "hip-hop");
    assert_eq!(v.comments, ["fire"]);
}

#[test]
fn geocoder_wire_format() {
    let (url, seen) = server(vec![(200, r#"{"result": "non_us"}"#), (404, "{}"), (500, "{}")]);
    let geo = HttpGeocoder::new(url.join("geocode").unwrap(), Duration::from_secs(2), quick(1));
    assert_eq!(geo.geocode(" Paris ").unwrap(), GeocodeResult::NonUs);
    assert_eq!(geo.geocode("nowhere").unwrap(), GeocodeResult::Unknown);
    assert!(geo.geocode("x").is_err());
    assert_eq!(geo.geocode("  ").unwrap(), GeocodeResult::Unknown);
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 3, "empty input never hits the network");
    assert_eq!(seen[0], "GET /geocode?q=Paris HTTP/1.1");
}

#[test]
fn connection_refused_is_unavailable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let url = Url::parse(&format!("http://127.0.0.1:{port}/")).unwrap();
    let media = HttpMedia::new(Some(url), None, Duration::from_millis(500), quick(2));
    assert!(media.tag_image("a").is_none());
}

#[test]
fn backoff_is_capped_full_jitter() {
    let p = RetryPolicy { attempts: 5, base_delay: Duration::from_millis(100), max_delay: Duration::from_millis(350) };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for retry in 0..40 {
        let cap = Duration::from_millis((100u64 << retry.min(16)).min(350));
        for _ in 0..20 {
            assert!(p.backoff(retry, &mut rng) <= cap);
        }
    }
    let draws: Vec<Duration> = (0..50).map(|_| p.backoff(3, &mut rng)).collect();
    assert!(draws.iter().any(|d| *d < Duration::from_millis(175)) && draws.iter().any(|d| *d > Duration::from_millis(175)));
}
