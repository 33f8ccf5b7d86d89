//! The append-only label log.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use streetlens_core::corpus::{CorpusSnapshot, Label, LabelEvent};

use crate::error::{io_err, Result};
use crate::io::parse_jsonl;

/// One JSON object per line. Appends from one process are serialized by an
/// internal lock and flushed to disk before returning.
#[derive(Debug)]
pub struct LabelLog {
    path: PathBuf,
    write_lock: Mutex<()>,
}

impl LabelLog {
    pub fn open(path: impl Into<PathBuf>) -> Self {
        LabelLog { path: path.into(), write_lock: Mutex::new(()) }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, event: &LabelEvent) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path).map_err(io_err(&self.path))?;
        let mut line = serde_json::to_string(event).expect("label events serialize");
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(io_err(&self.path))?;
        file.sync_data().map_err(io_err(&self.path))
    }

    /// All events in append order; a missing file is an empty log.
    pub fn read(&self) -> Result<Vec<LabelEvent>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(&self.path).map_err(io_err(&self.path))?;
        Ok(parse_jsonl(&text, &self.path)?.into_iter().map(|(_, e)| e).collect())
    }

    /// Apply the logged events to `snapshot`. Events for ids the snapshot
    /// does not hold are skipped and counted.
    pub fn replay_onto(&self, snapshot: &CorpusSnapshot) -> Result<(CorpusSnapshot, usize)> {
        let events = self.read()?;
        let (known, unknown): (Vec<_>, Vec<_>) = events.iter().partition(|e| snapshot.contains(&e.profile_id));
        if !unknown.is_empty() {
            log::warn!("{}: {} events for profiles not in the corpus", self.path.display(), unknown.len());
        }
        Ok((snapshot.replay(known)?, unknown.len()))
    }

    /// Label a profile in `snapshot` and log the change.
    pub fn record(
        &self,
        snapshot: &CorpusSnapshot,
        id: &str,
        label: Label,
        annotator: &str,
    ) -> Result<(CorpusSnapshot, LabelEvent)> {
        let (next, event) = snapshot.apply_label(id, label, annotator, &now())?;
        self.append(&event)?;
        Ok((next, event))
    }
}

/// UTC timestamp in RFC 3339 with second precision.
pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
