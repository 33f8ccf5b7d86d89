//! Line-delimited JSON corpus files and term lists.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use streetlens_core::corpus::{CapPolicy, CorpusSnapshot, ProfileRecord};
use streetlens_core::textprep::parse_term_list;

use crate::error::{io_err, Error, Result};

/// A parsed corpus plus the repairs made on the way in.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub snapshot: CorpusSnapshot,
    pub warnings: Vec<String>,
}

/// Non-blank lines of a JSONL text as `(line number, value)`.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str, source: &Path) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line).map_err(|e| Error::Line {
            path: source.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_jsonl(&text, path)
}

/// Parse a canonical corpus file. `source` only labels error messages.
pub fn parse_corpus(text: &str, source: &Path, cap_policy: CapPolicy) -> Result<Ingested> {
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (line, mut record) in parse_jsonl::<ProfileRecord>(text, source)? {
        let at = |message: String| Error::Line { path: source.to_path_buf(), line, message };
        if !seen.insert(record.profile_id.clone()) {
            return Err(at(format!("duplicate profile id `{}`", record.profile_id)));
        }
        warnings.extend(record.canonicalize(cap_policy).map_err(|e| at(e.to_string()))?);
        records.push(record);
    }
    for w in &warnings {
        log::warn!("{}: {w}", source.display());
    }
    Ok(Ingested { snapshot: CorpusSnapshot::from_records(records)?, warnings })
}

pub fn read_corpus(path: &Path, cap_policy: CapPolicy) -> Result<Ingested> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_corpus(&text, path, cap_policy)
}

/// Canonical serialization: one record per line in profile id order.
pub fn corpus_to_jsonl(snapshot: &CorpusSnapshot) -> String {
    let mut out = String::new();
    for record in snapshot.iter() {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: &Path, snapshot: &CorpusSnapshot) -> Result<()> {
    write_file(path, &corpus_to_jsonl(snapshot))
}

pub fn read_term_list(path: &Path) -> Result<BTreeSet<String>> {
    Ok(parse_term_list(&fs::read_to_string(path).map_err(io_err(path))?))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Write a file, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}
