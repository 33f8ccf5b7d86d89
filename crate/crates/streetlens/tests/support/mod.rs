#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use streetlens::config::Config;
use streetlens::fixtures::write_fixtures;
use streetlens::io::write_corpus;
use streetlens::synth::{generate, SynthConfig, SynthCorpus};
use tempfile::TempDir;

pub struct Workspace {
    pub dir: TempDir,
    pub synth: SynthCorpus,
}

impl Workspace {
    /// Synthetic corpus, its fixtures, and a config naming both, plus
    /// `extra` appended to the config verbatim.
    pub fn new(cfg: &SynthConfig, extra: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let synth = generate(cfg);
        write_corpus(&dir.path().join("corpus.jsonl"), &synth.corpus).unwrap();
        write_fixtures(&dir.path().join("fixtures"), &synth.fixtures).unwrap();
        let config = format!(
            "seed = {}\ncorpus = \"corpus.jsonl\"\nlabel_log = \"labels.jsonl\"\nfixtures_dir = \"fixtures\"\n{extra}",
            cfg.seed
        );
        fs::write(dir.path().join("streetlens.toml"), config).unwrap();
        Workspace { dir, synth }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn config_path(&self) -> PathBuf {
        self.path("streetlens.toml")
    }

    pub fn config(&self) -> Config {
        Config::load(&self.config_path()).unwrap()
    }
}

pub fn small(gang: usize, nongang: usize, unlabeled: usize, seed: u64) -> SynthConfig {
    SynthConfig { gang, nongang, unlabeled, seed, ..SynthConfig::default() }
}

pub fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}
