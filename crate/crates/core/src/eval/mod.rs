//! Stratified k-fold cross-validation and per-class metrics.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClassLabel, CorpusSnapshot};
use crate::features::{assemble_vector, build_vocabulary, BlockSet, DocContext, FusionMode, MinDf, ProfileDoc};
use crate::models::{self, ModelSpec, Prediction};
use crate::{Error, Fingerprint, Result};

/// Fold index for every profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub rng_seed: u64,
    assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, profile_id: &str) -> Option<usize> {
        self.assignment.get(profile_id).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(id, &f)| (id.as_str(), f))
    }

    /// Ids in each fold, sorted.
    pub fn folds(&self) -> Vec<Vec<&str>> {
        let mut folds = alloc::vec![Vec::new(); self.k];
        for (id, &f) in &self.assignment {
            folds[f].push(id.as_str());
        }
        folds
    }
}

/// Within each class, ids are sorted, shuffled with a seeded RNG, and dealt
/// round-robin to folds 0..k.
pub fn stratified_kfold(labels: &[(String, ClassLabel)], k: usize, rng_seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    let mut assignment = BTreeMap::new();
    for (stream, class) in [ClassLabel::Gang, ClassLabel::NonGang].into_iter().enumerate() {
        let mut ids: Vec<&str> = labels.iter().filter(|(_, c)| *c == class).map(|(id, _)| id.as_str()).collect();
        if ids.len() < k {
            return Err(Error::ClassTooSmall { class: class.as_str().to_string(), size: ids.len(), k });
        }
        ids.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(stream as u64);
        ids.shuffle(&mut rng);
        for (i, id) in ids.into_iter().enumerate() {
            if assignment.insert(id.to_string(), i % k).is_some() {
                return Err(Error::DuplicateProfile(id.to_string()));
            }
        }
    }
    Ok(FoldAssignment { k, rng_seed, assignment })
}

/// Gang is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (ClassLabel, ClassLabel)>) -> Self {
        let mut c = ConfusionCounts::default();
        for (predicted, truth) in pairs {
            match (predicted.is_gang(), truth.is_gang()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            tn: self.tn + other.tn,
            fn_: self.fn_ + other.fn_,
        }
    }

    /// Per-class metrics; nongang treats tn as its true positives.
    pub fn metrics(&self) -> Metrics {
        Metrics {
            gang: ClassMetrics::from_counts(self.tp, self.fp, self.fn_),
            nongang: ClassMetrics::from_counts(self.tn, self.fn_, self.fp),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl ClassMetrics {
    /// Any 0/0 is taken as 0.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp as f64, (tp + fp) as f64);
        let recall = ratio(tp as f64, (tp + fn_) as f64);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        ClassMetrics { precision, recall, f1 }
    }

    fn mean(items: impl Iterator<Item = ClassMetrics>) -> ClassMetrics {
        let mut sum = ClassMetrics::default();
        let mut n = 0usize;
        for m in items {
            sum.precision += m.precision;
            sum.recall += m.recall;
            sum.f1 += m.f1;
            n += 1;
        }
        if n == 0 {
            return sum;
        }
        let n = n as f64;
        ClassMetrics { precision: sum.precision / n, recall: sum.recall / n, f1: sum.f1 / n }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub gang: ClassMetrics,
    pub nongang: ClassMetrics,
}

impl Metrics {
    pub fn class(&self, class: ClassLabel) -> &ClassMetrics {
        match class {
            ClassLabel::Gang => &self.gang,
            ClassLabel::NonGang => &self.nongang,
        }
    }
}

/// Confusion counts and per-class metrics for predictions against truth.
pub fn compute_metrics(preds: &[Prediction], truth: &[ClassLabel]) -> Result<(Metrics, ConfusionCounts)> {
    if preds.len() != truth.len() {
        return Err(Error::LengthMismatch { left: preds.len(), right: truth.len() });
    }
    let confusion = ConfusionCounts::from_pairs(preds.iter().map(|p| p.label).zip(truth.iter().copied()));
    Ok((confusion.metrics(), confusion))
}

/// Everything that determines a cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub spec: ModelSpec,
    pub blocks: BlockSet,
    pub mode: FusionMode,
    pub k: usize,
    pub min_df: MinDf,
    /// Seed for the fold assignment; the learner uses `spec.rng_seed`.
    pub rng_seed: u64,
}

impl CvConfig {
    pub fn new(spec: ModelSpec, blocks: BlockSet, mode: FusionMode) -> Self {
        CvConfig { spec, blocks, mode, k: 10, min_df: MinDf::default(), rng_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub gang: usize,
    pub nongang: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train: ClassCounts,
    pub test: ClassCounts,
    /// Vocabulary built from this fold's training ids; test vectors use it too.
    pub fingerprint: Fingerprint,
    pub vocabulary_size: usize,
    pub confusion: ConfusionCounts,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: CvConfig,
    pub stratified: bool,
    /// Profiles that took part after label and availability filtering.
    pub profiles: ClassCounts,
    pub folds: Vec<FoldResult>,
    /// Arithmetic mean of the per-fold metrics; this is the reported figure.
    pub mean: Metrics,
    /// Metrics of the summed confusion counts, for comparison.
    pub pooled: Metrics,
    pub pooled_confusion: ConfusionCounts,
    pub averaging: String,
}

impl EvalReport {
    /// Per-fold table: one row per fold plus the mean and pooled rows.
    pub fn folds_tsv(&self) -> String {
        let mut out = String::from(
            "fold\ttrain_gang\ttrain_nongang\ttest_gang\ttest_nongang\ttp\tfp\ttn\tfn\tgang_p\tgang_r\tgang_f1\tnongang_p\tnongang_r\tnongang_f1\tfingerprint\n",
        );
        for f in &self.folds {
            let c = &f.confusion;
            let _ = write!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t",
                f.fold, f.train.gang, f.train.nongang, f.test.gang, f.test.nongang, c.tp, c.fp, c.tn, c.fn_
            );
            write_metrics(&mut out, &f.metrics);
            let _ = writeln!(out, "\t{}", f.fingerprint);
        }
        for (name, m) in [("mean", &self.mean), ("pooled", &self.pooled)] {
            let c = &self.pooled_confusion;
            let _ = write!(out, "{name}\t\t\t{}\t{}\t{}\t{}\t{}\t{}\t", self.profiles.gang, self.profiles.nongang, c.tp, c.fp, c.tn, c.fn_);
            write_metrics(&mut out, m);
            out.push_str("\t\n");
        }
        out
    }
}

fn write_metrics(out: &mut String, m: &Metrics) {
    let _ = write!(
        out,
        "{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
        m.gang.precision, m.gang.recall, m.gang.f1, m.nongang.precision, m.nongang.recall, m.nongang.f1
    );
}

/// Summary table across runs: feature set, profile counts, algorithm, and
/// mean per-class precision/recall/F1.
pub fn summary_tsv(reports: &[EvalReport]) -> String {
    let mut out = String::from(
        "features\tmode\tprofiles\talgorithm\tgang_p\tgang_r\tgang_f1\tnongang_p\tnongang_r\tnongang_f1\n",
    );
    for r in reports {
        let total = r.profiles.gang + r.profiles.nongang;
        let _ = write!(
            out,
            "{}\t{}\t{} {{{} : {}}}\t{}\t",
            r.config.blocks.table_name(),
            r.config.mode,
            total,
            r.profiles.gang,
            r.profiles.nongang,
            r.config.spec.algorithm
        );
        write_metrics(&mut out, &r.mean);
        out.push('\n');
    }
    out
}

/// Subset of labeled docs a run evaluates. Single-block runs keep profiles
/// with that block; Model(2) keeps profiles with every selected block.
pub fn eligible(docs: &[ProfileDoc], blocks: BlockSet, mode: FusionMode) -> Vec<&ProfileDoc> {
    docs.iter()
        .filter(|d| d.label.class().is_some())
        .filter(|d| {
            let avail = d.availability();
            if mode == FusionMode::Model2 || blocks.len() == 1 {
                avail.is_superset(blocks)
            } else {
                true
            }
        })
        .collect()
}

/// Cross-validate over prebuilt docs. A fresh vocabulary is built from each
/// fold's training profiles.
pub fn cross_validate(docs: &[ProfileDoc], config: &CvConfig) -> Result<EvalReport> {
    if config.blocks.is_empty() {
        return Err(Error::EmptyBlockSet);
    }
    config.spec.params()?;
    let pool = eligible(docs, config.blocks, config.mode);
    let labeled: Vec<(String, ClassLabel)> =
        pool.iter().filter_map(|d| d.label.class().map(|c| (d.profile_id.clone(), c))).collect();
    let folds = stratified_kfold(&labeled, config.k, config.rng_seed)?;

    let mut results = Vec::with_capacity(config.k);
    for fold in 0..config.k {
        let (test, train): (Vec<&ProfileDoc>, Vec<&ProfileDoc>) =
            pool.iter().partition(|d| folds.fold_of(&d.profile_id) == Some(fold));
        let vocab = build_vocabulary(train.iter().copied(), config.blocks, config.min_df)?;
        let (x, y) = vectors(&train, &vocab, config.mode);
        let model = models::train(&config.spec, &x, &y)?;
        let (tx, ty) = vectors(&test, &vocab, config.mode);
        let preds = tx.iter().map(|v| model.predict(v)).collect::<Result<Vec<_>>>()?;
        let (metrics, confusion) = compute_metrics(&preds, &ty)?;
        results.push(FoldResult {
            fold,
            train: class_counts(&y),
            test: class_counts(&ty),
            fingerprint: vocab.fingerprint(),
            vocabulary_size: vocab.dim(),
            confusion,
            metrics,
        });
    }

    let pooled_confusion = results.iter().fold(ConfusionCounts::default(), |acc, f| acc.add(&f.confusion));
    let mean = Metrics {
        gang: ClassMetrics::mean(results.iter().map(|f| f.metrics.gang)),
        nongang: ClassMetrics::mean(results.iter().map(|f| f.metrics.nongang)),
    };
    let profiles = class_counts(&labeled.iter().map(|(_, c)| *c).collect::<Vec<_>>());
    Ok(EvalReport {
        config: config.clone(),
        stratified: true,
        profiles,
        folds: results,
        mean,
        pooled: pooled_confusion.metrics(),
        pooled_confusion,
        averaging: "mean_of_folds".to_string(),
    })
}

/// Build docs for the corpus's labeled profiles and cross-validate.
pub fn cross_validate_corpus(corpus: &CorpusSnapshot, ctx: &DocContext<'_>, config: &CvConfig) -> Result<EvalReport> {
    let docs: Vec<ProfileDoc> =
        corpus.iter().filter(|p| p.label.class().is_some()).map(|p| ctx.build(p)).collect();
    cross_validate(&docs, config)
}

fn vectors(
    docs: &[&ProfileDoc],
    vocab: &crate::features::Vocabulary,
    mode: FusionMode,
) -> (Vec<crate::features::FeatureVector>, Vec<ClassLabel>) {
    let mut x = Vec::with_capacity(docs.len());
    let mut y = Vec::with_capacity(docs.len());
    for d in docs {
        if let (Some(v), Some(c)) = (assemble_vector(d, vocab, mode), d.label.class()) {
            x.push(v);
            y.push(c);
        }
    }
    (x, y)
}

fn class_counts(labels: &[ClassLabel]) -> ClassCounts {
    let gang = labels.iter().filter(|l| l.is_gang()).count();
    ClassCounts { gang, nongang: labels.len() - gang }
}
