//! The four supervised learners behind one train/predict contract.
//!
//! Every learner sees the training set in a canonical order (rows sorted by
//! content, then label), so the sample order a caller passes in never
//! matters. Randomness (bootstrap, feature subsampling, SVM sample order)
//! comes only from ChaCha streams seeded by [`ModelSpec::rng_seed`].

mod artifact;
pub mod forest;
pub mod logistic;
pub mod naive_bayes;
mod params;
pub mod svm;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::ClassLabel;
use crate::features::FeatureVector;
use crate::{Error, Fingerprint, Result};

pub use artifact::{ModelArtifact, MODEL_FORMAT_VERSION};
pub use forest::{Forest, ForestParams, MaxFeatures, Tree, TreeNode};
pub use logistic::{LinearModel, LogisticParams};
pub use naive_bayes::{NaiveBayes, NaiveBayesParams};
pub use params::{Algorithm, ModelSpec, ParamValue, Params};
pub use svm::SvmParams;

/// A sparse row: `(column, value)` pairs, strictly increasing by column.
pub type SparseRow = Vec<(u32, f64)>;

/// Learner input: sparse rows, gang/nongang labels, and the column count.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    dim: usize,
    rows: Vec<SparseRow>,
    labels: Vec<ClassLabel>,
}

impl TrainingSet {
    /// Zero values are dropped; columns must be increasing and below `dim`.
    pub fn new(dim: usize, rows: Vec<SparseRow>, labels: Vec<ClassLabel>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch { left: rows.len(), right: labels.len() });
        }
        let mut clean = Vec::with_capacity(rows.len());
        for row in rows {
            if row.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::InvalidHyperparam { key: "rows".into(), reason: "columns not increasing".into() });
            }
            if let Some(&(c, _)) = row.last() {
                if c as usize >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: c as usize + 1 });
                }
            }
            clean.push(row.into_iter().filter(|&(_, v)| v != 0.0).collect());
        }
        Ok(TrainingSet { dim, rows: clean, labels })
    }

    pub fn from_dense(rows: &[Vec<f64>], labels: &[ClassLabel]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        let sparse = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(c, &v)| (c as u32, v)).collect())
            .collect();
        TrainingSet::new(dim, sparse, labels.to_vec())
    }

    /// Rows from feature vectors, which must all come from one vocabulary.
    pub fn from_vectors(vectors: &[FeatureVector], labels: &[ClassLabel]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyTrainingSet)?;
        for v in vectors {
            if v.fingerprint != first.fingerprint {
                return Err(Error::FingerprintMismatch {
                    expected: first.fingerprint.to_hex(),
                    found: v.fingerprint.to_hex(),
                });
            }
            if v.dim != first.dim {
                return Err(Error::DimensionMismatch { expected: first.dim as usize, found: v.dim as usize });
            }
        }
        let rows = vectors.iter().map(vector_row).collect();
        TrainingSet::new(first.dim as usize, rows, labels.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let gang = self.labels.iter().filter(|l| l.is_gang()).count();
        (gang, self.labels.len() - gang)
    }

    /// Same samples, sorted by row content then label.
    pub fn canonical(&self) -> TrainingSet {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by(|&a, &b| {
            cmp_rows(&self.rows[a], &self.rows[b]).then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        TrainingSet {
            dim: self.dim,
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

fn cmp_rows(a: &SparseRow, b: &SparseRow) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.0.cmp(&y.0).then_with(|| x.1.total_cmp(&y.1));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn vector_row(v: &FeatureVector) -> SparseRow {
    v.entries.iter().map(|&(c, n)| (c, f64::from(n))).collect()
}

pub(crate) fn sparse_dot(weights: &[f64], row: &[(u32, f64)]) -> f64 {
    row.iter().map(|&(c, v)| weights[c as usize] * v).sum()
}

/// Classifier output. `score` is the gang-class confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: ClassLabel,
    pub score: f64,
}

impl Prediction {
    /// Gang only when the score is strictly above one half.
    pub fn from_score(score: f64) -> Self {
        let label = if score > 0.5 { ClassLabel::Gang } else { ClassLabel::NonGang };
        Prediction { label, score }
    }
}

/// Fitted parameters of one learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayes),
    LogisticRegression(LinearModel),
    RandomForest(Forest),
    Svm(LinearModel),
}

impl ModelParams {
    pub fn score_row(&self, row: &[(u32, f64)]) -> f64 {
        match self {
            ModelParams::NaiveBayes(m) => m.score(row),
            ModelParams::LogisticRegression(m) | ModelParams::Svm(m) => m.score(row),
            ModelParams::RandomForest(f) => f.score(row),
        }
    }

    /// Per-column contribution toward the gang class for a row, where the
    /// learner has a linear form (NB log-likelihood ratio, LR/SVM weight).
    /// Forests return `None`.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        match self {
            ModelParams::NaiveBayes(m) => Some(m.log_ratio()),
            ModelParams::LogisticRegression(m) | ModelParams::Svm(m) => Some(m.weights.clone()),
            ModelParams::RandomForest(_) => None,
        }
    }
}

/// A fitted model tied to one vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub fingerprint: Fingerprint,
    pub dim: u32,
    pub params: ModelParams,
}

impl TrainedModel {
    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction> {
        predict(self, x)
    }
}

/// Fit a model. Requires matching lengths, both classes, and one shared
/// vocabulary across all vectors.
pub fn train(spec: &ModelSpec, x: &[FeatureVector], y: &[ClassLabel]) -> Result<TrainedModel> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let data = TrainingSet::from_vectors(x, y)?;
    let params = fit(spec, &data)?;
    Ok(TrainedModel { spec: spec.clone(), fingerprint: x[0].fingerprint, dim: x[0].dim, params })
}

/// Fit on a raw training set (no vocabulary bookkeeping).
pub fn fit(spec: &ModelSpec, data: &TrainingSet) -> Result<ModelParams> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let (gang, nongang) = data.class_counts();
    if gang == 0 || nongang == 0 {
        return Err(Error::SingleClass);
    }
    let data = data.canonical();
    Ok(match spec.params()? {
        Params::NaiveBayes(p) => ModelParams::NaiveBayes(naive_bayes::fit(&data, &p)),
        Params::LogisticRegression(p) => ModelParams::LogisticRegression(logistic::fit(&data, &p)),
        Params::RandomForest(p) => ModelParams::RandomForest(forest::fit(&data, &p, spec.rng_seed)),
        Params::Svm(p) => ModelParams::Svm(svm::fit(&data, &p, spec.rng_seed)),
    })
}

pub fn predict(model: &TrainedModel, x: &FeatureVector) -> Result<Prediction> {
    if x.fingerprint != model.fingerprint {
        return Err(Error::FingerprintMismatch { expected: model.fingerprint.to_hex(), found: x.fingerprint.to_hex() });
    }
    if x.dim != model.dim {
        return Err(Error::DimensionMismatch { expected: model.dim as usize, found: x.dim as usize });
    }
    Ok(Prediction::from_score(model.params.score_row(&vector_row(x))))
}

/// Human-readable name of the fitted learner.
pub fn describe(params: &ModelParams) -> String {
    String::from(match params {
        ModelParams::NaiveBayes(_) => "naive_bayes",
        ModelParams::LogisticRegression(_) => "logistic_regression",
        ModelParams::RandomForest(_) => "random_forest",
        ModelParams::Svm(_) => "svm",
    })
}

pub(crate) fn logistic_fn(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}
