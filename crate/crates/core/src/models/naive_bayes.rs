//! Multinomial naive Bayes with additive smoothing.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::TrainingSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    /// Additive (Laplace) smoothing; 1.0 by default, 0 disables it.
    pub alpha: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { alpha: 1.0 }
    }
}

/// Per-class term totals and the smoothed estimates derived from them.
/// Index 0 is gang, 1 is nongang.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub alpha: f64,
    pub class_docs: [u64; 2],
    pub term_counts: [Vec<f64>; 2],
    pub term_totals: [f64; 2],
    pub log_prior: [f64; 2],
    pub log_likelihood: [Vec<f64>; 2],
}

pub fn fit(data: &TrainingSet, params: &NaiveBayesParams) -> NaiveBayes {
    let dim = data.dim();
    let mut class_docs = [0u64; 2];
    let mut term_counts = [alloc::vec![0.0; dim], alloc::vec![0.0; dim]];
    for (row, label) in data.rows().iter().zip(data.labels()) {
        let k = class_index(label.is_gang());
        class_docs[k] += 1;
        for &(c, v) in row {
            term_counts[k][c as usize] += v;
        }
    }
    let term_totals = [term_counts[0].iter().sum(), term_counts[1].iter().sum()];
    let n = (class_docs[0] + class_docs[1]) as f64;
    let log_prior = [libm::log(class_docs[0] as f64 / n), libm::log(class_docs[1] as f64 / n)];
    let mut model = NaiveBayes {
        alpha: params.alpha,
        class_docs,
        term_counts,
        term_totals,
        log_prior,
        log_likelihood: [Vec::new(), Vec::new()],
    };
    model.log_likelihood = [0, 1].map(|k| (0..dim).map(|j| libm::log(model.likelihood_at(k, j))).collect());
    model
}

fn class_index(gang: bool) -> usize {
    if gang {
        0
    } else {
        1
    }
}

impl NaiveBayes {
    pub fn dim(&self) -> usize {
        self.term_counts[0].len()
    }

    fn likelihood_at(&self, k: usize, j: usize) -> f64 {
        let v = self.dim() as f64;
        (self.term_counts[k][j] + self.alpha) / (self.term_totals[k] + self.alpha * v)
    }

    /// Smoothed P(term | class), computed directly from the counts.
    pub fn likelihood(&self, gang: bool, column: usize) -> f64 {
        self.likelihood_at(class_index(gang), column)
    }

    pub fn prior(&self, gang: bool) -> f64 {
        let n = (self.class_docs[0] + self.class_docs[1]) as f64;
        self.class_docs[class_index(gang)] as f64 / n
    }

    /// Joint log-probability of a row under each class, up to the shared
    /// multinomial coefficient.
    pub fn joint_log(&self, row: &[(u32, f64)]) -> [f64; 2] {
        [0, 1].map(|k| {
            let mut total = self.log_prior[k];
            for &(c, v) in row {
                total += v * self.log_likelihood[k][c as usize];
            }
            total
        })
    }

    /// Posterior probability of the gang class.
    pub fn score(&self, row: &[(u32, f64)]) -> f64 {
        let [g, n] = self.joint_log(row);
        match (g == f64::NEG_INFINITY, n == f64::NEG_INFINITY) {
            (true, true) => 0.5,
            _ => super::logistic_fn(g - n),
        }
    }

    /// `log P(term|gang) - log P(term|nongang)` per column.
    pub fn log_ratio(&self) -> Vec<f64> {
        self.log_likelihood[0].iter().zip(&self.log_likelihood[1]).map(|(g, n)| g - n).collect()
    }
}
