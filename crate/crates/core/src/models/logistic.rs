//! L2-regularized logistic regression fitted by full-batch gradient descent.
//!
//! Objective, with `y` in {0, 1} and the bias left unpenalized:
//!
//! ```text
//! J(w, b) = (1/n) Σ [softplus(z_i) - y_i z_i] + (λ / 2n) ‖w‖²,   z_i = w·x_i + b
//! ```
//!
//! `λ` is the `strength` hyperparameter, so `1/λ` plays the role of the
//! usual inverse-regularization constant `C`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{logistic_fn, sparse_dot, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub strength: f64,
    /// Stop once the gradient's Euclidean norm falls below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { strength: 1.0, tolerance: 1e-6, max_iter: 5000 }
    }
}

/// Weight vector plus bias; shared by logistic regression and the SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Optimizer iterations (LR) or total updates (SVM) that were run.
    pub iterations: usize,
}

impl LinearModel {
    pub fn margin(&self, row: &[(u32, f64)]) -> f64 {
        sparse_dot(&self.weights, row) + self.bias
    }

    /// Logistic link applied to the margin.
    pub fn score(&self, row: &[(u32, f64)]) -> f64 {
        logistic_fn(self.margin(row))
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

fn target(data: &TrainingSet, i: usize) -> f64 {
    if data.labels()[i].is_gang() {
        1.0
    } else {
        0.0
    }
}

/// Regularized mean log-loss at `(weights, bias)`.
pub fn objective(data: &TrainingSet, strength: f64, weights: &[f64], bias: f64) -> f64 {
    let n = data.len() as f64;
    let loss: f64 = data
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let z = sparse_dot(weights, row) + bias;
            softplus(z) - target(data, i) * z
        })
        .sum();
    let norm2: f64 = weights.iter().map(|w| w * w).sum();
    loss / n + strength / (2.0 * n) * norm2
}

/// Analytic gradient of [`objective`]: `(∂J/∂w, ∂J/∂b)`.
pub fn gradient(data: &TrainingSet, strength: f64, weights: &[f64], bias: f64) -> (Vec<f64>, f64) {
    let n = data.len() as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| strength / n * w).collect();
    let mut gb = 0.0;
    for (i, row) in data.rows().iter().enumerate() {
        let residual = (logistic_fn(sparse_dot(weights, row) + bias) - target(data, i)) / n;
        gb += residual;
        for &(c, v) in row {
            gw[c as usize] += residual * v;
        }
    }
    (gw, gb)
}

pub fn fit(data: &TrainingSet, params: &LogisticParams) -> LinearModel {
    let dim = data.dim();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut step = 1.0;
    let mut f = objective(data, params.strength, &w, b);
    let mut iterations = 0;
    while iterations < params.max_iter {
        let (gw, gb) = gradient(data, params.strength, &w, b);
        let gnorm2: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        if libm::sqrt(gnorm2) < params.tolerance {
            break;
        }
        iterations += 1;
        // Armijo backtracking, starting from twice the last accepted step
        step *= 2.0;
        let (next_w, next_b, next_f) = loop {
            let cw: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - step * gi).collect();
            let cb = b - step * gb;
            let cf = objective(data, params.strength, &cw, cb);
            if cf <= f - 1e-4 * step * gnorm2 || step < 1e-20 {
                break (cw, cb, cf);
            }
            step *= 0.5;
        };
        if next_f >= f {
            break;
        }
        w = next_w;
        b = next_b;
        f = next_f;
    }
    log::debug!("logistic regression: {iterations} iterations, objective {f}");
    LinearModel { weights: w, bias: b, iterations }
}
