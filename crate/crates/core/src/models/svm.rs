//! Linear SVM trained with the Pegasos stochastic subgradient method.
//!
//! Minimizes `(λ/2)‖w̃‖² + (1/n) Σ max(0, 1 - y_i w̃·x̃_i)` where `x̃` is the
//! row with a constant 1 appended, so the bias is regularized like any
//! other weight. `λ = strength / n`, and step `t` uses `η = 1/(λt)`. Each
//! epoch visits every sample once in an order drawn from the seeded RNG.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LinearModel, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub strength: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { strength: 1.0, epochs: 50 }
    }
}

/// `w = scale * v`, so the shrink step is O(1) instead of O(d).
struct Scaled {
    v: Vec<f64>,
    scale: f64,
    norm2_v: f64,
}

impl Scaled {
    fn dot(&self, row: &[(u32, f64)], bias_index: usize) -> f64 {
        let raw: f64 = row.iter().map(|&(c, x)| self.v[c as usize] * x).sum::<f64>() + self.v[bias_index];
        self.scale * raw
    }

    fn add(&mut self, row: &[(u32, f64)], bias_index: usize, coef: f64) {
        let c = coef / self.scale;
        for (j, x) in row.iter().map(|&(j, x)| (j as usize, x)).chain(core::iter::once((bias_index, 1.0))) {
            let old = self.v[j];
            let new = old + c * x;
            self.norm2_v += new * new - old * old;
            self.v[j] = new;
        }
    }

    fn rescale(&mut self, factor: f64) {
        self.scale *= factor;
        if self.scale == 0.0 {
            self.v.iter_mut().for_each(|x| *x = 0.0);
            self.scale = 1.0;
            self.norm2_v = 0.0;
        } else if self.scale < 1e-9 {
            self.v.iter_mut().for_each(|x| *x *= self.scale);
            self.norm2_v = self.v.iter().map(|x| x * x).sum();
            self.scale = 1.0;
        }
    }

    fn norm(&self) -> f64 {
        self.scale * libm::sqrt(self.norm2_v.max(0.0))
    }
}

pub fn fit(data: &TrainingSet, params: &SvmParams, seed: u64) -> LinearModel {
    let n = data.len();
    let d = data.dim();
    let lambda = params.strength / n as f64;
    let radius = 1.0 / libm::sqrt(lambda);
    let mut w = Scaled { v: vec![0.0; d + 1], scale: 1.0, norm2_v: 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..params.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let row = &data.rows()[i];
            let y = if data.labels()[i].is_gang() { 1.0 } else { -1.0 };
            let margin = y * w.dot(row, d);
            w.rescale(1.0 - 1.0 / t as f64);
            if margin < 1.0 {
                w.add(row, d, eta * y);
            }
            let norm = w.norm();
            if norm > radius {
                w.rescale(radius / norm);
            }
        }
    }
    let weights: Vec<f64> = w.v[..d].iter().map(|x| x * w.scale).collect();
    let bias = w.v[d] * w.scale;
    LinearModel { weights, bias, iterations: t }
}
