use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::{ForestParams, MaxFeatures};
use super::logistic::LogisticParams;
use super::naive_bayes::NaiveBayesParams;
use super::svm::SvmParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NaiveBayes,
    LogisticRegression,
    RandomForest,
    Svm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::NaiveBayes, Algorithm::LogisticRegression, Algorithm::RandomForest, Algorithm::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Svm => "svm",
        }
    }

    fn known_keys(self) -> &'static [&'static str] {
        match self {
            Algorithm::NaiveBayes => &["alpha"],
            Algorithm::LogisticRegression => &["strength", "tolerance", "max_iter"],
            Algorithm::RandomForest => &["n_trees", "max_features", "max_depth", "min_leaf", "bootstrap"],
            Algorithm::Svm => &["strength", "epochs"],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "naive_bayes" | "nb" => Ok(Algorithm::NaiveBayes),
            "logistic_regression" | "lr" | "logistic" => Ok(Algorithm::LogisticRegression),
            "random_forest" | "rf" | "forest" => Ok(Algorithm::RandomForest),
            "svm" => Ok(Algorithm::Svm),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// A hyperparameter value as written in config files or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

/// Which learner to fit, its overrides of the default hyperparameters, and
/// the seed for any randomness it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ModelSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    hyperparams: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Deserialize)]
struct RawSpec {
    algorithm: Algorithm,
    #[serde(default)]
    hyperparams: BTreeMap<String, ParamValue>,
    #[serde(default)]
    rng_seed: u64,
}

impl TryFrom<RawSpec> for ModelSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = ModelSpec { algorithm: raw.algorithm, hyperparams: raw.hyperparams, rng_seed: raw.rng_seed };
        spec.params()?;
        Ok(spec)
    }
}

/// Resolved hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Params {
    NaiveBayes(NaiveBayesParams),
    LogisticRegression(LogisticParams),
    RandomForest(ForestParams),
    Svm(SvmParams),
}

impl ModelSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        ModelSpec { algorithm, hyperparams: BTreeMap::new(), rng_seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Set one hyperparameter; unknown keys and bad values are rejected.
    pub fn with_param(mut self, key: &str, value: impl Into<ParamValue>) -> Result<Self> {
        if !self.algorithm.known_keys().contains(&key) {
            return Err(Error::UnknownHyperparam { algorithm: self.algorithm.to_string(), key: key.to_string() });
        }
        self.hyperparams.insert(key.to_string(), value.into());
        self.params()?;
        Ok(self)
    }

    pub fn hyperparams(&self) -> &BTreeMap<String, ParamValue> {
        &self.hyperparams
    }

    /// Typed hyperparameters: defaults overlaid with the explicit values.
    pub fn params(&self) -> Result<Params> {
        for key in self.hyperparams.keys() {
            if !self.algorithm.known_keys().contains(&key.as_str()) {
                return Err(Error::UnknownHyperparam { algorithm: self.algorithm.to_string(), key: key.clone() });
            }
        }
        let h = &self.hyperparams;
        Ok(match self.algorithm {
            Algorithm::NaiveBayes => {
                let mut p = NaiveBayesParams::default();
                if let Some(v) = h.get("alpha") {
                    p.alpha = nonneg_f64("alpha", v)?;
                }
                Params::NaiveBayes(p)
            }
            Algorithm::LogisticRegression => {
                let mut p = LogisticParams::default();
                if let Some(v) = h.get("strength") {
                    p.strength = nonneg_f64("strength", v)?;
                }
                if let Some(v) = h.get("tolerance") {
                    p.tolerance = positive_f64("tolerance", v)?;
                }
                if let Some(v) = h.get("max_iter") {
                    p.max_iter = positive_usize("max_iter", v)?;
                }
                Params::LogisticRegression(p)
            }
            Algorithm::RandomForest => {
                let mut p = ForestParams::default();
                if let Some(v) = h.get("n_trees") {
                    p.n_trees = positive_usize("n_trees", v)?;
                }
                if let Some(v) = h.get("max_features") {
                    p.max_features = match v {
                        ParamValue::Text(s) if s == "sqrt" => MaxFeatures::Sqrt,
                        ParamValue::Text(s) if s == "all" => MaxFeatures::All,
                        other => MaxFeatures::Count(positive_usize("max_features", other)?),
                    };
                }
                if let Some(v) = h.get("max_depth") {
                    p.max_depth = match v {
                        ParamValue::Text(s) if s == "none" => None,
                        other => Some(positive_usize("max_depth", other)?),
                    };
                }
                if let Some(v) = h.get("min_leaf") {
                    p.min_leaf = positive_usize("min_leaf", v)?;
                }
                if let Some(v) = h.get("bootstrap") {
                    p.bootstrap = match v {
                        ParamValue::Bool(b) => *b,
                        _ => return Err(invalid("bootstrap", "expected true or false")),
                    };
                }
                Params::RandomForest(p)
            }
            Algorithm::Svm => {
                let mut p = SvmParams::default();
                if let Some(v) = h.get("strength") {
                    p.strength = positive_f64("strength", v)?;
                }
                if let Some(v) = h.get("epochs") {
                    p.epochs = positive_usize("epochs", v)?;
                }
                Params::Svm(p)
            }
        })
    }
}

fn invalid(key: &str, reason: &str) -> Error {
    Error::InvalidHyperparam { key: key.to_string(), reason: reason.to_string() }
}

fn as_f64(key: &str, v: &ParamValue) -> Result<f64> {
    let x = match v {
        ParamValue::Int(i) => *i as f64,
        ParamValue::Float(x) => *x,
        _ => return Err(invalid(key, "expected a number")),
    };
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn nonneg_f64(key: &str, v: &ParamValue) -> Result<f64> {
    let x = as_f64(key, v)?;
    if x < 0.0 {
        return Err(invalid(key, "must be >= 0"));
    }
    Ok(x)
}

fn positive_f64(key: &str, v: &ParamValue) -> Result<f64> {
    let x = as_f64(key, v)?;
    if x <= 0.0 {
        return Err(invalid(key, "must be > 0"));
    }
    Ok(x)
}

fn positive_usize(key: &str, v: &ParamValue) -> Result<usize> {
    match v {
        ParamValue::Int(i) if *i >= 1 => Ok(*i as usize),
        _ => Err(invalid(key, "expected an integer >= 1")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_rejected() {
        let err = ModelSpec::new(Algorithm::NaiveBayes).with_param("n_trees", 5usize).unwrap_err();
        assert!(matches!(err, Error::UnknownHyperparam { .. }));
        let json = r#"{"algorithm":"svm","hyperparams":{"alpha":1.0},"rng_seed":3}"#;
        assert!(serde_json::from_str::<ModelSpec>(json).is_err());
    }

    #[test]
    fn bad_values_rejected() {
        let rf = ModelSpec::new(Algorithm::RandomForest);
        assert!(rf.clone().with_param("n_trees", 0usize).is_err());
        assert!(rf.clone().with_param("bootstrap", 1usize).is_err());
        assert!(rf.with_param("max_features", "half").is_err());
        assert!(ModelSpec::new(Algorithm::NaiveBayes).with_param("alpha", -1.0).is_err());
    }

    #[test]
    fn defaults() {
        match ModelSpec::new(Algorithm::RandomForest).params().unwrap() {
            Params::RandomForest(p) => {
                assert_eq!(p.n_trees, 100);
                assert_eq!(p.max_features, MaxFeatures::Sqrt);
                assert_eq!(p.max_depth, None);
                assert_eq!(p.min_leaf, 1);
                assert!(p.bootstrap);
            }
            _ => unreachable!(),
        }
        match ModelSpec::new(Algorithm::LogisticRegression).params().unwrap() {
            Params::LogisticRegression(p) => assert_eq!((p.strength, p.tolerance, p.max_iter), (1.0, 1e-6, 5000)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn spec_round_trips() {
        let spec = ModelSpec::new(Algorithm::RandomForest)
            .with_seed(9)
            .with_param("max_features", "all")
            .unwrap()
            .with_param("bootstrap", false)
            .unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ModelSpec>(&json).unwrap(), spec);
        assert_eq!("rf".parse::<Algorithm>().unwrap(), Algorithm::RandomForest);
    }
}
