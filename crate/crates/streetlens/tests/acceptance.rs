//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "../../core/tests/support/tree_oracle.rs"]
mod tree_oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streetlens::config::Config;
use streetlens::core::analysis::{chain_cooccurrence, curse_rate, emoji_stats, youtube_stats};
use streetlens::core::clients::{FixtureMedia, MediaSource, VideoFixtures};
use streetlens::core::corpus::{ClassLabel, CorpusSnapshot, ProfileRecord, TweetRecord};
use streetlens::core::eval::{compute_metrics, cross_validate, eligible, stratified_kfold, CvConfig, EvalReport};
use streetlens::core::features::{
    assemble_vector, build_vocabulary, Block, BlockSet, DocContext, FeatureVector, FusionMode, MinDf, ProfileDoc,
};
use streetlens::core::models::{
    self, forest, Algorithm, ForestParams, MaxFeatures, ModelParams, ModelSpec, Prediction, TrainingSet,
};
use streetlens::core::scoring::fit_artifact;
use streetlens::core::Fingerprint;
use streetlens::model_file;
use streetlens::synth::{generate, SynthConfig, SynthCorpus, COP, PISTOL};

use ClassLabel::{Gang as G, NonGang as N};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "metric formulas", budget: Some(Duration::from_secs(1)), run: metric_formulas },
        Criterion { name: "naive bayes hand oracle", budget: None, run: naive_bayes_hand_oracle },
        Criterion { name: "logistic gradient check", budget: Some(Duration::from_secs(5)), run: logistic_gradient },
        Criterion { name: "forest vs tree oracle", budget: Some(Duration::from_secs(10)), run: forest_vs_tree_oracle },
        Criterion { name: "svm separability", budget: None, run: svm_separability },
        Criterion { name: "stratification", budget: None, run: stratification },
        Criterion { name: "model1/model2 semantics", budget: None, run: fusion_semantics },
        Criterion { name: "end-to-end synthetic pipeline", budget: Some(Duration::from_secs(60)), run: end_to_end },
        Criterion { name: "analysis oracle equality", budget: None, run: analysis_oracles },
        Criterion { name: "determinism", budget: None, run: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(budget)) if elapsed > budget => Err(format!("took {elapsed:.2?}, budget {budget:.0?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS  {:<30} {detail} [{elapsed:.2?}]", c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<30} {why} [{elapsed:.2?}]", c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 straight from the definitions, 0/0 as 0.
fn direct_formula(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let p = ratio(tp, tp + fp);
    let r = ratio(tp, tp + fn_);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

fn metric_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut degenerate = 0;
    for i in 0..25 {
        let mut c: [u64; 4] = [0; 4].map(|_| rng.gen_range(0..40));
        match i % 5 {
            0 => (c[0], c[1]) = (0, 0),
            1 => (c[0], c[3]) = (0, 0),
            2 => (c[0], c[1], c[3]) = (0, 0, 0),
            3 => c[0] = 0,
            _ => {}
        }
        let [tp, fp, tn, fn_] = c;
        let mut pairs = Vec::new();
        for (n, pred, truth) in [(tp, G, G), (fp, G, N), (tn, N, N), (fn_, N, G)] {
            pairs.extend((0..n).map(|_| (pred, truth)));
        }
        pairs.shuffle(&mut rng);
        let preds: Vec<Prediction> =
            pairs.iter().map(|(p, _)| Prediction::from_score(if *p == G { 1.0 } else { 0.0 })).collect();
        let truth: Vec<ClassLabel> = pairs.iter().map(|(_, t)| *t).collect();
        let (m, counts) = compute_metrics(&preds, &truth).map_err(|e| e.to_string())?;
        ensure!((counts.tp, counts.fp, counts.tn, counts.fn_) == (tp, fp, tn, fn_), "confusion {c:?} vs {counts:?}");
        let want_g = direct_formula(tp, fp, fn_);
        let want_n = direct_formula(tn, fn_, fp);
        let got_g = (m.gang.precision, m.gang.recall, m.gang.f1);
        let got_n = (m.nongang.precision, m.nongang.recall, m.nongang.f1);
        ensure!(got_g == want_g, "gang {c:?}: {got_g:?} vs {want_g:?}");
        ensure!(got_n == want_n, "nongang {c:?}: {got_n:?} vs {want_n:?}");
        if tp + fp == 0 || tp + fn_ == 0 || tn + fn_ == 0 || tn + fp == 0 {
            degenerate += 1;
        }
    }
    ensure!(degenerate >= 5, "only {degenerate} matrices exercise 0/0");
    Ok(format!("25 matrices exact, {degenerate} with 0/0 terms"))
}

fn counts_vector(counts: &[u32]) -> FeatureVector {
    let entries = counts.iter().enumerate().filter(|(_, &n)| n > 0).map(|(c, &n)| (c as u32, n)).collect();
    FeatureVector {
        entries,
        availability: BlockSet::ALL,
        fingerprint: Fingerprint::of_parts([b"ab".as_slice()]),
        dim: counts.len() as u32,
    }
}

fn naive_bayes_hand_oracle() -> Outcome {
    // columns a, b.  gang doc "a a b", nongang doc "b b"
    let x = [counts_vector(&[2, 1]), counts_vector(&[0, 2])];
    let model = models::train(&ModelSpec::new(Algorithm::NaiveBayes), &x, &[G, N]).map_err(|e| e.to_string())?;
    let ModelParams::NaiveBayes(nb) = &model.params else { return Err("wrong params".into()) };
    let got = [nb.likelihood(true, 0), nb.likelihood(true, 1), nb.likelihood(false, 0), nb.likelihood(false, 1)];
    ensure!(got == [0.6, 0.4, 0.25, 0.75], "likelihoods {got:?}");
    let p = model.predict(&counts_vector(&[1, 0])).map_err(|e| e.to_string())?;
    ensure!(p.label == G, "predicted {:?}", p.label);
    // 0.5*0.6 / (0.5*0.6 + 0.5*0.25) = 12/17, which is 0.706 to three places.
    let exact = 0.3 / 0.425;
    ensure!((p.score - exact).abs() < 1e-9, "score {} vs {exact}", p.score);
    ensure!(format!("{:.3}", p.score) == "0.706", "score {}", p.score);
    Ok(format!("likelihoods exact, score {:.9}", p.score))
}

/// Regularized mean log-loss computed densely, independent of the library.
fn dense_objective(rows: &[Vec<f64>], y: &[f64], strength: f64, w: &[f64], b: f64) -> f64 {
    let n = rows.len() as f64;
    let loss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, &t)| {
            let z: f64 = r.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
            softplus - t * z
        })
        .sum();
    loss / n + strength / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>()
}

fn logistic_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=20);
        let dim = rng.gen_range(1..=10);
        let strength = rng.gen_range(0.0..3.0);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<ClassLabel> = (0..n).map(|i| if i == 0 || (i > 1 && rng.gen_bool(0.5)) { G } else { N }).collect();
        let y: Vec<f64> = labels.iter().map(|l| if l.is_gang() { 1.0 } else { 0.0 }).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let data = TrainingSet::from_dense(&rows, &labels).map_err(|e| e.to_string())?;

        let ours = models::logistic::objective(&data, strength, &w, b);
        let theirs = dense_objective(&rows, &y, strength, &w, b);
        ensure!((ours - theirs).abs() <= 1e-12 * theirs.abs().max(1.0), "objective {ours} vs {theirs}");

        let h = 1e-5;
        let f = |w: &[f64], b: f64| dense_objective(&rows, &y, strength, w, b);
        let mut numeric: Vec<f64> = (0..dim)
            .map(|j| {
                let (mut up, mut down) = (w.clone(), w.clone());
                up[j] += h;
                down[j] -= h;
                (f(&up, b) - f(&down, b)) / (2.0 * h)
            })
            .collect();
        numeric.push((f(&w, b + h) - f(&w, b - h)) / (2.0 * h));
        let (gw, gb) = models::logistic::gradient(&data, strength, &w, b);
        let mut analytic = gw;
        analytic.push(gb);

        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-12);
        worst = worst.max(rel);
        ensure!(rel < 1e-4, "relative error {rel:e} (n {n}, dim {dim})");
    }
    Ok(format!("20 instances, worst relative error {worst:.1e}"))
}

fn forest_vs_tree_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let params = ForestParams { n_trees: 1, max_features: MaxFeatures::All, max_depth: None, min_leaf: 1, bootstrap: false };
    let instances = 40;
    let mut probes = 0;
    for _ in 0..instances {
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.gen_range(0..4) as f64).collect()).collect();
        for mask in 0u32..16 {
            let labels: Vec<ClassLabel> = (0..4).map(|i| if mask >> i & 1 == 1 { G } else { N }).collect();
            let data = TrainingSet::from_dense(&rows, &labels).map_err(|e| e.to_string())?;
            let ours = forest::fit(&data, &params, 0);
            let samples: Vec<(Vec<f64>, bool)> = rows.iter().cloned().zip(labels.iter().map(|l| l.is_gang())).collect();
            let oracle = tree_oracle::grow(&samples);
            for probe in (0..64).map(|k| [k / 16, k / 4 % 4, k % 4].map(|v| v as f64)) {
                let sparse: Vec<(u32, f64)> =
                    probe.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i as u32, *v)).collect();
                let got = ours.score(&sparse) == 1.0;
                ensure!(got == oracle.predicts_gang(&probe), "rows {rows:?} labels {mask:04b} probe {probe:?}");
                probes += 1;
            }
        }
    }
    Ok(format!("{instances} instances x 16 labelings, {probes} probes agree"))
}

fn svm_separability() -> Outcome {
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let norm = f64::hypot(a, b);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        while rows.len() < 60 {
            let p: [f64; 2] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let side = (a * p[0] + b * p[1] + c) / norm;
            if side.abs() < 0.4 {
                continue;
            }
            rows.push(p.to_vec());
            labels.push(if side > 0.0 { G } else { N });
        }
        let data = TrainingSet::from_dense(&rows, &labels).map_err(|e| e.to_string())?;
        let model = models::fit(&ModelSpec::new(Algorithm::Svm).with_seed(seed), &data).map_err(|e| e.to_string())?;
        let correct = data
            .rows()
            .iter()
            .zip(data.labels())
            .filter(|(r, l)| Prediction::from_score(model.score_row(r)).label == **l)
            .count();
        ensure!(correct == rows.len(), "dataset {seed}: {correct}/{}", rows.len());
    }
    Ok("5 datasets, 60/60 each".into())
}

fn stratification() -> Outcome {
    let labels: Vec<(String, ClassLabel)> =
        (0..3265).map(|i| (format!("p{i:04}"), if i % 8 == 3 && i < 3200 { G } else { N })).collect();
    let gang = labels.iter().filter(|(_, l)| l.is_gang()).count();
    ensure!(gang == 400, "fixture has {gang} gang");
    let folds = stratified_kfold(&labels, 10, 0).map_err(|e| e.to_string())?;
    let class: BTreeMap<&str, ClassLabel> = labels.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    for fold in folds.folds() {
        let g = fold.iter().filter(|id| class[*id].is_gang()).count();
        let n = fold.len() - g;
        ensure!(g == 40 && (n == 286 || n == 287), "fold counts ({g}, {n})");
        seen.extend(fold.iter().copied());
        sizes.push(n);
    }
    ensure!(seen.len() == labels.len(), "{} of {} profiles assigned", seen.len(), labels.len());
    ensure!(sizes.iter().sum::<usize>() == 2865, "nongang total {}", sizes.iter().sum::<usize>());
    Ok(format!("10 folds of (40, {}..={})", sizes.iter().min().unwrap(), sizes.iter().max().unwrap()))
}

fn docs(s: &SynthCorpus) -> Vec<ProfileDoc> {
    let pipeline = Config::default().pipeline().expect("default pipeline");
    let ctx = DocContext::new(&pipeline, &s.fixtures.media);
    s.corpus.iter().map(|p| ctx.build(p)).collect()
}

fn fusion_semantics() -> Outcome {
    let s = generate(&SynthConfig { gang: 20, nongang: 30, missing_rate: 0.3, seed: 50, ..SynthConfig::default() });
    let docs = docs(&s);
    let complete: BTreeSet<&str> =
        s.planted.iter().filter(|(_, b)| **b == BlockSet::ALL).map(|(id, _)| id.as_str()).collect();
    ensure!(!complete.is_empty() && complete.len() < docs.len(), "fixture needs both kinds, {} complete", complete.len());

    let selected: BTreeSet<&str> =
        eligible(&docs, BlockSet::ALL, FusionMode::Model2).iter().map(|d| d.profile_id.as_str()).collect();
    ensure!(selected == complete, "model2 selected {selected:?}");

    let vocab = build_vocabulary(&docs, BlockSet::ALL, MinDf::uniform(1)).map_err(|e| e.to_string())?;
    let mut zeroed = 0;
    for doc in &docs {
        let one = assemble_vector(doc, &vocab, FusionMode::Model1).ok_or("model1 dropped a profile")?;
        let two = assemble_vector(doc, &vocab, FusionMode::Model2);
        let planted = s.planted[&doc.profile_id];
        if complete.contains(doc.profile_id.as_str()) {
            let two = two.ok_or_else(|| format!("{} missing under model2", doc.profile_id))?;
            ensure!(one.to_dense() == two.to_dense(), "{} differs between modes", doc.profile_id);
        } else {
            ensure!(two.is_none(), "{} kept by model2", doc.profile_id);
            let dense = one.to_dense();
            for block in Block::ALL.into_iter().filter(|b| !planted.contains(*b)) {
                let range = vocab.block_range(block);
                let bad = range.clone().filter(|&c| dense[c as usize] != 0.0).count();
                ensure!(bad == 0, "{} has {bad} nonzero columns in missing {block:?}", doc.profile_id);
                zeroed += range.len();
            }
        }
    }
    Ok(format!("{} complete of {}, {zeroed} zero columns checked", complete.len(), docs.len()))
}

fn gang_f1(docs: &[ProfileDoc], alg: Algorithm, blocks: BlockSet) -> Result<f64, String> {
    let cfg = CvConfig::new(ModelSpec::new(alg), blocks, FusionMode::Model2);
    cross_validate(docs, &cfg).map(|r| r.mean.gang.f1).map_err(|e| e.to_string())
}

fn end_to_end() -> Outcome {
    let clean = docs(&generate(&SynthConfig { seed: 1, ..SynthConfig::default() }));
    ensure!(clean.len() == 360, "{} profiles", clean.len());
    let f1 = gang_f1(&clean, Algorithm::RandomForest, BlockSet::ALL)?;
    ensure!(f1 >= 0.95, "clean gang F1 {f1:.3}");

    let noisy = docs(&generate(&SynthConfig { block_noise: 0.5, seed: 1, ..SynthConfig::default() }));
    let all = gang_f1(&noisy, Algorithm::RandomForest, BlockSet::ALL)?;
    let mut singles = Vec::new();
    for block in Block::ALL {
        let single = gang_f1(&noisy, Algorithm::RandomForest, BlockSet::single(block))?;
        ensure!(all > single, "all-features {all:.3} not above {block:?} {single:.3}");
        singles.push(format!("{block:?} {single:.3}"));
    }
    Ok(format!("clean F1 {f1:.3}; noisy all {all:.3} > {}", singles.join(", ")))
}

const KEYWORDS: [&str; 8] = ["gangsta", "drill", "diss", "freestyle", "rap", "hip-hop", "street", "beef"];

/// 50 profiles with curse words, hashtags, mentions, longer emoji chains,
/// repeated and unresolvable video links on top of the synthetic content.
fn analysis_fixture() -> (CorpusSnapshot, FixtureMedia) {
    let s = generate(&SynthConfig {
        gang: 20,
        nongang: 25,
        unlabeled: 5,
        missing_rate: 0.25,
        block_noise: 0.3,
        seed: 90,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let extras = [
        "Damn, that SHIT hit! #damn @shitposter",
        "fuckin 👮 🔫 then 👮🔫🔫 and 💯💯",
        "cops 👮 are 🔫 not a chain",
        "no curse here, just 😂🌸",
        "watch https://youtu.be/zzzzzzzzzzz again",
        "bitch-ass weather 💨⛽👮",
    ];
    let mut records: Vec<ProfileRecord> = Vec::new();
    for (i, p) in s.corpus.iter().enumerate() {
        let mut p = p.clone();
        for (k, text) in extras.iter().enumerate() {
            if rng.gen_bool(0.4) {
                p.tweets.push(TweetRecord::new(format!("{}-x{k}", p.profile_id), *text));
            }
        }
        if i % 6 == 1 {
            let first = p.video_ids().next().map(String::from);
            if let Some(id) = first {
                let text = format!("again https://www.youtube.com/watch?v={id}&t=3");
                p.tweets.push(TweetRecord::new(format!("{}-again", p.profile_id), text));
            }
        }
        records.push(p);
    }
    let mut videos = VideoFixtures::default();
    for (i, v) in s.fixtures.media.videos.iter().enumerate() {
        if i % 4 != 0 {
            videos.insert(v.clone());
        }
    }
    let corpus = CorpusSnapshot::from_records(records).expect("unique ids");
    (corpus, FixtureMedia { images: s.fixtures.media.images.clone(), videos })
}

fn of_class(corpus: &CorpusSnapshot, class: ClassLabel) -> Vec<&ProfileRecord> {
    corpus.iter().filter(|p| p.label.class() == Some(class)).collect()
}

/// Alphanumeric runs outside URLs, hashtags and mentions, lowercased.
fn brute_words(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    for chunk in text.split_whitespace() {
        let chunk = chunk.to_lowercase();
        if ["http://", "https://", "www."].iter().any(|p| chunk.starts_with(p)) {
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if (chars[i] == '#' || chars[i] == '@') && chars.get(i + 1).is_some_and(|c| c.is_alphanumeric()) {
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
            } else if chars[i].is_alphanumeric() {
                let start = i;
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
                words.push(chars[start..i].iter().collect());
            } else {
                i += 1;
            }
        }
    }
    words
}

fn is_pictograph(c: char) -> bool {
    ('\u{1F300}'..='\u{1FAFF}').contains(&c) || ('\u{2600}'..='\u{27BF}').contains(&c)
}

/// Maximal runs of pictographs separated by nothing but whitespace.
fn brute_runs(text: &str) -> Vec<Vec<String>> {
    let mut runs = vec![Vec::new()];
    for c in text.chars() {
        if is_pictograph(c) {
            runs.last_mut().unwrap().push(c.to_string());
        } else if !c.is_whitespace() && !runs.last().unwrap().is_empty() {
            runs.push(Vec::new());
        }
    }
    runs.retain(|r| !r.is_empty());
    runs
}

fn brute_video_ids(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|chunk| {
            let start = chunk.find("youtu.be/").map(|i| i + 9).or_else(|| chunk.find("watch?v=").map(|i| i + 8))?;
            chunk.get(start..start + 11).map(String::from)
        })
        .collect()
}

fn ranked<K: Ord + Clone>(counts: &BTreeMap<K, u64>) -> Vec<(K, u64)> {
    let mut v: Vec<(K, u64)> = counts.iter().map(|(k, n)| (k.clone(), *n)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

fn analysis_oracles() -> Outcome {
    let (corpus, media) = analysis_fixture();
    ensure!(corpus.len() == 50, "{} profiles", corpus.len());
    let lexicon = Config::default().curse_lexicon().map_err(|e| e.to_string())?;
    let keywords: Vec<String> = KEYWORDS.iter().map(|k| k.to_string()).collect();
    let mut summary = Vec::new();
    for class in [G, N] {
        let members = of_class(&corpus, class);
        let name = class.as_str();

        let words: Vec<String> = members.iter().flat_map(|p| &p.tweets).flat_map(|t| brute_words(&t.text)).collect();
        let curses = words.iter().filter(|w| lexicon.contains(*w)).count() as u64;
        let got = curse_rate(&corpus, class, &lexicon).map_err(|e| e.to_string())?;
        ensure!(got.curse_tokens == curses && got.word_tokens == words.len() as u64, "{name} curse {got:?}");
        ensure!(got.rate == ratio(curses, words.len() as u64), "{name} curse rate {}", got.rate);
        ensure!(curses > 0, "{name} fixture has no curse words");

        let has_pair = |text: &str| brute_runs(text).iter().any(|r| r.windows(2).any(|w| w[0] == COP && w[1] == PISTOL));
        let with_pair = members.iter().filter(|p| p.tweets.iter().any(|t| has_pair(&t.text))).count() as u64;
        let got = chain_cooccurrence(&corpus, class, COP, PISTOL);
        ensure!(got.profiles_with_pair == with_pair && got.class_size == members.len() as u64, "{name} chain {got:?}");
        ensure!(got.fraction == ratio(with_pair, members.len() as u64), "{name} chain fraction");

        let mut emoji: BTreeMap<String, u64> = BTreeMap::new();
        let mut bigrams: BTreeMap<(String, String), u64> = BTreeMap::new();
        for t in members.iter().flat_map(|p| &p.tweets) {
            for run in brute_runs(&t.text) {
                for e in &run {
                    *emoji.entry(e.clone()).or_default() += 1;
                }
                for w in run.windows(2) {
                    *bigrams.entry((w[0].clone(), w[1].clone())).or_default() += 1;
                }
            }
        }
        let total: u64 = emoji.values().sum();
        let got = emoji_stats(&corpus, class, None);
        ensure!(got.total_tokens == total, "{name} emoji total {} vs {total}", got.total_tokens);
        let dist: Vec<(String, u64, f64)> = got.distribution.iter().map(|e| (e.emoji.clone(), e.count, e.fraction)).collect();
        let want: Vec<(String, u64, f64)> = ranked(&emoji).into_iter().map(|(e, n)| (e, n, ratio(n, total))).collect();
        ensure!(dist == want, "{name} emoji distribution {dist:?} vs {want:?}");
        let chains: Vec<((String, String), u64)> =
            got.chain_bigrams.iter().map(|b| ((b.first.clone(), b.second.clone()), b.count)).collect();
        ensure!(chains == ranked(&bigrams), "{name} chain bigrams {chains:?} vs {:?}", ranked(&bigrams));

        let (mut sharing, mut links, mut resolved, mut hits) = (0u64, 0u64, 0u64, 0u64);
        for p in &members {
            let ids: Vec<String> = p.tweets.iter().flat_map(|t| brute_video_ids(&t.text)).collect();
            if !ids.is_empty() {
                sharing += 1;
            }
            links += ids.len() as u64;
            for id in &ids {
                if let Some(v) = media.fetch_video_metadata(id) {
                    resolved += 1;
                    let d = v.description.to_lowercase();
                    if KEYWORDS.iter().any(|k| d.contains(k)) {
                        hits += 1;
                    }
                }
            }
        }
        let got = youtube_stats(&corpus, class, &keywords, &media);
        let n = members.len() as u64;
        ensure!(
            (got.class_size, got.sharing_profiles, got.total_links, got.resolved_links, got.keyword_links)
                == (n, sharing, links, resolved, hits),
            "{name} youtube {got:?}"
        );
        ensure!(
            (got.share_fraction, got.keyword_fraction, got.mean_links_per_sharing_profile)
                == (ratio(sharing, n), ratio(hits, resolved), ratio(links, sharing)),
            "{name} youtube fractions {got:?}"
        );
        ensure!(resolved < links, "{name} fixture has no unresolved links");
        summary.push(format!("{name}: {curses} curses, {with_pair} pair, {total} emoji, {links} links"));
    }
    Ok(summary.join("; "))
}

fn report_json(docs: &[ProfileDoc], alg: Algorithm, seed: u64) -> Result<String, String> {
    let mut cfg = CvConfig::new(ModelSpec::new(alg).with_seed(seed), BlockSet::ALL, FusionMode::Model1);
    cfg.rng_seed = seed;
    let report: EvalReport = cross_validate(docs, &cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let s = generate(&SynthConfig { gang: 20, nongang: 40, missing_rate: 0.2, block_noise: 0.3, seed: 12, ..SynthConfig::default() });
    let docs = docs(&s);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for alg in Algorithm::ALL {
        let a = report_json(&docs, alg, 7)?;
        ensure!(a == report_json(&docs, alg, 7)?, "{alg} cv report differs between runs");
        let spec = ModelSpec::new(alg).with_seed(7);
        let blocks: BlockSet = "TPEIY".parse().map_err(|_| "blocks")?;
        let fit = || fit_artifact(&docs, &spec, blocks, FusionMode::Model2, MinDf::uniform(1)).map_err(|e| e.to_string());
        let paths = ["a", "b", "c"].map(|n| dir.path().join(format!("{alg}-{n}.json")));
        model_file::save(&paths[0], &fit()?).map_err(|e| e.to_string())?;
        model_file::save(&paths[1], &fit()?).map_err(|e| e.to_string())?;
        let loaded = model_file::load(&paths[0]).map_err(|e| e.to_string())?;
        model_file::save(&paths[2], &loaded).map_err(|e| e.to_string())?;
        let bytes = paths.map(|p| std::fs::read(p).expect("model file"));
        ensure!(bytes[0] == bytes[1], "{alg} retraining changed the model file");
        ensure!(bytes[0] == bytes[2], "{alg} load/save changed the model file");
    }
    Ok("cv reports and model files bit-identical for all four algorithms".into())
}
