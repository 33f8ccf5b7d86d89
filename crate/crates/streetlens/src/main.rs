use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use streetlens::config::Config;
use streetlens::fixtures::{write_fixtures, Fixtures};
use streetlens::io::{corpus_to_jsonl, read_corpus, write_file};
use streetlens::labels::LabelLog;
use streetlens::service::{self, AppState};
use streetlens::synth::{self, SynthConfig};
use streetlens::triage::{decide, Decision, Evidence, EvidenceSources, QueueFilter, TriageItem, TriageQueue};
use streetlens::{model_file, Error};
use streetlens_core::analysis::{self, Comparison};
use streetlens_core::clients::MediaSource;
use streetlens_core::corpus::{CapPolicy, CorpusSnapshot, DiscoveryMethod, DiscoveryQuery, Label};
use streetlens_core::eval::{cross_validate, summary_tsv, CvConfig, EvalReport};
use streetlens_core::features::{Block, BlockSet, DocContext, FusionMode, ProfileDoc};
use streetlens_core::models::{Algorithm, ModelSpec, ParamValue};
use streetlens_core::scoring::{fit_artifact, score_docs};
use streetlens_core::textprep::TextPipeline;

const DEFAULT_CONFIG: &str = "streetlens.toml";

#[derive(Parser)]
#[command(name = "streetlens", version, about = "Curate, analyze, and classify social-media profile corpora")]
struct Cli {
    /// TOML configuration file; defaults to ./streetlens.toml when present
    #[arg(long, global = true, env = "STREETLENS_CONFIG")]
    config: Option<PathBuf>,
    /// Seed for fold assignment, learners, and the generator
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory holding image_tags.jsonl, videos.jsonl, geocode.jsonl
    #[arg(long, global = true)]
    fixtures_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus file and optionally write it in canonical form
    Ingest {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "reject")]
        cap_policy: CapPolicy,
    },
    /// List candidate profiles by seed terms, retweets, or follow edges
    Discover {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        method: DiscoveryMethod,
        /// Seed terms or profile ids, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        /// Also match the spelling variants of each seed term
        #[arg(long)]
        variants: bool,
        #[arg(long)]
        limit: Option<usize>,
        /// Return every match
        #[arg(long, conflicts_with = "limit")]
        no_limit: bool,
    },
    /// Per-class corpus statistics as TSV
    Analyze {
        #[command(flatten)]
        data: DataArgs,
        /// top_terms, curse_rate, emoji, chains, or youtube
        stat: String,
        #[arg(long, default_value = "T")]
        block: Block,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = synth::COP)]
        a: String,
        #[arg(long, default_value = synth::PISTOL)]
        b: String,
        #[arg(long, value_delimiter = ',')]
        keywords: Option<Vec<String>>,
        /// Print JSON instead of TSV
        #[arg(long)]
        json: bool,
    },
    /// Fit a model on every eligible labeled profile and save it
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified k-fold cross-validation
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Write the full JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the per-fold table instead of the summary row
        #[arg(long)]
        folds: bool,
        /// Run every algorithm on each single block and on all blocks
        /// under both fusion modes, printing one summary table
        #[arg(long)]
        table: bool,
    },
    /// Score unlabeled profiles with a saved model
    Score {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        include_labeled: bool,
        /// Write JSONL predictions here instead of a TSV to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Work the verification queue from the command line
    Triage {
        #[command(flatten)]
        data: DataArgs,
        #[command(subcommand)]
        action: TriageAction,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with planted class signals
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 60)]
        gang: usize,
        #[arg(long, default_value_t = 300)]
        nongang: usize,
        #[arg(long, default_value_t = 0)]
        unlabeled: usize,
        #[arg(long, default_value_t = 0.0)]
        missing_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
}

#[derive(Subcommand)]
enum TriageAction {
    /// Show the highest-scoring pending profile
    Next {
        #[arg(long)]
        model: PathBuf,
    },
    /// List the queue
    List {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[arg(long)]
        min_score: Option<f64>,
    },
    /// Record a label in the label log
    Label {
        profile_id: String,
        label: Label,
        #[arg(long)]
        annotator: String,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Corpus file; defaults to the config's `corpus`
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Label log replayed over the corpus; defaults to the config's `label_log`
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "random_forest")]
    algorithm: Algorithm,
    /// Feature blocks, e.g. `TPEIY`, `T,E`, or `all`
    #[arg(long, default_value = "all")]
    blocks: BlockSet,
    #[arg(long, default_value = "model1")]
    mode: FusionMode,
    /// Hyperparameter as key=value; repeatable
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).ok_or(format!("`{s}` is not key=value"))
}

fn param_value(raw: &str) -> ParamValue {
    if let Ok(i) = raw.parse::<i64>() {
        ParamValue::Int(i)
    } else if let Ok(f) = raw.parse::<f64>() {
        ParamValue::Float(f)
    } else if let Ok(b) = raw.parse::<bool>() {
        ParamValue::Bool(b)
    } else {
        ParamValue::Text(raw.to_string())
    }
}

struct Env {
    config: Config,
    seed: u64,
}

impl Env {
    fn spec(&self, args: &ModelArgs, algorithm: Algorithm) -> anyhow::Result<ModelSpec> {
        let mut spec = ModelSpec::new(algorithm).with_seed(self.seed);
        for (k, v) in &args.params {
            spec = spec.with_param(k, param_value(v))?;
        }
        Ok(spec)
    }

    fn corpus(&self, data: &DataArgs) -> anyhow::Result<CorpusSnapshot> {
        let path = data.corpus.as_ref().or(self.config.corpus.as_ref()).context("no corpus: pass --corpus or set `corpus` in the config")?;
        let snapshot = read_corpus(path, self.config.cap_policy)?.snapshot;
        Ok(match self.label_log(data) {
            Some(log) => log.replay_onto(&snapshot)?.0,
            None => snapshot,
        })
    }

    fn label_log(&self, data: &DataArgs) -> Option<LabelLog> {
        data.labels.as_ref().or(self.config.label_log.as_ref()).map(LabelLog::open)
    }

    fn pipeline(&self) -> anyhow::Result<TextPipeline> {
        Ok(self.config.pipeline()?)
    }

    fn docs(&self, corpus: &CorpusSnapshot, pipeline: &TextPipeline, media: &dyn MediaSource) -> Vec<ProfileDoc> {
        let ctx = DocContext::new(pipeline, media).with_comment_cap(self.config.features.comment_cap);
        corpus.iter().map(|p| ctx.build(p)).collect()
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let default_path = PathBuf::from(DEFAULT_CONFIG);
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None if default_path.is_file() => Config::load(&default_path)?,
        None => Config::default(),
    };
    if let Some(dir) = cli.fixtures_dir {
        config.fixtures_dir = Some(dir);
    }
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let env = Env { config, seed };

    match cli.command {
        Command::Ingest { input, out, cap_policy } => {
            let ingested = read_corpus(&input, cap_policy)?;
            if let Some(out) = out {
                write_file(&out, &corpus_to_jsonl(&ingested.snapshot))?;
            }
            let report = serde_json::json!({
                "profiles": ingested.snapshot.len(),
                "counts": ingested.snapshot.counts(),
                "warnings": ingested.warnings,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Discover { data, method, seeds, variants, limit, no_limit } => {
            let corpus = env.corpus(&data)?;
            let mut query = DiscoveryQuery::new(method, seeds).with_variants(variants);
            if no_limit {
                query = query.with_limit(None);
            } else if limit.is_some() {
                query = query.with_limit(limit);
            }
            for id in corpus.discover_candidates(&query, &env.config.variants()?)? {
                println!("{id}");
            }
        }
        Command::Analyze { data, stat, block, k, a, b, keywords, json } => {
            let corpus = env.corpus(&data)?;
            let k = k.unwrap_or(env.config.analysis.top_k);
            let (value, tsv) = match stat.as_str() {
                "top_terms" => {
                    let pipeline = env.pipeline()?;
                    let media = env.config.media()?;
                    let docs = env.docs(&corpus, &pipeline, media.as_ref());
                    let cmp = Comparison::compute(|c| analysis::top_terms(&docs, c, block, k));
                    (serde_json::to_value(&cmp)?, analysis::top_terms_tsv(&cmp))
                }
                "curse_rate" => {
                    let lexicon = env.config.curse_lexicon()?;
                    let cmp = Comparison::try_compute(|c| analysis::curse_rate(&corpus, c, &lexicon))?;
                    (serde_json::to_value(&cmp)?, analysis::curse_rate_tsv(&cmp))
                }
                "emoji" => {
                    let cmp = Comparison::compute(|c| analysis::emoji_stats(&corpus, c, Some(k)));
                    (serde_json::to_value(&cmp)?, analysis::emoji_stats_tsv(&cmp))
                }
                "chains" => {
                    let cmp = Comparison::compute(|c| analysis::chain_cooccurrence(&corpus, c, &a, &b));
                    (serde_json::to_value(&cmp)?, analysis::chain_cooccurrence_tsv(&a, &b, &cmp))
                }
                "youtube" => {
                    let media = env.config.media()?;
                    let keywords = keywords.unwrap_or_else(|| env.config.analysis.youtube_keywords.clone());
                    let cmp = Comparison::compute(|c| analysis::youtube_stats(&corpus, c, &keywords, media.as_ref()));
                    (serde_json::to_value(&cmp)?, analysis::youtube_stats_tsv(&cmp))
                }
                other => bail!("unknown statistic `{other}`; expected top_terms, curse_rate, emoji, chains, youtube"),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                print!("{tsv}");
            }
        }
        Command::Train { data, model, out } => {
            let corpus = env.corpus(&data)?;
            let pipeline = env.pipeline()?;
            let media = env.config.media()?;
            let docs = env.docs(&corpus, &pipeline, media.as_ref());
            let spec = env.spec(&model, model.algorithm)?;
            let artifact = fit_artifact(&docs, &spec, model.blocks, model.mode, env.config.features.min_df)?;
            model_file::save(&out, &artifact)?;
            log::info!(
                "{} on {} ({}): {} columns, fingerprint {}",
                spec.algorithm,
                model.blocks.table_name(),
                model.mode,
                artifact.vocabulary.dim(),
                artifact.vocabulary.fingerprint()
            );
        }
        Command::Cv { data, model, k, out, folds, table } => {
            let corpus = env.corpus(&data)?;
            let pipeline = env.pipeline()?;
            let media = env.config.media()?;
            let docs = env.docs(&corpus, &pipeline, media.as_ref());
            let config_for = |spec: ModelSpec, blocks: BlockSet, mode: FusionMode| {
                let mut c = CvConfig::new(spec, blocks, mode);
                c.k = k;
                c.min_df = env.config.features.min_df;
                c.rng_seed = env.seed;
                c
            };
            let mut reports: Vec<EvalReport> = Vec::new();
            if table {
                let mut runs: Vec<(BlockSet, FusionMode)> =
                    Block::ALL.iter().map(|b| (BlockSet::single(*b), FusionMode::Model1)).collect();
                runs.push((BlockSet::ALL, FusionMode::Model1));
                runs.push((BlockSet::ALL, FusionMode::Model2));
                for (blocks, mode) in runs {
                    for alg in Algorithm::ALL {
                        let spec = env.spec(&model, alg)?;
                        match cross_validate(&docs, &config_for(spec, blocks, mode)) {
                            Ok(r) => reports.push(r),
                            Err(e) => log::warn!("{} {alg}: skipped: {e}", blocks.table_name()),
                        }
                    }
                }
            } else {
                let spec = env.spec(&model, model.algorithm)?;
                reports.push(cross_validate(&docs, &config_for(spec, model.blocks, model.mode))?);
            }
            if let Some(out) = out {
                let body = if reports.len() == 1 {
                    serde_json::to_string_pretty(&reports[0])?
                } else {
                    serde_json::to_string_pretty(&reports)?
                };
                write_file(&out, &(body + "\n"))?;
            }
            if folds && reports.len() == 1 {
                print!("{}", reports[0].folds_tsv());
            } else {
                print!("{}", summary_tsv(&reports));
            }
        }
        Command::Score { data, model, include_labeled, out } => {
            let corpus = env.corpus(&data)?;
            let artifact = model_file::load(&model)?;
            let pipeline = env.pipeline()?;
            let media = env.config.media()?;
            let docs = env.docs(&corpus, &pipeline, media.as_ref());
            let scored = score_docs(&artifact, &docs, include_labeled)?;
            match out {
                Some(out) => {
                    let lines: String =
                        scored.iter().map(|s| serde_json::to_string(s).expect("serializes") + "\n").collect();
                    write_file(&out, &lines)?;
                }
                None => {
                    println!("profile_id\tscore\tlabel\tpartial_features");
                    for s in &scored {
                        println!("{}\t{:.6}\t{}\t{}", s.profile_id, s.prediction.score, s.prediction.label, s.partial_features);
                    }
                }
            }
        }
        Command::Triage { data, action } => triage(&env, &data, action)?,
        Command::Serve { bind, corpus, labels, model } => {
            let mut config = env.config.clone();
            config.corpus = corpus.or(config.corpus);
            config.label_log = labels.or(config.label_log);
            config.service.model = model.or(config.service.model);
            let bind = bind.unwrap_or_else(|| config.service.bind.clone());
            let state = Arc::new(AppState::from_config(&config)?);
            tokio::runtime::Runtime::new()?.block_on(service::serve(state, &bind))?;
        }
        Command::Synth { out_dir, gang, nongang, unlabeled, missing_rate, noise } => {
            if !(0.0..=1.0).contains(&missing_rate) || !(0.0..=1.0).contains(&noise) {
                bail!("--missing-rate and --noise must lie in [0, 1]");
            }
            let cfg = SynthConfig { gang, nongang, unlabeled, missing_rate, block_noise: noise, seed: env.seed };
            let generated = synth::generate(&cfg);
            write_synth(&out_dir, &generated.corpus, &generated.fixtures)?;
            println!("{}", out_dir.join("streetlens.toml").display());
        }
    }
    Ok(())
}

fn write_synth(dir: &Path, corpus: &CorpusSnapshot, fixtures: &Fixtures) -> Result<(), Error> {
    write_file(&dir.join("corpus.jsonl"), &corpus_to_jsonl(corpus))?;
    write_fixtures(&dir.join("fixtures"), fixtures)?;
    write_file(
        &dir.join("streetlens.toml"),
        "corpus = \"corpus.jsonl\"\nlabel_log = \"labels.jsonl\"\nfixtures_dir = \"fixtures\"\n\n[service]\nmodel = \"model.json\"\n",
    )
}

fn triage(env: &Env, data: &DataArgs, action: TriageAction) -> anyhow::Result<()> {
    let corpus = env.corpus(data)?;
    match action {
        TriageAction::Label { profile_id, label, annotator } => {
            if label == Label::Unlabeled {
                bail!("label must be gang, nongang, or unsure");
            }
            let log = env.label_log(data).unwrap_or_else(|| LabelLog::open("labels.jsonl"));
            let current = corpus.get(&profile_id).with_context(|| format!("unknown profile `{profile_id}`"))?.label;
            match decide(current, label) {
                Decision::Conflict => bail!("profile `{profile_id}` is already labeled {current}"),
                Decision::Unchanged => println!("{profile_id}\t{current}\tunchanged"),
                Decision::Apply => {
                    let (_, event) = log.record(&corpus, &profile_id, label, &annotator)?;
                    println!("{profile_id}\t{}\trecorded\t{}", event.new_label, log.path().display());
                }
            }
        }
        TriageAction::Next { model } => {
            let queue = build_queue(env, &corpus, &model)?;
            match queue.next() {
                Some(item) => println!("{}", serde_json::to_string_pretty(item)?),
                None => println!("no pending items"),
            }
        }
        TriageAction::List { model, offset, limit, min_score } => {
            let queue = build_queue(env, &corpus, &model)?;
            let page = queue.page(&QueueFilter { min_score, ..QueueFilter::default() }, offset, limit);
            println!("rank\tprofile_id\tscore\tpredicted\tpartial_features");
            for (i, item) in page.items.iter().enumerate() {
                println!(
                    "{}\t{}\t{:.6}\t{}\t{}",
                    offset + i + 1,
                    item.profile_id,
                    item.score,
                    item.predicted,
                    item.partial_features
                );
            }
            eprintln!("{} of {} pending items", page.items.len(), page.total);
        }
    }
    Ok(())
}

fn build_queue(env: &Env, corpus: &CorpusSnapshot, model: &Path) -> anyhow::Result<TriageQueue> {
    let artifact = model_file::load(model)?;
    let pipeline = env.pipeline()?;
    let media = env.config.media()?;
    let docs = env.docs(corpus, &pipeline, media.as_ref());
    let scored = score_docs(&artifact, &docs, false)?;
    let keywords = &env.config.analysis.youtube_keywords;
    let src = EvidenceSources { media: media.as_ref(), keywords, terms_per_block: 10 };
    let items = scored
        .iter()
        .filter_map(|s| {
            let record = corpus.get(&s.profile_id)?;
            let doc = docs.iter().find(|d| d.profile_id == s.profile_id)?;
            Some(TriageItem::new(s, record.provenance, Evidence::collect(record, doc, &artifact, src)))
        })
        .collect();
    Ok(TriageQueue::new(items))
}
