//! Synthetic corpora with planted, class-disjoint signals in every block.
//!
//! Each labeled profile draws every block from its own class's pools: tweet
//! words (T), description words (P), emoji (E, gang tweets also carry the
//! police-then-pistol chain), profile-image tags (I), and linked-video
//! descriptions (Y). Per-block noise replaces a block's source class with a
//! fair coin flip, so a block degraded at rate `r` still reflects the true
//! class with probability `1 - r/2`. Blocks other than T may be dropped to
//! plant missing features.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use streetlens_core::clients::{GeocodeResult, ImageTags, ScoredTag, VideoMetadata};
use streetlens_core::corpus::{ClassLabel, CorpusSnapshot, Label, ProfileRecord, Provenance, TweetRecord};
use streetlens_core::features::{Block, BlockSet};

use crate::fixtures::Fixtures;

const T_GANG: &[&str] = &[
    "opp", "glock", "trap", "drill", "smoke", "strap", "plug", "pack", "hood", "lick", "slide", "pole", "shooter",
    "savage", "brick", "bando", "stick", "rack",
];
const T_NONGANG: &[&str] = &[
    "school", "class", "game", "family", "church", "coffee", "movie", "beach", "soccer", "garden", "recipe", "piano",
    "library", "exam", "puppy", "vacation", "sunset", "choir",
];
const T_SHARED: &[&str] = &["today", "night", "friend", "love", "life", "time", "people", "good", "work", "home"];

const P_GANG: &[&str] = &["hustle", "mob", "loyalty", "money", "street", "rip", "free", "gang"];
const P_NONGANG: &[&str] = &["student", "teacher", "mom", "runner", "artist", "nurse", "coach", "writer"];

const E_GANG: &[&str] = &["🔫", "⛽", "💯", "😤", "💰", "💨"];
const E_NONGANG: &[&str] = &["😂", "😍", "🎉", "🌸", "🌞", "🍕"];
pub const COP: &str = "👮";
pub const PISTOL: &str = "🔫";

const I_GANG: &[&str] = &["trigger", "gun", "weapon", "bullet", "cash", "tattoo", "chain", "hoodie"];
const I_NONGANG: &[&str] = &["dog", "cake", "flower", "landscape", "sport", "smile", "ocean", "bicycle"];

const Y_GANG: &[&str] = &["gangsta", "drill", "diss", "freestyle", "rap", "hip-hop", "street", "beef"];
const Y_NONGANG: &[&str] = &["tutorial", "cooking", "vlog", "travel", "worship", "makeup", "unboxing", "review"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub gang: usize,
    pub nongang: usize,
    /// Profiles left unlabeled, class drawn with the labeled class ratio.
    pub unlabeled: usize,
    /// Chance that each of P, E, I and Y is dropped from a profile.
    pub missing_rate: f64,
    /// Chance that a block's content comes from a random class instead of
    /// the profile's own.
    pub block_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { gang: 60, nongang: 300, unlabeled: 0, missing_rate: 0.0, block_noise: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: CorpusSnapshot,
    pub fixtures: Fixtures,
    /// True class of every generated profile, labeled or not.
    pub truth: BTreeMap<String, ClassLabel>,
    /// Blocks deliberately present in each profile.
    pub planted: BTreeMap<String, BlockSet>,
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], n: usize) -> Vec<&'a str> {
    (0..n).map(|_| *pool.choose(rng).expect("pools are nonempty")).collect()
}

fn source(rng: &mut ChaCha8Rng, class: ClassLabel, noise: f64) -> bool {
    if rng.gen::<f64>() < noise {
        rng.gen::<bool>()
    } else {
        class.is_gang()
    }
}

pub fn generate(cfg: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = SynthCorpus {
        corpus: CorpusSnapshot::default(),
        fixtures: Fixtures::default(),
        truth: BTreeMap::new(),
        planted: BTreeMap::new(),
    };
    out.fixtures.geocode.insert("chicago, il", GeocodeResult::Us);

    let gang_share = cfg.gang as f64 / (cfg.gang + cfg.nongang).max(1) as f64;
    let mut records = Vec::new();
    let total = cfg.gang + cfg.nongang + cfg.unlabeled;
    for i in 0..total {
        let (class, label) = if i < cfg.gang {
            (ClassLabel::Gang, Label::Gang)
        } else if i < cfg.gang + cfg.nongang {
            (ClassLabel::NonGang, Label::Nongang)
        } else if rng.gen::<f64>() < gang_share {
            (ClassLabel::Gang, Label::Unlabeled)
        } else {
            (ClassLabel::NonGang, Label::Unlabeled)
        };
        let id = format!("s{i:05}");
        let mut present = BlockSet::single(Block::T);
        for b in [Block::P, Block::E, Block::I, Block::Y] {
            if rng.gen::<f64>() >= cfg.missing_rate {
                present.insert(b);
            }
        }
        let record = profile(&mut rng, &id, class, label, present, cfg.block_noise, &mut out.fixtures);
        out.truth.insert(id.clone(), class);
        out.planted.insert(id, present);
        records.push(record);
    }
    out.corpus = CorpusSnapshot::from_records(records).expect("generated ids are unique");
    out
}

fn profile(
    rng: &mut ChaCha8Rng,
    id: &str,
    class: ClassLabel,
    label: Label,
    present: BlockSet,
    noise: f64,
    fx: &mut Fixtures,
) -> ProfileRecord {
    let mut p = ProfileRecord::new(id);
    p.label = label;
    p.provenance = Provenance::StreamSample;
    p.location_raw = "Chicago, IL".into();

    let t_gang = source(rng, class, noise);
    let e_gang = source(rng, class, noise);
    let mut tweets: Vec<String> = (0..4)
        .map(|_| {
            let mut words = pick(rng, if t_gang { T_GANG } else { T_NONGANG }, 3);
            words.extend(pick(rng, T_SHARED, 2));
            words.join(" ")
        })
        .collect();
    if present.contains(Block::E) {
        let pool = if e_gang { E_GANG } else { E_NONGANG };
        for (n, tweet) in tweets.iter_mut().enumerate() {
            tweet.push(' ');
            if n == 0 && e_gang {
                tweet.push_str(COP);
                tweet.push_str(PISTOL);
            } else {
                tweet.push_str(pick(rng, pool, 1)[0]);
            }
        }
    }
    if present.contains(Block::Y) {
        let video_id = format!("v{:010}", id[1..].parse::<u32>().unwrap_or(0));
        tweets.push(format!("new video https://youtu.be/{video_id}"));
        let pool = if source(rng, class, noise) { Y_GANG } else { Y_NONGANG };
        let description = pick(rng, pool, 4).join(" ");
        let comments = (0..3).map(|_| pick(rng, pool, 2).join(" ")).collect();
        fx.media.videos.insert(VideoMetadata { video_id, description, comments });
    }
    p.tweets =
        tweets.into_iter().enumerate().map(|(n, text)| TweetRecord::new(format!("{id}-t{n}"), text)).collect();

    if present.contains(Block::P) {
        let pool = if source(rng, class, noise) { P_GANG } else { P_NONGANG };
        p.description = pick(rng, pool, 3).join(" ");
    }
    if present.contains(Block::I) {
        let pool = if source(rng, class, noise) { I_GANG } else { I_NONGANG };
        let media_ref = format!("img/{id}");
        let mut terms = pool.to_vec();
        terms.shuffle(rng);
        let tags = terms.iter().take(5).enumerate().map(|(n, t)| ScoredTag::new(t, 0.95 - 0.1 * n as f64)).collect();
        fx.media.images.insert(ImageTags::new(&media_ref, tags).expect("five valid tags"));
        p.profile_image_ref = Some(media_ref);
    }
    p
}
