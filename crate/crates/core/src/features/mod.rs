//! Block-structured sparse term-frequency features.
//!
//! A profile is first reduced to a [`ProfileDoc`]: per-block term counts and
//! an availability mask. A [`Vocabulary`] built from training docs assigns
//! each kept term a global column, blocks laid out in the fixed order
//! T, P, E, I, Y. [`assemble_vector`] then produces a [`FeatureVector`]
//! under one of the two fusion modes.

mod doc;
mod vector;
mod vocab;

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

pub use doc::{DocContext, ProfileDoc, DEFAULT_COMMENT_CAP};
pub use vector::{assemble_vector, extract_block, FeatureVector};
pub use vocab::{build_vocabulary, BlockVocab, Vocabulary};

/// One of the five feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    /// tweet text
    T,
    /// profile description
    P,
    /// emoji
    E,
    /// image tags
    I,
    /// music interest: linked YouTube descriptions and comments
    Y,
}

impl Block {
    pub const ALL: [Block; 5] = [Block::T, Block::P, Block::E, Block::I, Block::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Block::T => 'T',
            Block::P => 'P',
            Block::E => 'E',
            Block::I => 'I',
            Block::Y => 'Y',
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Block::T => "tweet text",
            Block::P => "profile description",
            Block::E => "emoji",
            Block::I => "image tags",
            Block::Y => "youtube",
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t" | "tweets" | "tweet" => Ok(Block::T),
            "p" | "profile" | "description" => Ok(Block::P),
            "e" | "emoji" => Ok(Block::E),
            "i" | "image" | "images" => Ok(Block::I),
            "y" | "youtube" | "music" => Ok(Block::Y),
            _ => Err(Error::UnknownBlock(s.into())),
        }
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of blocks; doubles as the per-profile availability mask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BlockSet(u8);

impl BlockSet {
    pub const EMPTY: BlockSet = BlockSet(0);
    pub const ALL: BlockSet = BlockSet(0b1_1111);

    pub fn single(block: Block) -> Self {
        BlockSet(1 << block.index())
    }

    pub fn with(mut self, block: Block) -> Self {
        self.insert(block);
        self
    }

    pub fn insert(&mut self, block: Block) {
        self.0 |= 1 << block.index();
    }

    pub fn remove(&mut self, block: Block) {
        self.0 &= !(1 << block.index());
    }

    pub fn contains(self, block: Block) -> bool {
        self.0 & (1 << block.index()) != 0
    }

    pub fn is_superset(self, other: BlockSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Block> {
        Block::ALL.into_iter().filter(move |b| self.contains(*b))
    }

    /// Bit string in T,P,E,I,Y order, e.g. `10100`.
    pub fn bits(self) -> String {
        Block::ALL.iter().map(|b| if self.contains(*b) { '1' } else { '0' }).collect()
    }

    /// Display name used in report tables, e.g. `T + E + P + I + Y`.
    pub fn table_name(self) -> String {
        let mut out = String::new();
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push(b.letter());
        }
        out
    }
}

impl FromIterator<Block> for BlockSet {
    fn from_iter<I: IntoIterator<Item = Block>>(iter: I) -> Self {
        let mut set = BlockSet::EMPTY;
        for b in iter {
            set.insert(b);
        }
        set
    }
}

impl fmt::Display for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", b.letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockSet({})", self.bits())
    }
}

impl FromStr for BlockSet {
    type Err = Error;

    /// Accepts letter strings (`TPEIY`), separated lists (`T,P`, `T+E`),
    /// block names, or `all`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(BlockSet::ALL);
        }
        let separated = s.contains([',', '+', ' ']);
        let set: BlockSet = if separated {
            s.split([',', '+', ' '])
                .filter(|p| !p.is_empty())
                .map(str::parse)
                .collect::<Result<_, _>>()?
        } else if s.len() > 1 && s.chars().all(|c| "TPEIYtpeiy".contains(c)) {
            s.chars().map(|c| c.encode_utf8(&mut [0; 4]).parse()).collect::<Result<_, _>>()?
        } else {
            BlockSet::single(s.parse()?)
        };
        if set.is_empty() {
            return Err(Error::EmptyBlockSet);
        }
        Ok(set)
    }
}

impl Serialize for BlockSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BlockSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Ok(BlockSet::EMPTY);
        }
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-block document-frequency thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinDf {
    #[serde(rename = "T")]
    pub t: u32,
    #[serde(rename = "P")]
    pub p: u32,
    #[serde(rename = "E")]
    pub e: u32,
    #[serde(rename = "I")]
    pub i: u32,
    #[serde(rename = "Y")]
    pub y: u32,
}

impl Default for MinDf {
    /// 2 for the large text blocks (T, Y), 1 for the small ones.
    fn default() -> Self {
        MinDf { t: 2, p: 1, e: 1, i: 1, y: 2 }
    }
}

impl MinDf {
    pub fn uniform(n: u32) -> Self {
        MinDf { t: n, p: n, e: n, i: n, y: n }
    }

    pub fn get(&self, block: Block) -> u32 {
        match block {
            Block::T => self.t,
            Block::P => self.p,
            Block::E => self.e,
            Block::I => self.i,
            Block::Y => self.y,
        }
    }

    pub fn set(&mut self, block: Block, value: u32) {
        match block {
            Block::T => self.t = value,
            Block::P => self.p = value,
            Block::E => self.e = value,
            Block::I => self.i = value,
            Block::Y => self.y = value,
        }
    }
}

/// How profiles with missing blocks are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// Every profile; absent blocks are zeroed out.
    #[default]
    Model1,
    /// Only profiles with data in every selected block.
    Model2,
}

impl FromStr for FusionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "model1" | "1" => Ok(FusionMode::Model1),
            "model2" | "2" => Ok(FusionMode::Model2),
            other => Err(alloc::format!("unknown fusion mode `{other}`")),
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionMode::Model1 => "model1",
            FusionMode::Model2 => "model2",
        })
    }
}
