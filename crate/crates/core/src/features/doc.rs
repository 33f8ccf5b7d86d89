use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use super::{Block, BlockSet};
use crate::clients::MediaSource;
use crate::corpus::{Label, ProfileRecord};
use crate::textprep::TextPipeline;

pub const DEFAULT_COMMENT_CAP: usize = 200;

/// Raw per-block term counts for one profile, before any vocabulary is
/// applied. Building these is the expensive part (text normalization and
/// client lookups), so cross-validation builds them once and re-indexes per
/// fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileDoc {
    pub profile_id: String,
    pub label: Label,
    counts: [BTreeMap<String, u32>; 5],
    availability: BlockSet,
}

impl ProfileDoc {
    /// Assemble from explicit counts; availability is derived from which
    /// blocks are nonempty.
    pub fn from_counts(profile_id: impl Into<String>, label: Label, counts: [BTreeMap<String, u32>; 5]) -> Self {
        let availability = Block::ALL.into_iter().filter(|b| !counts[b.index()].is_empty()).collect();
        ProfileDoc { profile_id: profile_id.into(), label, counts, availability }
    }

    pub fn counts(&self, block: Block) -> &BTreeMap<String, u32> {
        &self.counts[block.index()]
    }

    pub fn availability(&self) -> BlockSet {
        self.availability
    }

    /// Total raw occurrences in a block.
    pub fn raw_total(&self, block: Block) -> u64 {
        self.counts[block.index()].values().map(|&c| u64::from(c)).sum()
    }
}

/// Everything needed to turn a [`ProfileRecord`] into a [`ProfileDoc`].
#[derive(Clone, Copy)]
pub struct DocContext<'a> {
    pub pipeline: &'a TextPipeline,
    pub media: &'a dyn MediaSource,
    /// Comments read per video, in the order the client returns them.
    pub comment_cap: usize,
}

impl<'a> DocContext<'a> {
    pub fn new(pipeline: &'a TextPipeline, media: &'a dyn MediaSource) -> Self {
        DocContext { pipeline, media, comment_cap: DEFAULT_COMMENT_CAP }
    }

    pub fn with_comment_cap(mut self, cap: usize) -> Self {
        self.comment_cap = cap;
        self
    }

    /// T, P and E are available when they yield at least one term. I and Y
    /// are available when the client resolves at least one image or video,
    /// even if that item contributes no terms.
    pub fn build(&self, profile: &ProfileRecord) -> ProfileDoc {
        let mut counts: [BTreeMap<String, u32>; 5] = Default::default();
        let mut resolved = BlockSet::EMPTY;

        for tweet in &profile.tweets {
            let doc = self.pipeline.normalize(&tweet.text);
            bump_all(&mut counts[Block::T.index()], doc.stems);
            bump_all(&mut counts[Block::E.index()], doc.emoji_tokens);
        }

        bump_all(&mut counts[Block::P.index()], self.pipeline.stems(&profile.description));

        for media_ref in profile.image_refs() {
            match self.media.tag_image(media_ref) {
                Some(tags) => {
                    resolved.insert(Block::I);
                    // a tag counts once per image even if the tagger repeats it
                    let distinct: BTreeSet<&str> = tags.terms().collect();
                    bump_all(&mut counts[Block::I.index()], distinct.into_iter().map(String::from));
                }
                None => log::debug!("no image tags for {media_ref} ({})", profile.profile_id),
            }
        }

        let videos: BTreeSet<&str> = profile.video_ids().collect();
        for video_id in videos {
            match self.media.fetch_video_metadata(video_id) {
                Some(meta) => {
                    resolved.insert(Block::Y);
                    let y = &mut counts[Block::Y.index()];
                    bump_all(y, self.pipeline.stems(&meta.description));
                    for comment in meta.comments.iter().take(self.comment_cap) {
                        bump_all(y, self.pipeline.stems(comment));
                    }
                }
                None => log::debug!("video {video_id} unresolvable ({})", profile.profile_id),
            }
        }

        let mut availability = resolved;
        for b in [Block::T, Block::P, Block::E] {
            if !counts[b.index()].is_empty() {
                availability.insert(b);
            }
        }
        ProfileDoc { profile_id: profile.profile_id.clone(), label: profile.label, counts, availability }
    }
}

fn bump_all(map: &mut BTreeMap<String, u32>, terms: impl IntoIterator<Item = String>) {
    for t in terms {
        *map.entry(t).or_insert(0) += 1;
    }
}
