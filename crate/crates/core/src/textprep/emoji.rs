//! Emoji extraction and chain detection.
//!
//! Emoji are recognised per extended grapheme cluster, so a ZWJ sequence, a
//! flag, or a keycap is one token. Skin-tone modifiers and the emoji
//! variation selector are folded away so that differently toned variants
//! share a key.

use alloc::string::String;
use alloc::vec::Vec;

use unicode_properties::{EmojiStatus, UnicodeEmoji};
use unicode_segmentation::UnicodeSegmentation;

const VARIATION_SELECTOR_16: char = '\u{FE0F}';
const COMBINING_KEYCAP: char = '\u{20E3}';

/// One emoji occurrence in a text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiOccurrence {
    /// Folded emoji key.
    pub emoji: String,
    /// Byte offset of the cluster in the source text.
    pub offset: usize,
    /// True when only whitespace separates this emoji from the previous one.
    pub adjacent_to_previous: bool,
}

/// Emoji skin-tone modifier (U+1F3FB..=U+1F3FF).
pub fn is_skin_tone_modifier(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

fn has_emoji_presentation(c: char) -> bool {
    matches!(
        c.emoji_status(),
        EmojiStatus::EmojiPresentation
            | EmojiStatus::EmojiPresentationAndModifierBase
            | EmojiStatus::EmojiPresentationAndEmojiComponent
            | EmojiStatus::EmojiPresentationAndModifierAndEmojiComponent
    )
}

/// Whether a grapheme cluster renders as an emoji.
///
/// A cluster qualifies when it starts with a default-emoji-presentation
/// character, or starts with any emoji character and carries VS16, a skin
/// tone modifier, or the combining keycap.
pub fn is_emoji_cluster(cluster: &str) -> bool {
    let mut chars = cluster.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if has_emoji_presentation(first) {
        return true;
    }
    first.is_emoji_char()
        && cluster
            .chars()
            .skip(1)
            .any(|c| c == VARIATION_SELECTOR_16 || c == COMBINING_KEYCAP || is_skin_tone_modifier(c))
}

/// Folded key for an emoji cluster: skin-tone modifiers and VS16 removed.
pub fn fold_emoji(cluster: &str) -> String {
    cluster
        .chars()
        .filter(|&c| c != VARIATION_SELECTOR_16 && !is_skin_tone_modifier(c))
        .collect()
}

/// All emoji occurrences in `text`, in order of appearance.
pub fn extract_emoji_occurrences(text: &str) -> Vec<EmojiOccurrence> {
    let mut out = Vec::new();
    // true while everything since the last emoji has been whitespace
    let mut only_space_since_emoji = false;
    for (offset, cluster) in text.grapheme_indices(true) {
        if is_emoji_cluster(cluster) {
            let emoji = fold_emoji(cluster);
            if emoji.is_empty() {
                // a lone modifier; not a symbol of its own
                only_space_since_emoji = false;
                continue;
            }
            out.push(EmojiOccurrence {
                emoji,
                offset,
                adjacent_to_previous: only_space_since_emoji,
            });
            only_space_since_emoji = true;
        } else if !cluster.chars().all(char::is_whitespace) {
            only_space_since_emoji = false;
        }
    }
    out
}

/// Folded emoji tokens of `text`, in order.
pub fn extract_emoji_tokens(text: &str) -> Vec<String> {
    extract_emoji_occurrences(text).into_iter().map(|o| o.emoji).collect()
}

/// Maximal runs of two or more adjacent emoji.
pub fn detect_chains(occurrences: &[EmojiOccurrence]) -> Vec<Vec<String>> {
    let mut chains = Vec::new();
    let mut run: Vec<String> = Vec::new();
    for occ in occurrences {
        if !occ.adjacent_to_previous && !run.is_empty() {
            if run.len() >= 2 {
                chains.push(core::mem::take(&mut run));
            } else {
                run.clear();
            }
        }
        run.push(occ.emoji.clone());
    }
    if run.len() >= 2 {
        chains.push(run);
    }
    chains
}

/// Ordered adjacent pairs within each chain.
pub fn chain_bigrams(chains: &[Vec<String>]) -> impl Iterator<Item = (&str, &str)> {
    chains
        .iter()
        .flat_map(|chain| chain.windows(2).map(|w| (w[0].as_str(), w[1].as_str())))
}
