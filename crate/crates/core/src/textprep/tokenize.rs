use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use super::emoji::{fold_emoji, is_emoji_cluster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Hashtag,
    Mention,
    Url,
    Emoji,
    Other,
}

/// A lowercased surface form with its kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    fn new(surface: impl Into<String>, kind: TokenKind) -> Self {
        Token { surface: surface.into(), kind }
    }
}

fn is_url_start(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '\u{00A1}' | '\u{00AB}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}')
        || ('\u{2000}'..='\u{206F}').contains(&c)
        || ('\u{3000}'..='\u{303F}').contains(&c)
}

fn word_char(cluster: &str) -> bool {
    cluster.chars().next().is_some_and(char::is_alphanumeric)
}

/// Split text into lowercase tokens.
///
/// Whitespace separates chunks; a chunk starting with `http://`, `https://`
/// or `www.` is one URL token. Inside other chunks, alphanumeric runs are
/// words, `#`/`@` followed by a word character open a hashtag/mention (which
/// may also contain `_`), emoji clusters are emitted individually, and
/// punctuation separates. Remaining symbols become `Other` tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split(char::is_whitespace).filter(|c| !c.is_empty()) {
        if is_url_start(chunk) {
            tokens.push(Token::new(chunk, TokenKind::Url));
            continue;
        }
        tokenize_chunk(chunk, &mut tokens);
    }
    tokens
}

fn tokenize_chunk(chunk: &str, tokens: &mut Vec<Token>) {
    let clusters: Vec<&str> = chunk.graphemes(true).collect();
    let mut buf = String::new();
    let mut kind = TokenKind::Word;

    let flush = |buf: &mut String, kind: TokenKind, tokens: &mut Vec<Token>| {
        if !buf.is_empty() {
            tokens.push(Token::new(core::mem::take(buf), kind));
        }
    };

    let mut i = 0;
    while i < clusters.len() {
        let cluster = clusters[i];
        let next_is_word = clusters.get(i + 1).is_some_and(|next| word_char(next));
        if is_emoji_cluster(cluster) {
            flush(&mut buf, kind, tokens);
            let folded = fold_emoji(cluster);
            if !folded.is_empty() {
                tokens.push(Token::new(folded, TokenKind::Emoji));
            }
        } else if word_char(cluster) {
            if buf.is_empty() {
                kind = TokenKind::Word;
            }
            buf.push_str(cluster);
        } else if cluster == "_" && matches!(kind, TokenKind::Hashtag | TokenKind::Mention) && !buf.is_empty() {
            buf.push('_');
        } else if (cluster == "#" || cluster == "@") && next_is_word && buf.is_empty() {
            kind = if cluster == "#" { TokenKind::Hashtag } else { TokenKind::Mention };
            buf.push_str(cluster);
        } else {
            flush(&mut buf, kind, tokens);
            let is_punct = cluster.chars().next().is_some_and(is_punctuation);
            if !is_punct {
                tokens.push(Token::new(cluster.to_string(), TokenKind::Other));
            }
        }
        i += 1;
    }
    flush(&mut buf, kind, tokens);
}
