//! Rule-based tokenizer for informal text.
//!
//! Whitespace-delimited chunks are split further by detaching leading and
//! trailing special characters one at a time. URLs, @handles, and #hashtags
//! stay whole. Token offsets are byte offsets into the source, and always
//! slice the source back to the token surface.

use super::pos::PosTag;
use super::surface::SPECIAL_CHARS;

/// One token of a sentence: its surface text, byte offsets in the source,
/// and an optional POS tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub pos: Option<PosTag>,
}

impl Token {
    pub fn new(surface: impl Into<String>, start: usize, end: usize) -> Self {
        let surface = surface.into();
        debug_assert!(!surface.is_empty());
        Token {
            surface,
            start,
            end,
            pos: None,
        }
    }

    /// Token built from a bare surface form, for pre-tokenized input.
    pub fn from_surface(surface: impl Into<String>, pos: PosTag) -> Self {
        let surface = surface.into();
        let end = surface.len();
        Token {
            surface,
            start: 0,
            end,
            pos: Some(pos),
        }
    }

    pub fn with_pos(mut self, pos: PosTag) -> Self {
        self.pos = Some(pos);
        self
    }
}

fn is_special(c: char) -> bool {
    SPECIAL_CHARS.contains(&c)
}

fn is_url(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

fn keeps_marker(chunk: &str) -> bool {
    (chunk.starts_with('@') || chunk.starts_with('#'))
        && chunk[1..].chars().next().is_some_and(|c| !is_special(c))
}

/// Splits text into tokens. POS tags are left unset. Empty text gives an
/// empty list; every non-whitespace character lands in exactly one token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let bytes = text.char_indices().collect::<Vec<_>>();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].1.is_whitespace() {
            i += 1;
            continue;
        }
        let chunk_start = i;
        while i < bytes.len() && !bytes[i].1.is_whitespace() {
            i += 1;
        }
        let start_byte = bytes[chunk_start].0;
        let end_byte = if i < bytes.len() {
            bytes[i].0
        } else {
            text.len()
        };
        split_chunk(text, start_byte, end_byte, &mut tokens);
    }
    tokens
}

/// Splits one whitespace-free chunk into tokens, appending to `out`.
fn split_chunk(text: &str, mut start: usize, mut end: usize, out: &mut Vec<Token>) {
    let chunk = &text[start..end];
    if is_url(chunk) {
        out.push(Token::new(chunk, start, end));
        return;
    }

    // Peel leading special characters, keeping @/# that start a handle or
    // hashtag attached to it.
    let mut lead = Vec::new();
    loop {
        let rest = &text[start..end];
        if rest.is_empty() || keeps_marker(rest) {
            break;
        }
        let c = rest.chars().next().expect("non-empty");
        if !is_special(c) {
            break;
        }
        lead.push(Token::new(c, start, start + c.len_utf8()));
        start += c.len_utf8();
    }
    out.extend(lead);

    // A URL uncovered by the peeling keeps everything that is left.
    if is_url(&text[start..end]) {
        out.push(Token::new(&text[start..end], start, end));
        return;
    }

    // Peel trailing special characters.
    let mut tail = Vec::new();
    loop {
        let rest = &text[start..end];
        if rest.chars().count() <= 1 {
            break;
        }
        let c = rest.chars().next_back().expect("non-empty");
        if !is_special(c) {
            break;
        }
        tail.push(Token::new(c, end - c.len_utf8(), end));
        end -= c.len_utf8();
    }
    if start < end {
        out.push(Token::new(&text[start..end], start, end));
    }
    tail.reverse();
    out.extend(tail);
}
