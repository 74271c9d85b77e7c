//! Whitespace tokenization and code-point addressed slicing.
//!
//! Every offset in this crate counts Unicode scalar values, never bytes.
//! Sentences are assumed to be pre-tokenized: tokens are maximal runs of
//! non-whitespace characters.

use crate::model::Span;

/// A whitespace-delimited token with its code-point extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub span: Span,
}

/// Number of code points in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Splits `sentence` on whitespace, keeping code-point offsets.
pub fn tokenize(sentence: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None; // (char offset, byte offset)
    let mut chars = 0;
    for (byte, c) in sentence.char_indices() {
        if c.is_whitespace() {
            if let Some((cs, bs)) = start.take() {
                tokens.push(Token {
                    text: &sentence[bs..byte],
                    span: Span::new_unchecked(cs, chars),
                });
            }
        } else if start.is_none() {
            start = Some((chars, byte));
        }
        chars += 1;
    }
    if let Some((cs, bs)) = start {
        tokens.push(Token {
            text: &sentence[bs..],
            span: Span::new_unchecked(cs, chars),
        });
    }
    tokens
}

/// Byte offset of the `n`th code point, or `s.len()` when `n` is the length.
fn byte_offset(s: &str, n: usize) -> Option<usize> {
    if n == 0 {
        return Some(0);
    }
    match s.char_indices().nth(n) {
        Some((b, _)) => Some(b),
        None if char_len(s) == n => Some(s.len()),
        None => None,
    }
}

/// The substring covered by `span`, or `None` when it runs past the end.
pub fn slice(s: &str, span: Span) -> Option<&str> {
    let start = byte_offset(s, span.start)?;
    let end = byte_offset(s, span.end)?;
    Some(&s[start..end])
}

/// Replaces the text under `span` with `replacement`.
pub fn splice(s: &str, span: Span, replacement: &str) -> Option<String> {
    let start = byte_offset(s, span.start)?;
    let end = byte_offset(s, span.end)?;
    let mut out = String::with_capacity(s.len() + replacement.len());
    out.push_str(&s[..start]);
    out.push_str(replacement);
    out.push_str(&s[end..]);
    Some(out)
}

/// Converts a byte offset into a code-point offset.
pub fn byte_to_char(s: &str, byte: usize) -> Option<usize> {
    if byte == s.len() {
        return Some(char_len(s));
    }
    if !s.is_char_boundary(byte) {
        return None;
    }
    Some(s[..byte].chars().count())
}

/// True when `span` starts and ends on whitespace-token boundaries.
pub fn is_token_aligned(sentence: &str, span: Span) -> bool {
    let chars: Vec<char> = sentence.chars().collect();
    if span.start >= span.end || span.end > chars.len() {
        return false;
    }
    let starts_ok = !chars[span.start].is_whitespace()
        && (span.start == 0 || chars[span.start - 1].is_whitespace());
    let ends_ok = !chars[span.end - 1].is_whitespace()
        && (span.end == chars.len() || chars[span.end].is_whitespace());
    starts_ok && ends_ok
}
