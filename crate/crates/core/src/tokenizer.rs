//! Token segmentation and `#token`/`#range` target resolution.
//!
//! Segmentation splits on whitespace, then peels punctuation off both ends of
//! each chunk as single-character tokens. Punctuation inside a chunk stays put,
//! so `5,745,188`, `C$44.3` and `cease-fire` are single tokens. The rule is
//! inferred from hand-annotated documents, not taken from a published
//! segmenter.

use crate::model::{TargetRef, Token};

const EDGE_PUNCTUATION: &[char] = &[
    ',', '.', ';', ':', '!', '?', '"', '\'', '(', ')', '[', ']', '`', '“', '”', '‘', '’',
];

fn is_edge_punct(c: char) -> bool {
    EDGE_PUNCTUATION.contains(&c)
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn split_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let mut lo = start;
    let mut hi = end;
    while lo < hi && is_edge_punct(chars[lo]) {
        lo += 1;
    }
    while hi > lo && is_edge_punct(chars[hi - 1]) {
        hi -= 1;
    }
    let mut push = |a: usize, b: usize| {
        out.push(Token {
            index: out.len(),
            text: chars[a..b].iter().collect(),
            char_start: a,
            char_end: b,
        })
    };
    for p in start..lo {
        push(p, p + 1);
    }
    if lo < hi {
        push(lo, hi);
    }
    for p in hi..end {
        push(p, p + 1);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TargetError {
    #[error("malformed target {0:?}")]
    Syntax(String),
    #[error("range start {0} is after end {1}")]
    ReversedRange(usize, usize),
    #[error("token index {index} out of range ({count} tokens)")]
    OutOfRange { index: usize, count: usize },
    #[error("target indices are not in increasing order")]
    Unordered,
    #[error("empty target")]
    Empty,
}

/// Parses a target spec without bounds checking. Terms are kept in the order
/// given; the caller decides whether order matters.
fn parse_terms(spec: &str) -> Result<Vec<usize>, TargetError> {
    let syntax = || TargetError::Syntax(spec.to_string());
    let mut out = Vec::new();
    let mut rest = spec.trim();
    if rest.is_empty() {
        return Err(TargetError::Empty);
    }
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix("#range(") {
            let close = r.find(')').ok_or_else(syntax)?;
            let (a, b) = r[..close].split_once(',').ok_or_else(syntax)?;
            let a = token_index(a).ok_or_else(syntax)?;
            let b = token_index(b).ok_or_else(syntax)?;
            if a > b {
                return Err(TargetError::ReversedRange(a, b));
            }
            out.extend(a..=b);
            rest = &r[close + 1..];
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            out.push(token_index(&rest[..end]).ok_or_else(syntax)?);
            rest = &rest[end..];
        }
        rest = rest.trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest.strip_prefix(',').ok_or_else(syntax)?;
    }
}

fn token_index(term: &str) -> Option<usize> {
    let digits = term.trim().strip_prefix("#token")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses target syntax into a sorted, deduplicated reference without
/// checking it against a token count.
pub fn parse_target(spec: &str) -> Result<TargetRef, TargetError> {
    TargetRef::new(parse_terms(spec)?).ok_or(TargetError::Empty)
}

/// Resolves a target against a document with `token_count` tokens.
///
/// Lenient mode sorts and deduplicates; strict mode rejects terms that are
/// not already strictly increasing.
pub fn resolve_target(spec: &str, token_count: usize, strict: bool) -> Result<TargetRef, TargetError> {
    let terms = parse_terms(spec)?;
    if strict && terms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TargetError::Unordered);
    }
    if let Some(&index) = terms.iter().find(|&&i| i >= token_count) {
        return Err(TargetError::OutOfRange { index, count: token_count });
    }
    TargetRef::new(terms).ok_or(TargetError::Empty)
}

/// Canonical target syntax: consecutive runs become `#range(...)`.
pub fn format_target(target: &TargetRef) -> String {
    let mut parts = Vec::new();
    let idx = target.indices();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && idx[j + 1] == idx[j] + 1 {
            j += 1;
        }
        if j == i {
            parts.push(format!("#token{}", idx[i]));
        } else {
            parts.push(format!("#range(#token{},#token{})", idx[i], idx[j]));
        }
        i = j + 1;
    }
    parts.join(",")
}
