//! Annotated corpus tokens.
//!
//! A corpus token is either a bare surface form (`하늘`) or a surface with
//! an inline Hanja annotation (`사회형|社會,型`): the surface, a `|`, and a
//! comma-separated list of the Hanja sequences underlying the word's
//! Sino-Korean morphemes, in surface order.

use std::fmt;

use crate::text_units::jamo::is_reserved_symbol;
use crate::text_units::TextUnitError;

/// Why a token failed to parse. Carried inside
/// [`TextUnitError::MalformedAnnotation`] together with the byte offset of
/// the offending character within the raw token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedKind {
    /// The surface before `|` is empty.
    EmptySurface,
    /// An annotation segment between commas is empty.
    EmptyAnnotationSegment,
    /// An annotation contains a character outside the CJK ideograph blocks.
    NonCjkAnnotation,
    /// More than one `|` delimiter.
    ExtraDelimiter,
    /// A `,` in the surface part.
    CommaInSurface,
    /// Whitespace inside the token.
    Whitespace,
    /// A reserved marker codepoint appears in the token.
    ReservedCodepoint,
}

impl fmt::Display for MalformedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            MalformedKind::EmptySurface => "empty surface",
            MalformedKind::EmptyAnnotationSegment => "empty annotation segment",
            MalformedKind::NonCjkAnnotation => "non-CJK character in annotation",
            MalformedKind::ExtraDelimiter => "more than one '|' delimiter",
            MalformedKind::CommaInSurface => "',' in surface",
            MalformedKind::Whitespace => "whitespace inside token",
            MalformedKind::ReservedCodepoint => "reserved marker codepoint in token",
        };
        f.write_str(msg)
    }
}

/// A surface word together with its ordered Hanja sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AnnotatedToken {
    /// The word as written.
    pub surface: String,
    /// Hanja sequences for the word's Sino-Korean morphemes, in order.
    /// Empty for native words and unannotated corpora.
    pub hanja_seqs: Vec<String>,
}

impl AnnotatedToken {
    /// A token with no Hanja annotation.
    pub fn bare(surface: impl Into<String>) -> Self {
        AnnotatedToken {
            surface: surface.into(),
            hanja_seqs: Vec::new(),
        }
    }

    /// A token with the given Hanja sequences.
    pub fn annotated<S: Into<String>>(surface: impl Into<String>, seqs: Vec<S>) -> Self {
        AnnotatedToken {
            surface: surface.into(),
            hanja_seqs: seqs.into_iter().map(Into::into).collect(),
        }
    }

    /// Serializes back to the corpus token form; inverse of
    /// [`parse_annotated_token`] for well-formed tokens.
    pub fn serialize(&self) -> String {
        if self.hanja_seqs.is_empty() {
            self.surface.clone()
        } else {
            format!("{}|{}", self.surface, self.hanja_seqs.join(","))
        }
    }
}

/// Returns true if `c` lies in a CJK Unified Ideographs block (the base
/// block, Extension A, or Extensions B through G).
pub fn is_cjk_ideograph(c: char) -> bool {
    matches!(c as u32,
        0x4E00..=0x9FFF
        | 0x3400..=0x4DBF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2B73F
        | 0x2B740..=0x2B81F
        | 0x2B820..=0x2CEAF
        | 0x2CEB0..=0x2EBEF
        | 0x30000..=0x3134F)
}

fn malformed(position: usize, kind: MalformedKind) -> TextUnitError {
    TextUnitError::MalformedAnnotation { position, kind }
}

/// Parses one whitespace-free corpus token.
///
/// Accepts `surface` or `surface|seq1,seq2,...`. Errors carry the byte
/// offset of the offending character within `raw`.
pub fn parse_annotated_token(raw: &str) -> Result<AnnotatedToken, TextUnitError> {
    if raw.is_empty() {
        return Err(malformed(0, MalformedKind::EmptySurface));
    }
    for (pos, c) in raw.char_indices() {
        if c.is_whitespace() {
            return Err(malformed(pos, MalformedKind::Whitespace));
        }
        if is_reserved_symbol(c) {
            return Err(malformed(pos, MalformedKind::ReservedCodepoint));
        }
    }

    let (surface, annotation) = match raw.find('|') {
        None => (raw, None),
        Some(bar) => {
            let rest = &raw[bar + 1..];
            if let Some(extra) = rest.find('|') {
                return Err(malformed(bar + 1 + extra, MalformedKind::ExtraDelimiter));
            }
            (&raw[..bar], Some((bar + 1, rest)))
        }
    };

    if surface.is_empty() {
        return Err(malformed(0, MalformedKind::EmptySurface));
    }
    if let Some(comma) = surface.find(',') {
        return Err(malformed(comma, MalformedKind::CommaInSurface));
    }

    let mut seqs = Vec::new();
    if let Some((offset, annotation)) = annotation {
        let mut seg_start = offset;
        for segment in annotation.split(',') {
            if segment.is_empty() {
                return Err(malformed(seg_start, MalformedKind::EmptyAnnotationSegment));
            }
            for (pos, c) in segment.char_indices() {
                if !is_cjk_ideograph(c) {
                    return Err(malformed(seg_start + pos, MalformedKind::NonCjkAnnotation));
                }
            }
            seqs.push(segment.to_string());
            seg_start += segment.len() + 1;
        }
    }

    Ok(AnnotatedToken {
        surface: surface.to_string(),
        hanja_seqs: seqs,
    })
}
