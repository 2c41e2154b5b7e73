//! Hangul decomposition, annotated tokens, and corpus streaming.

mod jamo;
mod stream;
mod token;

pub use jamo::{
    decompose_syllable, is_hangul_syllable, is_reserved_symbol, word_to_jamo, Jamo, JamoKind,
    BOH_SYMBOL, BOW_SYMBOL, CHOSEONG_COUNT, EMPTY_JONGSEONG_SYMBOL, EOH_SYMBOL, EOW_SYMBOL,
    JONGSEONG_COUNT, JUNGSEONG_COUNT, RESERVED_SYMBOLS, SYLLABLE_BASE, SYLLABLE_LAST,
};
pub use stream::{stream_tokens, CorpusSource, StreamStats, TokenStream};
pub use token::{is_cjk_ideograph, parse_annotated_token, AnnotatedToken, MalformedKind};

/// Errors from decomposition, token parsing, and corpus streaming.
#[derive(Debug, thiserror::Error)]
pub enum TextUnitError {
    /// The character is not a precomposed Hangul syllable.
    #[error("not a Hangul syllable: {0:?}")]
    NotHangulSyllable(char),

    /// A corpus token violates the `surface|seq1,seq2,...` format.
    #[error("malformed token at byte {position}: {kind}")]
    MalformedAnnotation {
        /// Byte offset of the offending character within the raw token.
        position: usize,
        /// What went wrong.
        kind: MalformedKind,
    },

    /// The corpus is not valid UTF-8.
    #[error("invalid UTF-8 in sentence {sentence}")]
    InvalidUtf8 {
        /// Sentence (line) index where decoding failed.
        sentence: u64,
        #[source]
        source: std::str::Utf8Error,
    },

    /// An I/O failure while streaming.
    #[error("corpus I/O error")]
    Io(#[from] std::io::Error),
}
