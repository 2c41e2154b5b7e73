//! Hangul syllable decomposition into compatibility jamo.
//!
//! A precomposed syllable in U+AC00..=U+D7A3 encodes a choseong (leading
//! consonant), jungseong (vowel), and optional jongseong (trailing
//! consonant) as `0xAC00 + cho * 588 + jung * 28 + jong`. Decomposition
//! inverts that arithmetic and maps each positional index to the
//! corresponding compatibility jamo codepoint (U+3131..=U+3163), which is
//! what downstream n-gram extraction hashes.

use crate::text_units::TextUnitError;

/// First precomposed Hangul syllable, `가`.
pub const SYLLABLE_BASE: u32 = 0xAC00;
/// Last precomposed Hangul syllable, `힣`.
pub const SYLLABLE_LAST: u32 = 0xD7A3;
/// Number of choseong.
pub const CHOSEONG_COUNT: u32 = 19;
/// Number of jungseong.
pub const JUNGSEONG_COUNT: u32 = 21;
/// Number of jongseong slots, including the empty slot 0.
pub const JONGSEONG_COUNT: u32 = 28;

/// Placeholder symbol emitted for an absent jongseong.
///
/// Private Use Area codepoint, outside the Hangul blocks and outside any
/// corpus alphabet, so a syllable always decomposes into exactly three
/// symbols without colliding with real text.
pub const EMPTY_JONGSEONG_SYMBOL: char = '\u{E000}';
/// Begin-of-word symbol prepended by [`word_to_jamo`].
pub const BOW_SYMBOL: char = '\u{E001}';
/// End-of-word symbol appended by [`word_to_jamo`].
pub const EOW_SYMBOL: char = '\u{E002}';
/// Begin-of-sequence marker used for Hanja n-grams.
pub const BOH_SYMBOL: char = '\u{E003}';
/// End-of-sequence marker used for Hanja n-grams.
pub const EOH_SYMBOL: char = '\u{E004}';

/// All reserved marker codepoints. Corpus text may not contain these.
pub const RESERVED_SYMBOLS: [char; 5] = [
    EMPTY_JONGSEONG_SYMBOL,
    BOW_SYMBOL,
    EOW_SYMBOL,
    BOH_SYMBOL,
    EOH_SYMBOL,
];

/// Returns true if `c` is one of the reserved marker codepoints.
pub fn is_reserved_symbol(c: char) -> bool {
    ('\u{E000}'..='\u{E004}').contains(&c)
}

/// Compatibility jamo for each choseong index.
const CHOSEONG_COMPAT: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ',
    'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];

/// Compatibility jamo for each jungseong index (contiguous U+314F..=U+3163).
const JUNGSEONG_COMPAT: [char; 21] = [
    'ㅏ', 'ㅐ', 'ㅑ', 'ㅒ', 'ㅓ', 'ㅔ', 'ㅕ', 'ㅖ', 'ㅗ', 'ㅘ', 'ㅙ', 'ㅚ', 'ㅛ', 'ㅜ', 'ㅝ',
    'ㅞ', 'ㅟ', 'ㅠ', 'ㅡ', 'ㅢ', 'ㅣ',
];

/// Compatibility jamo for jongseong indices 1..=27; index 0 means "no
/// jongseong" and is represented by [`EMPTY_JONGSEONG_SYMBOL`].
const JONGSEONG_COMPAT: [char; 27] = [
    'ㄱ', 'ㄲ', 'ㄳ', 'ㄴ', 'ㄵ', 'ㄶ', 'ㄷ', 'ㄹ', 'ㄺ', 'ㄻ', 'ㄼ', 'ㄽ', 'ㄾ', 'ㄿ', 'ㅀ',
    'ㅁ', 'ㅂ', 'ㅄ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅊ', 'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];

/// Positional class of a single symbol in a jamo stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JamoKind {
    /// Leading consonant of a syllable.
    Choseong,
    /// Vowel of a syllable.
    Jungseong,
    /// Trailing consonant of a syllable.
    Jongseong,
    /// Placeholder for a syllable without a trailing consonant.
    EmptyJongseong,
    /// Begin-of-word or end-of-word symbol.
    WordBoundary,
    /// A character outside the precomposed Hangul range, carried through
    /// as a single opaque symbol.
    Passthrough,
}

/// One symbol of a decomposed word: a positional class plus the codepoint
/// used when the symbol participates in n-gram strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Jamo {
    kind: JamoKind,
    codepoint: char,
}

impl Jamo {
    fn new(kind: JamoKind, codepoint: char) -> Self {
        Jamo { kind, codepoint }
    }

    /// Positional class of this symbol.
    pub fn kind(&self) -> JamoKind {
        self.kind
    }

    /// Codepoint serialized into n-gram strings for this symbol.
    pub fn codepoint(&self) -> char {
        self.codepoint
    }

    /// Choseong index (0..19) if this is a choseong symbol.
    pub fn choseong_index(&self) -> Option<u32> {
        if self.kind != JamoKind::Choseong {
            return None;
        }
        CHOSEONG_COMPAT
            .iter()
            .position(|&c| c == self.codepoint)
            .map(|i| i as u32)
    }

    /// Jungseong index (0..21) if this is a jungseong symbol.
    pub fn jungseong_index(&self) -> Option<u32> {
        if self.kind != JamoKind::Jungseong {
            return None;
        }
        JUNGSEONG_COMPAT
            .iter()
            .position(|&c| c == self.codepoint)
            .map(|i| i as u32)
    }

    /// Jongseong index (0..28, 0 meaning absent) if this symbol sits in
    /// the jongseong position.
    pub fn jongseong_index(&self) -> Option<u32> {
        match self.kind {
            JamoKind::EmptyJongseong => Some(0),
            JamoKind::Jongseong => JONGSEONG_COMPAT
                .iter()
                .position(|&c| c == self.codepoint)
                .map(|i| i as u32 + 1),
            _ => None,
        }
    }
}

/// Returns true if `c` is a precomposed Hangul syllable.
pub fn is_hangul_syllable(c: char) -> bool {
    (SYLLABLE_BASE..=SYLLABLE_LAST).contains(&(c as u32))
}

/// Decomposes one precomposed syllable into (choseong, jungseong,
/// jongseong). A syllable without a trailing consonant yields the
/// [`EMPTY_JONGSEONG_SYMBOL`] placeholder in the third slot, so the result
/// always has exactly three symbols.
pub fn decompose_syllable(c: char) -> Result<(Jamo, Jamo, Jamo), TextUnitError> {
    if !is_hangul_syllable(c) {
        return Err(TextUnitError::NotHangulSyllable(c));
    }
    let idx = c as u32 - SYLLABLE_BASE;
    let cho = idx / (JUNGSEONG_COUNT * JONGSEONG_COUNT);
    let jung = (idx % (JUNGSEONG_COUNT * JONGSEONG_COUNT)) / JONGSEONG_COUNT;
    let jong = idx % JONGSEONG_COUNT;
    let cho = Jamo::new(JamoKind::Choseong, CHOSEONG_COMPAT[cho as usize]);
    let jung = Jamo::new(JamoKind::Jungseong, JUNGSEONG_COMPAT[jung as usize]);
    let jong = if jong == 0 {
        Jamo::new(JamoKind::EmptyJongseong, EMPTY_JONGSEONG_SYMBOL)
    } else {
        Jamo::new(JamoKind::Jongseong, JONGSEONG_COMPAT[jong as usize - 1])
    };
    Ok((cho, jung, jong))
}

/// Decomposes a word into its jamo symbol stream.
///
/// The stream starts with [`BOW_SYMBOL`] and ends with [`EOW_SYMBOL`].
/// Every Hangul syllable contributes exactly three symbols; any other
/// character contributes itself as a single passthrough symbol, so the
/// length is `2 + 3 * syllables + other_chars`.
pub fn word_to_jamo(surface: &str) -> Vec<Jamo> {
    let mut out = Vec::with_capacity(2 + 3 * surface.chars().count());
    out.push(Jamo::new(JamoKind::WordBoundary, BOW_SYMBOL));
    for c in surface.chars() {
        match decompose_syllable(c) {
            Ok((cho, jung, jong)) => {
                out.push(cho);
                out.push(jung);
                out.push(jong);
            }
            Err(_) => out.push(Jamo::new(JamoKind::Passthrough, c)),
        }
    }
    out.push(Jamo::new(JamoKind::WordBoundary, EOW_SYMBOL));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposes_syllable_with_jongseong() {
        // 한 = ㅎ + ㅏ + ㄴ
        let (cho, jung, jong) = decompose_syllable('한').unwrap();
        assert_eq!(cho.codepoint(), 'ㅎ');
        assert_eq!(jung.codepoint(), 'ㅏ');
        assert_eq!(jong.codepoint(), 'ㄴ');
        assert_eq!(cho.kind(), JamoKind::Choseong);
        assert_eq!(jong.kind(), JamoKind::Jongseong);
    }

    #[test]
    fn decomposes_syllable_without_jongseong() {
        let (cho, jung, jong) = decompose_syllable('가').unwrap();
        assert_eq!(cho.codepoint(), 'ㄱ');
        assert_eq!(jung.codepoint(), 'ㅏ');
        assert_eq!(jong.kind(), JamoKind::EmptyJongseong);
        assert_eq!(jong.codepoint(), EMPTY_JONGSEONG_SYMBOL);
    }

    #[test]
    fn rejects_non_syllable() {
        for c in ['a', 'ㄱ', '社', '\u{ABFF}', '\u{D7A4}'] {
            assert!(matches!(
                decompose_syllable(c),
                Err(TextUnitError::NotHangulSyllable(x)) if x == c
            ));
        }
    }

    #[test]
    fn round_trips_every_syllable() {
        // Recompose from positional indices; the composition arithmetic here
        // is written out independently of decompose_syllable.
        for cp in SYLLABLE_BASE..=SYLLABLE_LAST {
            let c = char::from_u32(cp).unwrap();
            let (cho, jung, jong) = decompose_syllable(c).unwrap();
            let recomposed = SYLLABLE_BASE
                + cho.choseong_index().unwrap() * 588
                + jung.jungseong_index().unwrap() * 28
                + jong.jongseong_index().unwrap();
            assert_eq!(recomposed, cp);
        }
    }

    #[test]
    fn word_to_jamo_mixed_word() {
        let seq = word_to_jamo("한a");
        let symbols: Vec<char> = seq.iter().map(|j| j.codepoint()).collect();
        assert_eq!(symbols, vec![BOW_SYMBOL, 'ㅎ', 'ㅏ', 'ㄴ', 'a', EOW_SYMBOL]);
        assert_eq!(seq[4].kind(), JamoKind::Passthrough);
    }

    #[test]
    fn word_to_jamo_length_formula() {
        for (word, syllables, others) in
            [("하늘", 2, 0), ("가a나1", 2, 2), ("abc", 0, 3), ("", 0, 0)]
        {
            let seq = word_to_jamo(word);
            assert_eq!(seq.len(), 2 + 3 * syllables + others);
            assert_eq!(seq.first().map(Jamo::codepoint), Some(BOW_SYMBOL));
            assert_eq!(seq.last().map(Jamo::codepoint), Some(EOW_SYMBOL));
        }
    }

    #[test]
    fn reserved_symbols_outside_hangul_ranges() {
        for s in RESERVED_SYMBOLS {
            assert!(!is_hangul_syllable(s));
            assert!(!('\u{3131}'..='\u{3163}').contains(&s));
            assert!(is_reserved_symbol(s));
        }
    }
}
