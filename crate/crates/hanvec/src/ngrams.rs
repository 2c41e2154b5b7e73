//! Subword unit extraction and hashed bucket indexing.
//!
//! A word is scored through a set of units: its whole-word vocabulary slot
//! plus character, jamo, and Hanja n-grams. N-grams do not get their own
//! vocabulary; each one is hashed with FNV-1a into one of `bucket_size`
//! shared slots appended after the word table, so the input embedding
//! matrix has `vocab_len + bucket_size` rows. Distinct n-grams that hash
//! to the same slot silently share a vector.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::text_units::{
    word_to_jamo, AnnotatedToken, Jamo, BOH_SYMBOL, EOH_SYMBOL,
};

/// FNV-1a 32-bit offset basis.
const FNV_OFFSET: u32 = 2_166_136_261;
/// FNV-1a 32-bit prime.
const FNV_PRIME: u32 = 16_777_619;

/// Begin-of-word marker for character n-grams.
pub const CHAR_BOW: char = '<';
/// End-of-word marker for character n-grams.
pub const CHAR_EOW: char = '>';

/// Which unit granularities participate in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Granularities(u8);

impl Granularities {
    const CHAR: u8 = 1;
    const JAMO: u8 = 1 << 1;
    const HANJA: u8 = 1 << 2;

    /// Whole-word units only (plain skip-gram).
    pub const NONE: Granularities = Granularities(0);
    /// Character n-grams.
    pub const C: Granularities = Granularities(Self::CHAR);
    /// Character and jamo n-grams.
    pub const CJ: Granularities = Granularities(Self::CHAR | Self::JAMO);
    /// Character, jamo, and Hanja n-grams.
    pub const CJH: Granularities = Granularities(Self::CHAR | Self::JAMO | Self::HANJA);

    /// True if character n-grams are enabled.
    pub fn chars(&self) -> bool {
        self.0 & Self::CHAR != 0
    }

    /// True if jamo n-grams are enabled.
    pub fn jamo(&self) -> bool {
        self.0 & Self::JAMO != 0
    }

    /// True if Hanja n-grams are enabled.
    pub fn hanja(&self) -> bool {
        self.0 & Self::HANJA != 0
    }

    /// Bitmask used in the model file header.
    pub fn bits(&self) -> u8 {
        self.0
    }

    /// Rebuilds from a header bitmask; bits above the three known
    /// granularities are rejected.
    pub fn from_bits(bits: u8) -> Option<Granularities> {
        if bits & !(Self::CHAR | Self::JAMO | Self::HANJA) != 0 {
            return None;
        }
        Some(Granularities(bits))
    }
}

impl fmt::Display for Granularities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("none");
        }
        if self.chars() {
            f.write_str("c")?;
        }
        if self.jamo() {
            f.write_str("j")?;
        }
        if self.hanja() {
            f.write_str("h")?;
        }
        Ok(())
    }
}

impl FromStr for Granularities {
    type Err = String;

    /// Parses flag values such as `c`, `cj`, `cjh`, or `none`. Letters may
    /// not repeat.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(Granularities::NONE);
        }
        let mut bits = 0u8;
        for c in s.chars() {
            let bit = match c {
                'c' => Self::CHAR,
                'j' => Self::JAMO,
                'h' => Self::HANJA,
                other => return Err(format!("unknown granularity {other:?}")),
            };
            if bits & bit != 0 {
                return Err(format!("granularity {c:?} given twice"));
            }
            bits |= bit;
        }
        if bits == 0 {
            return Err("empty granularity set; use \"none\" explicitly".to_string());
        }
        Ok(Granularities(bits))
    }
}

/// N-gram extraction settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramConfig {
    /// Shortest character n-gram, counted in characters of the
    /// `<`-wrapped surface.
    pub char_min: u32,
    /// Longest character n-gram.
    pub char_max: u32,
    /// Shortest jamo n-gram, counted in jamo symbols.
    pub jamo_min: u32,
    /// Longest jamo n-gram.
    pub jamo_max: u32,
    /// Shortest Hanja n-gram, counted in symbols where each boundary
    /// marker is one symbol.
    pub hanja_min: u32,
    /// Longest Hanja n-gram.
    pub hanja_max: u32,
    /// Number of hashed n-gram slots.
    pub bucket_size: u64,
    /// Enabled granularities.
    pub granularities: Granularities,
}

impl Default for NGramConfig {
    fn default() -> Self {
        NGramConfig {
            char_min: 1,
            char_max: 6,
            jamo_min: 3,
            jamo_max: 5,
            hanja_min: 1,
            hanja_max: 3,
            bucket_size: 20_000_000,
            granularities: Granularities::CJH,
        }
    }
}

impl NGramConfig {
    /// Default configuration with Hanja n-grams of length 1 to 3.
    pub fn preset_h3() -> Self {
        NGramConfig::default()
    }

    /// Default configuration with Hanja n-grams of length 1 to 4.
    pub fn preset_h4() -> Self {
        NGramConfig {
            hanja_max: 4,
            ..NGramConfig::default()
        }
    }

    /// Checks that each enabled range satisfies `1 <= min <= max` and that
    /// at least one bucket slot exists.
    pub fn validate(&self) -> Result<(), String> {
        let ranges = [
            ("char", self.char_min, self.char_max, self.granularities.chars()),
            ("jamo", self.jamo_min, self.jamo_max, self.granularities.jamo()),
            ("hanja", self.hanja_min, self.hanja_max, self.granularities.hanja()),
        ];
        for (name, min, max, enabled) in ranges {
            if enabled && (min == 0 || min > max) {
                return Err(format!("invalid {name} n-gram range {min}..={max}"));
            }
        }
        if self.bucket_size == 0 {
            return Err("bucket size must be at least 1".to_string());
        }
        Ok(())
    }
}

/// Index of one embedding row: word slots occupy `0..vocab_len`, hashed
/// n-gram slots occupy `vocab_len..vocab_len + bucket_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitId(pub u64);

/// Which extractor produced a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    /// Character n-gram.
    Char,
    /// Jamo n-gram.
    Jamo,
    /// Hanja n-gram.
    Hanja,
}

/// The units that represent one word: its optional vocabulary slot plus
/// deduplicated hashed n-gram slots in extraction order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnitSet {
    /// In-vocabulary word id, if any.
    pub word_id: Option<u32>,
    /// Hashed n-gram slots, deduplicated, first occurrence first.
    pub ngram_ids: Vec<UnitId>,
    /// Granularity of each slot in `ngram_ids`; on a cross-granularity
    /// hash collision the first extractor keeps the tag.
    pub granularities: Vec<Granularity>,
}

impl UnitSet {
    /// Number of units, counting the word slot.
    pub fn len(&self) -> usize {
        self.ngram_ids.len() + usize::from(self.word_id.is_some())
    }

    /// True if the word resolved to no units at all.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All row indices, word slot first.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.word_id
            .map(u64::from)
            .into_iter()
            .chain(self.ngram_ids.iter().map(|id| id.0))
    }
}

/// Minimal vocabulary view needed to build unit sets.
pub trait WordIndex {
    /// Dense id of a surface form, if in the vocabulary.
    fn word_id(&self, surface: &str) -> Option<u32>;
    /// Number of vocabulary entries; hashed slots start at this offset.
    fn vocab_len(&self) -> u64;
}

/// An empty vocabulary; every word is out of vocabulary and hashed slots
/// start at row 0.
pub struct NoVocab;

impl WordIndex for NoVocab {
    fn word_id(&self, _surface: &str) -> Option<u32> {
        None
    }

    fn vocab_len(&self) -> u64 {
        0
    }
}

/// FNV-1a 32-bit hash of a unit string's UTF-8 bytes.
pub fn hash_unit(unit: &str) -> u32 {
    let mut hash = FNV_OFFSET;
    for &byte in unit.as_bytes() {
        hash ^= u32::from(byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn ngrams_of_symbols(symbols: &[char], min: u32, max: u32, out: &mut Vec<String>) {
    let total = symbols.len();
    for n in min as usize..=max as usize {
        if n > total {
            break;
        }
        for start in 0..=total - n {
            out.push(symbols[start..start + n].iter().collect());
        }
    }
}

/// Character n-grams of a surface wrapped in `<` and `>`.
///
/// Every contiguous substring of the wrapped form whose character length
/// lies in `min..=max` is returned, shortest lengths first and positions
/// left to right within each length. Repeated substrings appear once per
/// occurrence; deduplication happens at the unit-set level.
pub fn char_ngrams(surface: &str, min: u32, max: u32) -> Vec<String> {
    let mut symbols = Vec::with_capacity(surface.chars().count() + 2);
    symbols.push(CHAR_BOW);
    symbols.extend(surface.chars());
    symbols.push(CHAR_EOW);
    let mut out = Vec::new();
    ngrams_of_symbols(&symbols, min, max, &mut out);
    out
}

/// Jamo n-grams over a decomposed symbol sequence (normally the output of
/// [`word_to_jamo`], which already carries the word boundary symbols).
pub fn jamo_ngrams(seq: &[Jamo], min: u32, max: u32) -> Vec<String> {
    let symbols: Vec<char> = seq.iter().map(Jamo::codepoint).collect();
    let mut out = Vec::new();
    ngrams_of_symbols(&symbols, min, max, &mut out);
    out
}

/// Hanja n-grams over a word's Hanja sequences.
///
/// Each sequence is wrapped in the begin/end markers, which count as one
/// symbol each; substrings consisting of a lone marker are dropped. The
/// result is the union over all sequences, deduplicated, in first
/// occurrence order.
pub fn hanja_ngrams<S: AsRef<str>>(seqs: &[S], min: u32, max: u32) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut raw = Vec::new();
    for seq in seqs {
        let seq = seq.as_ref();
        let mut symbols = Vec::with_capacity(seq.chars().count() + 2);
        symbols.push(BOH_SYMBOL);
        symbols.extend(seq.chars());
        symbols.push(EOH_SYMBOL);
        raw.clear();
        ngrams_of_symbols(&symbols, min, max, &mut raw);
        for gram in raw.drain(..) {
            let mut chars = gram.chars();
            if let (Some(first), None) = (chars.next(), chars.next()) {
                if first == BOH_SYMBOL || first == EOH_SYMBOL {
                    continue;
                }
            }
            if seen.insert(gram.clone()) {
                out.push(gram);
            }
        }
    }
    out
}

/// Maps an n-gram string to its embedding row.
pub fn unit_slot(unit: &str, vocab_len: u64, bucket_size: u64) -> UnitId {
    UnitId(vocab_len + u64::from(hash_unit(unit)) % bucket_size)
}

/// Builds the unit set of one token: its vocabulary slot, if any, plus
/// hashed n-gram slots for every enabled granularity.
pub fn units_for_word<V: WordIndex>(
    token: &AnnotatedToken,
    vocab: &V,
    config: &NGramConfig,
) -> UnitSet {
    let vocab_len = vocab.vocab_len();
    let mut set = UnitSet {
        word_id: vocab.word_id(&token.surface),
        ngram_ids: Vec::new(),
        granularities: Vec::new(),
    };
    let mut seen = HashSet::new();
    let mut push = |set: &mut UnitSet, grams: Vec<String>, granularity: Granularity| {
        for gram in grams {
            let id = unit_slot(&gram, vocab_len, config.bucket_size);
            if seen.insert(id) {
                set.ngram_ids.push(id);
                set.granularities.push(granularity);
            }
        }
    };
    if config.granularities.chars() {
        push(
            &mut set,
            char_ngrams(&token.surface, config.char_min, config.char_max),
            Granularity::Char,
        );
    }
    if config.granularities.jamo() {
        let seq = word_to_jamo(&token.surface);
        push(
            &mut set,
            jamo_ngrams(&seq, config.jamo_min, config.jamo_max),
            Granularity::Jamo,
        );
    }
    if config.granularities.hanja() && !token.hanja_seqs.is_empty() {
        push(
            &mut set,
            hanja_ngrams(&token.hanja_seqs, config.hanja_min, config.hanja_max),
            Granularity::Hanja,
        );
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_units::{BOW_SYMBOL, EMPTY_JONGSEONG_SYMBOL, EOW_SYMBOL};
    use proptest::prelude::*;

    #[test]
    fn fnv1a_matches_published_vectors() {
        // Reference values for the 32-bit FNV-1a parameters.
        assert_eq!(hash_unit(""), 0x811C_9DC5);
        assert_eq!(hash_unit("a"), 0xE40C_292C);
        assert_eq!(hash_unit("foobar"), 0xBF9C_F968);
    }

    #[test]
    fn hash_is_stable_for_multibyte_input() {
        // Frozen expected values; a change here means every stored model
        // becomes unreadable.
        assert_eq!(hash_unit("하늘"), 0x8015_F940);
        assert_eq!(hash_unit("<하"), 0xE52A_6277);
        assert_eq!(hash_unit("社會"), 0xDFD9_CDB3);
    }

    #[test]
    fn char_ngrams_match_worked_example() {
        assert_eq!(
            char_ngrams("하늘", 1, 2),
            vec!["<", "하", "늘", ">", "<하", "하늘", "늘>"]
        );
    }

    #[test]
    fn char_ngrams_include_full_wrapped_word() {
        assert_eq!(char_ngrams("가", 3, 3), vec!["<가>"]);
        assert_eq!(char_ngrams("가", 4, 6), Vec::<String>::new());
    }

    #[test]
    fn jamo_ngrams_match_worked_example() {
        let seq = word_to_jamo("가");
        let grams = jamo_ngrams(&seq, 3, 3);
        assert_eq!(
            grams,
            vec![
                format!("{BOW_SYMBOL}ㄱㅏ"),
                format!("ㄱㅏ{EMPTY_JONGSEONG_SYMBOL}"),
                format!("ㅏ{EMPTY_JONGSEONG_SYMBOL}{EOW_SYMBOL}"),
            ]
        );
    }

    #[test]
    fn hanja_ngrams_match_worked_example() {
        use crate::text_units::{BOH_SYMBOL, EOH_SYMBOL};
        assert_eq!(
            hanja_ngrams(&["型"], 1, 2),
            vec![
                "型".to_string(),
                format!("{BOH_SYMBOL}型"),
                format!("型{EOH_SYMBOL}"),
            ]
        );
    }

    #[test]
    fn hanja_ngrams_union_over_sequences() {
        use crate::text_units::{BOH_SYMBOL, EOH_SYMBOL};
        // 社會 and 會社 overlap in the bare singletons but not in the
        // marked or longer grams.
        let grams = hanja_ngrams(&["社會", "會社"], 1, 2);
        assert_eq!(
            grams,
            vec![
                "社".to_string(),
                "會".to_string(),
                format!("{BOH_SYMBOL}社"),
                "社會".to_string(),
                format!("會{EOH_SYMBOL}"),
                format!("{BOH_SYMBOL}會"),
                "會社".to_string(),
                format!("社{EOH_SYMBOL}"),
            ]
        );
        // Identical sequences collapse entirely.
        assert_eq!(
            hanja_ngrams(&["型", "型"], 1, 2),
            hanja_ngrams(&["型"], 1, 2)
        );
    }

    #[test]
    fn granularities_parse_and_display() {
        assert_eq!("cjh".parse::<Granularities>().unwrap(), Granularities::CJH);
        assert_eq!("c".parse::<Granularities>().unwrap(), Granularities::C);
        assert_eq!("none".parse::<Granularities>().unwrap(), Granularities::NONE);
        assert_eq!("jc".parse::<Granularities>().unwrap(), Granularities::CJ);
        assert!("cc".parse::<Granularities>().is_err());
        assert!("x".parse::<Granularities>().is_err());
        assert!("".parse::<Granularities>().is_err());
        assert_eq!(Granularities::CJH.to_string(), "cjh");
        assert_eq!(Granularities::NONE.to_string(), "none");
        for bits in 0..=7 {
            let g = Granularities::from_bits(bits).unwrap();
            assert_eq!(g.bits(), bits);
        }
        assert!(Granularities::from_bits(8).is_none());
    }

    struct OneWord;

    impl WordIndex for OneWord {
        fn word_id(&self, surface: &str) -> Option<u32> {
            (surface == "가").then_some(0)
        }

        fn vocab_len(&self) -> u64 {
            1
        }
    }

    fn small_config() -> NGramConfig {
        NGramConfig {
            char_min: 1,
            char_max: 3,
            jamo_min: 3,
            jamo_max: 4,
            hanja_min: 1,
            hanja_max: 2,
            bucket_size: 1000,
            granularities: Granularities::CJH,
        }
    }

    #[test]
    fn unit_set_offsets_and_dedup() {
        let config = small_config();
        let token = AnnotatedToken::bare("가");
        let set = units_for_word(&token, &OneWord, &config);
        assert_eq!(set.word_id, Some(0));
        for id in &set.ngram_ids {
            assert!(id.0 >= 1 && id.0 < 1 + config.bucket_size);
        }
        let mut sorted = set.ngram_ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), set.ngram_ids.len(), "duplicate slot ids");
        assert_eq!(set.ngram_ids.len(), set.granularities.len());

        let oov = units_for_word(&AnnotatedToken::bare("나"), &OneWord, &config);
        assert_eq!(oov.word_id, None);
        assert!(!oov.is_empty());
    }

    #[test]
    fn unit_set_can_be_empty() {
        // OOV word too short for every enabled extractor and without an
        // annotation resolves to no units at all.
        let config = NGramConfig {
            char_min: 9,
            char_max: 9,
            jamo_min: 9,
            jamo_max: 9,
            ..small_config()
        };
        let set = units_for_word(&AnnotatedToken::bare("나"), &OneWord, &config);
        assert_eq!(set.word_id, None);
        assert!(set.is_empty());
        assert_eq!(set.len(), 0);
    }

    fn brute_force_substrings(symbols: &[char], min: u32, max: u32) -> Vec<String> {
        let mut out = Vec::new();
        for n in min..=max {
            let n = n as usize;
            if n > symbols.len() {
                break;
            }
            for window in symbols.windows(n) {
                out.push(window.iter().collect());
            }
        }
        out
    }

    proptest! {
        #[test]
        fn char_ngrams_equal_brute_force(
            word in "[가-힣a-z<>]{0,6}",
            min in 1u32..4,
            span in 0u32..4,
        ) {
            let max = min + span;
            let mut symbols = vec![CHAR_BOW];
            symbols.extend(word.chars());
            symbols.push(CHAR_EOW);
            prop_assert_eq!(
                char_ngrams(&word, min, max),
                brute_force_substrings(&symbols, min, max)
            );
        }

        #[test]
        fn jamo_window_count_formula(word in "[가-힣a-z]{0,5}", n in 1u32..6) {
            let seq = word_to_jamo(&word);
            let grams = jamo_ngrams(&seq, n, n);
            let expected = (seq.len() as i64 - i64::from(n) + 1).max(0) as usize;
            prop_assert_eq!(grams.len(), expected);
        }

        #[test]
        fn enabling_granularities_never_removes_units(
            word in "[가-힣]{1,4}",
            annotated in proptest::bool::ANY,
        ) {
            let token = if annotated {
                AnnotatedToken::annotated(word, vec!["社會"])
            } else {
                AnnotatedToken::bare(word)
            };
            let configs = [
                Granularities::NONE,
                Granularities::C,
                Granularities::CJ,
                Granularities::CJH,
            ];
            let mut previous: HashSet<u64> = HashSet::new();
            for granularities in configs {
                let config = NGramConfig { granularities, ..small_config() };
                let set = units_for_word(&token, &OneWord, &config);
                let ids: HashSet<u64> = set.indices().collect();
                prop_assert!(previous.is_subset(&ids));
                previous = ids;
            }
        }

        #[test]
        fn unit_ids_stay_in_range(word in "[가-힣a-z]{1,5}") {
            let config = small_config();
            let token = AnnotatedToken::annotated(word, vec!["型"]);
            let set = units_for_word(&token, &OneWord, &config);
            let rows = 1 + config.bucket_size;
            for id in set.indices() {
                prop_assert!(id < rows);
            }
        }
    }
}
