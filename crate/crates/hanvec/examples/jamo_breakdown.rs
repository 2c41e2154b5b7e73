//! Decomposes Hangul syllables into jamo and shows the full subword unit
//! inventory of an annotated word at each granularity.
//!
//! Run with: cargo run --example jamo_breakdown

use hanvec::ngrams::{char_ngrams, hanja_ngrams, jamo_ngrams, unit_slot, NGramConfig};
use hanvec::text_units::{
    decompose_syllable, parse_annotated_token, word_to_jamo, JamoKind, BOH_SYMBOL, BOW_SYMBOL,
    EMPTY_JONGSEONG_SYMBOL, EOH_SYMBOL, EOW_SYMBOL,
};

/// Prints private-use marker symbols by name so terminal output stays
/// readable.
fn show_symbol(c: char) -> String {
    match c {
        BOW_SYMBOL => "<bow>".to_string(),
        EOW_SYMBOL => "<eow>".to_string(),
        BOH_SYMBOL => "<boh>".to_string(),
        EOH_SYMBOL => "<eoh>".to_string(),
        EMPTY_JONGSEONG_SYMBOL => "<0>".to_string(),
        other => other.to_string(),
    }
}

fn show_gram(gram: &str) -> String {
    gram.chars().map(show_symbol).collect()
}

fn main() {
    let word = "학교";
    println!("syllable decomposition of {word:?}:");
    for syllable in word.chars() {
        let (cho, jung, jong) = decompose_syllable(syllable).expect("Hangul syllable");
        println!(
            "  {} -> choseong {} (index {}), jungseong {} (index {}), jongseong {} (index {})",
            syllable,
            show_symbol(cho.codepoint()),
            cho.choseong_index().unwrap(),
            show_symbol(jung.codepoint()),
            jung.jungseong_index().unwrap(),
            show_symbol(jong.codepoint()),
            jong.jongseong_index().unwrap(),
        );
    }

    let jamo = word_to_jamo(word);
    let rendered: String = jamo.iter().map(|j| show_symbol(j.codepoint())).collect();
    println!("\njamo stream ({} symbols): {rendered}", jamo.len());
    let passthrough = jamo
        .iter()
        .filter(|j| j.kind() == JamoKind::Passthrough)
        .count();
    println!("passthrough symbols: {passthrough}");

    // The annotated form carries the word's Hanja spelling after a pipe.
    let token = parse_annotated_token("학교|學校").expect("well-formed token");
    let config = NGramConfig::default();

    println!("\ncharacter n-grams ({}..={}):", config.char_min, config.char_max);
    for gram in char_ngrams(&token.surface, config.char_min, config.char_max) {
        println!("  {}", show_gram(&gram));
    }

    println!("\njamo n-grams ({}..={}):", config.jamo_min, config.jamo_max);
    let grams = jamo_ngrams(&jamo, config.jamo_min, config.jamo_max);
    for gram in &grams {
        println!("  {}", show_gram(gram));
    }

    println!("\nhanja n-grams ({}..={}):", config.hanja_min, config.hanja_max);
    for gram in hanja_ngrams(&token.hanja_seqs, config.hanja_min, config.hanja_max) {
        println!("  {}", show_gram(&gram));
    }

    // Every n-gram string maps to a row in the shared hashed table; the
    // word itself would occupy a dedicated vocabulary row in a trained
    // model. With vocab_len 0 the slot is just hash % bucket.
    let bucket = 2_000_000u64;
    println!("\nhashed slots (bucket size {bucket}):");
    for gram in char_ngrams(&token.surface, 2, 2) {
        println!("  {} -> {}", show_gram(&gram), unit_slot(&gram, 0, bucket).0);
    }
}
