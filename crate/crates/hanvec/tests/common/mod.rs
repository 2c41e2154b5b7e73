//! Shared corpus generators and helpers for the integration suites.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use hanvec::eval::{cosine, VectorSource};
use hanvec::text_units::parse_annotated_token;
use hanvec::trainer::EmbeddingModel;

/// Distinct Hangul syllables, deterministically spread over the
/// precomposed block.
pub fn syllable_pool(count: usize) -> Vec<char> {
    (0..count)
        .map(|i| char::from_u32(0xAC00 + (i as u32 * 997) % 11172).expect("in Hangul block"))
        .collect()
}

/// Distinct CJK ideographs for synthetic Hanja annotations.
pub fn hanja_pool(count: usize) -> Vec<char> {
    (0..count)
        .map(|i| char::from_u32(0x4E00 + (i as u32 * 601) % 20000).expect("in CJK block"))
        .collect()
}

/// A topic-structured template corpus of about fifty words, roughly a
/// third of them carrying two-character Hanja annotations. Returns one
/// sentence per line.
pub fn progress_corpus(sentences: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syllables = syllable_pool(100);
    let hanja = hanja_pool(40);

    let topics: Vec<Vec<String>> = (0..5)
        .map(|t| {
            (0..10)
                .map(|w| {
                    let i = t * 10 + w;
                    let surface: String =
                        [syllables[2 * i], syllables[2 * i + 1]].iter().collect();
                    if w < 4 {
                        let seq: String = [hanja[(2 * i) % 40], hanja[(2 * i + 1) % 40]]
                            .iter()
                            .collect();
                        format!("{surface}|{seq}")
                    } else {
                        surface
                    }
                })
                .collect()
        })
        .collect();

    let mut out = String::new();
    for _ in 0..sentences {
        let topic = &topics[rng.gen_range(0..topics.len())];
        let len = rng.gen_range(8..=12);
        for k in 0..len {
            if k > 0 {
                out.push(' ');
            }
            out.push_str(&topic[rng.gen_range(0..topic.len())]);
        }
        out.push('\n');
    }
    out
}

/// One synthetic Hanja-sharing pair: two words with disjoint surfaces
/// that carry the same annotation.
pub struct HanjaPair {
    /// First annotated word, e.g. `가나|哲學`.
    pub a: String,
    /// Second annotated word with the same Hanja sequence.
    pub b: String,
}

impl HanjaPair {
    /// Surfaces without annotations.
    pub fn surfaces(&self) -> (String, String) {
        let strip = |w: &str| w.split('|').next().expect("non-empty").to_string();
        (strip(&self.a), strip(&self.b))
    }
}

/// A corpus in which each of eight pseudo-word pairs shares a Hanja
/// annotation and nothing else: within a pair the surfaces have no
/// syllables in common and the two sides appear with disjoint context
/// words, so only the shared annotation can relate them.
pub fn hanja_pair_corpus(sentences: usize, seed: u64) -> (String, Vec<HanjaPair>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs_n = 8;
    let syllables = syllable_pool(32 + pairs_n * 6 * 2);
    let hanja = hanja_pool(3 * pairs_n);

    let word = |syllables: &[char], i: usize| -> String {
        [syllables[2 * i], syllables[2 * i + 1]].iter().collect()
    };

    let mut pairs = Vec::new();
    let mut contexts: Vec<Vec<String>> = Vec::new();
    for p in 0..pairs_n {
        let seq: String = [hanja[3 * p], hanja[3 * p + 1], hanja[3 * p + 2]]
            .iter()
            .collect();
        let a = format!("{}|{seq}", word(&syllables, 2 * p));
        let b = format!("{}|{seq}", word(&syllables, 2 * p + 1));
        pairs.push(HanjaPair { a, b });
        // Six context words per pair, three exclusive to each side.
        let base = 16 + p * 6;
        contexts.push((0..6).map(|k| word(&syllables, base + k)).collect());
    }

    let mut out = String::new();
    for s in 0..sentences {
        let p = s % pairs_n;
        let first_side = (s / pairs_n) % 2 == 0;
        let target = if first_side { &pairs[p].a } else { &pairs[p].b };
        let pool = &contexts[p];
        let side: Vec<&String> = if first_side {
            vec![&pool[0], &pool[1], &pool[2]]
        } else {
            vec![&pool[3], &pool[4], &pool[5]]
        };
        let before = rng.gen_range(1..=2);
        let after = rng.gen_range(1..=2);
        let mut words: Vec<&str> = Vec::new();
        for _ in 0..before {
            words.push(side[rng.gen_range(0..side.len())]);
        }
        words.push(target);
        for _ in 0..after {
            words.push(side[rng.gen_range(0..side.len())]);
        }
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    (out, pairs)
}

/// Mean composed-vector cosine over the word pairs.
pub fn mean_pair_cosine(model: &EmbeddingModel, pairs: &[HanjaPair]) -> f64 {
    let mut sum = 0.0;
    for pair in pairs {
        let a = parse_annotated_token(&pair.a).expect("well-formed");
        let b = parse_annotated_token(&pair.b).expect("well-formed");
        let va = model.vector(&a).expect("trained word resolves");
        let vb = model.vector(&b).expect("trained word resolves");
        sum += cosine(&va, &vb).expect("nonzero");
    }
    sum / pairs.len() as f64
}

/// True if every entry of both matrices is finite.
pub fn all_finite(model: &EmbeddingModel) -> bool {
    let finite = |m: &hanvec::trainer::DenseMatrix<f32>| m.as_slice().iter().all(|v| v.is_finite());
    finite(model.input()) && finite(model.output())
}
