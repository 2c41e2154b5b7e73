//! Scores a word-analogy dataset against a freshly trained model.
//!
//! Analogy items are lines `a b c d` under `: Category` headers; the
//! score of an item is the cosine distance between `v(a) + v(b) - v(c)`
//! and `v(d)`, so lower means better. Out-of-vocabulary words are
//! composed from their subword units, which is how the `Case` items
//! here resolve inflected forms never seen in training.
//!
//! Run with: cargo run --release --example analogy_eval

use std::path::Path;

use hanvec::eval::{load_analogy, run_analogy};
use hanvec::ngrams::NGramConfig;
use hanvec::text_units::CorpusSource;
use hanvec::trainer::{train, TrainConfig};

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");

    let config = TrainConfig {
        dim: 32,
        epochs: 3,
        subsample_t: 0.01,
        min_count: 2,
        ngram: NGramConfig {
            bucket_size: 200_000,
            ..NGramConfig::default()
        },
        ..TrainConfig::default()
    };
    let source = CorpusSource::file(data.join("toy_corpus.txt"));
    let (model, _) = train(&source, config).expect("training succeeds");

    let items = load_analogy(data.join("toy_analogy.txt")).expect("dataset loads");
    println!("loaded {} analogy items", items.len());

    let report = run_analogy(&model, &items);
    println!("{report}");

    println!("machine-readable form:");
    for (key, value) in report.machine_lines() {
        println!("{key}\t{value}");
    }
}
