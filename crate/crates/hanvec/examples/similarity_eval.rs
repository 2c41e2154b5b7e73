//! Rank-correlates model similarities against human judgments.
//!
//! The dataset is tab-separated `word1 TAB word2 TAB gold`; the model's
//! cosine for each pair is correlated with the gold column using both
//! Pearson's r (linear) and Spearman's rho (rank, with average ranks on
//! ties).
//!
//! Run with: cargo run --release --example similarity_eval

use std::path::Path;

use hanvec::eval::{cosine, load_similarity, run_similarity, VectorSource};
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

    let items = load_similarity(data.join("toy_similarity.txt")).expect("dataset loads");

    println!("pair scores (model cosine vs human gold):");
    for item in &items {
        let (Some(v1), Some(v2)) = (model.vector(&item.w1), model.vector(&item.w2)) else {
            continue;
        };
        let predicted = cosine(&v1, &v2).expect("nonzero vectors");
        println!(
            "  {:<8} {:<8} model {predicted:+.4}  gold {:.1}",
            item.w1.surface, item.w2.surface, item.gold
        );
    }

    let report = run_similarity(&model, &items).expect("enough scorable pairs");
    println!("\n{report}");
}
