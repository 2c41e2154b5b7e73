//! Trains a small model on an in-memory corpus and inspects the loss
//! curve and a few nearest neighbors.
//!
//! Run with: cargo run --release --example train_tiny

use hanvec::eval::nearest_neighbors;
use hanvec::ngrams::NGramConfig;
use hanvec::text_units::{parse_annotated_token, CorpusSource};
use hanvec::trainer::{train, TrainConfig};

fn main() {
    // A corpus is one sentence per line; tokens may carry Hanja
    // annotations after a pipe. This one has two topic clusters, so
    // related words end up with related vectors even at toy scale.
    let mut text = String::new();
    for _ in 0..200 {
        text.push_str("학교|學校 학생|學生 교사|敎師 공부 책 학생|學生 학교|學校\n");
        text.push_str("학생|學生 공부 학문|學問 책 학교|學校 교사|敎師\n");
        text.push_str("전쟁|戰爭 군대|軍隊 무기 군인|軍人 전쟁|戰爭 싸움\n");
        text.push_str("평화|平和 전쟁|戰爭 나라 군대|軍隊 평화|平和\n");
    }
    let source = CorpusSource::memory(text);

    let config = TrainConfig {
        dim: 32,
        epochs: 5,
        subsample_t: 0.01,
        min_count: 1,
        ngram: NGramConfig {
            bucket_size: 100_000,
            ..NGramConfig::default()
        },
        ..TrainConfig::default()
    };

    let (model, stats) = train(&source, config).expect("training succeeds");

    println!(
        "vocabulary: {} words, corpus: {} sentences / {} tokens",
        model.vocab().len(),
        stats.vocab_stream.sentences,
        stats.vocab_stream.tokens
    );
    println!("pairs trained: {}", stats.pairs_trained);
    for (epoch, loss) in stats.epoch_mean_loss.iter().enumerate() {
        println!("epoch {}: mean loss {loss:.6}", epoch + 1);
    }

    for query in ["학교", "전쟁"] {
        let token = parse_annotated_token(query).expect("valid token");
        let neighbors = nearest_neighbors(&model, &token, 3).expect("query is representable");
        println!("\nnearest neighbors of {query}:");
        for (surface, cosine) in neighbors {
            println!("  {surface}  {cosine:.4}");
        }
    }
}
