//! Round-trips a model through the binary format and the `.vec` text
//! format.
//!
//! The binary format stores the full model (header, annotated
//! vocabulary, both matrices, checksum) and reloads bit-for-bit. The
//! `.vec` export is a plain-text interchange format holding one line per
//! vocabulary word; composed mode writes each word's unit-summed vector
//! (what evaluation uses), raw mode writes only the word's own input
//! row.
//!
//! Run with: cargo run --release --example export_and_reload

use std::path::Path;

use hanvec::eval::{cosine, run_similarity, VectorSource};
use hanvec::ngrams::NGramConfig;
use hanvec::text_units::CorpusSource;
use hanvec::trainer::{export_vec, load_model, read_model_summary, save_model, train, TrainConfig};
use hanvec::transfer::load_pretrained;

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let workdir = tempfile::tempdir().expect("temp dir");

    let config = TrainConfig {
        dim: 32,
        epochs: 2,
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

    // Binary round trip: identical header, vocabulary, and matrices.
    let bin_path = workdir.path().join("model.bin");
    save_model(&model, &bin_path).expect("model saves");
    let reloaded = load_model(&bin_path).expect("model loads");
    let before = model.word_vector("학교");
    let after = reloaded.word_vector("학교");
    assert_eq!(before, after, "binary round trip must be exact");
    println!(
        "binary round trip: {} ({} bytes), vectors identical",
        bin_path.display(),
        std::fs::metadata(&bin_path).expect("file exists").len()
    );

    let summary = read_model_summary(&bin_path).expect("header reads");
    println!(
        "header: dim {}, vocab {}, bucket {}, granularities {}",
        summary.dim, summary.vocab_len, summary.bucket_size, summary.ngram.granularities
    );

    // Text round trip: .vec keeps six significant digits per component,
    // so scores drift slightly but rankings hold.
    let vec_path = workdir.path().join("model.vec");
    export_vec(&model, &vec_path, true).expect("export succeeds");
    let lexicon = load_pretrained(&vec_path).expect("export reads back");
    println!(
        "\n.vec export: {} entries of width {}",
        lexicon.len(),
        lexicon.dim()
    );

    let w1 = hanvec::text_units::parse_annotated_token("학교").expect("token");
    let w2 = hanvec::text_units::parse_annotated_token("학생").expect("token");
    let exact = cosine(
        &model.vector(&w1).expect("in vocabulary"),
        &model.vector(&w2).expect("in vocabulary"),
    )
    .expect("nonzero");
    let rounded = cosine(
        &lexicon.vector(&w1).expect("in lexicon"),
        &lexicon.vector(&w2).expect("in lexicon"),
    )
    .expect("nonzero");
    println!("cosine(학교, 학생): binary {exact:.8}, .vec {rounded:.8}");
    assert!((exact - rounded).abs() < 1e-5, "text round trip drifted");

    // The exported file is a valid evaluation source in its own right.
    let items =
        hanvec::eval::load_similarity(data.join("toy_similarity.txt")).expect("dataset loads");
    let from_bin = run_similarity(&model, &items).expect("scorable");
    let from_vec = run_similarity(&lexicon, &items).expect("scorable");
    println!(
        "spearman: binary {:+.6}, .vec {:+.6}",
        from_bin.spearman, from_vec.spearman
    );
}
