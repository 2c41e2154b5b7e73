//! Seeds Hanja n-gram slots from a pretrained Chinese-character lexicon,
//! trains, and compares against the same run without seeding.
//!
//! The lexicon holds simplified characters, so the corpus's traditional
//! Hanja n-grams are converted with a character mapping before lookup.
//!
//! Run with: cargo run --release --example hanja_transfer

use std::path::Path;

use hanvec::eval::{cosine, load_similarity, run_similarity, VectorSource};
use hanvec::ngrams::NGramConfig;
use hanvec::text_units::{parse_annotated_token, CorpusSource};
use hanvec::trainer::{train_prepared, EmbeddingModel, TrainConfig, Vocab};
use hanvec::transfer::{init_hanja_slots, load_char_mapping, load_pretrained};

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mapping_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/trad2simp.tsv");

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
    let (vocab, _) =
        Vocab::build(&source, config.min_count, &config.ngram).expect("corpus builds");
    println!(
        "vocabulary: {} words, {} distinct Hanja n-grams",
        vocab.len(),
        vocab.hanja_ngram_inventory().len()
    );

    let lexicon = load_pretrained(data.join("toy_pretrained.vec")).expect("lexicon loads");
    let mapping = load_char_mapping(&mapping_path).expect("mapping loads");
    println!(
        "lexicon: {} entries of width {}, mapping: {} characters",
        lexicon.len(),
        lexicon.dim(),
        mapping.len()
    );

    // Same vocabulary and seed twice: the only difference between the two
    // runs is whether Hanja slots start from the lexicon or from the
    // usual random initialization.
    let mut seeded =
        EmbeddingModel::init(vocab.clone(), config.clone()).expect("model initializes");
    let mut baseline = EmbeddingModel::init(vocab.clone(), config).expect("model initializes");

    let inventory = vocab.hanja_ngram_inventory().to_vec();
    let report =
        init_hanja_slots(&mut seeded, &lexicon, &mapping, &inventory).expect("dims match");
    println!(
        "\ntransfer: {} of {} n-grams matched ({} slots written, {} hash collisions)",
        report.ngrams_matched,
        report.ngrams_matched + report.ngrams_missed,
        report.slots_initialized,
        report.collisions_detected
    );
    for (len, count) in &report.matched_by_len {
        println!("  matched n-grams of symbol length {len}: {count}");
    }

    // Before any training, seeded models already relate words that share
    // Hanja characters: 학교 and 학생 both carry 學, so their seeded
    // n-gram slots pull them together, while the baseline's random slots
    // leave them unrelated.
    let pair_cosine = |model: &EmbeddingModel, a: &str, b: &str| -> f64 {
        let a = parse_annotated_token(a).expect("valid token");
        let b = parse_annotated_token(b).expect("valid token");
        cosine(
            &model.vector(&a).expect("resolvable"),
            &model.vector(&b).expect("resolvable"),
        )
        .expect("nonzero")
    };
    println!("\ncosine of 학교|學校 vs 학생|學生 (shared character 學):");
    println!("  before training: seeded {:+.4}, baseline {:+.4}",
        pair_cosine(&seeded, "학교|學校", "학생|學生"),
        pair_cosine(&baseline, "학교|學校", "학생|學生"),
    );

    train_prepared(&mut seeded, &source, None).expect("seeded run trains");
    train_prepared(&mut baseline, &source, None).expect("baseline run trains");

    println!("  after training:  seeded {:+.4}, baseline {:+.4}",
        pair_cosine(&seeded, "학교|學校", "학생|學生"),
        pair_cosine(&baseline, "학교|學校", "학생|學生"),
    );

    let items = load_similarity(data.join("toy_similarity.txt")).expect("dataset loads");
    let with = run_similarity(&seeded, &items).expect("enough scorable pairs");
    let without = run_similarity(&baseline, &items).expect("enough scorable pairs");
    println!("\nsimilarity correlation on {} pairs:", items.len());
    println!(
        "  seeded    spearman {:+.6}  pearson {:+.6}",
        with.spearman, with.pearson
    );
    println!(
        "  baseline  spearman {:+.6}  pearson {:+.6}",
        without.spearman, without.pearson
    );
}
