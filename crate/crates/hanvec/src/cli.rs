//! Command-line surface: training, transfer initialization, evaluation,
//! export, and model inspection behind one binary.
//!
//! Flags are single-dash words in the word2vec tradition (`-input`,
//! `-dim`, `-minn`), every flag has a default, and unknown flags are
//! rejected. Exit codes are part of the contract: 0 on success, 1 on a
//! usage error, 2 on a runtime error. Usage errors are detected before
//! any output file is created or truncated.
//!
//! `train` writes the model in the binary format plus a run manifest
//! alongside it (`<output>.manifest`): flat `key TAB value` text holding
//! every effective parameter, corpus statistics, and the transfer report
//! when pretrained initialization ran. The manifest alone reconstructs
//! the exact training configuration; see [`parse_manifest`].

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use crate::eval::{
    nearest_neighbors, parse_analogy, parse_similarity, run_analogy, run_similarity, VectorSource,
};
use crate::ngrams::NGramConfig;
use crate::text_units::{parse_annotated_token, CorpusSource, StreamStats};
use crate::trainer::{
    atomic_write, export_vec, load_model, read_model_summary, save_model, train_prepared,
    EmbeddingModel, TrainConfig, TrainError, TrainStats, Vocab,
};
use crate::transfer::{
    init_hanja_slots, load_char_mapping, load_pretrained, CharMapping, PretrainedLexicon,
    TransferReport,
};

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for a usage error: bad flags or flag values.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for a runtime error: I/O, corrupt files, failed evaluation.
pub const EXIT_RUNTIME: i32 = 2;

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

extern "C" fn handle_sigint(_: libc::c_int) {
    INTERRUPTED.store(true, Ordering::Relaxed);
}

fn install_sigint_handler() {
    unsafe {
        libc::signal(
            libc::SIGINT,
            handle_sigint as extern "C" fn(libc::c_int) as libc::sighandler_t,
        );
    }
}

#[derive(Debug)]
enum CmdError {
    Usage(String),
    Runtime(String),
}

fn usage_error(message: impl Into<String>) -> CmdError {
    CmdError::Usage(message.into())
}

fn runtime_error(err: &dyn std::error::Error) -> CmdError {
    let mut message = err.to_string();
    let mut source = err.source();
    while let Some(cause) = source {
        message.push_str(": ");
        message.push_str(&cause.to_string());
        source = cause.source();
    }
    CmdError::Runtime(message)
}

fn file_error(path: &Path, err: &dyn std::error::Error) -> CmdError {
    match runtime_error(err) {
        CmdError::Runtime(message) => CmdError::Runtime(format!("{}: {message}", path.display())),
        other => other,
    }
}

const USAGE: &str = "\
usage: hanvec <subcommand> [flags]

subcommands:
  train        train a model on an annotated corpus
  analogy      score a word-analogy dataset against a model
  similarity   correlate model similarities with human judgments
  nn           print the nearest neighbors of a query word
  export-vec   export word vectors in .vec text format
  inspect      print model header and vocabulary statistics
  help         show this message

train flags (defaults in parentheses):
  -input PATH             corpus file, one sentence per line (required)
  -output PATH            model output path (required)
  -dim N                  vector width (300)
  -epoch N                training epochs (5)
  -lr X                   initial learning rate (0.05)
  -neg N                  negative samples per pair (5)
  -ws N                   maximum window half-width (5)
  -t X                    subsampling threshold (0.0001)
  -min-count N            minimum word count (5)
  -bucket N               hashed n-gram slots (20000000)
  -minn N -maxn N         character n-gram lengths (1, 6)
  -jamo-minn N -jamo-maxn N   jamo n-gram lengths (3, 5)
  -hanja-minn N -hanja-maxn N Hanja n-gram lengths (1, 3)
  -granularities S        subword kinds: none, c, cj, cjh, ... (cjh)
  -threads N              worker threads; 1 is deterministic (1)
  -seed N                 RNG seed (42)
  -pretrained-hanja PATH  .vec lexicon to seed Hanja n-gram slots (off)
  -hanja-map PATH         traditional-to-simplified TSV; requires
                          -pretrained-hanja (identity mapping)

analogy / similarity flags:
  -model PATH             trained model (required)
  -dataset PATH           evaluation dataset (required)
  -model-format F         bin or vec (bin)
  -out PATH               also write the machine-readable report (off)

nn flags:
  -model PATH -query WORD (required)   -k N (10)   -model-format F (bin)

export-vec flags:
  -model PATH -output PATH (required)
  -composed B             true composes subword units, false writes raw
                          input rows (true)

inspect flags:
  -model PATH             (required)

exit codes: 0 success, 1 usage error, 2 runtime error
";

/// Runs the CLI on pre-split arguments (without the program name) and
/// returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let Some(subcommand) = args.first() else {
        eprint!("{USAGE}");
        return EXIT_USAGE;
    };
    let rest = &args[1..];
    let outcome = match subcommand.as_str() {
        "help" | "-h" | "--help" => {
            print!("{USAGE}");
            Ok(())
        }
        "train" => cmd_train(rest),
        "analogy" => cmd_analogy(rest),
        "similarity" => cmd_similarity(rest),
        "nn" => cmd_nn(rest),
        "export-vec" => cmd_export_vec(rest),
        "inspect" => cmd_inspect(rest),
        other => Err(usage_error(format!(
            "unknown subcommand {other:?}; run `hanvec help`"
        ))),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(CmdError::Usage(message)) => {
            eprintln!("hanvec: {message}");
            eprintln!("run `hanvec help` for usage");
            EXIT_USAGE
        }
        Err(CmdError::Runtime(message)) => {
            eprintln!("hanvec: {message}");
            EXIT_RUNTIME
        }
    }
}

/// Parsed single-dash flags. Every flag takes exactly one value.
#[derive(Debug)]
struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    fn parse(args: &[String], allowed: &[&str]) -> Result<Self, CmdError> {
        let mut values = BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let Some(name) = arg.strip_prefix('-') else {
                return Err(usage_error(format!("expected a flag, found {arg:?}")));
            };
            if !allowed.contains(&name) {
                return Err(usage_error(format!("unknown flag -{name}")));
            }
            let Some(value) = args.get(i + 1) else {
                return Err(usage_error(format!("flag -{name} needs a value")));
            };
            if values.insert(name.to_string(), value.clone()).is_some() {
                return Err(usage_error(format!("flag -{name} given twice")));
            }
            i += 2;
        }
        Ok(Flags { values })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    fn required(&self, name: &str) -> Result<&str, CmdError> {
        self.get(name)
            .ok_or_else(|| usage_error(format!("missing required flag -{name}")))
    }

    fn parsed<T>(&self, name: &str, default: T) -> Result<T, CmdError>
    where
        T: std::str::FromStr,
        T::Err: Display,
    {
        match self.get(name) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|err| usage_error(format!("bad value for -{name}: {err}"))),
        }
    }
}

const TRAIN_FLAGS: [&str; 21] = [
    "input",
    "output",
    "dim",
    "epoch",
    "lr",
    "neg",
    "ws",
    "t",
    "min-count",
    "bucket",
    "minn",
    "maxn",
    "jamo-minn",
    "jamo-maxn",
    "hanja-minn",
    "hanja-maxn",
    "granularities",
    "threads",
    "seed",
    "pretrained-hanja",
    "hanja-map",
];

fn config_from_flags(flags: &Flags) -> Result<TrainConfig, CmdError> {
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        dim: flags.parsed("dim", defaults.dim)?,
        epochs: flags.parsed("epoch", defaults.epochs)?,
        lr: flags.parsed("lr", defaults.lr)?,
        negatives: flags.parsed("neg", defaults.negatives)?,
        window: flags.parsed("ws", defaults.window)?,
        subsample_t: flags.parsed("t", defaults.subsample_t)?,
        min_count: flags.parsed("min-count", defaults.min_count)?,
        ngram: NGramConfig {
            char_min: flags.parsed("minn", defaults.ngram.char_min)?,
            char_max: flags.parsed("maxn", defaults.ngram.char_max)?,
            jamo_min: flags.parsed("jamo-minn", defaults.ngram.jamo_min)?,
            jamo_max: flags.parsed("jamo-maxn", defaults.ngram.jamo_max)?,
            hanja_min: flags.parsed("hanja-minn", defaults.ngram.hanja_min)?,
            hanja_max: flags.parsed("hanja-maxn", defaults.ngram.hanja_max)?,
            granularities: flags.parsed("granularities", defaults.ngram.granularities)?,
            bucket_size: flags.parsed("bucket", defaults.ngram.bucket_size)?,
        },
        threads: flags.parsed("threads", defaults.threads)?,
        seed: flags.parsed("seed", defaults.seed)?,
    };
    config.validate().map_err(usage_error)?;
    Ok(config)
}

fn cmd_train(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &TRAIN_FLAGS)?;
    let input = PathBuf::from(flags.required("input")?);
    let output = PathBuf::from(flags.required("output")?);
    let config = config_from_flags(&flags)?;
    let pretrained = flags.get("pretrained-hanja").map(PathBuf::from);
    let hanja_map = flags.get("hanja-map").map(PathBuf::from);
    if hanja_map.is_some() && pretrained.is_none() {
        return Err(usage_error("-hanja-map requires -pretrained-hanja"));
    }

    install_sigint_handler();

    let source = CorpusSource::file(&input);
    let (vocab, corpus_stats) =
        Vocab::build(&source, config.min_count, &config.ngram).map_err(|e| runtime_error(&e))?;
    let vocab_len = vocab.len();
    let kept_tokens = vocab.total_tokens();
    let mut model =
        EmbeddingModel::init(vocab, config.clone()).map_err(|e| runtime_error(&e))?;

    let transfer_report = match &pretrained {
        None => None,
        Some(lexicon_path) => {
            let lexicon =
                load_pretrained(lexicon_path).map_err(|e| file_error(lexicon_path, &e))?;
            let mapping = match &hanja_map {
                Some(map_path) => {
                    load_char_mapping(map_path).map_err(|e| file_error(map_path, &e))?
                }
                None => CharMapping::new(),
            };
            let inventory = model.vocab().hanja_ngram_inventory().to_vec();
            let report = init_hanja_slots(&mut model, &lexicon, &mapping, &inventory)
                .map_err(|e| runtime_error(&e))?;
            Some(report)
        }
    };

    let stats = match train_prepared(&mut model, &source, Some(&INTERRUPTED)) {
        Ok(stats) => stats,
        Err(TrainError::Interrupted) => {
            return Err(CmdError::Runtime(
                "interrupted; stopping at an update boundary, model not written".to_string(),
            ));
        }
        Err(err) => return Err(runtime_error(&err)),
    };

    save_model(&model, &output).map_err(|e| file_error(&output, &e))?;
    let manifest_path = manifest_path_for(&output);
    let lines = manifest_lines(
        &config,
        &input,
        &output,
        &corpus_stats,
        vocab_len,
        kept_tokens,
        &stats,
        transfer_report.as_ref(),
    );
    atomic_write(&manifest_path, |w| {
        for (key, value) in &lines {
            writeln!(w, "{key}\t{value}")?;
        }
        Ok(())
    })
    .map_err(|e| file_error(&manifest_path, &e))?;

    println!(
        "trained {} words ({} tokens kept) over {} epochs",
        vocab_len, kept_tokens, config.epochs
    );
    for (epoch, loss) in stats.epoch_mean_loss.iter().enumerate() {
        println!("epoch {} mean loss {:.6}", epoch + 1, loss);
    }
    if let Some(report) = &transfer_report {
        println!(
            "transfer: {} slots initialized, {} n-grams matched, {} missed, {} collisions",
            report.slots_initialized,
            report.ngrams_matched,
            report.ngrams_missed,
            report.collisions_detected
        );
    }
    println!("model written to {}", output.display());
    println!("manifest written to {}", manifest_path.display());
    Ok(())
}

/// Manifest location for a given model output path.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest");
    output.with_file_name(name)
}

#[allow(clippy::too_many_arguments)]
fn manifest_lines(
    config: &TrainConfig,
    input: &Path,
    output: &Path,
    corpus: &StreamStats,
    vocab_len: u32,
    kept_tokens: u64,
    stats: &TrainStats,
    transfer: Option<&TransferReport>,
) -> Vec<(String, String)> {
    let mut lines: Vec<(String, String)> = vec![
        ("command".into(), "train".into()),
        ("input".into(), input.display().to_string()),
        ("output".into(), output.display().to_string()),
        ("dim".into(), config.dim.to_string()),
        ("epoch".into(), config.epochs.to_string()),
        ("lr".into(), config.lr.to_string()),
        ("neg".into(), config.negatives.to_string()),
        ("ws".into(), config.window.to_string()),
        ("t".into(), config.subsample_t.to_string()),
        ("min-count".into(), config.min_count.to_string()),
        ("bucket".into(), config.ngram.bucket_size.to_string()),
        ("minn".into(), config.ngram.char_min.to_string()),
        ("maxn".into(), config.ngram.char_max.to_string()),
        ("jamo-minn".into(), config.ngram.jamo_min.to_string()),
        ("jamo-maxn".into(), config.ngram.jamo_max.to_string()),
        ("hanja-minn".into(), config.ngram.hanja_min.to_string()),
        ("hanja-maxn".into(), config.ngram.hanja_max.to_string()),
        (
            "granularities".into(),
            config.ngram.granularities.to_string(),
        ),
        ("threads".into(), config.threads.to_string()),
        ("seed".into(), config.seed.to_string()),
        ("corpus.sentences".into(), corpus.sentences.to_string()),
        ("corpus.tokens".into(), corpus.tokens.to_string()),
        (
            "corpus.malformed-skipped".into(),
            corpus.malformed_skipped.to_string(),
        ),
        ("vocab.size".into(), vocab_len.to_string()),
        ("vocab.kept-tokens".into(), kept_tokens.to_string()),
        ("train.pairs".into(), stats.pairs_trained.to_string()),
        ("train.tokens-seen".into(), stats.tokens_seen.to_string()),
    ];
    for (epoch, loss) in stats.epoch_mean_loss.iter().enumerate() {
        lines.push((format!("train.epoch-loss.{}", epoch + 1), loss.to_string()));
    }
    match transfer {
        None => lines.push(("transfer.enabled".into(), "false".into())),
        Some(report) => {
            lines.push(("transfer.enabled".into(), "true".into()));
            lines.push((
                "transfer.slots-initialized".into(),
                report.slots_initialized.to_string(),
            ));
            lines.push((
                "transfer.ngrams-matched".into(),
                report.ngrams_matched.to_string(),
            ));
            lines.push((
                "transfer.ngrams-missed".into(),
                report.ngrams_missed.to_string(),
            ));
            lines.push((
                "transfer.collisions-detected".into(),
                report.collisions_detected.to_string(),
            ));
            lines.push(("transfer.dim-check".into(), report.dim_check.to_string()));
            for (len, count) in &report.matched_by_len {
                lines.push((
                    format!("transfer.matched-by-len.{len}"),
                    count.to_string(),
                ));
            }
        }
    }
    lines
}

/// Reconstructs the exact training configuration from manifest text.
///
/// The manifest is `key TAB value` lines as written by `hanvec train`;
/// every configuration key must be present. Extra keys (corpus
/// statistics, transfer report) are ignored.
pub fn parse_manifest(text: &str) -> Result<TrainConfig, String> {
    let mut map: BTreeMap<&str, &str> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('\t') else {
            return Err(format!("manifest line {}: missing tab", idx + 1));
        };
        map.insert(key, value);
    }
    fn field<T: std::str::FromStr>(map: &BTreeMap<&str, &str>, key: &str) -> Result<T, String>
    where
        T::Err: Display,
    {
        let raw = map
            .get(key)
            .ok_or_else(|| format!("manifest is missing key {key:?}"))?;
        raw.parse()
            .map_err(|err| format!("manifest key {key:?}: {err}"))
    }
    Ok(TrainConfig {
        dim: field(&map, "dim")?,
        epochs: field(&map, "epoch")?,
        lr: field(&map, "lr")?,
        negatives: field(&map, "neg")?,
        window: field(&map, "ws")?,
        subsample_t: field(&map, "t")?,
        min_count: field(&map, "min-count")?,
        ngram: NGramConfig {
            char_min: field(&map, "minn")?,
            char_max: field(&map, "maxn")?,
            jamo_min: field(&map, "jamo-minn")?,
            jamo_max: field(&map, "jamo-maxn")?,
            hanja_min: field(&map, "hanja-minn")?,
            hanja_max: field(&map, "hanja-maxn")?,
            granularities: field(&map, "granularities")?,
            bucket_size: field(&map, "bucket")?,
        },
        threads: field(&map, "threads")?,
        seed: field(&map, "seed")?,
    })
}

enum LoadedVectors {
    Model(Box<EmbeddingModel>),
    Lexicon(PretrainedLexicon),
}

impl LoadedVectors {
    fn source(&self) -> &dyn VectorSource {
        match self {
            LoadedVectors::Model(model) => model.as_ref(),
            LoadedVectors::Lexicon(lexicon) => lexicon,
        }
    }
}

fn load_vectors(flags: &Flags) -> Result<LoadedVectors, CmdError> {
    let path = PathBuf::from(flags.required("model")?);
    match flags.get("model-format").unwrap_or("bin") {
        "bin" => Ok(LoadedVectors::Model(Box::new(
            load_model(&path).map_err(|e| file_error(&path, &e))?,
        ))),
        "vec" => Ok(LoadedVectors::Lexicon(
            load_pretrained(&path).map_err(|e| file_error(&path, &e))?,
        )),
        other => Err(usage_error(format!(
            "bad value for -model-format: expected bin or vec, found {other:?}"
        ))),
    }
}

fn open_reader(path: &Path) -> Result<BufReader<File>, CmdError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| file_error(path, &e))
}

fn write_machine_report(path: &Path, lines: &[(String, String)]) -> Result<(), CmdError> {
    atomic_write(path, |w| {
        for (key, value) in lines {
            writeln!(w, "{key}\t{value}")?;
        }
        Ok(())
    })
    .map_err(|e| file_error(path, &e))
}

const EVAL_FLAGS: [&str; 4] = ["model", "dataset", "model-format", "out"];

fn cmd_analogy(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &EVAL_FLAGS)?;
    let dataset_path = PathBuf::from(flags.required("dataset")?);
    let out = flags.get("out").map(PathBuf::from);
    let vectors = load_vectors(&flags)?;
    let items = parse_analogy(open_reader(&dataset_path)?)
        .map_err(|e| file_error(&dataset_path, &e))?;
    let report = run_analogy(vectors.source(), &items);
    println!("{report}");
    if let Some(out) = out {
        write_machine_report(&out, &report.machine_lines())?;
        println!("report written to {}", out.display());
    }
    Ok(())
}

fn cmd_similarity(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &EVAL_FLAGS)?;
    let dataset_path = PathBuf::from(flags.required("dataset")?);
    let out = flags.get("out").map(PathBuf::from);
    let vectors = load_vectors(&flags)?;
    let items = parse_similarity(open_reader(&dataset_path)?)
        .map_err(|e| file_error(&dataset_path, &e))?;
    let report =
        run_similarity(vectors.source(), &items).map_err(|e| runtime_error(&e))?;
    println!("{report}");
    if let Some(out) = out {
        write_machine_report(&out, &report.machine_lines())?;
        println!("report written to {}", out.display());
    }
    Ok(())
}

fn cmd_nn(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &["model", "model-format", "query", "k"])?;
    let raw_query = flags.required("query")?;
    let query = parse_annotated_token(raw_query)
        .map_err(|err| usage_error(format!("bad value for -query: {err}")))?;
    let k: usize = flags.parsed("k", 10)?;
    let vectors = load_vectors(&flags)?;
    let neighbors =
        nearest_neighbors(vectors.source(), &query, k).map_err(|e| runtime_error(&e))?;
    for (surface, similarity) in neighbors {
        println!("{surface}\t{similarity:.6}");
    }
    Ok(())
}

fn cmd_export_vec(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &["model", "output", "composed"])?;
    let model_path = PathBuf::from(flags.required("model")?);
    let output = PathBuf::from(flags.required("output")?);
    let composed = match flags.get("composed").unwrap_or("true") {
        "true" => true,
        "false" => false,
        other => {
            return Err(usage_error(format!(
                "bad value for -composed: expected true or false, found {other:?}"
            )))
        }
    };
    let model = load_model(&model_path).map_err(|e| file_error(&model_path, &e))?;
    export_vec(&model, &output, composed).map_err(|e| file_error(&output, &e))?;
    println!(
        "exported {} vectors of width {} to {}",
        model.vocab().len(),
        model.dim(),
        output.display()
    );
    Ok(())
}

fn cmd_inspect(args: &[String]) -> Result<(), CmdError> {
    let flags = Flags::parse(args, &["model"])?;
    let path = PathBuf::from(flags.required("model")?);
    let summary = read_model_summary(&path).map_err(|e| file_error(&path, &e))?;
    let lines = [
        ("format-version", summary.version.to_string()),
        ("dim", summary.dim.to_string()),
        ("vocab-size", summary.vocab_len.to_string()),
        ("bucket", summary.bucket_size.to_string()),
        ("minn", summary.ngram.char_min.to_string()),
        ("maxn", summary.ngram.char_max.to_string()),
        ("jamo-minn", summary.ngram.jamo_min.to_string()),
        ("jamo-maxn", summary.ngram.jamo_max.to_string()),
        ("hanja-minn", summary.ngram.hanja_min.to_string()),
        ("hanja-maxn", summary.ngram.hanja_max.to_string()),
        ("granularities", summary.ngram.granularities.to_string()),
        ("lr", summary.lr.to_string()),
        ("t", summary.subsample_t.to_string()),
        ("epoch", summary.epochs.to_string()),
        ("neg", summary.negatives.to_string()),
        ("ws", summary.window.to_string()),
        ("seed", summary.seed.to_string()),
        ("vocab.kept-tokens", summary.total_count.to_string()),
        ("vocab.annotated-entries", summary.annotated_entries.to_string()),
        ("file.bytes", summary.file_len.to_string()),
        ("file.expected-bytes", summary.expected_len.to_string()),
    ];
    for (key, value) in lines {
        println!("{key}\t{value}");
    }
    Ok(())
}
