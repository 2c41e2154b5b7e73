//! Vocabulary construction, negative-sampling SGD, and model persistence.
//!
//! [`train`] is the one-shot entry point: it builds a [`Vocab`] from a
//! corpus, initializes an [`EmbeddingModel`], and runs the SGD loop.
//! [`train_prepared`] runs the loop on an already-initialized model, which
//! is how pretrained Hanja slots survive into training: initialize, apply
//! the transfer, then train.
//!
//! The loop itself is the skip-gram recipe. Every kept token becomes a
//! target; a window half-width is drawn uniformly from `1..=window` per
//! target; each (target, context) pair takes one SGD step against
//! `negatives` sampled ids, with the positive context excluded by
//! resampling. Tokens of words below `min_count` and tokens dropped by
//! frequency subsampling still advance the learning-rate schedule, which
//! decays linearly to zero over `epochs * total_tokens` token visits.
//!
//! With `threads == 1` and a fixed seed the run is bit-reproducible.
//! With more workers the corpus is split into byte ranges and the workers
//! update the shared matrices lock-free; lost updates are tolerated by
//! design, so multi-threaded runs are not bit-deterministic.

use std::io;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ngrams::NGramConfig;
use crate::text_units::{CorpusSource, StreamStats, TextUnitError};

mod model;
mod negative;
mod persist;
mod sgd;
mod vocab;

pub use model::{ComposedVector, DenseMatrix, EmbeddingModel, VectorStore};
pub use negative::NegativeTable;
pub use persist::{
    export_vec, load_model, read_model_summary, save_model, ModelSummary, PersistError,
    FORMAT_VERSION, MAGIC,
};
pub(crate) use persist::atomic_write;
pub use sgd::{log1p_exp, lr_at, pair_step, sigmoid, subsample_keep_prob, PairScratch};
pub use vocab::{Vocab, VocabEntry};

use sgd::Hogwild;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Vector width d.
    pub dim: u32,
    /// Passes over the corpus.
    pub epochs: u32,
    /// Initial learning rate, decayed linearly to zero.
    pub lr: f64,
    /// Negative samples per (target, context) pair.
    pub negatives: u32,
    /// Maximum context window half-width.
    pub window: u32,
    /// Frequency subsampling threshold t.
    pub subsample_t: f64,
    /// Words occurring fewer times are dropped from the vocabulary.
    pub min_count: u32,
    /// Subword unit extraction settings.
    pub ngram: NGramConfig,
    /// Worker count; 1 is the deterministic mode.
    pub threads: u32,
    /// Seed for initialization, subsampling, windows, and negatives.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 300,
            epochs: 5,
            lr: 0.05,
            negatives: 5,
            window: 5,
            subsample_t: 1e-4,
            min_count: 5,
            ngram: NGramConfig::default(),
            threads: 1,
            seed: 42,
        }
    }
}

impl TrainConfig {
    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<(), String> {
        if self.dim == 0 {
            return Err("dim must be at least 1".to_string());
        }
        if self.epochs == 0 {
            return Err("epochs must be at least 1".to_string());
        }
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(format!("lr must be positive and finite, got {}", self.lr));
        }
        if self.negatives == 0 {
            return Err("negatives must be at least 1".to_string());
        }
        if self.window == 0 {
            return Err("window must be at least 1".to_string());
        }
        if !(self.subsample_t > 0.0 && self.subsample_t <= 1.0) {
            return Err(format!(
                "subsample_t must be in (0, 1], got {}",
                self.subsample_t
            ));
        }
        if self.min_count == 0 {
            return Err("min_count must be at least 1".to_string());
        }
        if self.threads == 0 {
            return Err("threads must be at least 1".to_string());
        }
        self.ngram.validate()
    }
}

/// Errors out of vocabulary construction and training.
#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    /// A configuration field is out of range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The corpus contains no tokens.
    #[error("corpus contains no tokens")]
    EmptyCorpus,

    /// The corpus could not be opened or sized.
    #[error("cannot read corpus")]
    CorpusIo(#[source] io::Error),

    /// A sentence failed to parse mid-stream.
    #[error(transparent)]
    TextUnit(#[from] TextUnitError),

    /// A non-finite loss appeared.
    #[error("numerical divergence at token {step}")]
    NumericalDivergence {
        /// Token-visit ordinal at which the divergence was detected.
        step: u64,
    },

    /// A stop was requested and honored before training finished.
    #[error("training interrupted")]
    Interrupted,

    /// Saving or loading a model failed.
    #[error(transparent)]
    Persist(#[from] PersistError),
}

/// What a finished run did.
#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    /// Mean per-pair loss of each epoch, in epoch order. Zero when an
    /// epoch trained no pairs.
    pub epoch_mean_loss: Vec<f64>,
    /// SGD steps taken ((target, context) pairs).
    pub pairs_trained: u64,
    /// Token visits, summed over epochs; drives the LR schedule.
    pub tokens_seen: u64,
    /// Stream statistics from the vocabulary-building pass.
    pub vocab_stream: StreamStats,
}

/// Builds the vocabulary, initializes a model, and trains it.
pub fn train(
    source: &CorpusSource,
    config: TrainConfig,
) -> Result<(EmbeddingModel, TrainStats), TrainError> {
    config.validate().map_err(TrainError::Config)?;
    let (vocab, stream_stats) = Vocab::build(source, config.min_count, &config.ngram)?;
    let mut model = EmbeddingModel::init(vocab, config)?;
    let mut stats = train_prepared(&mut model, source, None)?;
    stats.vocab_stream = stream_stats;
    Ok((model, stats))
}

/// Runs the SGD loop over a corpus on an already-initialized model.
///
/// `stop`, when supplied, is polled at sentence boundaries; once it reads
/// true the workers drain and the call returns [`TrainError::Interrupted`],
/// leaving the model in its partially-trained (still finite) state.
///
/// A vocabulary with fewer than two words trains no pairs: a negative must
/// differ from the positive context, which a one-word dictionary cannot
/// provide. The run still completes (epochs pass, the schedule advances).
pub fn train_prepared(
    model: &mut EmbeddingModel,
    source: &CorpusSource,
    stop: Option<&AtomicBool>,
) -> Result<TrainStats, TrainError> {
    let config = model.config().clone();
    config.validate().map_err(TrainError::Config)?;
    let vocab = model.vocab().clone();
    let corpus_len = source.byte_len().map_err(TrainError::CorpusIo)?;

    let table = if vocab.len() >= 2 {
        Some(NegativeTable::from_counts(
            vocab.entries().iter().map(|e| e.count),
        ))
    } else {
        None
    };

    let total_updates = u64::from(config.epochs) * vocab.total_tokens();
    let token_counter = AtomicU64::new(0);
    let threads = config.threads as usize;

    let input = Hogwild::new(std::mem::replace(
        &mut model.input,
        DenseMatrix::zeroed(0, 0),
    ));
    let output = Hogwild::new(std::mem::replace(
        &mut model.output,
        DenseMatrix::zeroed(0, 0),
    ));

    let mut epoch_mean_loss = Vec::with_capacity(config.epochs as usize);
    let mut pairs_trained = 0u64;
    let mut outcome = Ok(());

    'epochs: for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0f64;
        let mut epoch_pairs = 0u64;

        let worker_results = std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(threads);
            for worker in 0..threads {
                let start = corpus_len * worker as u64 / threads as u64;
                let end = corpus_len * (worker + 1) as u64 / threads as u64;
                let mut ctx = WorkerContext {
                    input: input.clone(),
                    output: output.clone(),
                    vocab: &vocab,
                    table: table.as_ref(),
                    config: &config,
                    token_counter: &token_counter,
                    total_updates,
                    stop,
                    rng_stream: 1 + u64::from(epoch) * threads as u64 + worker as u64,
                };
                handles.push(scope.spawn(move || ctx.run_range(source, start, end)));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("training worker panicked"))
                .collect::<Vec<_>>()
        });

        let mut interrupted = false;
        for result in worker_results {
            match result {
                Ok(part) => {
                    epoch_loss += part.loss_sum;
                    epoch_pairs += part.pairs;
                    interrupted |= part.interrupted;
                }
                Err(err) => {
                    outcome = Err(err);
                    break 'epochs;
                }
            }
        }

        epoch_mean_loss.push(if epoch_pairs == 0 {
            0.0
        } else {
            epoch_loss / epoch_pairs as f64
        });
        pairs_trained += epoch_pairs;

        if interrupted {
            outcome = Err(TrainError::Interrupted);
            break;
        }
    }

    model.input = input.into_inner().expect("workers joined");
    model.output = output.into_inner().expect("workers joined");
    outcome?;

    Ok(TrainStats {
        epoch_mean_loss,
        pairs_trained,
        tokens_seen: token_counter.load(Ordering::Relaxed),
        vocab_stream: StreamStats::default(),
    })
}

struct WorkerPart {
    loss_sum: f64,
    pairs: u64,
    interrupted: bool,
}

struct WorkerContext<'a> {
    input: Hogwild<DenseMatrix<f32>>,
    output: Hogwild<DenseMatrix<f32>>,
    vocab: &'a Vocab,
    table: Option<&'a NegativeTable>,
    config: &'a TrainConfig,
    token_counter: &'a AtomicU64,
    total_updates: u64,
    stop: Option<&'a AtomicBool>,
    rng_stream: u64,
}

impl WorkerContext<'_> {
    fn run_range(&mut self, source: &CorpusSource, start: u64, end: u64) -> Result<WorkerPart, TrainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(self.rng_stream);
        let mut scratch = PairScratch::new(self.config.dim as usize);
        let mut negatives = Vec::with_capacity(self.config.negatives as usize);

        let mut part = WorkerPart {
            loss_sum: 0.0,
            pairs: 0,
            interrupted: false,
        };
        let mut stream = source
            .stream_range(start, end)
            .map_err(TrainError::CorpusIo)?;

        // Kept word ids of the sentence being assembled.
        let mut sentence: Vec<u32> = Vec::new();
        let mut current_sentence = None;

        for item in stream.by_ref() {
            let (sentence_idx, token) = item?;
            if current_sentence != Some(sentence_idx) {
                if current_sentence.is_some() {
                    self.train_sentence(&sentence, &mut rng, &mut scratch, &mut negatives, &mut part)?;
                    sentence.clear();
                    if let Some(stop) = self.stop {
                        if stop.load(Ordering::Relaxed) {
                            part.interrupted = true;
                            return Ok(part);
                        }
                    }
                }
                current_sentence = Some(sentence_idx);
            }

            self.token_counter.fetch_add(1, Ordering::Relaxed);
            let Some(id) = self.vocab.id_of(&token.surface) else {
                continue;
            };
            let keep = subsample_keep_prob(self.vocab.frequency(id), self.config.subsample_t);
            if keep < 1.0 && rng.gen::<f64>() >= keep {
                continue;
            }
            sentence.push(id);
        }
        if current_sentence.is_some() {
            self.train_sentence(&sentence, &mut rng, &mut scratch, &mut negatives, &mut part)?;
        }
        Ok(part)
    }

    fn train_sentence(
        &mut self,
        sentence: &[u32],
        rng: &mut ChaCha8Rng,
        scratch: &mut PairScratch<f32>,
        negatives: &mut Vec<u32>,
        part: &mut WorkerPart,
    ) -> Result<(), TrainError> {
        let Some(table) = self.table else {
            return Ok(());
        };
        for (i, &target) in sentence.iter().enumerate() {
            let done = self.token_counter.load(Ordering::Relaxed);
            let lr = lr_at(self.config.lr, done.min(self.total_updates), self.total_updates) as f32;
            let half = rng.gen_range(1..=self.config.window) as usize;
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(sentence.len() - 1);
            let units = &self.vocab.entry(target).units;
            if units.is_empty() {
                continue;
            }
            for (j, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                if j == i {
                    continue;
                }
                negatives.clear();
                for _ in 0..self.config.negatives {
                    negatives.push(table.sample_excluding(rng, context));
                }
                let loss = pair_step(
                    &mut self.input,
                    &mut self.output,
                    units,
                    context,
                    negatives,
                    lr,
                    scratch,
                );
                if !loss.is_finite() {
                    return Err(TrainError::NumericalDivergence { step: done });
                }
                part.loss_sum += f64::from(loss);
                part.pairs += 1;
            }
        }
        Ok(())
    }
}
