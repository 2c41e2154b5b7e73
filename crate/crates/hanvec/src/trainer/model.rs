//! Embedding matrices and the trained model.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ngrams::{units_for_word, UnitSet};
use crate::text_units::AnnotatedToken;
use crate::trainer::sgd::{self, PairScratch};
use crate::trainer::vocab::Vocab;
use crate::trainer::{TrainConfig, TrainError};

/// RNG stream reserved for matrix initialization, so the initial state
/// does not depend on the worker count.
const INIT_STREAM: u64 = u64::MAX;

/// Row access used by the SGD step. The step is generic over the element
/// type so the same update code runs in 32-bit for training and in 64-bit
/// for gradient verification.
pub trait VectorStore<F> {
    /// Number of rows.
    fn rows(&self) -> usize;
    /// Row width.
    fn dim(&self) -> usize;
    /// Immutable view of row `i`.
    fn row(&self, i: usize) -> &[F];
    /// Mutable view of row `i`.
    fn row_mut(&mut self, i: usize) -> &mut [F];
}

/// Flat row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<F> {
    rows: usize,
    dim: usize,
    data: Vec<F>,
}

impl<F: Copy + Default> DenseMatrix<F> {
    /// Zero-filled matrix.
    pub fn zeroed(rows: usize, dim: usize) -> Self {
        DenseMatrix {
            rows,
            dim,
            data: vec![F::default(); rows * dim],
        }
    }

    /// Matrix over an existing row-major buffer; `data.len()` must equal
    /// `rows * dim`.
    pub fn from_vec(rows: usize, dim: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * dim, "buffer does not match shape");
        DenseMatrix { rows, dim, data }
    }

    /// Underlying row-major buffer.
    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    /// Mutable row-major buffer.
    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }
}

impl DenseMatrix<f32> {
    /// Fills every entry with a uniform draw from `-bound..bound` using a
    /// dedicated, seeded RNG stream.
    fn fill_uniform(&mut self, seed: u64, bound: f32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(INIT_STREAM);
        let dist = Uniform::new(-bound, bound);
        for value in &mut self.data {
            *value = dist.sample(&mut rng);
        }
    }
}

impl<F> VectorStore<F> for DenseMatrix<F> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// A word vector composed by summing unit rows, plus how many units
/// contributed. `unit_count == 0` flags a word that resolved to nothing;
/// its vector is all zeros and evaluation skips it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedVector {
    /// Component sums over the word's unit rows.
    pub values: Vec<f32>,
    /// Number of unit rows summed.
    pub unit_count: usize,
}

impl ComposedVector {
    /// True if no unit contributed.
    pub fn is_empty(&self) -> bool {
        self.unit_count == 0
    }
}

/// A skip-gram embedding model with subword input units.
///
/// The input matrix holds `vocab_len + bucket_size` rows: one per
/// vocabulary word followed by the hashed n-gram slots. The output
/// (context) matrix holds one row per vocabulary word.
#[derive(Clone)]
pub struct EmbeddingModel {
    pub(crate) input: DenseMatrix<f32>,
    pub(crate) output: DenseMatrix<f32>,
    vocab: Vocab,
    config: TrainConfig,
}

impl std::fmt::Debug for EmbeddingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmbeddingModel")
            .field("dim", &self.config.dim)
            .field("vocab_len", &self.vocab.len())
            .field("bucket_size", &self.config.ngram.bucket_size)
            .finish_non_exhaustive()
    }
}

impl EmbeddingModel {
    /// Allocates and initializes matrices for a vocabulary: input rows
    /// are uniform in `-1/dim..1/dim` from a seeded RNG, output rows are
    /// zero.
    pub fn init(vocab: Vocab, config: TrainConfig) -> Result<Self, TrainError> {
        config.validate().map_err(TrainError::Config)?;
        let dim = config.dim as usize;
        let input_rows = vocab.len() as usize + config.ngram.bucket_size as usize;
        let mut input = DenseMatrix::zeroed(input_rows, dim);
        input.fill_uniform(config.seed, 1.0 / config.dim as f32);
        let output = DenseMatrix::zeroed(vocab.len() as usize, dim);
        Ok(EmbeddingModel {
            input,
            output,
            vocab,
            config,
        })
    }

    /// Rebuilds a model from its parts; used when loading from disk.
    pub(crate) fn from_parts(
        input: DenseMatrix<f32>,
        output: DenseMatrix<f32>,
        vocab: Vocab,
        config: TrainConfig,
    ) -> Self {
        EmbeddingModel {
            input,
            output,
            vocab,
            config,
        }
    }

    /// Vector width.
    pub fn dim(&self) -> usize {
        self.config.dim as usize
    }

    /// The vocabulary.
    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Training configuration the model was built with.
    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Input (unit) matrix.
    pub fn input(&self) -> &DenseMatrix<f32> {
        &self.input
    }

    /// Output (context) matrix.
    pub fn output(&self) -> &DenseMatrix<f32> {
        &self.output
    }

    /// Input row for a unit id. Used by the transfer initializer.
    pub fn input_row_mut(&mut self, unit: u64) -> &mut [f32] {
        self.input.row_mut(unit as usize)
    }

    /// Unit set of a token under this model's vocabulary and n-gram
    /// configuration. In-vocabulary surfaces use the unit set fixed at
    /// vocabulary construction (including its Hanja annotation); other
    /// tokens are composed on the fly.
    pub fn units_for(&self, token: &AnnotatedToken) -> UnitSet {
        if let Some(id) = self.vocab.id_of(&token.surface) {
            return self.vocab.entry(id).units.clone();
        }
        units_for_word(token, &self.vocab, &self.config.ngram)
    }

    /// Dot product of the summed unit rows with a context row.
    pub fn score(&self, units: &UnitSet, context: u32) -> f32 {
        let context_row = self.output.row(context as usize);
        let mut score = 0.0f32;
        for unit in units.indices() {
            let row = self.input.row(unit as usize);
            let mut dot = 0.0f32;
            for (a, b) in row.iter().zip(context_row) {
                dot += a * b;
            }
            score += dot;
        }
        score
    }

    /// Applies one negative-sampling SGD step to this model. `step` is
    /// only used to label a divergence error.
    pub fn train_pair(
        &mut self,
        units: &UnitSet,
        context: u32,
        negatives: &[u32],
        lr: f32,
        step: u64,
    ) -> Result<f32, TrainError> {
        let mut scratch = PairScratch::new(self.dim());
        let loss = sgd::pair_step(
            &mut self.input,
            &mut self.output,
            units,
            context,
            negatives,
            lr,
            &mut scratch,
        );
        if !loss.is_finite() {
            return Err(TrainError::NumericalDivergence { step });
        }
        Ok(loss)
    }

    /// Composed vector for a bare surface form.
    pub fn word_vector(&self, surface: &str) -> ComposedVector {
        self.word_vector_for(&AnnotatedToken::bare(surface))
    }

    /// Composed vector for a token: the sum of its unit rows. A token
    /// with no units yields the zero vector with `unit_count == 0`.
    pub fn word_vector_for(&self, token: &AnnotatedToken) -> ComposedVector {
        let units = self.units_for(token);
        let mut values = vec![0.0f32; self.dim()];
        let mut count = 0usize;
        for unit in units.indices() {
            let row = self.input.row(unit as usize);
            for (v, r) in values.iter_mut().zip(row) {
                *v += r;
            }
            count += 1;
        }
        ComposedVector {
            values,
            unit_count: count,
        }
    }
}
