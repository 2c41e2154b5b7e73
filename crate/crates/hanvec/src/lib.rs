//! Korean word embeddings from syllable, jamo, and Hanja subword units.
//!
//! Words are scored against contexts as a sum of dot products over their
//! subword units: the whole-word vector, character n-grams of the
//! `<`-wrapped surface, n-grams over the word's jamo decomposition, and
//! n-grams over Hanja annotations when the corpus carries them. N-gram
//! vectors live in a hashed bucket table, so the unit inventory never
//! needs to be materialized. Hanja n-gram slots can be pre-initialized
//! from pretrained Chinese character embeddings before training.
//!
//! The `examples/` directory is the guided tour; each example is runnable
//! against the bundled toy data:
//!
//! - `jamo_breakdown`: syllable decomposition and the unit inventory of a
//!   single word at every granularity.
//! - `train_tiny`: train a small model on an in-memory corpus and inspect
//!   loss per epoch.
//! - `hanja_transfer`: seed Hanja n-gram slots from a pretrained lexicon,
//!   then train and compare.
//! - `analogy_eval`: score a word-analogy file against a trained model.
//! - `similarity_eval`: rank-correlate model similarities against human
//!   judgments.
//! - `export_and_reload`: round-trip a model through the binary format
//!   and the `.vec` text format.
//!
//! The same capabilities are reachable from the command line through the
//! `hanvec` binary; `hanvec help` lists the subcommands.

pub mod cli;
pub mod eval;
pub mod ngrams;
pub mod text_units;
pub mod trainer;
pub mod transfer;
