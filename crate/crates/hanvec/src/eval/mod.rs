//! Intrinsic evaluation: word analogies scored by cosine distance, word
//! similarity scored by rank correlation against human judgments, and
//! nearest-neighbor inspection.
//!
//! All scoring runs in 64-bit arithmetic over vectors drawn from a
//! [`VectorSource`], which both trained models and pretrained `.vec`
//! lexicons implement. Out-of-vocabulary words are composed from their
//! subword units rather than dropped; only words with no units at all, or
//! degenerate zero vectors, cause an item to be skipped, and every skip is
//! counted in the report.

mod dataset;
mod metrics;
mod report;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::text_units::AnnotatedToken;
use crate::trainer::{EmbeddingModel, VectorStore};
use crate::transfer::PretrainedLexicon;

pub use dataset::{
    load_analogy, load_similarity, parse_analogy, parse_similarity, AnalogyItem, SimilarityItem,
};
pub use metrics::{analogy_distance, cosine, fractional_ranks, pearson, spearman};
pub use report::{AnalogyReport, CategoryMean, SimilarityReport};

/// Categories whose per-category means average into the semantic mean.
pub const SEMANTIC_CATEGORIES: [&str; 5] = ["City", "Sex", "Name", "Lang", "Misc"];

/// Categories whose per-category means average into the syntactic mean.
pub const SYNTACTIC_CATEGORIES: [&str; 5] = ["Case", "Tense", "Voice", "Form", "Honor"];

/// Errors from metrics, dataset parsing, and evaluation runs.
#[derive(Debug, Error)]
pub enum EvalError {
    /// Underlying file read failed.
    #[error("evaluation i/o error")]
    Io(#[from] std::io::Error),
    /// A vector with zero norm reached a cosine, or a query word could
    /// not be resolved to a nonzero vector.
    #[error("zero-norm vector")]
    ZeroVector,
    /// Correlation over fewer than two points or a constant sample.
    #[error("correlation is undefined for constant or single-point input")]
    UndefinedCorrelation,
    /// Fewer than two similarity pairs could be scored.
    #[error("need at least 2 scorable pairs, found {found}")]
    InsufficientData { found: usize },
    /// A dataset line failed to parse.
    #[error("dataset line {line}: {reason}")]
    Dataset { line: usize, reason: String },
}

/// Anything that can resolve tokens to 64-bit vectors for evaluation.
///
/// `vector` returns `None` when nothing backs the token: a model composes
/// out-of-vocabulary words from subword units and only gives up when no
/// unit can be extracted, while a plain lexicon gives up on any key miss.
pub trait VectorSource {
    /// The token's vector, or `None` when it has no representation.
    fn vector(&self, token: &AnnotatedToken) -> Option<Vec<f64>>;

    /// Every directly stored surface, in a deterministic order. These are
    /// the candidates ranked by [`nearest_neighbors`].
    fn surfaces(&self) -> Vec<String>;
}

impl VectorSource for EmbeddingModel {
    fn vector(&self, token: &AnnotatedToken) -> Option<Vec<f64>> {
        let units = self.units_for(token);
        if units.is_empty() {
            return None;
        }
        let mut values = vec![0.0f64; self.dim()];
        for unit in units.indices() {
            let row = self.input().row(unit as usize);
            for (value, stored) in values.iter_mut().zip(row) {
                *value += f64::from(*stored);
            }
        }
        Some(values)
    }

    fn surfaces(&self) -> Vec<String> {
        self.vocab()
            .entries()
            .iter()
            .map(|entry| entry.surface.clone())
            .collect()
    }
}

impl VectorSource for PretrainedLexicon {
    fn vector(&self, token: &AnnotatedToken) -> Option<Vec<f64>> {
        self.get(&token.surface)
            .map(|vector| vector.iter().map(|&v| f64::from(v)).collect())
    }

    fn surfaces(&self) -> Vec<String> {
        self.iter().map(|(key, _)| key.to_string()).collect()
    }
}

/// Scores a parsed analogy dataset against a vector source.
///
/// Each item contributes `1 - cos(va + vb - vc, vd)` to its category.
/// Items with an unresolvable word or a zero vector are skipped and
/// counted. The overall mean averages the scored items directly; the
/// semantic and syntactic means average their categories' means.
pub fn run_analogy<S: VectorSource + ?Sized>(source: &S, items: &[AnalogyItem]) -> AnalogyReport {
    let mut sums: BTreeMap<String, (f64, u64)> = BTreeMap::new();
    let mut total = 0.0;
    let mut scored = 0u64;
    let mut skipped = 0u64;

    for item in items {
        let resolved = [&item.a, &item.b, &item.c, &item.d].map(|token| source.vector(token));
        let [Some(va), Some(vb), Some(vc), Some(vd)] = resolved else {
            skipped += 1;
            continue;
        };
        match metrics::analogy_distance(&va, &vb, &vc, &vd) {
            Ok(distance) => {
                let entry = sums.entry(item.category.clone()).or_insert((0.0, 0));
                entry.0 += distance;
                entry.1 += 1;
                total += distance;
                scored += 1;
            }
            Err(_) => skipped += 1,
        }
    }

    let per_category: BTreeMap<String, CategoryMean> = sums
        .into_iter()
        .map(|(category, (sum, count))| {
            (
                category,
                CategoryMean {
                    mean: sum / count as f64,
                    scored: count,
                },
            )
        })
        .collect();
    let group_mean = |categories: &[&str]| {
        let means: Vec<f64> = categories
            .iter()
            .filter_map(|c| per_category.get(*c).map(|m| m.mean))
            .collect();
        (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64)
    };

    AnalogyReport {
        semantic_mean: group_mean(&SEMANTIC_CATEGORIES),
        syntactic_mean: group_mean(&SYNTACTIC_CATEGORIES),
        overall_mean: (scored > 0).then(|| total / scored as f64),
        per_category,
        scored,
        skipped,
    }
}

/// Correlates model cosines with gold similarity scores.
///
/// Pairs with an unresolvable word or a zero vector are skipped and
/// counted. Fails with `InsufficientData` when fewer than two pairs could
/// be scored, and with `UndefinedCorrelation` when either side of the
/// remaining sample is constant.
pub fn run_similarity<S: VectorSource + ?Sized>(
    source: &S,
    items: &[SimilarityItem],
) -> Result<SimilarityReport, EvalError> {
    let mut predicted = Vec::new();
    let mut gold = Vec::new();
    let mut skipped = 0u64;

    for item in items {
        let (Some(v1), Some(v2)) = (source.vector(&item.w1), source.vector(&item.w2)) else {
            skipped += 1;
            continue;
        };
        match metrics::cosine(&v1, &v2) {
            Ok(similarity) => {
                predicted.push(similarity);
                gold.push(item.gold);
            }
            Err(_) => skipped += 1,
        }
    }

    if predicted.len() < 2 {
        return Err(EvalError::InsufficientData {
            found: predicted.len(),
        });
    }
    Ok(SimilarityReport {
        pearson: metrics::pearson(&predicted, &gold)?,
        spearman: metrics::spearman(&predicted, &gold)?,
        pairs: predicted.len() as u64,
        skipped,
    })
}

/// The `k` stored surfaces closest to the query by cosine similarity.
///
/// The query itself is excluded; remaining candidates sort by descending
/// cosine with lexicographic tie-breaks, and fewer than `k` results are
/// returned when the source stores fewer rankable surfaces. Candidates
/// that cannot be scored (no units, zero norm) are left out of the
/// ranking.
pub fn nearest_neighbors<S: VectorSource + ?Sized>(
    source: &S,
    query: &AnnotatedToken,
    k: usize,
) -> Result<Vec<(String, f64)>, EvalError> {
    let query_vector = source.vector(query).ok_or(EvalError::ZeroVector)?;
    if query_vector.iter().all(|v| *v == 0.0) {
        return Err(EvalError::ZeroVector);
    }

    let mut ranked: Vec<(String, f64)> = Vec::new();
    for surface in source.surfaces() {
        if surface == query.surface {
            continue;
        }
        let Some(candidate) = source.vector(&AnnotatedToken::bare(&surface)) else {
            continue;
        };
        let Ok(similarity) = metrics::cosine(&query_vector, &candidate) else {
            continue;
        };
        ranked.push((surface, similarity));
    }
    ranked.sort_by(|(s1, c1), (s2, c2)| {
        c2.partial_cmp(c1)
            .expect("cosines are finite")
            .then_with(|| s1.cmp(s2))
    });
    ranked.truncate(k);
    Ok(ranked)
}
