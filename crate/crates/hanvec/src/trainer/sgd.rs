//! Negative-sampling SGD step and shared-matrix plumbing.
//!
//! The step is generic over the float type: training instantiates it with
//! `f32`, while gradient tests instantiate the identical code with `f64`
//! and compare against finite differences.

use std::cell::UnsafeCell;
use std::sync::Arc;

use num_traits::Float;

use crate::ngrams::UnitSet;
use crate::trainer::model::VectorStore;

/// Numerically stable `ln(1 + e^x)`.
pub fn log1p_exp<F: Float>(x: F) -> F {
    if x > F::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable logistic function.
pub fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Learning rate after `done` of `total` planned token updates: linear
/// decay from `base` to zero, never negative.
pub fn lr_at(base: f64, done: u64, total: u64) -> f64 {
    if total == 0 {
        return base;
    }
    let remaining = 1.0 - done as f64 / total as f64;
    base * remaining.max(0.0)
}

/// Probability of keeping an occurrence of a word with corpus frequency
/// `frequency` under subsampling threshold `t`:
/// `min(1, sqrt(t/f) + t/f)`. Both arguments must be positive.
pub fn subsample_keep_prob(frequency: f64, t: f64) -> f64 {
    let ratio = t / frequency;
    (ratio.sqrt() + ratio).min(1.0)
}

/// Reusable buffers for [`pair_step`], sized to the vector width.
pub struct PairScratch<F> {
    hidden: Vec<F>,
    delta: Vec<F>,
    gradients: Vec<F>,
}

impl<F: Float> PairScratch<F> {
    /// Scratch for a model of width `dim`.
    pub fn new(dim: usize) -> Self {
        PairScratch {
            hidden: vec![F::zero(); dim],
            delta: vec![F::zero(); dim],
            gradients: Vec::new(),
        }
    }
}

/// One skip-gram step with negative sampling.
///
/// With `h` the sum of the input rows of `units` and `s(p) = h . output[p]`,
/// the step minimizes
///
/// ```text
/// L = ln(1 + e^-s(context)) + sum over j in negatives of ln(1 + e^s(j))
/// ```
///
/// by plain SGD: every touched row moves by `-lr` times its gradient, and
/// all gradients are evaluated at the values the matrices held when the
/// step began. Scores come first, then the output rows move, then the
/// accumulated delta lands on every input unit row. Returns the loss at
/// the pre-step point; callers are responsible for checking it is finite.
///
/// `negatives` must not contain `context`; a negative id may repeat, in
/// which case its row receives both contributions.
pub fn pair_step<F, S>(
    input: &mut S,
    output: &mut S,
    units: &UnitSet,
    context: u32,
    negatives: &[u32],
    lr: F,
    scratch: &mut PairScratch<F>,
) -> F
where
    F: Float + std::ops::AddAssign + std::ops::SubAssign,
    S: VectorStore<F>,
{
    let dim = input.dim();
    debug_assert_eq!(output.dim(), dim);
    debug_assert!(negatives.iter().all(|&j| j != context));

    let hidden = &mut scratch.hidden;
    for h in hidden.iter_mut() {
        *h = F::zero();
    }
    for unit in units.indices() {
        let row = input.row(unit as usize);
        for (h, r) in hidden.iter_mut().zip(row) {
            *h += *r;
        }
    }

    // Scores and gradients for every pair before any row moves.
    let mut loss = F::zero();
    scratch.gradients.clear();
    for (pair, &row_id) in std::iter::once(&context).chain(negatives).enumerate() {
        let row = output.row(row_id as usize);
        let mut score = F::zero();
        for (h, r) in hidden.iter().zip(row) {
            score += *h * *r;
        }
        if pair == 0 {
            loss += log1p_exp(-score);
            scratch.gradients.push(sigmoid(score) - F::one());
        } else {
            loss += log1p_exp(score);
            scratch.gradients.push(sigmoid(score));
        }
    }

    // Input delta from the pre-update output rows.
    let delta = &mut scratch.delta;
    for d in delta.iter_mut() {
        *d = F::zero();
    }
    for (&gradient, &row_id) in scratch
        .gradients
        .iter()
        .zip(std::iter::once(&context).chain(negatives))
    {
        let row = output.row(row_id as usize);
        for (d, r) in delta.iter_mut().zip(row) {
            *d += gradient * *r;
        }
    }

    // Output rows move against their gradient g * h.
    for (&gradient, &row_id) in scratch
        .gradients
        .iter()
        .zip(std::iter::once(&context).chain(negatives))
    {
        let row = output.row_mut(row_id as usize);
        let step = lr * gradient;
        for (r, h) in row.iter_mut().zip(hidden.iter()) {
            *r -= step * *h;
        }
    }

    // Every input unit row receives the shared delta.
    for unit in units.indices() {
        let row = input.row_mut(unit as usize);
        for (r, d) in row.iter_mut().zip(delta.iter()) {
            *r -= lr * *d;
        }
    }

    loss
}

/// Shared mutable state for lock-free parallel SGD.
///
/// Workers race on the matrices on purpose: updates are sparse enough
/// that lost writes barely matter for the final embedding quality, which
/// is the usual Hogwild argument. Cloning hands out another handle to the
/// same allocation.
pub(crate) struct Hogwild<T>(Arc<UnsafeCell<T>>);

unsafe impl<T: Send> Send for Hogwild<T> {}
unsafe impl<T: Send> Sync for Hogwild<T> {}

impl<T> Hogwild<T> {
    pub(crate) fn new(value: T) -> Self {
        Hogwild(Arc::new(UnsafeCell::new(value)))
    }

    /// Recovers the inner value once every other handle is gone.
    pub(crate) fn into_inner(self) -> Option<T> {
        Arc::try_unwrap(self.0).ok().map(UnsafeCell::into_inner)
    }

    #[allow(clippy::mut_from_ref)]
    fn get(&self) -> &mut T {
        unsafe { &mut *self.0.get() }
    }
}

impl<T> Clone for Hogwild<T> {
    fn clone(&self) -> Self {
        Hogwild(self.0.clone())
    }
}

impl<F, S: VectorStore<F>> VectorStore<F> for Hogwild<S> {
    fn rows(&self) -> usize {
        self.get().rows()
    }

    fn dim(&self) -> usize {
        self.get().dim()
    }

    fn row(&self, i: usize) -> &[F] {
        self.get().row(i)
    }

    fn row_mut(&mut self, i: usize) -> &mut [F] {
        self.get().row_mut(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngrams::UnitId;
    use crate::trainer::model::DenseMatrix;

    fn unit_set(ids: &[u64]) -> UnitSet {
        UnitSet {
            word_id: None,
            ngram_ids: ids.iter().map(|&i| UnitId(i)).collect(),
            granularities: ids.iter().map(|_| crate::ngrams::Granularity::Char).collect(),
        }
    }

    #[test]
    fn lr_decays_linearly_and_clamps() {
        assert_eq!(lr_at(0.05, 0, 100), 0.05);
        assert!((lr_at(0.05, 50, 100) - 0.025).abs() < 1e-12);
        assert_eq!(lr_at(0.05, 100, 100), 0.0);
        assert_eq!(lr_at(0.05, 150, 100), 0.0);
    }

    #[test]
    fn keep_prob_matches_formula() {
        let p = subsample_keep_prob(1e-2, 1e-4);
        assert!((p - 0.11).abs() < 1e-12);
        assert_eq!(subsample_keep_prob(1e-4, 1e-1), 1.0);
    }

    #[test]
    fn stable_logistic_helpers() {
        assert!((sigmoid(0.0f64) - 0.5).abs() < 1e-15);
        assert!((log1p_exp(0.0f64) - 2.0f64.ln()).abs() < 1e-15);
        // Extreme arguments stay finite instead of overflowing exp.
        assert!(sigmoid(-800.0f64) >= 0.0);
        assert!((log1p_exp(800.0f64) - 800.0).abs() < 1e-9);
        assert_eq!(sigmoid(800.0f64), 1.0);
        assert!(log1p_exp(-800.0f64).abs() < 1e-12);
    }

    #[test]
    fn pair_step_hand_checked_single_unit() {
        // One unit, one context, one negative, dim 1.
        // input[0] = 2, output[0] = 1 (context), output[1] = -1 (negative).
        let mut input = DenseMatrix::from_vec(1, 1, vec![2.0f64]);
        let mut output = DenseMatrix::from_vec(2, 1, vec![1.0f64, -1.0]);
        let units = unit_set(&[0]);
        let mut scratch = PairScratch::new(1);
        let lr = 0.1;
        let loss = pair_step(&mut input, &mut output, &units, 0, &[1], lr, &mut scratch);

        // s_pos = 2, s_neg = -2.
        let expected_loss = (1.0 + (-2.0f64).exp()).ln() + (1.0 + (-2.0f64).exp()).ln();
        assert!((loss - expected_loss).abs() < 1e-12);

        let g_pos = sigmoid(2.0f64) - 1.0;
        let g_neg = sigmoid(-2.0f64);
        // Output rows move by -lr * g * h with h = 2.
        assert!((output.row(0)[0] - (1.0 - lr * g_pos * 2.0)).abs() < 1e-12);
        assert!((output.row(1)[0] - (-1.0 - lr * g_neg * 2.0)).abs() < 1e-12);
        // Input row moves by -lr * (g_pos * o_pos + g_neg * o_neg) with
        // o_pos = 1 and o_neg = -1, both pre-update output values.
        let delta = g_pos - g_neg;
        assert!((input.row(0)[0] - (2.0 - lr * delta)).abs() < 1e-12);
    }

    #[test]
    fn repeated_negative_contributes_twice() {
        let mut input = DenseMatrix::from_vec(1, 1, vec![1.0f64]);
        let mut output = DenseMatrix::from_vec(2, 1, vec![0.5f64, 0.25]);
        let units = unit_set(&[0]);
        let mut scratch = PairScratch::new(1);
        let lr = 0.01;
        pair_step(&mut input, &mut output, &units, 0, &[1, 1], lr, &mut scratch);
        let g = sigmoid(0.25f64);
        let expected = 0.25 - lr * g * 1.0 - lr * g * 1.0;
        assert!((output.row(1)[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn hogwild_shares_one_allocation() {
        let matrix = DenseMatrix::from_vec(2, 2, vec![0.0f32; 4]);
        let mut a = Hogwild::new(matrix);
        let b = a.clone();
        a.row_mut(1)[0] = 7.0;
        assert_eq!(b.row(1)[0], 7.0);
        drop(b);
        let recovered = a.into_inner().unwrap();
        assert_eq!(recovered.row(1)[0], 7.0);
    }
}
