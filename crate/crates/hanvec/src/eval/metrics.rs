//! Scalar metrics: cosine similarity, analogy distance, and the Pearson
//! and Spearman correlation coefficients. Everything here runs in 64-bit
//! arithmetic regardless of how the model stores its vectors.

use super::EvalError;

/// Cosine similarity of two equal-length vectors, in `[-1, 1]`.
///
/// Returns `ZeroVector` when either input has zero norm, which callers
/// typically convert into a skipped item.
pub fn cosine(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    debug_assert_eq!(x.len(), y.len(), "cosine inputs must share a length");
    let mut dot = 0.0;
    let mut xx = 0.0;
    let mut yy = 0.0;
    for (a, b) in x.iter().zip(y) {
        dot += a * b;
        xx += a * a;
        yy += b * b;
    }
    if xx <= 0.0 || yy <= 0.0 {
        return Err(EvalError::ZeroVector);
    }
    Ok((dot / (xx.sqrt() * yy.sqrt())).clamp(-1.0, 1.0))
}

/// Analogy distance for a pair `a:b <-> c:d`: `1 - cos(va + vb - vc, vd)`.
///
/// The combination is exactly `va + vb - vc`; the result lies in `[0, 2]`
/// whenever it is defined. A zero-norm combined vector or `vd` yields
/// `ZeroVector`.
pub fn analogy_distance(
    va: &[f64],
    vb: &[f64],
    vc: &[f64],
    vd: &[f64],
) -> Result<f64, EvalError> {
    debug_assert!(
        va.len() == vb.len() && vb.len() == vc.len() && vc.len() == vd.len(),
        "analogy inputs must share a length"
    );
    let combined: Vec<f64> = va
        .iter()
        .zip(vb)
        .zip(vc)
        .map(|((a, b), c)| a + b - c)
        .collect();
    Ok(1.0 - cosine(&combined, vd)?)
}

/// Pearson product-moment correlation of two equal-length samples.
///
/// Requires at least two observations and nonzero variance on both sides;
/// otherwise the coefficient is undefined.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(xs.len(), ys.len(), "correlation inputs must share a length");
    let n = xs.len();
    if n < 2 {
        return Err(EvalError::UndefinedCorrelation);
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(EvalError::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson over average fractional ranks.
///
/// Ties receive the mean of the ranks they occupy, the standard fractional
/// scheme, so tied gold scores are handled without arbitrary ordering.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(xs.len(), ys.len(), "correlation inputs must share a length");
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

/// Ascending 1-based ranks with ties averaged.
///
/// `[10, 20, 20, 40]` ranks as `[1, 2.5, 2.5, 4]`. Inputs must be finite;
/// NaN has no defined rank.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .expect("rank inputs must be finite")
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}
