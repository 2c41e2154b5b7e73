//! Negative sampling distribution.

use rand::Rng;

/// Alias-method sampler over word ids with probability proportional to
/// `count^0.75`, the usual smoothed unigram distribution.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl NegativeTable {
    /// Builds the table from per-id counts in id order.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let weights: Vec<f64> = counts
            .into_iter()
            .map(|c| (c as f64).powf(0.75))
            .collect();
        Self::from_weights(&weights)
    }

    /// Vose's alias construction over arbitrary nonnegative weights.
    fn from_weights(weights: &[f64]) -> Self {
        let n = weights.len();
        assert!(n > 0, "empty negative table");
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "all-zero negative table weights");

        let mut prob = vec![0.0f64; n];
        // Self-alias by default so an unpaired slot can never redirect to
        // an arbitrary id.
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut small: Vec<u32> = Vec::new();
        let mut large: Vec<u32> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        while !small.is_empty() && !large.is_empty() {
            let s = small.pop().expect("checked non-empty");
            let l = large.pop().expect("checked non-empty");
            prob[s as usize] = scaled[s as usize];
            alias[s as usize] = l;
            scaled[l as usize] += scaled[s as usize] - 1.0;
            if scaled[l as usize] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // Leftovers on either side sit at probability 1 up to rounding.
        for i in large {
            prob[i as usize] = 1.0;
        }
        for i in small {
            prob[i as usize] = 1.0;
        }
        NegativeTable { prob, alias }
    }

    /// Number of ids in the table.
    pub fn len(&self) -> usize {
        self.prob.len()
    }

    /// True if the table is empty (never the case for a built table).
    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Draws one id.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let slot = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[slot] {
            slot as u32
        } else {
            self.alias[slot]
        }
    }

    /// Draws one id, resampling until it differs from `excluded`. The
    /// table must contain at least one other id with positive weight;
    /// the trainer guarantees this by only sampling with a vocabulary of
    /// two or more words.
    pub fn sample_excluding<R: Rng>(&self, rng: &mut R, excluded: u32) -> u32 {
        debug_assert!(self.len() > 1);
        loop {
            let id = self.sample(rng);
            if id != excluded {
                return id;
            }
        }
    }
}
