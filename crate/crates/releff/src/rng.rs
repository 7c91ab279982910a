//! Splittable random-number streams.
//!
//! Every randomized routine in this crate takes an [`RngStream`]. A stream is
//! identified by a 64-bit key; independent substreams are derived with
//! [`RngStream::child`], so replicate `i` of a Monte Carlo loop always sees the
//! same randomness no matter how the loop is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Avalanche mix from SplitMix64. Used to derive child keys.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream with cheap child-stream derivation.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Root stream for a user-supplied seed.
    pub fn new(seed: u64) -> Self {
        let key = splitmix64(seed);
        RngStream {
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Derive the `index`-th child stream. Children with distinct indices,
    /// and children of distinct parents, are independent for all practical
    /// purposes; derivation does not disturb the parent's state.
    pub fn child(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(index.wrapping_add(1)));
        RngStream {
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Uniform draw on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform integer in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Bernoulli draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Exponential draw with the given rate (mean 1/rate). Rate 0 yields +inf.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        let u = 1.0 - self.uniform(); // in (0, 1]
        -u.ln() / rate
    }

    /// Binomial draw.
    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        let d = rand_distr::Binomial::new(n, p).expect("valid binomial parameters");
        self.rng.sample(d)
    }

    /// Draw from a discrete distribution given by nonnegative weights
    /// (not necessarily normalized). Returns the chosen index.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut target = self.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            target -= w;
            if target < 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }

    /// Multinomial counts for `n` draws over the given weights, via a chain of
    /// binomials. Equivalent in distribution to `n` categorical draws.
    pub fn multinomial(&mut self, n: u64, weights: &[f64]) -> Vec<u64> {
        let mut counts = vec![0u64; weights.len()];
        let mut remaining = n;
        let mut weight_left: f64 = weights.iter().sum();
        for (i, &w) in weights.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if i + 1 == weights.len() {
                counts[i] = remaining;
                break;
            }
            let p = if weight_left > 0.0 { (w / weight_left).clamp(0.0, 1.0) } else { 0.0 };
            let c = self.binomial(remaining, p);
            counts[i] = c;
            remaining -= c;
            weight_left -= w;
        }
        counts
    }

    /// Fisher-Yates shuffle of `items`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            items.swap(i, j);
        }
    }
}
