//! Shared workloads for the engine benchmarks.

use bayestree::{Dataset, ReferenceDistribution};

/// Sample sizes the benchmarks sweep over.
pub const SIZES: [usize; 4] = [100, 1_000, 10_000, 100_000];

/// A reproducible Beta(3, 6) sample of size `n`.
pub fn beta_sample(n: usize, seed: u64) -> Dataset {
    Dataset::new(ReferenceDistribution::Beta36.sample(n, seed)).expect("samples lie in [0, 1)")
}

/// Evenly spaced query points strictly inside the unit interval.
pub fn query_points(count: usize) -> Vec<f64> {
    (0..count).map(|i| (i as f64 + 0.5) / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_deterministic() {
        assert_eq!(beta_sample(64, 3), beta_sample(64, 3));
        assert_eq!(query_points(4), vec![0.125, 0.375, 0.625, 0.875]);
    }
}
