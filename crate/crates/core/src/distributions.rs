//! Reference densities on `[0, 1)` used to generate test data and measure
//! estimation error.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceDistribution {
    /// Beta(3, 6).
    Beta36,
    /// `1 / (2 sqrt(1 - x))`, unbounded at 1.
    Singular,
    /// `2x`.
    Linear,
    /// `9/5` below 1/2 and `1/5` above.
    JumpHalf,
    /// `3/2` below 1/3 and `3/4` above.
    JumpThird,
}

pub const ALL_DISTRIBUTIONS: [ReferenceDistribution; 5] = [
    ReferenceDistribution::Beta36,
    ReferenceDistribution::Singular,
    ReferenceDistribution::Linear,
    ReferenceDistribution::JumpHalf,
    ReferenceDistribution::JumpThird,
];

const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

impl ReferenceDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Beta36 => "beta36",
            Self::Singular => "singular",
            Self::Linear => "linear",
            Self::JumpHalf => "jump-half",
            Self::JumpThird => "jump-third",
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        match self {
            Self::Beta36 => 168.0 * x * x * (1.0 - x).powi(5),
            Self::Singular => 0.5 / (1.0 - x).sqrt(),
            Self::Linear => 2.0 * x,
            Self::JumpHalf => {
                if x < 0.5 {
                    1.8
                } else {
                    0.2
                }
            }
            Self::JumpThird => {
                if x < 1.0 / 3.0 {
                    1.5
                } else {
                    0.75
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            Self::Beta36 => {
                // P[Binomial(8, x) >= 3].
                let mut binom = 1.0;
                let mut total = 0.0;
                for j in 0..=8 {
                    if j > 0 {
                        binom = binom * (9 - j) as f64 / j as f64;
                    }
                    if j >= 3 {
                        total += binom * x.powi(j) * (1.0 - x).powi(8 - j);
                    }
                }
                total
            }
            Self::Singular => 1.0 - (1.0 - x).sqrt(),
            Self::Linear => x * x,
            Self::JumpHalf => {
                if x < 0.5 {
                    1.8 * x
                } else {
                    0.9 + 0.2 * (x - 0.5)
                }
            }
            Self::JumpThird => {
                if x < 1.0 / 3.0 {
                    1.5 * x
                } else {
                    0.5 + 0.75 * (x - 1.0 / 3.0)
                }
            }
        }
    }

    /// Quantile function, clamped into `[0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let x = match self {
            Self::Beta36 => {
                let (mut lo, mut hi) = (0.0, 1.0);
                while hi - lo > 1e-14 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            Self::Singular => 1.0 - (1.0 - u) * (1.0 - u),
            Self::Linear => u.sqrt(),
            Self::JumpHalf => {
                if u < 0.9 {
                    u / 1.8
                } else {
                    0.5 + 5.0 * (u - 0.9)
                }
            }
            Self::JumpThird => {
                if u < 0.5 {
                    u / 1.5
                } else {
                    1.0 / 3.0 + (u - 0.5) / 0.75
                }
            }
        };
        x.clamp(0.0, ONE_MINUS_ULP)
    }

    /// `n` independent draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.inverse_cdf(rng.random::<f64>())).collect()
    }

    pub fn true_density(&self, x: f64) -> f64 {
        self.pdf(x)
    }
}

impl fmt::Display for ReferenceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_DISTRIBUTIONS
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown distribution {s:?}")))
    }
}

/// Midpoint grid `x_i = (i + 1/2) / size`.
pub fn midpoint_grid(size: usize) -> Result<Vec<f64>> {
    if size < 100 {
        return Err(Error::GridTooSmall(size));
    }
    Ok((0..size).map(|i| (i as f64 + 0.5) / size as f64).collect())
}

/// Midpoint-rule estimate of `∫ |f̂ - f|`.
pub fn l1_error(estimate: &[f64], truth: ReferenceDistribution) -> Result<f64> {
    let grid = midpoint_grid(estimate.len())?;
    let total: f64 = grid.iter().zip(estimate).map(|(&x, &e)| (e - truth.pdf(x)).abs()).sum();
    Ok(total / grid.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn densities_integrate_to_one() {
        // Closed-form cdfs must agree with a fine midpoint integral of the pdf,
        // except for the singular density whose integral is checked via its cdf.
        let grid = 300_000;
        for d in ALL_DISTRIBUTIONS {
            let integral: f64 = (0..grid).map(|i| d.pdf((i as f64 + 0.5) / grid as f64)).sum::<f64>() / grid as f64;
            let tol = if d == ReferenceDistribution::Singular { 1e-2 } else { 1e-6 };
            assert!((integral - 1.0).abs() < tol, "{d}: {integral}");
            assert!((d.cdf(1.0 - 1e-16) - 1.0).abs() < 1e-7, "{d}");
        }
    }

    #[test]
    fn pointwise_values() {
        assert_eq!(ReferenceDistribution::Linear.pdf(0.25), 0.5);
        assert_eq!(ReferenceDistribution::JumpHalf.pdf(0.5), 0.2);
        assert_eq!(ReferenceDistribution::JumpThird.pdf(0.2), 1.5);
        assert!((ReferenceDistribution::Singular.pdf(0.75) - 1.0).abs() < 1e-15);
        let b = ReferenceDistribution::Beta36;
        assert!((b.pdf(0.25) - 168.0 * 0.0625 * 0.75f64.powi(5)).abs() < 1e-12);
    }

    #[test]
    fn samples_are_reproducible() {
        let a = ReferenceDistribution::Beta36.sample(50, 7);
        assert_eq!(a, ReferenceDistribution::Beta36.sample(50, 7));
        assert_ne!(a, ReferenceDistribution::Beta36.sample(50, 8));
        assert!(a.iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn names_round_trip() {
        for d in ALL_DISTRIBUTIONS {
            assert_eq!(d.name().parse::<ReferenceDistribution>().unwrap(), d);
        }
        assert!("gauss".parse::<ReferenceDistribution>().is_err());
    }

    #[test]
    fn l1_error_grid() {
        assert!(matches!(l1_error(&[1.0; 99], ReferenceDistribution::Linear), Err(Error::GridTooSmall(99))));
        let exact: Vec<f64> = midpoint_grid(1000).unwrap().iter().map(|&x| 2.0 * x).collect();
        assert_eq!(l1_error(&exact, ReferenceDistribution::Linear).unwrap(), 0.0);
        // |1 - 2x| integrates to 1/2.
        let err = l1_error(&[1.0; 1000], ReferenceDistribution::Linear).unwrap();
        assert!((err - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn inverse_cdf_inverts(u in 0.001f64..0.999) {
            for d in ALL_DISTRIBUTIONS {
                let x = d.inverse_cdf(u);
                prop_assert!((d.cdf(x) - u).abs() < 1e-9, "{} u={} x={}", d, u, x);
            }
        }

        #[test]
        fn cdf_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for d in ALL_DISTRIBUTIONS {
                prop_assert!(d.cdf(lo) <= d.cdf(hi) + 1e-15);
            }
        }
    }
}
