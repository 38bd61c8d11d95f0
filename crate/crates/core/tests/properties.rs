//! Randomized invariants of the infinite-tree engine.

use bayestree::{BayesTree, Dataset, ModelParams, MomentSpec};
use proptest::prelude::*;

/// Points on a coarse grid mixed with arbitrary ones, so that ties and
/// near-ties both occur.
fn dataset() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(0u32..64).prop_map(|k| k as f64 / 64.0), 0.0f64..1.0], 0..40)
}

fn engine(s: f64, alpha: f64) -> BayesTree {
    BayesTree::new(ModelParams::new(s, alpha).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn summaries_are_well_formed(points in dataset(), s in 0.05f64..0.95, alpha in 0.2f64..4.0, x in 0.0f64..1.0) {
        let e = engine(s, alpha);
        let d = Dataset::new(points).unwrap();
        let r = e.evaluate(&d, Some(x)).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.split_prob_root));
        prop_assert!(r.dim_dist.iter().all(|&v| v >= 0.0));
        prop_assert!(r.dim_tail >= -1e-12);
        prop_assert!((r.dim_dist.iter().sum::<f64>() + r.dim_tail - 1.0).abs() < 1e-12);
        prop_assert!(r.avg_height.finite().is_none_or(|h| h >= 0.0));
        prop_assert!(r.recursion_count >= 1);
        prop_assert_eq!(r.log_evidence.is_divergent(), !r.divergence_class.is_empty());
    }

    #[test]
    fn min_depth_independence(points in dataset(), m in 1u32..6, x in 0.0f64..1.0) {
        let d = Dataset::new(points).unwrap();
        let a = engine(0.5, 1.0).evaluate(&d, Some(x)).unwrap();
        let b = engine(0.5, 1.0).min_depth(m).evaluate(&d, Some(x)).unwrap();
        prop_assert!((a.log_evidence.log() - b.log_evidence.log()).abs() < 1e-12);
        prop_assert_eq!(a.height_at_x.unwrap().is_divergent(), b.height_at_x.unwrap().is_divergent());
        if let (Some(h0), Some(h1)) = (a.height_at_x.unwrap().finite(), b.height_at_x.unwrap().finite()) {
            prop_assert!((h0 - h1).abs() < 1e-12 * h0.max(1.0));
        }
        for (p, q) in a.dim_dist.iter().zip(&b.dim_dist) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn local_density_matches_full(points in dataset(), s in 0.1f64..0.9, alpha in 0.3f64..3.0, x in 0.0f64..1.0) {
        let e = engine(s, alpha);
        let d = Dataset::new(points).unwrap();
        let index = e.build_index(&d).unwrap();
        let (local, full) = (index.density(x).unwrap(), e.predictive_density(&d, x).unwrap());
        prop_assert_eq!(local.is_divergent(), full.is_divergent());
        if let (Some(l), Some(f)) = (local.finite(), full.finite()) {
            prop_assert!(l > 0.0);
            prop_assert!((l - f).abs() <= 1e-10 * f, "{} vs {}", l, f);
        }
    }

    #[test]
    fn moments_are_consistent(points in dataset(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let index = engine(0.5, 1.0).build_index(&Dataset::new(points).unwrap()).unwrap();
        prop_assert_eq!(index.moment(MomentSpec::Power(0)).unwrap(), 1.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (fl, fh) = (index.cdf(lo).unwrap(), index.cdf(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&fl) && fl <= fh + 1e-14);
        let mean = index.moment(MomentSpec::Power(1)).unwrap();
        let second = index.moment(MomentSpec::Power(2)).unwrap();
        prop_assert!(mean > 0.0 && mean < 1.0);
        // Jensen: E[X^2] >= E[X]^2 for every density, so also on average.
        prop_assert!(second >= mean * mean - 1e-12 && second <= mean + 1e-12);
    }
}
