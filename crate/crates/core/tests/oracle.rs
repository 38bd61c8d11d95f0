//! Finite-height engine against exhaustive enumeration of trees.

mod support;

use bayestree::{BayesTree, Dataset, ModelParams, MomentSpec};
use proptest::prelude::*;
use support::oracle::{all_trees, enumerate};

const DIMS: usize = 8;

fn engine(s: f64, alpha: f64, height: u32) -> BayesTree {
    BayesTree::new(ModelParams::new(s, alpha).unwrap()).dim_max(DIMS).unwrap().tree_height(Some(height))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn check(points: &[f64], s: f64, alpha: f64, height: u32, x: f64, a: f64) {
    let data = Dataset::new(points.iter().copied()).unwrap();
    let e = engine(s, alpha, height);
    let got = e.evaluate(&data, Some(x)).unwrap();
    let want = enumerate(points, height, s, alpha, DIMS, Some(x), Some(a));
    let ctx = format!("points={points:?} s={s} alpha={alpha} m={height}");

    assert!(close(got.log_evidence.finite().unwrap().exp(), want.evidence, 1e-10), "evidence {ctx}");
    assert!(close(got.split_prob_root, want.split_prob_root, 1e-10), "g {ctx}");
    for (k, (g, w)) in got.dim_dist.iter().zip(&want.dims).enumerate() {
        assert!(close(*g, *w, 1e-10), "dim {k} {ctx}: {g} vs {w}");
    }
    assert!(close(got.height_at_x.unwrap().finite().unwrap(), want.height_at_x.unwrap(), 1e-10), "h(x) {ctx}");
    assert!(close(got.avg_height.finite().unwrap(), want.avg_height, 1e-10), "avg height {ctx}");

    let index = e.build_index(&data).unwrap();
    assert!(close(index.log_evidence().finite().unwrap().exp(), want.evidence, 1e-10), "index evidence {ctx}");
    assert!(close(index.height_at(x).unwrap().finite().unwrap(), want.height_at_x.unwrap(), 1e-10), "local h(x) {ctx}");
    assert!(close(index.moment(MomentSpec::Power(1)).unwrap(), want.mean, 1e-10), "mean {ctx}");
    assert!(close(index.moment(MomentSpec::Power(2)).unwrap(), want.second_moment, 1e-10), "second moment {ctx}");
    assert!(close(index.cdf(a).unwrap(), want.cdf.unwrap(), 1e-10), "cdf {ctx}");

    // Predictive density from the oracle's own evidence ratio.
    let mut with_x = points.to_vec();
    with_x.push(x);
    let aug = enumerate(&with_x, height, s, alpha, 1, None, None);
    let density = index.density(x).unwrap().finite().unwrap();
    assert!(close(density, aug.evidence / want.evidence, 1e-10), "density {ctx}");
}

#[test]
fn tree_counts() {
    let counts: Vec<usize> = (0..4).map(|m| all_trees(m).len()).collect();
    assert_eq!(counts, [1, 2, 5, 26]);
}

#[test]
fn fixed_datasets() {
    let sets: [&[f64]; 6] = [
        &[],
        &[0.3],
        &[0.3, 0.3],
        &[0.1, 0.2, 0.7],
        &[0.05, 0.05, 0.05, 0.6],
        &[0.0, 0.124, 0.126, 0.5, 0.51, 0.99],
    ];
    for points in sets {
        for s in [0.3, 0.5] {
            for alpha in [0.5, 1.0, 2.0] {
                for m in 0..=3 {
                    check(points, s, alpha, m, 0.2, 0.4);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_datasets(
        points in prop::collection::vec(0.0f64..1.0, 0..=6),
        s in prop::sample::select(vec![0.3, 0.5]),
        alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
        m in 0u32..=3,
        x in 0.0f64..1.0,
        a in 0.0f64..1.0,
    ) {
        check(&points, s, alpha, m, x, a);
    }

    #[test]
    fn dyadic_datasets_with_ties(
        raw in prop::collection::vec(0u32..16, 0..=6),
        m in 0u32..=3,
        x in 0u32..16,
    ) {
        // Points on a 1/16 grid hit cell boundaries and repeat often.
        let points: Vec<f64> = raw.iter().map(|&k| k as f64 / 16.0).collect();
        check(&points, 0.5, 1.0, m, x as f64 / 16.0, 0.375);
    }
}
