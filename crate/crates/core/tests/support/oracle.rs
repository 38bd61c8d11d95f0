//! Brute-force posterior over all trees of bounded height. Each tree's prior
//! and marginal likelihood are computed directly from its structure, with no
//! shared code or recursion identities from the engine.

#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf,
    Split(Box<Tree>, Box<Tree>),
}

/// Every tree of height at most `height`.
pub fn all_trees(height: u32) -> Vec<Tree> {
    if height == 0 {
        return vec![Tree::Leaf];
    }
    let sub = all_trees(height - 1);
    let mut out = vec![Tree::Leaf];
    for l in &sub {
        for r in &sub {
            out.push(Tree::Split(Box::new(l.clone()), Box::new(r.clone())));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub evidence: f64,
    pub split_prob_root: f64,
    pub dims: Vec<f64>,
    pub height_at_x: Option<f64>,
    pub avg_height: f64,
    /// Posterior mean of `∫ x^k f` for k = 1, 2 and of F(a) at the given cutoff.
    pub mean: f64,
    pub second_moment: f64,
    pub cdf: Option<f64>,
}

struct Cell {
    lo: f64,
    width: f64,
}

fn beta_binomial_factor(n0: usize, n1: usize, alpha: f64) -> f64 {
    // Marginal likelihood of a split relative to the uniform density:
    // 2^n B(n0 + α, n1 + α) / B(α, α).
    let n = (n0 + n1) as f64;
    let ln = n * std::f64::consts::LN_2 + ln_gamma(n0 as f64 + alpha) + ln_gamma(n1 as f64 + alpha)
        - ln_gamma(n + 2.0 * alpha)
        - 2.0 * ln_gamma(alpha)
        + ln_gamma(2.0 * alpha);
    ln.exp()
}

struct TreeStats {
    prior: f64,
    likelihood: f64,
    splits: usize,
    height_at_x: f64,
    avg_height: f64,
    mean: f64,
    second: f64,
    cdf: f64,
}

fn uniform_power_mean(lo: f64, width: f64, k: i32) -> f64 {
    ((lo + width).powi(k + 1) - lo.powi(k + 1)) / ((k + 1) as f64 * width)
}

fn uniform_cdf(lo: f64, width: f64, a: f64) -> f64 {
    ((a - lo) / width).clamp(0.0, 1.0)
}

#[allow(clippy::too_many_arguments)]
fn stats(tree: &Tree, cell: Cell, pts: &[f64], depth: u32, height: u32, s: f64, alpha: f64, x: f64, a: f64) -> TreeStats {
    match tree {
        Tree::Leaf => TreeStats {
            prior: if depth < height { 1.0 - s } else { 1.0 },
            likelihood: 1.0,
            splits: 0,
            height_at_x: 0.0,
            avg_height: 0.0,
            mean: uniform_power_mean(cell.lo, cell.width, 1),
            second: uniform_power_mean(cell.lo, cell.width, 2),
            cdf: uniform_cdf(cell.lo, cell.width, a),
        },
        Tree::Split(l, r) => {
            let mid = cell.lo + cell.width / 2.0;
            let (lp, rp): (Vec<f64>, Vec<f64>) = pts.iter().partition(|&&p| p < mid);
            let half = cell.width / 2.0;
            let sl = stats(l, Cell { lo: cell.lo, width: half }, &lp, depth + 1, height, s, alpha, x, a);
            let sr = stats(r, Cell { lo: mid, width: half }, &rp, depth + 1, height, s, alpha, x, a);
            let n = pts.len() as f64;
            let rho_l = (lp.len() as f64 + alpha) / (n + 2.0 * alpha);
            let rho_r = (rp.len() as f64 + alpha) / (n + 2.0 * alpha);
            let x_in_cell = x >= cell.lo && x < cell.lo + cell.width;
            TreeStats {
                prior: s * sl.prior * sr.prior,
                likelihood: beta_binomial_factor(lp.len(), rp.len(), alpha) * sl.likelihood * sr.likelihood,
                splits: 1 + sl.splits + sr.splits,
                height_at_x: if x_in_cell { 1.0 + if x < mid { sl.height_at_x } else { sr.height_at_x } } else { 0.0 },
                avg_height: 1.0 + rho_l * sl.avg_height + rho_r * sr.avg_height,
                mean: rho_l * sl.mean + rho_r * sr.mean,
                second: rho_l * sl.second + rho_r * sr.second,
                cdf: rho_l * sl.cdf + rho_r * sr.cdf,
            }
        }
    }
}

/// Posterior summaries under the prior restricted to trees of height at
/// most `height`.
pub fn enumerate(points: &[f64], height: u32, s: f64, alpha: f64, dims_len: usize, x: Option<f64>, a: Option<f64>) -> OracleResult {
    let mut evidence = 0.0;
    let mut split_mass = 0.0;
    let mut dims = vec![0.0; dims_len];
    let (mut hx, mut avg, mut mean, mut second, mut cdf) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let xv = x.unwrap_or(0.0);
    let av = a.unwrap_or(0.0);
    for tree in all_trees(height) {
        let st = stats(&tree, Cell { lo: 0.0, width: 1.0 }, points, 0, height, s, alpha, xv, av);
        let weight = st.prior * st.likelihood;
        evidence += weight;
        if matches!(tree, Tree::Split(..)) {
            split_mass += weight;
        }
        if st.splits < dims_len {
            dims[st.splits] += weight;
        }
        hx += weight * st.height_at_x;
        avg += weight * st.avg_height;
        mean += weight * st.mean;
        second += weight * st.second;
        cdf += weight * st.cdf;
    }
    for d in &mut dims {
        *d /= evidence;
    }
    OracleResult {
        evidence,
        split_prob_root: split_mass / evidence,
        dims,
        height_at_x: x.map(|_| hx / evidence),
        avg_height: avg / evidence,
        mean: mean / evidence,
        second_moment: second / evidence,
        cdf: a.map(|_| cdf / evidence),
    }
}
