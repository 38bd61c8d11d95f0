//! Closed-form solutions of the infinite recursion for cells holding no data
//! or a single (multi-)point.

use crate::model::ModelParams;
use crate::numerics::{log_mix, log_wbar, log_weight, LogValue, Quantity};

/// Prior probabilities `a_k = P[N = k]` of the effective model dimension,
/// `k = 0..len`, from `a_0 = u`, `a_{k+1} = s Σ a_i a_{k-i}`.
pub fn prior_dim_coefficients(len: usize, params: &ModelParams) -> Vec<f64> {
    let mut a = vec![0.0; len];
    if len == 0 {
        return a;
    }
    a[0] = params.u();
    for k in 0..len - 1 {
        let conv: f64 = (0..=k).map(|i| a[i] * a[k - i]).sum();
        a[k + 1] = params.s() * conv;
    }
    a
}

/// Generating-function form `a_k = u (4su)^k C(2k, k) / ((k + 1) 4^k)`.
pub fn prior_dim_closed_form(k: usize, params: &ModelParams) -> f64 {
    let (s, u) = (params.s(), params.u());
    // C(2k, k) / 4^k built up as a product of (2j - 1) / (2j).
    let mut central = 1.0;
    for j in 1..=k {
        central *= (2 * j - 1) as f64 / (2 * j) as f64;
    }
    u * (4.0 * s * u).powi(k as i32) * central / (k + 1) as f64
}

/// Posterior dimension probabilities for data consisting of one `n`-fold
/// multi-point. For `n <= 1` these are the prior `a_k`; for a divergent
/// multiplicity all mass sits at infinity and the vector is zero.
pub fn multipoint_dim_coefficients(multiplicity: usize, len: usize, params: &ModelParams) -> Vec<f64> {
    let prior = prior_dim_coefficients(len, params);
    if multiplicity <= 1 {
        return prior;
    }
    let g = stationary_split_prob(multiplicity, params);
    let mut b = vec![0.0; len];
    if len == 0 {
        return b;
    }
    b[0] = 1.0 - g;
    for k in 0..len - 1 {
        let conv: f64 = (0..=k).map(|i| b[i] * prior[k - i]).sum();
        b[k + 1] = g * conv;
    }
    b
}

/// `b_k = P[N = k | x, x]`.
pub fn double_point_dim_coefficients(len: usize, params: &ModelParams) -> Vec<f64> {
    multipoint_dim_coefficients(2, len, params)
}

/// Split probability shared by every cell along the path of an `n`-fold
/// multi-point: `w̃ = min(w̄, 1)`, which is `s` for `n <= 1`.
pub(crate) fn stationary_split_prob(multiplicity: usize, params: &ModelParams) -> f64 {
    if multiplicity <= 1 {
        params.s()
    } else if params.is_heavy(multiplicity) {
        1.0
    } else {
        log_wbar(multiplicity, params).exp()
    }
}

/// Evidence of an `n`-fold multi-point cell at absolute `depth` of the
/// infinite tree. Divergent multiplicities get the scaled surrogate `w̄^-depth`.
pub(crate) fn multipoint_log_evidence(multiplicity: usize, depth: u32, params: &ModelParams) -> LogValue {
    if multiplicity <= 1 {
        return LogValue::Finite(0.0);
    }
    let lwbar = log_wbar(multiplicity, params);
    if params.is_heavy(multiplicity) {
        LogValue::Divergent { scaled_log: -(depth as f64) * lwbar }
    } else {
        LogValue::Finite(params.ln_u() - (-lwbar.exp()).ln_1p())
    }
}

/// Same evidence on a finite tree with `remaining` levels below the cell:
/// `p_r = u + w̄ p_{r-1}`, `p_0 = 1`.
pub(crate) fn multipoint_log_evidence_finite(multiplicity: usize, remaining: u32, params: &ModelParams) -> LogValue {
    if multiplicity <= 1 {
        return LogValue::Finite(0.0);
    }
    let lw = log_weight(multiplicity, 0, params.alpha());
    let mut p = 0.0;
    for _ in 0..remaining {
        p = log_mix(p - lw, params);
    }
    LogValue::Finite(p)
}

/// Expected tree height at the multi-point itself, `w̃ / (1 - w̃)`.
pub(crate) fn multipoint_height_at_point(multiplicity: usize, params: &ModelParams) -> Quantity {
    let g = stationary_split_prob(multiplicity, params);
    if g >= 1.0 {
        Quantity::Divergent
    } else {
        Quantity::Finite(g / (1.0 - g))
    }
}

/// Expected average height of a multi-point cell. Finite even for divergent
/// multiplicities, since the branch holding the point has weight
/// `(n + α) / (n + 2α) < 1`.
pub(crate) fn multipoint_avg_height(multiplicity: usize, params: &ModelParams) -> Quantity {
    let hs = params.height_ratio();
    if !hs.is_finite() {
        return Quantity::Divergent;
    }
    if multiplicity <= 1 {
        return Quantity::Finite(hs);
    }
    let g = stationary_split_prob(multiplicity, params);
    let rho = point_branch_weight(multiplicity, params);
    Quantity::Finite(g * (1.0 + (1.0 - rho) * hs) / (1.0 - g * rho))
}

/// Expected model dimension of a multi-point cell. Finite only for `s < 1/2`
/// and non-divergent multiplicity.
pub(crate) fn multipoint_expected_dim(multiplicity: usize, params: &ModelParams) -> Quantity {
    let s = params.s();
    if s >= 0.5 {
        return Quantity::Divergent;
    }
    let empty = s / (1.0 - 2.0 * s);
    if multiplicity <= 1 {
        return Quantity::Finite(empty);
    }
    let g = stationary_split_prob(multiplicity, params);
    if g >= 1.0 {
        return Quantity::Divergent;
    }
    Quantity::Finite(g * (1.0 + empty) / (1.0 - g))
}

/// Posterior weight `(n + α) / (n + 2α)` of the child containing all `n` points.
pub(crate) fn point_branch_weight(multiplicity: usize, params: &ModelParams) -> f64 {
    let (n, a) = (multiplicity as f64, params.alpha());
    (n + a) / (n + 2.0 * a)
}

/// One level of the finite-tree recursion: the dimension distribution of a
/// cell whose children both have distribution `child`.
pub(crate) fn finite_prior_dims_step(child: &[f64], params: &ModelParams) -> Vec<f64> {
    let len = child.len();
    let mut next = vec![0.0; len];
    next[0] = params.u();
    for k in 0..len - 1 {
        let conv: f64 = (0..=k).map(|i| child[i] * child[k - i]).sum();
        next[k + 1] = params.s() * conv;
    }
    next
}

/// Table of prior dimension distributions on finite trees with
/// `0..=max_remaining` levels.
pub(crate) fn finite_prior_dims_table(max_remaining: u32, len: usize, params: &ModelParams) -> Vec<Vec<f64>> {
    let mut delta = vec![0.0; len];
    delta[0] = 1.0;
    let mut table = vec![delta];
    for r in 1..=max_remaining as usize {
        let next = finite_prior_dims_step(&table[r - 1], params);
        table.push(next);
    }
    table
}

/// Prior expected height `s + s² + ... + s^r` on a finite tree.
pub(crate) fn finite_prior_height(remaining: u32, params: &ModelParams) -> f64 {
    (0..remaining).fold(0.0, |h, _| params.s() * (1.0 + h))
}

/// Prior expected dimension on a finite tree, `E_r = s (1 + 2 E_{r-1})`.
pub(crate) fn finite_prior_expected_dim(remaining: u32, params: &ModelParams) -> f64 {
    (0..remaining).fold(0.0, |e, _| params.s() * (1.0 + 2.0 * e))
}
