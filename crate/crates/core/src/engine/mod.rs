//! Exact recursive inference over the infinite dyadic tree.

mod closed;
mod index;
mod moments;
mod skeleton;

pub use closed::{
    double_point_dim_coefficients, multipoint_dim_coefficients, prior_dim_closed_form,
    prior_dim_coefficients,
};
pub use index::{EvidenceIndex, NodeInfo, QueryKind};
pub use moments::MomentSpec;
pub use skeleton::{SkeletonNode, TreeSkeleton, DEFAULT_SKELETON_DEPTH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{in_unit_interval, Dataset, DivergenceClass, ModelParams, DEFAULT_DEPTH_CAP};
use crate::numerics::{log_mix, log_weight, LogValue, Quantity};

use closed::*;

/// Default truncation length of the dimension distribution.
pub const DEFAULT_DIM_MAX: usize = 16;

/// Inference engine configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BayesTree {
    params: ModelParams,
    dim_max: usize,
    min_depth: u32,
    depth_cap: u32,
    tree_height: Option<u32>,
}

impl Default for BayesTree {
    fn default() -> Self {
        Self::new(ModelParams::default())
    }
}

/// Everything a single recursive pass produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceResult {
    pub log_evidence: LogValue,
    pub split_prob_root: f64,
    /// Expected height of the leaf containing the query point, if one was given.
    pub height_at_x: Option<Quantity>,
    /// Expected average leaf height; `-ln 2` times this is the expected log
    /// volume of the leaf containing a random point.
    pub avg_height: Quantity,
    pub dim_dist: Vec<f64>,
    pub dim_tail: f64,
    pub expected_dim: Quantity,
    pub recursion_count: u64,
    pub divergence_class: DivergenceClass,
}

impl InferenceResult {
    pub fn avg_log_volume(&self) -> Quantity {
        match self.avg_height {
            Quantity::Finite(h) => Quantity::Finite(-h * std::f64::consts::LN_2),
            Quantity::Divergent => Quantity::Divergent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeHeights {
    pub height_at_x: Quantity,
    pub avg_height: Quantity,
    pub avg_log_volume: Quantity,
}

/// Per-cell recursion output.
struct Frame {
    log_p: LogValue,
    g: f64,
    height_x: Quantity,
    avg_height: Quantity,
    dims: Vec<f64>,
    expected_dim: Quantity,
    count: u64,
}

fn add(a: Quantity, b: Quantity) -> Quantity {
    match (a, b) {
        (Quantity::Finite(x), Quantity::Finite(y)) => Quantity::Finite(x + y),
        _ => Quantity::Divergent,
    }
}

fn scale(a: Quantity, c: f64) -> Quantity {
    match a {
        Quantity::Finite(x) => Quantity::Finite(c * x),
        Quantity::Divergent if c == 0.0 => Quantity::Finite(0.0),
        Quantity::Divergent => Quantity::Divergent,
    }
}

/// Split probability of a cell from its children's evidences:
/// `g = s p0 p1 / (w(n0, n1) p)`.
pub fn split_probability(params: &ModelParams, n0: usize, n1: usize, left: LogValue, right: LogValue) -> f64 {
    combine_evidence(params, n0, n1, left, right).1
}

/// Returns `(p, g, 1 - g)` for a split cell.
pub(crate) fn combine_evidence(
    params: &ModelParams,
    n0: usize,
    n1: usize,
    left: LogValue,
    right: LogValue,
) -> (LogValue, f64, f64) {
    let t = left.log() + right.log() - log_weight(n0, n1, params.alpha());
    if left.is_divergent() || right.is_divergent() {
        return (LogValue::Divergent { scaled_log: params.ln_s() + t }, 1.0, 0.0);
    }
    if params.s() == 0.0 {
        return (LogValue::Finite(0.0), 0.0, 1.0);
    }
    let p = log_mix(t, params);
    let g = (params.ln_s() + t - p).exp().min(1.0);
    let stay = (params.ln_u() - p).exp().min(1.0);
    (LogValue::Finite(p), g, stay)
}

fn halve(v: f64) -> (bool, f64) {
    if v < 0.5 {
        (false, 2.0 * v)
    } else {
        (true, 2.0 * v - 1.0)
    }
}

impl BayesTree {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            dim_max: DEFAULT_DIM_MAX,
            min_depth: 0,
            depth_cap: DEFAULT_DEPTH_CAP,
            tree_height: None,
        }
    }

    /// Number of dimension probabilities `P[N = 0..dim_max)` reported.
    pub fn dim_max(mut self, dim_max: usize) -> Result<Self> {
        if dim_max == 0 {
            return Err(Error::InvalidCutoff);
        }
        self.dim_max = dim_max;
        Ok(self)
    }

    /// Force recursion at least this deep before any closed form is used.
    /// Results do not depend on it.
    pub fn min_depth(mut self, depth: u32) -> Self {
        self.min_depth = depth;
        self
    }

    pub fn depth_cap(mut self, cap: u32) -> Self {
        self.depth_cap = cap;
        self
    }

    /// Restrict the prior to trees of height at most `height`. `None` is the
    /// infinite tree.
    pub fn tree_height(mut self, height: Option<u32>) -> Self {
        self.tree_height = height;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn get_dim_max(&self) -> usize {
        self.dim_max
    }

    pub fn get_tree_height(&self) -> Option<u32> {
        self.tree_height
    }

    pub fn get_depth_cap(&self) -> u32 {
        self.depth_cap
    }

    /// Full recursive pass over `data`, optionally tracking the leaf that
    /// contains `x`.
    pub fn evaluate(&self, data: &Dataset, x: Option<f64>) -> Result<InferenceResult> {
        if let Some(x) = x {
            if !in_unit_interval(x) {
                return Err(Error::PointOutOfDomain(x));
            }
        }
        let ctx = Ctx::new(self);
        let mut work = data.points().to_vec();
        let frame = self.recurse(&ctx, &mut work, x, 0)?;
        let total: f64 = frame.dims.iter().sum();
        Ok(InferenceResult {
            log_evidence: frame.log_p,
            split_prob_root: frame.g,
            height_at_x: x.map(|_| frame.height_x),
            avg_height: frame.avg_height,
            dim_tail: 1.0 - total,
            dim_dist: frame.dims,
            expected_dim: frame.expected_dim,
            recursion_count: frame.count,
            divergence_class: self.divergence_class(data),
        })
    }

    /// Evidence `p(D)`, with the scaled surrogate when divergent.
    pub fn log_evidence(&self, data: &Dataset) -> Result<LogValue> {
        let lean = Self { dim_max: 1, ..self.clone() };
        Ok(lean.evaluate(data, None)?.log_evidence)
    }

    pub fn scaled_evidence(&self, data: &Dataset) -> Result<(LogValue, DivergenceClass)> {
        Ok((self.log_evidence(data)?, self.divergence_class(data)))
    }

    pub fn divergence_class(&self, data: &Dataset) -> DivergenceClass {
        if self.tree_height.is_some() {
            DivergenceClass::default()
        } else {
            DivergenceClass::of(data, &self.params)
        }
    }

    /// Whether `p(D ∪ x^copies) / p(D)` is infinite. The per-level growth
    /// ratio strictly increases with multiplicity, so this holds whenever the
    /// augmented multiplicity diverges.
    fn ratio_diverges(&self, data: &Dataset, x: f64, copies: usize) -> bool {
        self.tree_height.is_none() && self.params.is_heavy(data.multiplicity_of(x) + copies)
    }

    /// Predictive density `p(x | D) = p(D ∪ x) / p(D)` by two full passes.
    pub fn predictive_density(&self, data: &Dataset, x: f64) -> Result<Quantity> {
        let ratio = self.augmented_ratio(data, x, 1)?;
        Ok(ratio)
    }

    /// Posterior variance of the density at `x`.
    pub fn posterior_variance(&self, data: &Dataset, x: f64) -> Result<Quantity> {
        let r1 = self.augmented_ratio(data, x, 1)?;
        let r2 = self.augmented_ratio(data, x, 2)?;
        Ok(match (r1, r2) {
            (Quantity::Finite(a), Quantity::Finite(b)) => Quantity::Finite(b - a * a),
            _ => Quantity::Divergent,
        })
    }

    fn augmented_ratio(&self, data: &Dataset, x: f64, copies: usize) -> Result<Quantity> {
        if !in_unit_interval(x) {
            return Err(Error::PointOutOfDomain(x));
        }
        if self.ratio_diverges(data, x, copies) {
            return Ok(Quantity::Divergent);
        }
        let base = self.log_evidence(data)?;
        let aug = self.log_evidence(&data.with_point(x, copies)?)?;
        Ok(Quantity::from_f64((aug.log() - base.log()).exp()))
    }

    pub fn dimension_distribution(&self, data: &Dataset) -> Result<(Vec<f64>, f64)> {
        let r = self.evaluate(data, None)?;
        Ok((r.dim_dist, r.dim_tail))
    }

    pub fn tree_heights(&self, data: &Dataset, x: f64) -> Result<TreeHeights> {
        let lean = Self { dim_max: 1, ..self.clone() };
        let r = lean.evaluate(data, Some(x))?;
        Ok(TreeHeights {
            height_at_x: r.height_at_x.unwrap_or(Quantity::Finite(0.0)),
            avg_height: r.avg_height,
            avg_log_volume: r.avg_log_volume(),
        })
    }

    /// Precompute the per-node evidences for fast local queries.
    pub fn build_index(&self, data: &Dataset) -> Result<EvidenceIndex> {
        EvidenceIndex::build(self, data)
    }

    fn recurse(&self, ctx: &Ctx, pts: &mut [f64], x: Option<f64>, depth: u32) -> Result<Frame> {
        if depth > self.depth_cap {
            return Err(Error::DepthCapExceeded { cap: self.depth_cap });
        }
        let n = pts.len();
        if let Some(m) = self.tree_height {
            if depth >= m {
                return Ok(ctx.bottom());
            }
        }
        let single = n == 0 || pts[0] == pts[n - 1];
        if single && depth >= self.min_depth {
            // With x elsewhere in a multi-point cell the paths still differ.
            let x_state = match x {
                None => Some(false),
                Some(xv) if n == 0 || xv == pts[0] => Some(true),
                Some(_) => None,
            };
            if let Some(has_x) = x_state {
                match self.tree_height {
                    None => return Ok(ctx.terminal(n, depth, has_x)),
                    Some(m) if n <= 1 => return Ok(ctx.finite_terminal(m - depth, has_x)),
                    Some(_) => {}
                }
            }
        }

        let split = pts.partition_point(|&v| v < 0.5);
        let (left, right) = pts.split_at_mut(split);
        for v in left.iter_mut() {
            *v *= 2.0;
        }
        for v in right.iter_mut() {
            *v = 2.0 * *v - 1.0;
        }
        let (x0, x1) = match x.map(halve) {
            Some((false, xv)) => (Some(xv), None),
            Some((true, xv)) => (None, Some(xv)),
            None => (None, None),
        };
        let (n0, n1) = (left.len(), right.len());
        let f0 = self.recurse(ctx, left, x0, depth + 1)?;
        let f1 = self.recurse(ctx, right, x1, depth + 1)?;
        Ok(ctx.combine(n0, n1, f0, f1, x.is_some()))
    }
}

/// Per-evaluation constants.
struct Ctx<'a> {
    engine: &'a BayesTree,
    prior_dims: Vec<f64>,
    /// Finite-tree prior dimension distributions indexed by remaining levels.
    finite_dims: Vec<Vec<f64>>,
}

impl<'a> Ctx<'a> {
    fn new(engine: &'a BayesTree) -> Self {
        let p = &engine.params;
        let n = engine.dim_max;
        let finite_dims = match engine.tree_height {
            None => Vec::new(),
            Some(m) => finite_prior_dims_table(m, n, p),
        };
        Self { engine, prior_dims: prior_dim_coefficients(n, p), finite_dims }
    }

    fn params(&self) -> &ModelParams {
        &self.engine.params
    }

    fn bottom(&self) -> Frame {
        let mut dims = vec![0.0; self.engine.dim_max];
        dims[0] = 1.0;
        Frame {
            log_p: LogValue::Finite(0.0),
            g: 0.0,
            height_x: Quantity::Finite(0.0),
            avg_height: Quantity::Finite(0.0),
            dims,
            expected_dim: Quantity::Finite(0.0),
            count: 1,
        }
    }

    fn terminal(&self, n: usize, depth: u32, has_x: bool) -> Frame {
        let p = self.params();
        let dims = if n <= 1 {
            self.prior_dims.clone()
        } else {
            multipoint_dim_coefficients(n, self.engine.dim_max, p)
        };
        Frame {
            log_p: multipoint_log_evidence(n, depth, p),
            g: stationary_split_prob(n, p),
            height_x: if has_x { multipoint_height_at_point(n, p) } else { Quantity::Finite(0.0) },
            avg_height: multipoint_avg_height(n, p),
            dims,
            expected_dim: multipoint_expected_dim(n, p),
            count: 1,
        }
    }

    fn finite_terminal(&self, remaining: u32, has_x: bool) -> Frame {
        let p = self.params();
        let h = finite_prior_height(remaining, p);
        Frame {
            log_p: LogValue::Finite(0.0),
            g: if remaining == 0 { 0.0 } else { p.s() },
            height_x: Quantity::Finite(if has_x { h } else { 0.0 }),
            avg_height: Quantity::Finite(h),
            dims: self.finite_dims[remaining as usize].clone(),
            expected_dim: Quantity::Finite(finite_prior_expected_dim(remaining, p)),
            count: 1,
        }
    }

    fn combine(&self, n0: usize, n1: usize, f0: Frame, f1: Frame, has_x: bool) -> Frame {
        let p = self.params();
        let (log_p, g, stay) = combine_evidence(p, n0, n1, f0.log_p, f1.log_p);
        let height_x = if has_x {
            add(f0.height_x, f1.height_x).scaled_step(g)
        } else {
            Quantity::Finite(0.0)
        };
        let denom = (n0 + n1) as f64 + 2.0 * p.alpha();
        let rho0 = (n0 as f64 + p.alpha()) / denom;
        let rho1 = (n1 as f64 + p.alpha()) / denom;
        let avg_height = add(scale(f0.avg_height, rho0), scale(f1.avg_height, rho1)).scaled_step(g);

        let len = self.engine.dim_max;
        let mut dims = vec![0.0; len];
        dims[0] = stay;
        for (k, slot) in dims.iter_mut().enumerate().skip(1) {
            let conv: f64 = (0..k).map(|i| f0.dims[i] * f1.dims[k - 1 - i]).sum();
            *slot = g * conv;
        }
        let expected_dim = add(f0.expected_dim, f1.expected_dim).scaled_step(g);
        Frame {
            log_p,
            g,
            height_x,
            avg_height,
            dims,
            expected_dim,
            count: 1 + f0.count + f1.count,
        }
    }
}
