//! Per-node evidence cache. Predictive queries at a point only touch the
//! cells on that point's path, so they cost `O(depth)` instead of `O(n)`.

use crate::error::{Error, Result};
use crate::model::{in_unit_interval, Dataset, ModelParams, NodeAddress};
use crate::numerics::{LogValue, Quantity};

use super::closed::*;
use super::moments::{CellMoment, MomentSpec};
use super::{combine_evidence, halve, BayesTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Density,
    Variance,
    Cdf,
    Height,
}

#[derive(Debug, Clone)]
pub(crate) enum NodeKind {
    Split { left: usize, right: usize },
    /// Empty cell (`count == 0`) or a multi-point at rescaled position
    /// `point`. `remaining` counts the levels left on a finite tree.
    Terminal { point: f64, remaining: Option<u32> },
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub count: usize,
    pub log_p: LogValue,
    pub g: f64,
    pub stay: f64,
    pub kind: NodeKind,
}

/// Public view of one stored node.
#[derive(Debug, Clone)]
pub struct NodeInfo {
    pub address: NodeAddress,
    pub count: usize,
    pub log_evidence: LogValue,
    pub split_prob: f64,
    /// `1 - g`, computed independently as `u / p`.
    pub stay_prob: f64,
    /// Evidences and counts of the children, for split nodes.
    pub children: Option<[(LogValue, usize); 2]>,
}

#[derive(Debug, Clone)]
pub struct EvidenceIndex {
    pub(crate) params: ModelParams,
    depth_cap: u32,
    infinite: bool,
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: usize,
    data: Dataset,
}

impl EvidenceIndex {
    pub(crate) fn build(engine: &BayesTree, data: &Dataset) -> Result<Self> {
        let mut index = Self {
            params: engine.params,
            depth_cap: engine.depth_cap,
            infinite: engine.tree_height.is_none(),
            nodes: Vec::new(),
            root: 0,
            data: data.clone(),
        };
        let mut work = data.points().to_vec();
        index.root = index.build_node(engine, &mut work, 0)?;
        Ok(index)
    }

    fn build_node(&mut self, engine: &BayesTree, pts: &mut [f64], depth: u32) -> Result<usize> {
        if depth > engine.depth_cap {
            return Err(Error::DepthCapExceeded { cap: engine.depth_cap });
        }
        let n = pts.len();
        let p = self.params;
        let point = pts.first().copied().unwrap_or(0.0);
        let terminal = |log_p, g: f64, remaining| Node {
            count: n,
            log_p,
            g,
            stay: 1.0 - g,
            kind: NodeKind::Terminal { point, remaining },
        };
        let single = n == 0 || pts[0] == pts[n - 1];
        let node = match engine.tree_height {
            Some(m) if depth >= m => Some(terminal(LogValue::Finite(0.0), 0.0, Some(0))),
            Some(m) if n <= 1 && depth >= engine.min_depth => {
                Some(terminal(LogValue::Finite(0.0), p.s(), Some(m - depth)))
            }
            None if single && depth >= engine.min_depth => {
                let mut node = terminal(multipoint_log_evidence(n, depth, &p), stationary_split_prob(n, &p), None);
                if n >= 2 && !p.is_heavy(n) {
                    // u / p directly, which is exact where 1 - w̄ would cancel.
                    node.stay = (p.ln_u() - node.log_p.log()).exp();
                }
                Some(node)
            }
            _ => None,
        };
        if let Some(node) = node {
            self.nodes.push(node);
            return Ok(self.nodes.len() - 1);
        }

        let split = pts.partition_point(|&v| v < 0.5);
        let (lo, hi) = pts.split_at_mut(split);
        for v in lo.iter_mut() {
            *v *= 2.0;
        }
        for v in hi.iter_mut() {
            *v = 2.0 * *v - 1.0;
        }
        let left = self.build_node(engine, lo, depth + 1)?;
        let right = self.build_node(engine, hi, depth + 1)?;
        let (l, r) = (&self.nodes[left], &self.nodes[right]);
        let (log_p, g, stay) = combine_evidence(&p, l.count, r.count, l.log_p, r.log_p);
        self.nodes.push(Node { count: n, log_p, g, stay, kind: NodeKind::Split { left, right } });
        Ok(self.nodes.len() - 1)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Number of stored nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn log_evidence(&self) -> LogValue {
        self.nodes[self.root].log_p
    }

    pub fn split_prob_root(&self) -> f64 {
        self.nodes[self.root].g
    }

    /// Evidence and data count of an arbitrary cell, including cells below
    /// the stored tree that are covered by a closed form.
    pub fn evidence_at(&self, addr: &NodeAddress) -> (LogValue, usize) {
        let mut idx = self.root;
        for (depth, &bit) in addr.bits().iter().enumerate() {
            match self.nodes[idx].kind {
                NodeKind::Split { left, right } => idx = if bit { right } else { left },
                NodeKind::Terminal { point, remaining } => {
                    let mut c = point;
                    let mut n = self.nodes[idx].count;
                    let mut rem = remaining;
                    for &b in &addr.bits()[depth..] {
                        if rem == Some(0) {
                            break;
                        }
                        let (side, next) = halve(c);
                        if side != b {
                            n = 0;
                        }
                        c = next;
                        rem = rem.map(|r| r - 1);
                    }
                    return (self.multi_evidence(n, addr.depth() as u32, rem), n);
                }
            }
        }
        let node = &self.nodes[idx];
        (node.log_p, node.count)
    }

    /// Visit every stored node in depth-first order.
    pub fn visit(&self, mut f: impl FnMut(&NodeInfo)) {
        let mut stack = vec![(self.root, NodeAddress::root())];
        while let Some((idx, address)) = stack.pop() {
            let node = &self.nodes[idx];
            let children = match node.kind {
                NodeKind::Split { left, right } => {
                    stack.push((right, address.child(true)));
                    stack.push((left, address.child(false)));
                    let (l, r) = (&self.nodes[left], &self.nodes[right]);
                    Some([(l.log_p, l.count), (r.log_p, r.count)])
                }
                NodeKind::Terminal { .. } => None,
            };
            f(&NodeInfo {
                address,
                count: node.count,
                log_evidence: node.log_p,
                split_prob: node.g,
                stay_prob: node.stay,
                children,
            });
        }
    }

    fn multi_evidence(&self, n: usize, depth: u32, remaining: Option<u32>) -> LogValue {
        match remaining {
            None => multipoint_log_evidence(n, depth, &self.params),
            Some(r) => multipoint_log_evidence_finite(n, r, &self.params),
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if in_unit_interval(x) {
            Ok(())
        } else {
            Err(Error::PointOutOfDomain(x))
        }
    }

    fn ratio_diverges(&self, x: f64, copies: usize) -> bool {
        self.infinite && self.params.is_heavy(self.data.multiplicity_of(x) + copies)
    }

    /// `p(D ∪ {x × copies})` by walking down the path of `x`.
    pub fn augmented_log_evidence(&self, x: f64, copies: usize) -> Result<LogValue> {
        self.check_point(x)?;
        self.augment(self.root, x, copies, 0)
    }

    fn augment(&self, idx: usize, x: f64, copies: usize, depth: u32) -> Result<LogValue> {
        if depth > self.depth_cap {
            return Err(Error::DepthCapExceeded { cap: self.depth_cap });
        }
        let node = &self.nodes[idx];
        match node.kind {
            NodeKind::Split { left, right } => {
                let (side, xr) = halve(x);
                let (target, other) = if side { (right, left) } else { (left, right) };
                let child = self.augment(target, xr, copies, depth + 1)?;
                let rest = &self.nodes[other];
                let (l, _, _) =
                    combine_evidence(&self.params, rest.count, self.nodes[target].count + copies, rest.log_p, child);
                Ok(l)
            }
            NodeKind::Terminal { point, remaining } => {
                self.augment_terminal(node.count, point, x, copies, depth, remaining)
            }
        }
    }

    fn augment_terminal(
        &self,
        n: usize,
        c: f64,
        x: f64,
        copies: usize,
        depth: u32,
        remaining: Option<u32>,
    ) -> Result<LogValue> {
        if remaining == Some(0) {
            return Ok(LogValue::Finite(0.0));
        }
        if n == 0 || x == c {
            return Ok(self.multi_evidence(n + copies, depth, remaining));
        }
        if depth > self.depth_cap {
            return Err(Error::DepthCapExceeded { cap: self.depth_cap });
        }
        let rem = remaining.map(|r| r - 1);
        let (cs, cr) = halve(c);
        let (xs, xr) = halve(x);
        if cs == xs {
            let child = self.augment_terminal(n, cr, xr, copies, depth + 1, rem)?;
            let empty = LogValue::Finite(0.0);
            Ok(combine_evidence(&self.params, n + copies, 0, child, empty).0)
        } else {
            let with_x = self.multi_evidence(copies, depth + 1, rem);
            let with_c = self.multi_evidence(n, depth + 1, rem);
            Ok(combine_evidence(&self.params, copies, n, with_x, with_c).0)
        }
    }

    /// Predictive density `p(x | D)`.
    pub fn density(&self, x: f64) -> Result<Quantity> {
        self.ratio(x, 1)
    }

    /// Posterior variance of the density at `x`.
    pub fn variance(&self, x: f64) -> Result<Quantity> {
        let r1 = self.ratio(x, 1)?;
        let r2 = self.ratio(x, 2)?;
        Ok(match (r1, r2) {
            (Quantity::Finite(a), Quantity::Finite(b)) => Quantity::Finite(b - a * a),
            _ => Quantity::Divergent,
        })
    }

    fn ratio(&self, x: f64, copies: usize) -> Result<Quantity> {
        self.check_point(x)?;
        if self.ratio_diverges(x, copies) {
            return Ok(Quantity::Divergent);
        }
        let aug = self.augment(self.root, x, copies, 0)?;
        Ok(Quantity::from_f64((aug.log() - self.log_evidence().log()).exp()))
    }

    /// Posterior mean of the cdf, `E[F(a) | D]`.
    pub fn cdf(&self, a: f64) -> Result<f64> {
        self.moment(MomentSpec::Indicator(a))
    }

    /// Posterior mean of `∫ x^k f(x) dx` or of `F(a)`.
    pub fn moment(&self, spec: MomentSpec) -> Result<f64> {
        spec.validate()?;
        Ok(self.moment_node(self.root, CellMoment::root(spec)))
    }

    fn moment_node(&self, idx: usize, cell: CellMoment) -> f64 {
        if let Some(v) = cell.constant() {
            return v;
        }
        let node = &self.nodes[idx];
        match node.kind {
            NodeKind::Split { left, right } => {
                let (nl, nr) = (self.nodes[left].count as f64, self.nodes[right].count as f64);
                let a = self.params.alpha();
                let denom = nl + nr + 2.0 * a;
                let e0 = self.moment_node(left, cell.child(false));
                let e1 = self.moment_node(right, cell.child(true));
                node.stay * cell.mean() + node.g * ((nl + a) / denom * e0 + (nr + a) / denom * e1)
            }
            NodeKind::Terminal { point, remaining } => {
                self.moment_terminal(node.count, node.g, node.stay, point, remaining, cell)
            }
        }
    }

    /// Moment of a multi-point cell: a geometric chain along the point's path
    /// with an empty sibling split off at every level.
    fn moment_terminal(
        &self,
        n: usize,
        g: f64,
        stay: f64,
        point: f64,
        remaining: Option<u32>,
        mut cell: CellMoment,
    ) -> f64 {
        // An empty cell's posterior equals its prior mean, at any height.
        if n == 0 {
            return cell.mean();
        }
        let rho = point_branch_weight(n, &self.params);
        let mut c = point;
        let mut rem = remaining;
        let mut acc = 0.0;
        let mut factor = 1.0;
        let mut levels = 0u32;
        while rem != Some(0) {
            if let Some(v) = cell.constant() {
                return acc + factor * v;
            }
            if factor < 1e-15 || levels > self.depth_cap {
                break;
            }
            let (side, next) = halve(c);
            let empty = cell.child(!side);
            acc += factor * (stay * cell.mean() + g * (1.0 - rho) * empty.mean());
            factor *= g * rho;
            cell = cell.child(side);
            c = next;
            rem = rem.map(|r| r - 1);
            levels += 1;
        }
        acc + factor * cell.mean()
    }

    /// Expected height of the leaf containing `x`.
    pub fn height_at(&self, x: f64) -> Result<Quantity> {
        self.check_point(x)?;
        let mut idx = self.root;
        let mut xr = x;
        let mut path = Vec::new();
        loop {
            let node = &self.nodes[idx];
            match node.kind {
                NodeKind::Split { left, right } => {
                    path.push(node.g);
                    let (side, next) = halve(xr);
                    idx = if side { right } else { left };
                    xr = next;
                }
                NodeKind::Terminal { point, remaining } => {
                    let mut h = self.terminal_height(node.count, point, xr, remaining)?;
                    for &g in path.iter().rev() {
                        h = h.scaled_step(g);
                    }
                    return Ok(h);
                }
            }
        }
    }

    fn terminal_height(&self, n: usize, c: f64, x: f64, remaining: Option<u32>) -> Result<Quantity> {
        let p = &self.params;
        match remaining {
            // With at most one point every cell splits with probability s.
            Some(r) => Ok(Quantity::Finite(finite_prior_height(r, p))),
            None if n <= 1 || x == c => Ok(multipoint_height_at_point(n, p)),
            None => {
                let g = stationary_split_prob(n, p);
                let (mut c, mut x) = (c, x);
                let mut shared = 1u32;
                loop {
                    let (cs, cr) = halve(c);
                    let (xs, xr) = halve(x);
                    if cs != xs {
                        break;
                    }
                    shared += 1;
                    if shared > self.depth_cap {
                        return Err(Error::DepthCapExceeded { cap: self.depth_cap });
                    }
                    c = cr;
                    x = xr;
                }
                let mut h = Quantity::Finite(p.height_ratio());
                for _ in 0..shared {
                    h = h.scaled_step(g);
                }
                Ok(h)
            }
        }
    }

    /// Dispatch a single-point query.
    pub fn local_query(&self, x: f64, kind: QueryKind) -> Result<Quantity> {
        match kind {
            QueryKind::Density => self.density(x),
            QueryKind::Variance => self.variance(x),
            QueryKind::Cdf => self.cdf(x).map(Quantity::Finite),
            QueryKind::Height => self.height_at(x),
        }
    }
}
