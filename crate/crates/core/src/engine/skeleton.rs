//! Maximum a posteriori tree structure.

use serde::Serialize;

use crate::model::NodeAddress;
use crate::numerics::log_weight;

use super::closed::stationary_split_prob;
use super::halve;
use super::index::{EvidenceIndex, NodeKind};

/// Depth beyond which a chain of splits is reported as truncated.
pub const DEFAULT_SKELETON_DEPTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonNode {
    pub address: NodeAddress,
    pub count: usize,
    pub split_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeSkeleton {
    Leaf(SkeletonNode),
    Split {
        node: SkeletonNode,
        left: Box<TreeSkeleton>,
        right: Box<TreeSkeleton>,
    },
    /// The MAP tree keeps splitting below this node without end.
    Truncated(SkeletonNode),
}

impl TreeSkeleton {
    pub fn node(&self) -> &SkeletonNode {
        match self {
            TreeSkeleton::Leaf(n) | TreeSkeleton::Truncated(n) => n,
            TreeSkeleton::Split { node, .. } => node,
        }
    }

    pub fn leaves(&self) -> Vec<&SkeletonNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a SkeletonNode>) {
        match self {
            TreeSkeleton::Leaf(n) | TreeSkeleton::Truncated(n) => out.push(n),
            TreeSkeleton::Split { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let n = self.node();
        let tag = match self {
            TreeSkeleton::Leaf(_) => "leaf",
            TreeSkeleton::Split { .. } => "split",
            TreeSkeleton::Truncated(_) => "truncated",
        };
        out.push_str(&format!("{}{} {} n={} g={:.6}\n", "  ".repeat(indent), tag, n.address, n.count, n.split_prob));
        if let TreeSkeleton::Split { left, right, .. } = self {
            left.render_into(out, indent + 1);
            right.render_into(out, indent + 1);
        }
    }
}

impl EvidenceIndex {
    /// The most probable tree: a cell splits exactly when its split term
    /// `s p0 p1 / w` exceeds its uniform term `u`.
    pub fn map_skeleton(&self, max_depth: u32) -> TreeSkeleton {
        self.skeleton_node(self.root, NodeAddress::root(), max_depth)
    }

    fn skeleton_node(&self, idx: usize, address: NodeAddress, max_depth: u32) -> TreeSkeleton {
        let node = &self.nodes[idx];
        let info = SkeletonNode { address: address.clone(), count: node.count, split_prob: node.g };
        match node.kind {
            NodeKind::Split { left, right } => {
                let (l, r) = (&self.nodes[left], &self.nodes[right]);
                let p = &self.params;
                let divergent = l.log_p.is_divergent() || r.log_p.is_divergent();
                let split_term = p.ln_s() + l.log_p.log() + r.log_p.log() - log_weight(l.count, r.count, p.alpha());
                if !(divergent || split_term > p.ln_u()) {
                    return TreeSkeleton::Leaf(info);
                }
                if address.depth() as u32 >= max_depth {
                    return TreeSkeleton::Truncated(info);
                }
                TreeSkeleton::Split {
                    node: info,
                    left: Box::new(self.skeleton_node(left, address.child(false), max_depth)),
                    right: Box::new(self.skeleton_node(right, address.child(true), max_depth)),
                }
            }
            NodeKind::Terminal { point, remaining } => {
                self.skeleton_terminal(node.count, point, remaining, address, max_depth)
            }
        }
    }

    fn skeleton_terminal(
        &self,
        n: usize,
        point: f64,
        remaining: Option<u32>,
        address: NodeAddress,
        max_depth: u32,
    ) -> TreeSkeleton {
        let p = &self.params;
        let g = if remaining == Some(0) { 0.0 } else { stationary_split_prob(n, p) };
        let info = SkeletonNode { address: address.clone(), count: n, split_prob: g };
        if remaining == Some(0) {
            return TreeSkeleton::Leaf(info);
        }
        // Cells with at most one point have p = 1 all the way down, so they
        // split iff s > u, and then their subtree never ends.
        if n <= 1 {
            return if p.s() > p.u() { TreeSkeleton::Truncated(info) } else { TreeSkeleton::Leaf(info) };
        }
        let splits = match remaining {
            None => p.is_heavy(n) || g > 0.5,
            Some(r) => {
                let child = super::closed::multipoint_log_evidence_finite(n, r - 1, p);
                p.ln_s() + child.log() - log_weight(n, 0, p.alpha()) > p.ln_u()
            }
        };
        if !splits {
            return TreeSkeleton::Leaf(info);
        }
        if address.depth() as u32 >= max_depth {
            return TreeSkeleton::Truncated(info);
        }
        let (side, next) = halve(point);
        let rem = remaining.map(|r| r - 1);
        let full = self.skeleton_terminal(n, next, rem, address.child(side), max_depth);
        let empty = self.skeleton_terminal(0, 0.0, rem, address.child(!side), max_depth);
        let (left, right) = if side { (empty, full) } else { (full, empty) };
        TreeSkeleton::Split { node: info, left: Box::new(left), right: Box::new(right) }
    }
}
