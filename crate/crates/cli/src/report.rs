//! Serialization of command results as JSON or CSV.

use std::fmt::Write as _;

use bayestree::{HeavyPoint, LogValue, Quantity};
use serde::Serialize;

/// A table whose rows serialize as JSON objects and as CSV lines.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
    fn is_divergent(&self) -> bool {
        false
    }
}

pub fn num(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v}")
    }
}

pub fn quantity(q: Quantity) -> String {
    match q {
        Quantity::Finite(v) => num(v),
        Quantity::Divergent => "inf".into(),
    }
}

pub fn log_value(v: LogValue) -> String {
    match v {
        LogValue::Zero => "-inf".into(),
        LogValue::Finite(v) => num(v),
        LogValue::Divergent { .. } => "inf".into(),
    }
}

pub fn csv_table<R: Row>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.cells().join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct EvidenceReport {
    pub log_evidence: LogValue,
    pub split_prob_root: f64,
    pub height_at_x: Option<Quantity>,
    pub avg_height: Quantity,
    pub dim_dist: Vec<f64>,
    pub dim_tail: f64,
    pub recursion_count: u64,
    pub divergent: bool,
    pub divergence_class: Vec<HeavyPoint>,
}

impl Row for EvidenceReport {
    const HEADER: &'static [&'static str] = &[
        "log_evidence",
        "split_prob_root",
        "height_at_x",
        "avg_height",
        "dim_dist",
        "dim_tail",
        "recursion_count",
        "divergent",
        "divergence_class",
    ];

    fn cells(&self) -> Vec<String> {
        let dims: Vec<String> = self.dim_dist.iter().map(|&v| num(v)).collect();
        let mut class = String::new();
        for (i, h) in self.divergence_class.iter().enumerate() {
            if i > 0 {
                class.push(';');
            }
            let _ = write!(class, "{}x{}", h.point, h.multiplicity);
        }
        vec![
            log_value(self.log_evidence),
            num(self.split_prob_root),
            self.height_at_x.map(quantity).unwrap_or_default(),
            quantity(self.avg_height),
            dims.join(";"),
            num(self.dim_tail),
            self.recursion_count.to_string(),
            self.divergent.to_string(),
            class,
        ]
    }

    fn is_divergent(&self) -> bool {
        self.divergent
    }
}

#[derive(Debug, Serialize)]
pub struct DensityRow {
    pub x: f64,
    pub density: Quantity,
    pub variance: Quantity,
    pub height: Quantity,
}

impl Row for DensityRow {
    const HEADER: &'static [&'static str] = &["x", "density", "variance", "height"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.x), quantity(self.density), quantity(self.variance), quantity(self.height)]
    }

    fn is_divergent(&self) -> bool {
        self.density.is_divergent() || self.variance.is_divergent() || self.height.is_divergent()
    }
}

#[derive(Debug, Serialize)]
pub struct MomentRow {
    pub k: u32,
    pub moment: f64,
}

impl Row for MomentRow {
    const HEADER: &'static [&'static str] = &["k", "moment"];

    fn cells(&self) -> Vec<String> {
        vec![self.k.to_string(), num(self.moment)]
    }
}

#[derive(Debug, Serialize)]
pub struct CdfRow {
    pub a: f64,
    pub cdf: f64,
}

impl Row for CdfRow {
    const HEADER: &'static [&'static str] = &["a", "cdf"];

    fn cells(&self) -> Vec<String> {
        vec![num(self.a), num(self.cdf)]
    }
}

#[derive(Debug, Serialize)]
pub struct SkeletonRow {
    pub address: String,
    pub kind: &'static str,
    pub count: usize,
    pub split_prob: f64,
}

impl Row for SkeletonRow {
    const HEADER: &'static [&'static str] = &["address", "kind", "count", "split_prob"];

    fn cells(&self) -> Vec<String> {
        vec![self.address.clone(), self.kind.into(), self.count.to_string(), num(self.split_prob)]
    }
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub seconds: f64,
    pub recursion_count: u64,
    /// Ratio of recursion counts to the previous row.
    pub count_ratio: Option<f64>,
}

impl Row for BenchRow {
    const HEADER: &'static [&'static str] = &["n", "seconds", "recursion_count", "count_ratio"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.seconds),
            self.recursion_count.to_string(),
            self.count_ratio.map(num).unwrap_or_default(),
        ]
    }
}
