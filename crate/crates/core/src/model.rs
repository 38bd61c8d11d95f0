//! Model parameters, datasets on `[0, 1)` and dyadic cell addressing.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics;

/// Default recursion depth cap. Distinct doubles in `[0, 1)` always separate
/// within 1074 bisections.
pub const DEFAULT_DEPTH_CAP: u32 = 1100;

/// Log-scale tolerance below which a multi-point ratio is treated as sitting
/// on the divergence boundary `w̄ = 1`.
const HEAVY_LOG_TOL: f64 = 1e-12;

/// Prior hyper-parameters: split probability `s`, uniform probability
/// `u = 1 - s`, and the symmetric Beta concentration `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    s: f64,
    alpha: f64,
}

impl ModelParams {
    pub fn new(s: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParams(format!("s = {s} must lie in [0, 1]")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} must be a positive finite number"
            )));
        }
        Ok(Self { s, alpha })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn u(&self) -> f64 {
        1.0 - self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ln_s(&self) -> f64 {
        self.s.ln()
    }

    pub fn ln_u(&self) -> f64 {
        self.u().ln()
    }

    /// `s / u`, the prior expected tree height. Infinite when `s = 1`.
    pub fn height_ratio(&self) -> f64 {
        self.s / self.u()
    }

    /// Whether an `n`-fold multi-point makes the infinite-depth evidence
    /// diverge, i.e. `w̄(n) >= 1`.
    pub fn is_heavy(&self, multiplicity: usize) -> bool {
        multiplicity >= 2 && numerics::log_wbar(multiplicity, self) >= -HEAVY_LOG_TOL
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { s: 0.5, alpha: 1.0 }
    }
}

/// Address of the dyadic cell `[0.z, 0.z + 2^-l)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodeAddress {
    bits: Vec<bool>,
}

impl NodeAddress {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self { bits: bits.into_iter().collect() }
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn child(&self, right: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(right);
        Self { bits }
    }

    /// Cell bounds `(lo, hi)`. Exact for depths up to 53.
    pub fn interval(&self) -> (f64, f64) {
        let mut lo = 0.0;
        let mut width = 1.0;
        for &b in &self.bits {
            width *= 0.5;
            if b {
                lo += width;
            }
        }
        (lo, lo + width)
    }

    pub fn width(&self) -> f64 {
        0.5f64.powi(self.bits.len() as i32)
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for NodeAddress {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Sorted multiset of observations in `[0, 1)`.
///
/// Points compare by exact equality; equal values form a multi-point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
}

impl Dataset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut points: Vec<f64> = points.into_iter().map(|x| x + 0.0).collect();
        if let Some(&bad) = points.iter().find(|x| !in_unit_interval(**x)) {
            return Err(Error::PointOutOfDomain(bad));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points })
    }

    /// Reads one number per line. Blank lines and `#` comments are skipped.
    /// With a compactification every value is mapped into `[0, 1)` first.
    pub fn load<R: BufRead>(reader: R, compactify: Option<Compactify>) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let text = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line.as_str(),
            }
            .trim();
            if text.is_empty() {
                continue;
            }
            let value: f64 = text
                .parse()
                .map_err(|_| Error::Parse { line: lineno, text: text.to_string() })?;
            let value = match compactify {
                Some(mode) => mode.apply(value)?,
                None => value,
            };
            if !in_unit_interval(value) {
                return Err(Error::OutOfDomain { line: lineno, value });
            }
            points.push(value);
        }
        Self::new(points)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::load(text.as_bytes(), None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Run-length view `(value, multiplicity)` in ascending order.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        let mut runs: Vec<(f64, usize)> = Vec::new();
        for &x in &self.points {
            match runs.last_mut() {
                Some((v, m)) if *v == x => *m += 1,
                _ => runs.push((x, 1)),
            }
        }
        runs
    }

    pub fn multiplicity_of(&self, x: f64) -> usize {
        let lo = self.points.partition_point(|&p| p < x);
        let hi = self.points.partition_point(|&p| p <= x);
        hi - lo
    }

    /// Number of points in the cell at `addr` (binary search on the bounds).
    pub fn count_in(&self, addr: &NodeAddress) -> usize {
        let (lo, hi) = addr.interval();
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p < hi);
        b - a
    }

    /// Splits at `1/2` and rescales both halves back onto `[0, 1)`.
    /// The midpoint itself belongs to the right half.
    pub fn partition(&self) -> (Dataset, Dataset) {
        let split = self.points.partition_point(|&x| x < 0.5);
        let left = self.points[..split].iter().map(|&x| 2.0 * x).collect();
        let right = self.points[split..].iter().map(|&x| 2.0 * x - 1.0).collect();
        (Dataset { points: left }, Dataset { points: right })
    }

    /// Copy of the dataset with `copies` additional occurrences of `x`.
    pub fn with_point(&self, x: f64, copies: usize) -> Result<Dataset> {
        if !in_unit_interval(x) {
            return Err(Error::PointOutOfDomain(x));
        }
        let x = x + 0.0;
        let at = self.points.partition_point(|&p| p < x);
        let mut points = Vec::with_capacity(self.points.len() + copies);
        points.extend_from_slice(&self.points[..at]);
        points.extend(std::iter::repeat_n(x, copies));
        points.extend_from_slice(&self.points[at..]);
        Ok(Dataset { points })
    }
}

pub(crate) fn in_unit_interval(x: f64) -> bool {
    (0.0..1.0).contains(&x)
}

/// Multi-points whose evidence diverges under given parameters. Two datasets
/// can only be compared through evidence ratios when their classes agree.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DivergenceClass {
    pub heavy_points: Vec<HeavyPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeavyPoint {
    pub point: f64,
    pub multiplicity: usize,
}

impl DivergenceClass {
    pub fn of(data: &Dataset, params: &ModelParams) -> Self {
        let heavy_points = data
            .multiplicities()
            .into_iter()
            .filter(|&(_, m)| params.is_heavy(m))
            .map(|(point, multiplicity)| HeavyPoint { point, multiplicity })
            .collect();
        Self { heavy_points }
    }

    pub fn is_empty(&self) -> bool {
        self.heavy_points.is_empty()
    }
}

/// Maps of unbounded example spaces onto the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compactify {
    /// `x ∈ (1, ∞] ↦ 1/x`.
    Reciprocal,
    /// `x ∈ ℝ ↦ y ∈ (0, 1)` with `(2y - 1) / (y(1 - y)) = x`.
    Rational,
}

impl Compactify {
    pub fn name(&self) -> &'static str {
        match self {
            Compactify::Reciprocal => "reciprocal",
            Compactify::Rational => "rational",
        }
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        let err = || Error::CompactifyDomain { value: x, mode: self.name() };
        let y = match self {
            Compactify::Reciprocal => {
                if x.is_nan() || x <= 1.0 {
                    return Err(err());
                }
                1.0 / x
            }
            Compactify::Rational => {
                if !x.is_finite() {
                    return Err(err());
                }
                // Positive root of x y^2 + (2 - x) y - 1 = 0, arranged to
                // avoid cancellation on either sign of x.
                let r = x.hypot(2.0);
                let denom = if x > 0.0 { 2.0 + 4.0 / (r + x) } else { 2.0 - x + r };
                2.0 / denom
            }
        };
        if in_unit_interval(y) {
            Ok(y)
        } else {
            Err(err())
        }
    }
}

impl FromStr for Compactify {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "reciprocal" => Ok(Compactify::Reciprocal),
            "rational" => Ok(Compactify::Rational),
            other => Err(format!("unknown compactification {other:?} (reciprocal|rational)")),
        }
    }
}
