//! Posterior expectations of linear functionals of the density.

use crate::error::{Error, Result};

/// A functional `M[f] = ∫ φ(x) f(x) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentSpec {
    /// `φ(x) = x^k`. `Power(0)` is the constant functional and always yields 1.
    Power(u32),
    /// `φ(x) = 1[x < a]`, the cdf at `a`.
    Indicator(f64),
}

impl MomentSpec {
    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            MomentSpec::Indicator(a) if !a.is_finite() => {
                Err(Error::InvalidParams(format!("cdf argument {a} is not finite")))
            }
            _ => Ok(()),
        }
    }
}

/// The functional restricted to one cell, in a form that can be pushed down
/// to the children exactly.
#[derive(Debug, Clone, Copy)]
pub(crate) enum CellMoment {
    Power { k: u32, lo: f64, width: f64 },
    /// Threshold in the cell's own rescaled coordinates.
    Indicator { a: f64 },
}

impl CellMoment {
    pub fn root(spec: MomentSpec) -> Self {
        match spec {
            MomentSpec::Power(k) => CellMoment::Power { k, lo: 0.0, width: 1.0 },
            MomentSpec::Indicator(a) => CellMoment::Indicator { a },
        }
    }

    /// Value when the functional is constant on the cell, so that every
    /// density normalised on it gives the same answer.
    pub fn constant(&self) -> Option<f64> {
        match *self {
            CellMoment::Power { k: 0, .. } => Some(1.0),
            CellMoment::Power { .. } => None,
            CellMoment::Indicator { a } if a <= 0.0 => Some(0.0),
            CellMoment::Indicator { a } if a >= 1.0 => Some(1.0),
            CellMoment::Indicator { .. } => None,
        }
    }

    /// Average of the functional over the cell under the uniform density.
    pub fn mean(&self) -> f64 {
        match *self {
            CellMoment::Power { k, lo, width } => {
                // ((lo + w)^(k+1) - lo^(k+1)) / ((k + 1) w), expanded to stay
                // exact as w -> 0.
                let m = k + 1;
                let mut binom = 1.0;
                let mut sum = 0.0;
                for j in 1..=m {
                    binom = binom * (m - j + 1) as f64 / j as f64;
                    sum += binom * lo.powi((m - j) as i32) * width.powi(j as i32 - 1);
                }
                sum / m as f64
            }
            CellMoment::Indicator { a } => a.clamp(0.0, 1.0),
        }
    }

    pub fn child(&self, right: bool) -> Self {
        match *self {
            CellMoment::Power { k, lo, width } => {
                let half = width / 2.0;
                CellMoment::Power { k, lo: if right { lo + half } else { lo }, width: half }
            }
            CellMoment::Indicator { a } => CellMoment::Indicator { a: if right { 2.0 * a - 1.0 } else { 2.0 * a } },
        }
    }
}
