//! Log-domain arithmetic and the special functions of the tree prior.

use std::f64::consts::{LN_2, PI};

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// `ln(1e15)`: beyond this the uniform term of the mixture is below one
/// ulp of the split term.
const MIX_CUTOFF: f64 = 34.538_776_394_910_684;

/// Exact factorials `0! ..= 20!`.
const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// Natural log of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(lgamma(x))
    } else {
        Err(Error::GammaDomain(x))
    }
}

/// Unchecked `ln Γ(x)`; callers guarantee `x > 0`.
pub(crate) fn lgamma(x: f64) -> f64 {
    if x <= 21.0 && x.fract() == 0.0 {
        return FACTORIALS[x as usize - 1].ln();
    }
    if x < 20.0 && (x - 0.5).fract() == 0.0 {
        // Γ(k + 1/2) = √π · ∏_{j=1..k} (j - 1/2)
        let k = (x - 0.5) as usize;
        let prod: f64 = (1..=k).map(|j| j as f64 - 0.5).product();
        return 0.5 * PI.ln() + prod.ln();
    }
    if x < 10.0 {
        let shift = (10.0 - x).ceil();
        let mut prod = 1.0;
        let mut y = x;
        while y < x + shift {
            prod *= y;
            y += 1.0;
        }
        return stirling(y) - prod.ln();
    }
    stirling(x)
}

/// Stirling series, accurate to ~1e-16 relative for `x >= 10`.
fn stirling(x: f64) -> f64 {
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            + r2 * (-1.0 / 360.0
                + r2 * (1.0 / 1260.0
                    + r2 * (-1.0 / 1680.0
                        + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// `ln w(n0, n1)`, the Beta-binomial weight of a split with counts `n0`, `n1`:
///
/// `w = 2^-n Γ(n + 2α) / (Γ(n0 + α) Γ(n1 + α)) · Γ(α)² / Γ(2α)`.
///
/// Exactly symmetric in its count arguments.
pub fn log_weight(n0: usize, n1: usize, alpha: f64) -> f64 {
    let n = n0 + n1;
    if n <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    let head = lgamma(nf + 2.0 * alpha) - nf * LN_2;
    let counts = lgamma(n0 as f64 + alpha) + lgamma(n1 as f64 + alpha);
    let norm = 2.0 * lgamma(alpha) - lgamma(2.0 * alpha);
    head - counts + norm
}

/// `ln w̄` with `w̄ = s / w(n, 0)`, the per-level growth ratio of the
/// evidence of an `n`-fold multi-point.
pub fn log_wbar(multiplicity: usize, params: &ModelParams) -> f64 {
    params.ln_s() - log_weight(multiplicity, 0, params.alpha())
}

/// `ln(u + s·e^t)` without overflow.
pub fn log_mix(t: f64, params: &ModelParams) -> f64 {
    let ln_u = params.ln_u();
    if params.s() == 0.0 {
        return ln_u;
    }
    let split = params.ln_s() + t;
    if split - ln_u > MIX_CUTOFF {
        return split;
    }
    log_add_exp(split, ln_u)
}

pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `c_α = 4^(α-1) Γ(α)² / Γ(2α)`, the limit constant of the balanced weight.
pub fn c_alpha(alpha: f64) -> f64 {
    ((alpha - 1.0) * 4f64.ln() + 2.0 * lgamma(alpha) - lgamma(2.0 * alpha)).exp()
}

/// Non-negative quantity kept in log space. A divergent value carries the
/// rescaled finite surrogate used when comparing evidences of the same
/// divergence class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogValue {
    Zero,
    Finite(f64),
    Divergent { scaled_log: f64 },
}

impl LogValue {
    /// Log of the value (scaled surrogate when divergent).
    pub fn log(&self) -> f64 {
        match *self {
            LogValue::Zero => f64::NEG_INFINITY,
            LogValue::Finite(v) => v,
            LogValue::Divergent { scaled_log } => scaled_log,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, LogValue::Divergent { .. })
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            LogValue::Zero => Some(f64::NEG_INFINITY),
            LogValue::Finite(v) => Some(v),
            LogValue::Divergent { .. } => None,
        }
    }

    /// The represented real; `+∞` when divergent.
    pub fn value(&self) -> f64 {
        match *self {
            LogValue::Zero => 0.0,
            LogValue::Finite(v) => v.exp(),
            LogValue::Divergent { .. } => f64::INFINITY,
        }
    }

}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, other: LogValue) -> LogValue {
        match (self, other) {
            (LogValue::Zero, _) | (_, LogValue::Zero) => LogValue::Zero,
            (LogValue::Finite(a), LogValue::Finite(b)) => LogValue::Finite(a + b),
            (a, b) => LogValue::Divergent { scaled_log: a.log() + b.log() },
        }
    }
}

/// Derived real quantity that may be infinite (heights, variances,
/// predictive values at heavy points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Finite(f64),
    Divergent,
}

impl Quantity {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Quantity::Finite(v) => Some(v),
            Quantity::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Quantity::Divergent)
    }

    pub(crate) fn from_f64(v: f64) -> Quantity {
        if v.is_finite() {
            Quantity::Finite(v)
        } else {
            Quantity::Divergent
        }
    }

    /// `g · (1 + self)`, with `0 · ∞ = 0`.
    pub(crate) fn scaled_step(self, g: f64) -> Quantity {
        match self {
            Quantity::Finite(h) => Quantity::from_f64(g * (1.0 + h)),
            Quantity::Divergent if g == 0.0 => Quantity::Finite(0.0),
            Quantity::Divergent => Quantity::Divergent,
        }
    }
}

/// Finite values serialize as plain numbers (the log, for `LogValue`);
/// divergent ones as `{"divergent": true, "scaled_log": v}`.
impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            LogValue::Zero => serializer.serialize_none(),
            LogValue::Finite(v) => serializer.serialize_f64(v),
            LogValue::Divergent { scaled_log } => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("divergent", &true)?;
                map.serialize_entry("scaled_log", &scaled_log)?;
                map.end()
            }
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Quantity::Finite(v) => serializer.serialize_f64(v),
            Quantity::Divergent => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("divergent", &true)?;
                map.end()
            }
        }
    }
}
