//! Symmetric gauge norms evaluated on singular values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::svd::singular_values;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GaugeNorm {
    Operator,
    /// `p >= 1`; `p = ∞` is the operator norm.
    Schatten(f64),
    /// Sum of the `k` largest singular values.
    KyFan(usize),
}

impl GaugeNorm {
    pub const TRACE: GaugeNorm = GaugeNorm::Schatten(1.0);
    pub const FROBENIUS: GaugeNorm = GaugeNorm::Schatten(2.0);

    pub fn schatten(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::input(format!("Schatten exponent must be >= 1, got {p}")));
        }
        Ok(if p.is_infinite() { GaugeNorm::Operator } else { GaugeNorm::Schatten(p) })
    }

    pub fn ky_fan(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("Ky Fan index must be positive"));
        }
        Ok(GaugeNorm::KyFan(k))
    }

    /// Applies the gauge to a vector of singular values (any order, any sign).
    pub fn eval(&self, sv: &[f64]) -> f64 {
        let mut s: Vec<f64> = sv.iter().map(|x| x.abs()).collect();
        let max = s.iter().cloned().fold(0.0, f64::max);
        match *self {
            GaugeNorm::Operator => max,
            GaugeNorm::Schatten(p) if p.is_infinite() => max,
            GaugeNorm::Schatten(p) => {
                if max == 0.0 {
                    return 0.0;
                }
                if p == 1.0 {
                    return s.iter().sum();
                }
                if p == 2.0 {
                    return max * s.iter().map(|x| (x / max).powi(2)).sum::<f64>().sqrt();
                }
                max * s.iter().map(|x| (x / max).powf(p)).sum::<f64>().powf(1.0 / p)
            }
            GaugeNorm::KyFan(k) => {
                s.sort_by(|a, b| b.total_cmp(a));
                s.iter().take(k).sum()
            }
        }
    }
}

impl fmt::Display for GaugeNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GaugeNorm::Operator => write!(f, "op"),
            GaugeNorm::Schatten(p) if p == 1.0 => write!(f, "s1"),
            GaugeNorm::Schatten(p) if p == 2.0 => write!(f, "s2"),
            GaugeNorm::Schatten(p) => write!(f, "sp:{p}"),
            GaugeNorm::KyFan(k) => write!(f, "kyfan:{k}"),
        }
    }
}

impl FromStr for GaugeNorm {
    type Err = Error;

    /// Accepts `op`, `s1`, `s2`, `sp:<p>` and `kyfan:<k>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "op" => return Ok(GaugeNorm::Operator),
            "s1" => return Ok(GaugeNorm::TRACE),
            "s2" => return Ok(GaugeNorm::FROBENIUS),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("sp:") {
            let p: f64 = p.parse().map_err(|_| Error::input(format!("bad Schatten exponent '{p}'")))?;
            return GaugeNorm::schatten(p);
        }
        if let Some(k) = s.strip_prefix("kyfan:") {
            let k: usize = k.parse().map_err(|_| Error::input(format!("bad Ky Fan index '{k}'")))?;
            return GaugeNorm::ky_fan(k);
        }
        Err(Error::input(format!("unknown gauge '{s}' (expected op|s1|s2|sp:<p>|kyfan:<k>)")))
    }
}

/// `‖A‖_g`.
///
/// # Panics
/// If the singular value iteration fails to converge, which the sweep cap makes
/// unreachable for finite input in practice.
pub fn gauge_norm(a: &ComplexMatrix, g: GaugeNorm) -> f64 {
    let sv = singular_values(a).expect("singular value iteration failed to converge");
    g.eval(&sv)
}

/// Operator norm `‖A‖`.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    gauge_norm(a, GaugeNorm::Operator)
}
