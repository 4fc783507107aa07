//! Gauss-Legendre quadrature against the representing measure.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Doubling Gauss-Legendre plan.
///
/// The half line is mapped to `(0, 1)` by `t = (u / (1 − u))²`. Squaring the
/// rational map cancels the `√t` factor of algebraic densities at the origin and
/// turns a `t^{-3/2}` decay into a bounded integrand at `u = 1`, so the rule sees a
/// smooth function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePlan {
    pub nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl Default for QuadraturePlan {
    fn default() -> Self {
        Self { nodes: 256, max_nodes: 8192, tol: 1e-10 }
    }
}

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Clone {
    fn add_scaled(&mut self, w: f64, x: &Self);
    fn distance(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for ComplexMatrix {
    fn add_scaled(&mut self, w: f64, x: &Self) {
        self.axpy(w.into(), x);
    }
    fn distance(&self, other: &Self) -> f64 {
        self.dist(other)
    }
    fn magnitude(&self) -> f64 {
        self.frobenius()
    }
}

const LEVELS: usize = 8;
static RULES: [OnceLock<Vec<(f64, f64)>>; LEVELS] = [const { OnceLock::new() }; LEVELS];

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = ((1.0 - x) / 2.0, w / 2.0);
        out[n - 1 - i] = ((1.0 + x) / 2.0, w / 2.0);
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule(n: usize) -> std::borrow::Cow<'static, [(f64, f64)]> {
    let base = QuadraturePlan::default().nodes;
    if n % base == 0 && (n / base).is_power_of_two() {
        let level = (n / base).trailing_zeros() as usize;
        if level < LEVELS {
            return std::borrow::Cow::Borrowed(RULES[level].get_or_init(|| gauss_legendre(n)).as_slice());
        }
    }
    std::borrow::Cow::Owned(gauss_legendre(n))
}

/// Integration interval on the half line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    /// `[0, ∞)`
    HalfLine,
    /// `[0, b]`
    Head(f64),
    /// `[a, ∞)`, `a > 0`
    Tail(f64),
}

impl Interval {
    /// Maps `u ∈ (0,1)` to `(t, dt/du)`.
    fn map(&self, u: f64) -> (f64, f64) {
        match *self {
            Interval::HalfLine => {
                let s = u / (1.0 - u);
                (s * s, 2.0 * u / (1.0 - u).powi(3))
            }
            Interval::Head(b) => (b * u * u, 2.0 * b * u),
            Interval::Tail(a) => {
                let v = 1.0 - u;
                (a / (v * v), 2.0 * a / (v * v * v))
            }
        }
    }
}

/// `∫ g(t) ρ(t) dt` over `iv`, doubling the node count until two successive
/// rules agree to `plan.tol · (1 + |I|)`.
pub fn integrate_density<V: QuadValue>(
    plan: &QuadraturePlan,
    iv: Interval,
    rho: impl Fn(f64) -> f64,
    zero: &V,
    g: &mut dyn FnMut(f64) -> Result<V>,
) -> Result<V> {
    let mut apply = |n: usize| -> Result<V> {
        let mut acc = zero.clone();
        for &(u, w) in rule(n).iter() {
            let (t, jac) = iv.map(u);
            let weight = w * jac * rho(t);
            if weight == 0.0 || !weight.is_finite() {
                continue;
            }
            acc.add_scaled(weight, &g(t)?);
        }
        Ok(acc)
    };
    let mut n = plan.nodes.max(2);
    let mut prev = apply(n)?;
    let mut change = f64::INFINITY;
    while n * 2 <= plan.max_nodes {
        n *= 2;
        let cur = apply(n)?;
        change = cur.distance(&prev);
        if change <= plan.tol * (1.0 + cur.magnitude()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { nodes: n, change, tol: plan.tol })
}
