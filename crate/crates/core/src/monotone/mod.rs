//! Operator monotone functions through their Pick representation
//! `f(λ) = α + βλ − ∫ (1/(t+λ) − t/(t²+1)) dν(t)`.

mod calculus;
pub mod quadrature;
mod riemann;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use calculus::{
    matrix_eval_integral, matrix_eval_spectral, perturbation_bound, series_tail_bound, taylor_remainder_bound,
    taylor_term,
};
pub use quadrature::{QuadValue, QuadraturePlan};
pub use riemann::{
    continuity_in_stratum, riemann_decay, riemann_sum, MonotoneContinuityReport, RiemannDecay, RiemannSumReport,
};

use crate::error::{Error, Result};
use quadrature::{integrate_density, Interval};

/// Built-in absolutely continuous representing measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    /// `dν = √t/π dt`, the measure of `λ ↦ √λ`.
    Sqrt,
}

impl Density {
    pub fn rho(&self, t: f64) -> f64 {
        match self {
            Density::Sqrt => t.max(0.0).sqrt() / PI,
        }
    }

    /// `ν([a, b))`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        match self {
            Density::Sqrt => 2.0 / (3.0 * PI) * (b.powf(1.5) - a.powf(1.5)),
        }
    }

    /// `∫ (1/(t+λ) − t/(t²+1)) dν` in closed form.
    fn resolvent_integral(&self, lambda: f64) -> f64 {
        match self {
            Density::Sqrt => FRAC_1_SQRT_2 - lambda.max(0.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    /// Point masses `(t_i, w_i)` with `t_i > 0`, `w_i ≥ 0`.
    Atomic(Vec<(f64, f64)>),
    Density { density: Density, plan: QuadraturePlan },
}

/// The triple `(α, β, ν)` with the cached value `f(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFunction {
    pub alpha: f64,
    pub beta: f64,
    pub measure: Measure,
    f0: f64,
}

impl MonotoneFunction {
    pub fn new(alpha: f64, beta: f64, measure: Measure) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || beta < 0.0 {
            return Err(Error::input("alpha must be finite and beta finite and nonnegative"));
        }
        if let Measure::Atomic(atoms) = &measure {
            for &(t, w) in atoms {
                if !(t.is_finite() && t > 0.0 && w.is_finite() && w >= 0.0) {
                    return Err(Error::input(format!("invalid atom ({t}, {w}): need t > 0, w >= 0")));
                }
            }
        }
        let mut f = Self { alpha, beta, measure, f0: 0.0 };
        let admissible = f.integrate(Interval::HalfLine, &0.0, &mut |t| Ok(1.0 / (t * t + 1.0)))?;
        if !admissible.is_finite() {
            return Err(Error::input("representing measure is not admissible"));
        }
        f.f0 = f.scalar_eval_integral(0.0)?;
        Ok(f)
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// Integral of `g` against `ν` over an interval, atoms included when `a ≤ t < b`.
    pub fn integrate<V: QuadValue>(&self, iv: Interval, zero: &V, g: &mut dyn FnMut(f64) -> Result<V>) -> Result<V> {
        match &self.measure {
            Measure::Atomic(atoms) => {
                let mut acc = zero.clone();
                for &(t, w) in atoms {
                    let inside = match iv {
                        Interval::HalfLine => true,
                        Interval::Head(b) => t < b,
                        Interval::Tail(a) => t >= a,
                    };
                    if inside && w > 0.0 {
                        acc.add_scaled(w, &g(t)?);
                    }
                }
                Ok(acc)
            }
            Measure::Density { density, plan } => integrate_density(plan, iv, |t| density.rho(t), zero, g),
        }
    }

    /// `ν([a, b))`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        match &self.measure {
            Measure::Atomic(atoms) => atoms.iter().filter(|(t, _)| *t >= a && *t < b).map(|(_, w)| w).sum(),
            Measure::Density { density, .. } => density.mass(a, b),
        }
    }

    /// Scalar value, exact for atomic and built-in densities.
    pub fn scalar_eval(&self, lambda: f64) -> f64 {
        let integral = match &self.measure {
            Measure::Atomic(atoms) => atoms.iter().map(|&(t, w)| w * (1.0 / (t + lambda) - t / (t * t + 1.0))).sum(),
            Measure::Density { density, .. } => density.resolvent_integral(lambda),
        };
        self.alpha + self.beta * lambda - integral
    }

    /// Scalar value with the integral evaluated by quadrature.
    pub fn scalar_eval_integral(&self, lambda: f64) -> Result<f64> {
        if lambda < 0.0 {
            return Err(Error::Domain(format!("λ = {lambda} is negative")));
        }
        let integral = self.integrate(Interval::HalfLine, &0.0, &mut |t| {
            // 1/(t+λ) − t/(t²+1) = (1 − λt) / ((t+λ)(t²+1)), free of cancellation at large t
            Ok((1.0 - lambda * t) / ((t + lambda) * (t * t + 1.0)))
        })?;
        Ok(self.alpha + self.beta * lambda - integral)
    }
}

/// `λ ↦ √λ`: `α = 1/√2`, `β = 0`, `dν = √t/π dt`.
pub fn make_sqrt() -> MonotoneFunction {
    MonotoneFunction::new(
        FRAC_1_SQRT_2,
        0.0,
        Measure::Density { density: Density::Sqrt, plan: QuadraturePlan::default() },
    )
    .expect("square root representation is admissible")
}

pub fn make_atomic(alpha: f64, beta: f64, atoms: Vec<(f64, f64)>) -> Result<MonotoneFunction> {
    MonotoneFunction::new(alpha, beta, Measure::Atomic(atoms))
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    alpha: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    atoms: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    density: Option<Density>,
}

impl Serialize for MonotoneFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (atoms, density) = match &self.measure {
            Measure::Atomic(a) => (Some(a.iter().map(|&(t, w)| [t, w]).collect()), None),
            Measure::Density { density, .. } => (None, Some(*density)),
        };
        FunctionJson { alpha: self.alpha, beta: self.beta, atoms, density }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MonotoneFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FunctionJson::deserialize(d)?;
        let measure = match (raw.atoms, raw.density) {
            (Some(a), None) => Measure::Atomic(a.into_iter().map(|[t, w]| (t, w)).collect()),
            (None, Some(density)) => Measure::Density { density, plan: QuadraturePlan::default() },
            (None, None) => Measure::Atomic(Vec::new()),
            (Some(_), Some(_)) => return Err(serde::de::Error::custom("give either atoms or density, not both")),
        };
        MonotoneFunction::new(raw.alpha, raw.beta, measure).map_err(serde::de::Error::custom)
    }
}

impl MonotoneFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("monotone function JSON: {e}")))
    }
}
