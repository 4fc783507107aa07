//! Dyadic Riemann sums for `∫ (tI+C)⁻¹(D−C)(tI+D)⁻¹ dν` and continuity diagnostics.

use serde::Serialize;

use super::calculus::matrix_eval_spectral;
use super::quadrature::Interval;
use super::MonotoneFunction;
use crate::error::{Error, Result};
use crate::matcore::{eigh, gauge_norm, inverse, ComplexMatrix, EighResult, GaugeNorm, ToleranceConfig};
use crate::strata::{stratum_index, StratumIndex};

#[derive(Debug, Clone)]
pub struct RiemannSumReport {
    pub p: u32,
    pub r_p: ComplexMatrix,
    /// Quadrature value of `∫_{[0, t_max)} h dν`.
    pub reference: ComplexMatrix,
    pub gap_gauge: f64,
    /// `(α·η/2^p) ∫ r dν` with `α = 1`.
    pub bound: f64,
    /// Empirical `η`: the largest ratio `Σ r(left)·ν(cell) / ∫ r dν` over levels `1..=p`.
    pub eta: f64,
    /// `∫_{t_max}^∞ q dν`, the part of the integral left out.
    pub tail: f64,
    pub t_max: f64,
    pub cells: usize,
}

impl RiemannSumReport {
    pub fn within_bound(&self) -> bool {
        self.gap_gauge <= self.bound * (1.0 + 1e-6)
    }
}

#[derive(Debug, Clone)]
pub struct RiemannDecay {
    pub reports: Vec<RiemannSumReport>,
    /// Least-squares slope of `log₂ gap` against `p`; `None` when some gap vanishes.
    pub slope: Option<f64>,
}

fn pd_eigh(c: &ComplexMatrix, tol: &ToleranceConfig) -> Result<EighResult> {
    let e = eigh(c).map_err(|e| match e {
        Error::Precondition(m) => Error::Domain(m),
        other => other,
    })?;
    let lmax = e.eigenvalues.last().copied().unwrap_or(0.0);
    if e.eigenvalues[0] <= tol.rank_rel * c.rows() as f64 * lmax {
        return Err(Error::Domain("Riemann sums need positive definite C and D".into()));
    }
    Ok(e)
}

/// Right-endpoint dyadic sums `Σ ν([(m−1)/2^p, m/2^p)) h(m/2^p)` over `[0, t_max)`.
///
/// `h` is evaluated in the joint eigenbasis form `Q_C[(Q_C* Δ Q_D) ⊙ K(t)]Q_D*`, which
/// reduces each cell to a rank-free kernel update. The tail `∫_{t_max}^∞ q dν` must not
/// exceed `tail_tol`.
#[allow(clippy::too_many_arguments)]
pub fn riemann_sum(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    p: u32,
    t_max: f64,
    tail_tol: f64,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<RiemannSumReport> {
    if c.shape() != d.shape() || !c.is_square() {
        return Err(Error::shape("C and D must be square of the same size"));
    }
    if !(t_max.is_finite() && t_max > 0.0) || p == 0 || p > 30 {
        return Err(Error::input("need t_max > 0 and 1 <= p <= 30"));
    }
    let ec = pd_eigh(c, tol)?;
    let ed = pd_eigh(d, tol)?;
    let (gc, gd) = (ec.eigenvalues[0], ed.eigenvalues[0]);
    let delta = d - c;
    let nd = gauge_norm(&delta, g);
    let q = |t: f64| nd / ((t + gc) * (t + gd));
    let r = |t: f64| q(t) * (1.0 / (t + gc) + 1.0 / (t + gd));

    let tail = f.integrate(Interval::Tail(t_max), &0.0, &mut |t| Ok(q(t)))?;
    if tail > tail_tol {
        return Err(Error::Truncation { tail, tol: tail_tol });
    }

    let n = c.rows();
    let m = &ec.q.adjoint() * &(&delta * &ed.q);
    let int_r = f.integrate(Interval::Head(t_max), &0.0, &mut |t| Ok(r(t)))?;

    let mut eta: f64 = 1.0;
    let mut kernel = vec![0.0; n * n];
    let mut cells = 0;
    for level in 1..=p {
        let h = (level as f64).exp2();
        let count = (t_max * h).ceil() as usize;
        let mut left_sum = 0.0;
        for j in 1..=count {
            let a = (j - 1) as f64 / h;
            let w = f.mass(a, (j as f64 / h).min(t_max));
            if w == 0.0 {
                continue;
            }
            left_sum += r(a) * w;
            if level == p {
                let t = j as f64 / h;
                for (i, li) in ec.eigenvalues.iter().enumerate() {
                    for (k, mk) in ed.eigenvalues.iter().enumerate() {
                        kernel[i * n + k] += w / ((t + li) * (t + mk));
                    }
                }
            }
        }
        if int_r > 0.0 {
            eta = eta.max(left_sum / int_r);
        }
        cells = count;
    }
    let inner = ComplexMatrix::from_fn(n, n, |i, k| m[(i, k)] * kernel[i * n + k]);
    let r_p = (&(&ec.q * &inner) * &ed.q.adjoint()).hermitian_part();

    let id = ComplexMatrix::identity(n);
    let reference = f
        .integrate(Interval::Head(t_max), &ComplexMatrix::zeros(n, n), &mut |t| {
            let rc = inverse(&(c + &id.scale_re(t)))?;
            let rd = inverse(&(d + &id.scale_re(t)))?;
            Ok(&(&rc * &delta) * &rd)
        })?
        .hermitian_part();

    let gap_gauge = gauge_norm(&(&r_p - &reference), g);
    let bound = eta / (p as f64).exp2() * int_r;
    Ok(RiemannSumReport { p, r_p, reference, gap_gauge, bound, eta, tail, t_max, cells })
}

/// Riemann sums for each `p` in `ps` with the fitted decay slope.
#[allow(clippy::too_many_arguments)]
pub fn riemann_decay(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    ps: &[u32],
    t_max: f64,
    tail_tol: f64,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<RiemannDecay> {
    let reports = ps
        .iter()
        .map(|&p| riemann_sum(f, c, d, p, t_max, tail_tol, g, tol))
        .collect::<Result<Vec<_>>>()?;
    let slope = if reports.len() >= 2 && reports.iter().all(|r| r.gap_gauge > 0.0) {
        let pts: Vec<(f64, f64)> = reports.iter().map(|r| (r.p as f64, r.gap_gauge.log2())).collect();
        Some(ls_slope(&pts))
    } else {
        None
    };
    Ok(RiemannDecay { reports, slope })
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneContinuityReport {
    /// `‖f(D_n) − f(C)‖_g`.
    pub gaps: Vec<f64>,
    /// `‖D_n − C‖_g`.
    pub dists: Vec<f64>,
    pub indices: Vec<StratumIndex>,
    pub all_in_stratum: bool,
    /// `gap/dist` at the last term with a nonzero distance.
    pub final_ratio: Option<f64>,
}

/// Per-term gaps of `f(D_n)` to `f(C)` for PSD sequences, together with the stratum index
/// of each term relative to `C`.
pub fn continuity_in_stratum(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    seq: &[ComplexMatrix],
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<MonotoneContinuityReport> {
    let fc = matrix_eval_spectral(f, c, tol)?;
    let mut gaps = Vec::with_capacity(seq.len());
    let mut dists = Vec::with_capacity(seq.len());
    let mut indices = Vec::with_capacity(seq.len());
    for dn in seq {
        gaps.push(gauge_norm(&(&matrix_eval_spectral(f, dn, tol)? - &fc), g));
        dists.push(gauge_norm(&(dn - c), g));
        indices.push(stratum_index(dn, c, tol)?);
    }
    let final_ratio = gaps.iter().zip(&dists).rev().find(|(_, d)| **d > 0.0).map(|(g, d)| g / d);
    Ok(MonotoneContinuityReport {
        all_in_stratum: indices.iter().all(|&k| k == 0),
        gaps,
        dists,
        indices,
        final_ratio,
    })
}
