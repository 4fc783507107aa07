//! Matrix functional calculus, Taylor terms and perturbation bounds.

use super::quadrature::Interval;
use super::MonotoneFunction;
use crate::error::{Error, Result};
use crate::matcore::{eigh, gauge_norm, inverse, ComplexMatrix, EighResult, GaugeNorm, ToleranceConfig};
use crate::pinv::BoundReport;

/// Eigendecomposition of a PSD matrix with the negative roundoff clamped.
fn psd_eigh(c: &ComplexMatrix) -> Result<EighResult> {
    if !c.is_square() {
        return Err(Error::shape("functional calculus needs a square matrix"));
    }
    let mut e = eigh(c).map_err(|e| match e {
        Error::Precondition(m) => Error::Domain(m),
        other => other,
    })?;
    let scale = e.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if let Some(&l) = e.eigenvalues.first() {
        if l < -1e-10 * scale {
            return Err(Error::Domain(format!("matrix is not positive semidefinite (eigenvalue {l:e})")));
        }
    }
    for l in &mut e.eigenvalues {
        *l = l.max(0.0);
    }
    Ok(e)
}

/// Smallest eigenvalue of a positive definite matrix.
fn pd_gamma(c: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let e = psd_eigh(c)?;
    let lmax = *e.eigenvalues.last().unwrap();
    let lmin = e.eigenvalues[0];
    if lmin <= tol.rank_rel * c.rows() as f64 * lmax || lmin == 0.0 {
        return Err(Error::Domain(format!("matrix is not positive definite (smallest eigenvalue {lmin:e})")));
    }
    Ok(lmin)
}

fn check_hermitian(d: &ComplexMatrix) -> Result<()> {
    if !d.is_square() {
        return Err(Error::shape("perturbation must be square"));
    }
    let skew = d.dist(&d.adjoint());
    if skew > 1e-10 * d.frobenius() {
        return Err(Error::Domain(format!("perturbation is not Hermitian (‖Δ−Δ*‖_F = {skew:e})")));
    }
    Ok(())
}

/// `f(C)` by applying the scalar function to the spectrum.
pub fn matrix_eval_spectral(f: &MonotoneFunction, c: &ComplexMatrix, _tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let e = psd_eigh(c)?;
    Ok(e.apply(|l| f.scalar_eval(l)).hermitian_part())
}

/// `f(C) = αI + βC − ∫ ((tI+C)⁻¹ − t/(t²+1) I) dν` by resolvent quadrature on the
/// range of `C`, with `f(0)` on its nullspace.
pub fn matrix_eval_integral(f: &MonotoneFunction, c: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let e = psd_eigh(c)?;
    let n = c.rows();
    let lmax = *e.eigenvalues.last().unwrap();
    let cut = tol.rank_rel * n as f64 * lmax;
    let k = e.eigenvalues.iter().filter(|&&l| l <= cut).count();
    let id = ComplexMatrix::identity(n);
    if k == n {
        return Ok(id.scale_re(f.f0()));
    }
    let ur = e.q.column_range(k, n);
    let cr = (&ur.adjoint() * &(c * &ur)).hermitian_part();
    let r = n - k;
    let ir = ComplexMatrix::identity(r);
    let integral = f.integrate(Interval::HalfLine, &ComplexMatrix::zeros(r, r), &mut |t| {
        // (tI+C)⁻¹ − t/(t²+1) I = (tI+C)⁻¹ (I − tC) / (t²+1)
        let res = inverse(&(&cr + &ir.scale_re(t)))?;
        Ok((&res * &(&ir - &cr.scale_re(t))).scale_re(1.0 / (t * t + 1.0)))
    })?;
    let mut fr = ir.scale_re(f.alpha);
    fr.axpy(f.beta.into(), &cr);
    fr.axpy((-1.0).into(), &integral);
    let null = e.q.column_range(0, k);
    let mut out = &(&ur * &fr) * &ur.adjoint();
    if k > 0 {
        out.axpy(f.f0().into(), &(&null * &null.adjoint()));
    }
    Ok(out.hermitian_part())
}

/// `n`-th Taylor term of `f` at `C` in the direction `Δ`:
/// `f₁(Δ) = βΔ + ∫ RΔR dν`, `f_n(Δ) = (−1)^{n+1} ∫ (RΔ)ⁿR dν`, `R = (tI+C)⁻¹`.
pub fn taylor_term(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    delta: &ComplexMatrix,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    if n < 1 {
        return Err(Error::input("Taylor terms start at n = 1"));
    }
    pd_gamma(c, tol)?;
    check_hermitian(delta)?;
    if delta.shape() != c.shape() {
        return Err(Error::shape("Δ and C must share a shape"));
    }
    let d = c.rows();
    let id = ComplexMatrix::identity(d);
    let integral = f.integrate(Interval::HalfLine, &ComplexMatrix::zeros(d, d), &mut |t| {
        let r = inverse(&(c + &id.scale_re(t)))?;
        let rd = &r * delta;
        let mut m = r.clone();
        for _ in 0..n {
            m = &rd * &m;
        }
        Ok(m)
    })?;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut out = integral.scale_re(sign);
    if n == 1 {
        out.axpy(f.beta.into(), delta);
    }
    Ok(out.hermitian_part())
}

/// Norm bound for the `n`-th Taylor term:
/// `(β + ∫(t+γ)⁻² dν)‖Δ‖` for `n = 1` and `∫(t+γ)^{-(n+1)} dν ‖Δ‖ⁿ` otherwise.
pub fn taylor_remainder_bound(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    delta: &ComplexMatrix,
    n: usize,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::input("Taylor terms start at n = 1"));
    }
    let gamma = pd_gamma(c, tol)?;
    let nd = gauge_norm(delta, g);
    if nd >= gamma {
        return Err(Error::Radius { ratio: nd / gamma });
    }
    let p = (n + 1) as i32;
    let moment = f.integrate(Interval::HalfLine, &0.0, &mut |t| Ok((t + gamma).powi(-p)))?;
    Ok(if n == 1 { (f.beta + moment) * nd } else { moment * nd.powi(n as i32) })
}

/// Geometric bound `∫(t+γ)⁻² dν · ρ^m ‖Δ‖ / (1 − ρ)`, `ρ = ‖Δ‖/γ`, on the remainder
/// after `m ≥ 1` Taylor terms.
pub fn series_tail_bound(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    delta: &ComplexMatrix,
    m: usize,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let gamma = pd_gamma(c, tol)?;
    let nd = gauge_norm(delta, g);
    let rho = nd / gamma;
    if rho >= 1.0 {
        return Err(Error::Radius { ratio: rho });
    }
    let moment = f.integrate(Interval::HalfLine, &0.0, &mut |t| Ok((t + gamma).powi(-2)))?;
    Ok(moment * rho.powi(m as i32) * nd / (1.0 - rho))
}

/// `‖f(D) − f(C)‖ ≤ ‖D − C‖ (β + ∫ dν / ((t+γ_C)(t+γ_D)))` for positive definite `C`, `D`.
pub fn perturbation_bound(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<BoundReport> {
    let gc = pd_gamma(c, tol)?;
    let gd = pd_gamma(d, tol)?;
    let actual = gauge_norm(&(matrix_eval_spectral(f, d, tol)? - matrix_eval_spectral(f, c, tol)?), g);
    let k = f.integrate(Interval::HalfLine, &0.0, &mut |t| Ok(1.0 / ((t + gc) * (t + gd))))?;
    let bound = gauge_norm(&(d - c), g) * (f.beta + k);
    Ok(BoundReport { hypothesis_met: true, bound, actual, slack: bound - actual })
}

#[cfg(test)]
mod tests {
    use super::super::{make_atomic, make_sqrt};
    use super::*;

    fn t() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn d(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::real_diag(v)
    }

    #[test]
    fn spectral_examples() {
        let f = make_sqrt();
        assert!(matrix_eval_spectral(&f, &d(&[4.0, 0.0]), &t()).unwrap().dist(&d(&[2.0, 0.0])) < 1e-15);
        let id = make_atomic(0.0, 1.0, vec![]).unwrap();
        let c = d(&[3.0, 1.5]);
        assert!(matrix_eval_spectral(&id, &c, &t()).unwrap().dist(&c) < 1e-14);
        assert!(matches!(matrix_eval_spectral(&f, &d(&[1.0, -1.0]), &t()), Err(Error::Domain(_))));
    }

    #[test]
    fn integral_examples() {
        let f = make_sqrt();
        let i2 = ComplexMatrix::identity(2);
        assert!(matrix_eval_integral(&f, &i2, &t()).unwrap().dist(&i2) < 1e-8);
        assert!(matrix_eval_integral(&f, &d(&[4.0, 1.0]), &t()).unwrap().dist(&d(&[2.0, 1.0])) < 1e-7);
        let z = matrix_eval_integral(&f, &ComplexMatrix::zeros(3, 3), &t()).unwrap();
        assert!(z.dist(&ComplexMatrix::identity(3).scale_re(f.f0())) < 1e-15);
        let g = make_atomic(0.5, 0.0, vec![(1.0, 1.0)]).unwrap();
        let c = d(&[3.0, 0.0]);
        assert!(matrix_eval_integral(&g, &c, &t()).unwrap().dist(&d(&[0.75, 0.0])) < 1e-14);
    }

    #[test]
    fn taylor_examples() {
        let f = make_sqrt();
        let i2 = ComplexMatrix::identity(2);
        let delta = ComplexMatrix::from_rows(&[&[0.1, 0.05], &[0.05, -0.2]]);
        let f1 = taylor_term(&f, &i2, &delta, 1, &t()).unwrap();
        assert!(f1.dist(&delta.scale_re(0.5)) < 1e-8);
        let zero = ComplexMatrix::zeros(2, 2);
        for n in 1..4 {
            assert_eq!(taylor_term(&f, &i2, &zero, n, &t()).unwrap().max_abs(), 0.0);
        }
        let a = make_atomic(0.0, 0.0, vec![(1.0, 1.0)]).unwrap();
        let eps = 0.2;
        let f2 = taylor_term(&a, &i2, &i2.scale_re(eps), 2, &t()).unwrap();
        assert!(f2.dist(&i2.scale_re(-eps * eps / 8.0)) < 1e-15);
        assert!(taylor_term(&f, &i2, &delta, 0, &t()).is_err());
        assert!(matches!(taylor_term(&f, &d(&[1.0, 0.0]), &delta, 1, &t()), Err(Error::Domain(_))));
    }

    #[test]
    fn remainder_bound_examples() {
        let f = make_sqrt();
        let i2 = ComplexMatrix::identity(2);
        let delta = d(&[0.1, 0.0]);
        let b = taylor_remainder_bound(&f, &i2, &delta, 1, GaugeNorm::Operator, &t()).unwrap();
        assert!((b - 0.05).abs() < 1e-10);
        assert_eq!(taylor_remainder_bound(&f, &i2, &ComplexMatrix::zeros(2, 2), 3, GaugeNorm::TRACE, &t()).unwrap(), 0.0);
        let a = make_atomic(0.0, 0.0, vec![(1.0, 1.0)]).unwrap();
        let b = taylor_remainder_bound(&a, &i2, &d(&[0.5, 0.0]), 2, GaugeNorm::Operator, &t()).unwrap();
        assert!((b - 0.03125).abs() < 1e-15);
        assert!(matches!(
            taylor_remainder_bound(&f, &i2, &d(&[1.5, 0.0]), 1, GaugeNorm::Operator, &t()),
            Err(Error::Radius { .. })
        ));
    }

    #[test]
    fn perturbation_examples() {
        let f = make_sqrt();
        let i2 = ComplexMatrix::identity(2);
        let r = perturbation_bound(&f, &i2, &i2, GaugeNorm::TRACE, &t()).unwrap();
        assert_eq!(r.actual, 0.0);
        let r = perturbation_bound(&f, &i2, &i2.scale_re(4.0), GaugeNorm::TRACE, &t()).unwrap();
        assert!((r.actual - 2.0).abs() < 1e-12);
        // ∫ √t/(π(t+1)(t+4)) dt = 1/(1+2) = 1/3, so the bound is 6·(1/3) = 2: the scalar case is tight
        assert!((r.bound - 2.0).abs() < 1e-9, "{r:?}");
        let id = make_atomic(0.0, 1.0, vec![]).unwrap();
        let dm = d(&[2.0, 3.0]);
        let r = perturbation_bound(&id, &i2, &dm, GaugeNorm::FROBENIUS, &t()).unwrap();
        assert!((r.actual - r.bound).abs() < 1e-14);
    }
}
