//! One-sided Jacobi SVD.
//!
//! Columns of the working matrix are rotated pairwise until they are mutually
//! orthogonal; the column norms are then the singular values.

use super::dense::orthonormal_complement_basis;
use super::matrix::{ComplexMatrix, C64, ZERO};
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

/// `A = U Σ V*` with full square `U` and `V`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    pub vt: ComplexMatrix,
    pub rank: usize,
    pub rank_tolerance: f64,
}

impl SvdResult {
    pub fn v(&self) -> ComplexMatrix {
        self.vt.adjoint()
    }

    /// Orthonormal basis of `R(A)`.
    pub fn range_basis(&self) -> ComplexMatrix {
        self.u.column_range(0, self.rank)
    }

    /// Orthonormal basis of `R(A)^⊥`.
    pub fn range_complement_basis(&self) -> ComplexMatrix {
        self.u.column_range(self.rank, self.u.cols())
    }

    /// Orthonormal basis of `N(A)^⊥ = R(A*)`.
    pub fn corange_basis(&self) -> ComplexMatrix {
        self.v().column_range(0, self.rank)
    }

    /// Orthonormal basis of `N(A)`.
    pub fn null_basis(&self) -> ComplexMatrix {
        let v = self.v();
        v.column_range(self.rank, v.cols())
    }

    pub fn sigma_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::rect_diag(self.u.rows(), self.vt.rows(), &self.singular_values)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.u * &self.sigma_matrix()) * &self.vt
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Smallest nonzero singular value, 0 for rank zero.
    pub fn sigma_min_nonzero(&self) -> f64 {
        if self.rank == 0 {
            0.0
        } else {
            self.singular_values[self.rank - 1]
        }
    }
}

/// Rank cutoff `tol.rank_rel * max(m, n) * σ₁`.
pub fn rank_cutoff(sv: &[f64], rows: usize, cols: usize, tol: &ToleranceConfig) -> f64 {
    tol.rank_rel * rows.max(cols) as f64 * sv.first().copied().unwrap_or(0.0)
}

pub fn svd(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let (u, sv, vt) = if m >= n {
        jacobi_tall(a)?
    } else {
        let (u2, sv, vt2) = jacobi_tall(&a.adjoint())?;
        (vt2.adjoint(), sv, u2.adjoint())
    };
    let cutoff = rank_cutoff(&sv, m, n, tol);
    let rank = if sv.first().copied().unwrap_or(0.0) == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > cutoff).count()
    };
    Ok(SvdResult { u, singular_values: sv, vt, rank, rank_tolerance: cutoff })
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a, &ToleranceConfig::default())?.singular_values)
}

/// Numerical rank under `tol`.
pub fn rank(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(svd(a, tol)?.rank)
}

/// Jacobi SVD for `m >= n`. Returns `(U, σ, V*)`.
fn jacobi_tall(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (m, n) = a.shape();
    // Column-major working copies make the pairwise column updates contiguous.
    let mut w: Vec<Vec<C64>> = a.columns();
    let mut v: Vec<Vec<C64>> = ComplexMatrix::identity(n).columns();
    let max_sweeps = 100 * n.max(1);
    let eps = f64::EPSILON;
    // Columns this small are pure roundoff; rotating against them never settles.
    let floor = (m.max(n) as f64 * eps * a.frobenius()).powi(2);
    let mut converged = n < 2;
    let mut residual = 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        residual = 0.0f64;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (alpha, beta, gamma) = col_products(&w[i], &w[j]);
                let g = gamma.norm();
                if g == 0.0 || alpha <= floor || beta <= floor {
                    continue;
                }
                let rel = g / (alpha * beta).sqrt();
                residual = residual.max(rel);
                if rel <= eps {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, i, j, c, s, phase);
                rotate_pair(&mut v, i, j, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NonConvergence { routine: "svd", sweeps, residual });
    }

    let norms: Vec<f64> = w.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sv: Vec<f64> = order.iter().map(|&k| norms[k]).collect();

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for &k in &order {
        // Roundoff-level columns carry no direction; they are filled from the complement.
        if norms[k] > 0.0 && norms[k] * norms[k] > floor {
            ucols.push(w[k].iter().map(|z| z / norms[k]).collect());
        } else {
            break;
        }
    }
    let known = ComplexMatrix::from_columns(m, &ucols);
    let comp = orthonormal_complement_basis(&known, &ToleranceConfig::default());
    let mut u = known.hstack(&comp);
    if u.cols() != m {
        // Accepted columns were numerically dependent; rebuild a unitary completion.
        u = rebuild_unitary(&ucols, m);
    }
    let vcols: Vec<Vec<C64>> = order.iter().map(|&k| v[k].clone()).collect();
    let vt = ComplexMatrix::from_columns(n, &vcols).adjoint();
    Ok((u, sv, vt))
}

fn col_products(x: &[C64], y: &[C64]) -> (f64, f64, C64) {
    let mut a = 0.0;
    let mut b = 0.0;
    let mut g = ZERO;
    for (p, q) in x.iter().zip(y) {
        a += p.norm_sqr();
        b += q.norm_sqr();
        g += p.conj() * q;
    }
    (a, b, g)
}

/// `x ← c x − s φ y`, `y ← s x + c φ y`: a unitary right-rotation of two columns.
pub(crate) fn rotate_pair(cols: &mut [Vec<C64>], i: usize, j: usize, c: f64, s: f64, phase: C64) {
    let (lo, hi) = cols.split_at_mut(j);
    let x = &mut lo[i];
    let y = &mut hi[0];
    for (p, q) in x.iter_mut().zip(y.iter_mut()) {
        let qp = *q * phase;
        let np = *p * c - qp * s;
        let nq = *p * s + qp * c;
        *p = np;
        *q = nq;
    }
}

fn rebuild_unitary(cols: &[Vec<C64>], m: usize) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for c in cols {
        let mut r = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let d: C64 = b.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= d * bi;
                }
            }
        }
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nr > 0.5 {
            basis.push(r.iter().map(|z| z / nr).collect());
        }
    }
    let known = ComplexMatrix::from_columns(m, &basis);
    let comp = orthonormal_complement_basis(&known, &ToleranceConfig::default());
    known.hstack(&comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitary_defect(u: &ComplexMatrix) -> f64 {
        u.adj_mul(u).dist(&ComplexMatrix::identity(u.cols()))
    }

    #[test]
    fn diagonal_example() {
        let a = ComplexMatrix::real_diag(&[3.0, 2.0, 0.0]);
        let s = svd(&a, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.rank, 2);
        for (x, y) in s.singular_values.iter().zip([3.0, 2.0, 0.0]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn nilpotent_example() {
        // A = 2 e1 e2*
        let a = ComplexMatrix::from_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        let s = svd(&a, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.singular_values[0] - 2.0).abs() < 1e-15);
        assert!(s.singular_values[1].abs() < 1e-15);
        assert!((s.u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        let v = s.v();
        assert!((v[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(s.reconstruct().dist(&a) < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = svd(&ComplexMatrix::zeros(3, 2), &ToleranceConfig::default()).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.rank_tolerance, 0.0);
        assert!(unitary_defect(&s.u) < 1e-14);
        assert!(unitary_defect(&s.vt) < 1e-14);
    }

    #[test]
    fn wide_and_complex() {
        let a = ComplexMatrix::from_fn(2, 4, |i, j| C64::new((i + 2 * j) as f64 - 2.5, (i * j) as f64 * 0.3 - 0.1));
        let s = svd(&a, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.u.shape(), (2, 2));
        assert_eq!(s.vt.shape(), (4, 4));
        assert_eq!(s.singular_values.len(), 2);
        assert!(s.reconstruct().dist(&a) < 1e-12 * a.frobenius());
        assert!(unitary_defect(&s.u) < 1e-13);
        assert!(unitary_defect(&s.vt) < 1e-13);
    }
}
