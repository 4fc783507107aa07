//! Inverses, exponentials, subspace bases and Hermitian functional calculus.

use super::eigh::eigh;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::svd::svd;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::shape("LU needs a square matrix"));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |b, x| if x.1 > b.1 { x } else { b });
            if pv <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::new(a)?.solve(&ComplexMatrix::identity(a.rows())))
}

/// Matrix exponential by scaling and squaring a Taylor polynomial.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm = a.frobenius();
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let scaled = a.scale_re(0.5f64.powi(squarings as i32));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=20 {
        term = (&term * &scaled).scale_re(1.0 / k as f64);
        sum += &term;
        if term.frobenius() < 1e-18 * sum.frobenius() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orders every vector against `basis` twice (classical Gram-Schmidt with reorthogonalization).
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let d = dot(b, v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= d * bi;
            }
        }
    }
}

/// Orthonormal basis of `span(cols)`, dropping columns dependent at relative level `tol.rank_rel`.
pub fn orthonormal_basis(cols: &ComplexMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    let n = cols.rows();
    if cols.cols() == 0 {
        return ComplexMatrix::empty(n);
    }
    let s = svd(cols, tol).expect("svd of a basis candidate");
    s.range_basis()
}

/// Orthonormal columns spanning `span(cols)^⊥`; together with a basis of `span(cols)` they fill the space.
pub fn orthonormal_complement_basis(cols: &ComplexMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    let n = cols.rows();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    // Accept the given columns greedily so that an already orthonormal input needs no SVD.
    for c in cols.columns() {
        let mut r = c.clone();
        let nc = norm2(&c);
        orthogonalize(&mut r, &basis);
        let nr = norm2(&r);
        if nc > 0.0 && nr > 1e3 * tol.rank_rel.max(f64::EPSILON) * nc.max(1.0) {
            basis.push(r.iter().map(|z| z / nr).collect());
        }
    }
    let start = basis.len();
    while basis.len() < n {
        // Standard basis vector with the largest residual against the current basis.
        let mut best = 0;
        let mut best_res = -1.0;
        for i in 0..n {
            let proj: f64 = basis.iter().map(|b| b[i].norm_sqr()).sum();
            let res = 1.0 - proj;
            if res > best_res {
                best_res = res;
                best = i;
            }
        }
        let mut e = vec![ZERO; n];
        e[best] = ONE;
        orthogonalize(&mut e, &basis);
        let ne = norm2(&e);
        basis.push(e.iter().map(|z| z / ne).collect());
    }
    ComplexMatrix::from_columns(n, &basis[start..])
}

/// `B B*` for a basis with orthonormal columns.
pub fn projector_onto(basis: &ComplexMatrix) -> ComplexMatrix {
    if basis.cols() == 0 {
        return ComplexMatrix::zeros(basis.rows(), basis.rows());
    }
    basis * &basis.adjoint()
}

/// Cosines of the principal angles between two orthonormal bases, descending.
pub fn principal_cosines(ua: &ComplexMatrix, ub: &ComplexMatrix) -> Vec<f64> {
    if ua.cols() == 0 || ub.cols() == 0 {
        return Vec::new();
    }
    let m = ua.adj_mul(ub);
    svd(&m, &ToleranceConfig::default())
        .expect("svd of a cross-Gram matrix")
        .singular_values
        .iter()
        .map(|&c| c.min(1.0))
        .collect()
}

/// Principal angles below this count as an intersection: `acos(1 − 1e-8)`.
pub fn intersection_angle_tol() -> f64 {
    (1.0 - 1e-8f64).acos()
}

/// Orthonormal basis of `span(ua) ∩ span(ub)` using the principal-angle threshold.
pub fn intersection_basis(ua: &ComplexMatrix, ub: &ComplexMatrix) -> ComplexMatrix {
    let n = ua.rows();
    if ua.cols() == 0 || ub.cols() == 0 {
        return ComplexMatrix::empty(n);
    }
    let m = ua.adj_mul(ub);
    let s = svd(&m, &ToleranceConfig::default()).expect("svd of a cross-Gram matrix");
    let thr = intersection_angle_tol().cos();
    let k = s.singular_values.iter().filter(|&&c| c >= thr).count();
    (ua * &s.u.column_range(0, k)).clone()
}

/// Dimension of `span(ua) ∩ span(ub)`.
pub fn intersection_dim(ua: &ComplexMatrix, ub: &ComplexMatrix) -> usize {
    let thr = intersection_angle_tol().cos();
    principal_cosines(ua, ub).iter().filter(|&&c| c >= thr).count()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(eigh(h)?.apply(f))
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero are clamped.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitian_fn(h, |l| l.max(0.0).sqrt())
}

/// `(H†)^{1/2}` for positive semidefinite `H`, with the rank cutoff of `tol`.
pub fn psd_pinv_sqrt(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let e = eigh(h)?;
    let lmax = e.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cut = tol.rank_rel * h.rows() as f64 * lmax;
    Ok(e.apply(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 }))
}

/// `‖U*U − I‖_F`.
pub fn unitary_defect(u: &ComplexMatrix) -> f64 {
    u.adj_mul(u).dist(&ComplexMatrix::identity(u.cols()))
}
