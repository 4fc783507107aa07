//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::matrix::{ComplexMatrix, C64};
use super::svd::rotate_pair;
use crate::error::{Error, Result};

/// `H = Q diag(λ) Q*` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EighResult {
    pub q: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
}

impl EighResult {
    /// `Q diag(f(λ)) Q*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.q.rows();
        let mut scaled = self.q.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled.matmul(&self.q.adjoint())
    }
}

/// Hermitian eigendecomposition. The input is symmetrized first; a skew part
/// above `1e-10 ‖H‖_F` is rejected.
pub fn eigh(h: &ComplexMatrix) -> Result<EighResult> {
    if !h.is_square() {
        return Err(Error::shape(format!("eigh needs a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    let scale = h.frobenius();
    let skew = h.dist(&h.adjoint());
    if skew > 1e-10 * scale.max(f64::MIN_POSITIVE) && skew > 0.0 {
        return Err(Error::pre(format!("matrix is not Hermitian: ‖H − H*‖_F = {skew:e}")));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut qcols = ComplexMatrix::identity(n).columns();
    let max_sweeps = 100 * n.max(1);
    let target = f64::EPSILON * scale;
    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > target && sweeps < max_sweeps {
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let hpq = a[(p, q)];
                let b = hpq.norm();
                if b == 0.0 || b < 1e-3 * target / n as f64 {
                    continue;
                }
                let e = hpq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * b);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = e.conj();
                // A ← A W on columns p, q.
                for i in 0..n {
                    let x = a[(i, p)];
                    let y = a[(i, q)] * phase;
                    a[(i, p)] = x * c - y * s;
                    a[(i, q)] = x * s + y * c;
                }
                // A ← W* A on rows p, q.
                for j in 0..n {
                    let x = a[(p, j)];
                    let y = a[(q, j)] * e;
                    a[(p, j)] = x * c - y * s;
                    a[(q, j)] = x * s + y * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_pair(&mut qcols, p, q, c, s, phase);
            }
        }
        off = off_norm(&a);
    }
    if off > target {
        return Err(Error::NonConvergence { routine: "eigh", sweeps, residual: off });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&k| qcols[k].clone()).collect();
    Ok(EighResult { q: ComplexMatrix::from_columns(n, &cols), eigenvalues })
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}
