//! Seeded random test matrices: Ginibre ensembles with prescribed rank and spectra.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{expm, svd, ComplexMatrix, ToleranceConfig, C64};

/// The crate's deterministic generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. complex Gaussian with `E|z|² = 1`.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Unitary from Gram-Schmidt on a Ginibre matrix with the diagonal phases fixed.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, n, n);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for b in &cols {
                    let d: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= d * bi;
                    }
                }
            }
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nv < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.iter().map(|z| z / nv).collect());
        }
        if ok {
            return ComplexMatrix::from_columns(n, &cols);
        }
    }
}

/// `U diag(s) V*` with Haar-like `U`, `V`.
pub fn with_singular_values<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, s: &[f64]) -> ComplexMatrix {
    assert!(s.len() <= rows.min(cols));
    let u = unitary(rng, rows);
    let v = unitary(rng, cols);
    &(&u * &ComplexMatrix::rect_diag(rows, cols, s)) * &v.adjoint()
}

/// Rank-`r` matrix with nonzero singular values uniform in `[lo, hi]`.
pub fn with_rank<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, r: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let s = spectrum(rng, r, lo, hi);
    with_singular_values(rng, rows, cols, &s)
}

/// Hermitian with Gaussian entries (GUE scaling).
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ginibre(rng, n, n).hermitian_part()
}

/// Positive semidefinite of rank `r` with nonzero eigenvalues uniform in `[lo, hi]`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let ev = spectrum(rng, r, lo, hi);
    let u = unitary(rng, n);
    let mut d = vec![0.0; n];
    d[..r].copy_from_slice(&ev);
    (&(&u * &ComplexMatrix::real_diag(&d)) * &u.adjoint()).hermitian_part()
}

/// Orthogonal projector of rank `k` onto a random subspace.
pub fn projector<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    let u = unitary(rng, n).column_range(0, k);
    crate::matcore::projector_onto(&u)
}

/// Skew-Hermitian generator of the given operator-norm scale.
pub fn skew_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    let h = hermitian(rng, n);
    let nh = crate::matcore::op_norm(&h).max(f64::MIN_POSITIVE);
    h.scale(C64::new(0.0, scale / nh))
}

/// Ginibre matrix rescaled to operator norm `scale`.
pub fn direction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let g = ginibre(rng, rows, cols);
    let ng = crate::matcore::op_norm(&g).max(f64::MIN_POSITIVE);
    g.scale_re(scale / ng)
}

/// `B_n = e^{X/n} B e^{−Y/n}` for `n = 1..=terms` with random generators of norm `scale`.
/// Every term lies in the stratum of `B` and the sequence converges to `B`.
pub fn in_stratum_family<R: Rng + ?Sized>(rng: &mut R, b: &ComplexMatrix, terms: usize, scale: f64) -> Vec<ComplexMatrix> {
    let x = direction(rng, b.rows(), b.rows(), scale);
    let y = direction(rng, b.cols(), b.cols(), scale);
    (1..=terms)
        .map(|n| {
            let t = 1.0 / n as f64;
            &(&expm(&x.scale_re(t)) * b) * &expm(&y.scale_re(-t))
        })
        .collect()
}

/// `B_n = B + (s/n) u v*` for `n = 1..=terms`, with unit `u ⟂ R(B)` and `v ∈ N(B)`.
/// Every term has rank one more than `B`, so the sequence leaves the stratum.
pub fn jump_family<R: Rng + ?Sized>(
    rng: &mut R,
    b: &ComplexMatrix,
    terms: usize,
    s: f64,
    tol: &ToleranceConfig,
) -> Result<Vec<ComplexMatrix>> {
    let sv = svd(b, tol)?;
    let (co, null) = (sv.range_complement_basis(), sv.null_basis());
    if co.cols() == 0 || null.cols() == 0 {
        return Err(Error::pre("a rank bump needs a nontrivial nullspace and cokernel"));
    }
    let u = unit_combination(rng, &co);
    let v = unit_combination(rng, &null);
    let uv = &u * &v.adjoint();
    Ok((1..=terms).map(|n| b + &uv.scale_re(s / n as f64)).collect())
}

fn unit_combination<R: Rng + ?Sized>(rng: &mut R, basis: &ComplexMatrix) -> ComplexMatrix {
    let c = ginibre(rng, basis.cols(), 1);
    let v = basis * &c;
    let nv = v.frobenius();
    v.scale_re(1.0 / nv)
}

fn spectrum<R: Rng + ?Sized>(rng: &mut R, r: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..r).map(|_| rng.gen_range(lo..=hi)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
