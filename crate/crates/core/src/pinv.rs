//! Moore-Penrose inverse, reduced minimum modulus and perturbation bounds.

use serde::Serialize;

use crate::codim::{essential_codimension, Projector};
use crate::error::{Error, Result};
use crate::matcore::{gauge_norm, op_norm, svd, ComplexMatrix, GaugeNorm, SvdResult, ToleranceConfig};

#[derive(Debug, Clone)]
pub struct PinvResult {
    pub pinv: ComplexMatrix,
    /// `γ(A) = 1/‖A†‖`; 0 when `rank == 0`.
    pub gamma: f64,
    /// `P_{R(A)}`.
    pub range_proj: ComplexMatrix,
    /// `P_{N(A)}`.
    pub null_proj: ComplexMatrix,
    pub rank: usize,
}

impl PinvResult {
    pub fn is_zero_rank(&self) -> bool {
        self.rank == 0
    }

    /// `‖A†‖`.
    pub fn pinv_norm(&self) -> f64 {
        if self.rank == 0 {
            0.0
        } else {
            1.0 / self.gamma
        }
    }
}

/// Outcome of checking one perturbation inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub hypothesis_met: bool,
    pub bound: f64,
    pub actual: f64,
    pub slack: f64,
}

impl BoundReport {
    /// Holds within the 1e-9 relative roundoff allowance, or the hypothesis is not met.
    pub fn holds(&self) -> bool {
        !self.hypothesis_met || self.slack >= -1e-9 * self.bound.abs()
    }
}

pub(crate) fn pinv_from_svd(s: &SvdResult) -> PinvResult {
    let (m, n) = (s.u.rows(), s.vt.rows());
    let r = s.rank;
    let ur = s.range_basis();
    let vr = s.corange_basis();
    let inv: Vec<f64> = s.singular_values[..r].iter().map(|x| 1.0 / x).collect();
    let mut scaled = vr.clone();
    for j in 0..r {
        for i in 0..n {
            scaled[(i, j)] *= inv[j];
        }
    }
    let pinv = if r == 0 { ComplexMatrix::zeros(n, m) } else { &scaled * &ur.adjoint() };
    let range_proj = crate::matcore::projector_onto(&ur);
    let null_proj = crate::matcore::projector_onto(&s.null_basis());
    PinvResult { pinv, gamma: s.sigma_min_nonzero(), range_proj, null_proj, rank: r }
}

pub fn moore_penrose(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PinvResult> {
    Ok(pinv_from_svd(&svd(a, tol)?))
}

/// Shorthand for `moore_penrose(a).pinv`.
pub fn pinv(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    Ok(moore_penrose(a, tol)?.pinv)
}

/// Largest of the four Penrose residuals `‖ABA−A‖, ‖BAB−B‖, ‖(AB)*−AB‖, ‖(BA)*−BA‖` (Frobenius).
pub fn penrose_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let ab = a * b;
    let ba = b * a;
    let r1 = (&ab * a).dist(a);
    let r2 = (&ba * b).dist(b);
    let r3 = ab.adjoint().dist(&ab);
    let r4 = ba.adjoint().dist(&ba);
    r1.max(r2).max(r3).max(r4)
}

/// Three-term expansion of `A† − B†` in terms of `A − B`.
pub fn wedin_rhs(a: &ComplexMatrix, b: &ComplexMatrix, ap: &ComplexMatrix, bp: &ComplexMatrix) -> ComplexMatrix {
    let m = a.rows();
    let n = a.cols();
    let diff = a - b;
    let diff_adj = diff.adjoint();
    let ata_p = ap * &ap.adjoint();
    let bbt_p = &bp.adjoint() * bp;
    let t1 = -(&(ap * &diff) * bp);
    let t2 = &(&ata_p * &diff_adj) * &(ComplexMatrix::identity(m) - b * bp);
    let t3 = &(&(ComplexMatrix::identity(n) - ap * a) * &diff_adj) * &bbt_p;
    t1 + t2 + t3
}

/// `‖(A† − B†) − RHS‖_g` for the three-term identity.
pub fn wedin_residual(a: &ComplexMatrix, b: &ComplexMatrix, g: GaugeNorm, tol: &ToleranceConfig) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::shape("Wedin identity needs equal shapes"));
    }
    let ap = pinv(a, tol)?;
    let bp = pinv(b, tol)?;
    let lhs = &ap - &bp;
    Ok(gauge_norm(&(lhs - wedin_rhs(a, b, &ap, &bp)), g))
}

fn perturbation_report(a: &PinvResult, b: &PinvResult, dist: f64, structural: bool) -> BoundReport {
    let an = a.pinv_norm();
    let actual = b.pinv_norm();
    let hypothesis_met = structural && a.rank > 0 && dist < a.gamma;
    let denom = 1.0 - an * dist;
    let bound = if denom > 0.0 { an / denom } else { f64::INFINITY };
    BoundReport { hypothesis_met, bound, actual, slack: bound - actual }
}

/// Same-rank bound `‖B†‖ ≤ ‖A†‖ / (1 − ‖A†‖‖A−B‖)` when `‖A−B‖ < γ(A)`.
pub fn same_rank_bound(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<BoundReport> {
    if a.shape() != b.shape() {
        return Err(Error::shape("bound needs equal shapes"));
    }
    let pa = moore_penrose(a, tol)?;
    let pb = moore_penrose(b, tol)?;
    Ok(perturbation_report(&pa, &pb, op_norm(&(a - b)), pa.rank == pb.rank))
}

/// The same bound with the hypothesis phrased through the nullspace codimension.
pub fn index_bound(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<BoundReport> {
    if a.shape() != b.shape() {
        return Err(Error::shape("bound needs equal shapes"));
    }
    let pa = moore_penrose(a, tol)?;
    let pb = moore_penrose(b, tol)?;
    let k = essential_codimension(
        &Projector::new_unchecked(pa.null_proj.clone()),
        &Projector::new_unchecked(pb.null_proj.clone()),
        tol,
    )?;
    Ok(perturbation_report(&pa, &pb, op_norm(&(a - b)), k == 0))
}

/// `(‖A‖ + 1/(2‖A†‖))² + 8‖A†‖²`, a Lipschitz constant for `B ↦ B†` on the ball
/// `‖B − A‖ < 1/(2‖A†‖)` within the stratum of `A`.
pub fn lipschitz_constant(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let s = svd(a, tol)?;
    if s.rank == 0 {
        return Err(Error::pre("Lipschitz constant needs rank(A) >= 1"));
    }
    let an = s.sigma_max();
    let apn = 1.0 / s.sigma_min_nonzero();
    Ok((an + 1.0 / (2.0 * apn)).powi(2) + 8.0 * apn * apn)
}

/// Radius `1/(2‖A†‖)` of the ball on which [`lipschitz_constant`] applies.
pub fn lipschitz_radius(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let s = svd(a, tol)?;
    if s.rank == 0 {
        return Err(Error::pre("Lipschitz radius needs rank(A) >= 1"));
    }
    Ok(s.sigma_min_nonzero() / 2.0)
}
