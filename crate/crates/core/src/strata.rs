//! Rank strata `C_k(A)`, the two-sided group action, sections, and the
//! Moore-Penrose map with its derivative.

use serde::Serialize;

use crate::codim::{essential_codimension, Projector};
use crate::error::{Error, Result};
use crate::matcore::{
    expm, gauge_norm, intersection_basis, inverse, op_norm, orthonormal_basis, projector_onto, svd, ComplexMatrix,
    GaugeNorm, SvdResult, ToleranceConfig,
};
use crate::pinv::{lipschitz_constant, pinv_from_svd, PinvResult};

/// `k = nullity(B) − nullity(A)` for the pair `(B, A)`.
pub type StratumIndex = i64;

/// Admissible indices `[−min(n₁, n₃), n₂]` for strata around `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexRange {
    pub k_min: i64,
    pub k_max: i64,
    /// `dim N(A)`
    pub n1: usize,
    /// `dim N(A)^⊥`
    pub n2: usize,
    /// `dim R(A)^⊥`
    pub n3: usize,
}

impl IndexRange {
    pub fn contains(&self, k: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }
}

/// An element `(G, K)` of the two-sided linear group acting by `B ↦ G B K⁻¹`.
#[derive(Debug, Clone)]
pub struct GroupPair {
    pub g: ComplexMatrix,
    pub k: ComplexMatrix,
}

impl GroupPair {
    pub fn new(g: ComplexMatrix, k: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        for (name, m) in [("G", &g), ("K", &k)] {
            if !m.is_square() {
                return Err(Error::shape(format!("{name} must be square")));
            }
            let s = svd(m, tol)?;
            if s.rank < m.rows() {
                return Err(Error::pre(format!("{name} is singular")));
            }
        }
        Ok(Self { g, k })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        Self { g: ComplexMatrix::identity(rows), k: ComplexMatrix::identity(cols) }
    }

    /// `(‖G − I‖_g, ‖K − I‖_g)`.
    pub fn distance_to_identity(&self, g: GaugeNorm) -> (f64, f64) {
        let dg = gauge_norm(&(&self.g - &ComplexMatrix::identity(self.g.rows())), g);
        let dk = gauge_norm(&(&self.k - &ComplexMatrix::identity(self.k.rows())), g);
        (dg, dk)
    }
}

fn same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!(
            "matrices must share a shape: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn index_from_svds(sb: &SvdResult, sa: &SvdResult, tol: &ToleranceConfig) -> Result<StratumIndex> {
    let nb = Projector::from_basis(&sb.null_basis());
    let na = Projector::from_basis(&sa.null_basis());
    let k = essential_codimension(&nb, &na, tol)?;
    let rb = Projector::from_basis(&sb.range_basis());
    let ra = Projector::from_basis(&sa.range_basis());
    let k_range = essential_codimension(&rb, &ra, tol)?;
    let k_rank = sa.rank as i64 - sb.rank as i64;
    if k != -k_range || k != k_rank {
        return Err(Error::inconsistent(format!(
            "stratum index disagrees: nullspaces {k}, ranges {}, ranks {k_rank}",
            -k_range
        )));
    }
    Ok(k)
}

/// Index of the stratum of `A` containing `B`.
pub fn stratum_index(b: &ComplexMatrix, a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<StratumIndex> {
    same_shape(a, b)?;
    index_from_svds(&svd(b, tol)?, &svd(a, tol)?, tol)
}

pub fn index_range(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<IndexRange> {
    let r = svd(a, tol)?.rank;
    let (n1, n2, n3) = (a.cols() - r, r, a.rows() - r);
    Ok(IndexRange { k_min: -(n1.min(n3) as i64), k_max: n2 as i64, n1, n2, n3 })
}

/// Partial isometry of rank `m` from `N(B)` into `R(B)^⊥`, scaled by `scale`.
///
/// Directions lying in both subspaces are used first (mapped to themselves), so
/// that for normal `B` the result is `scale · P_S` with `S ⊆ N(B)`.
fn rank_bump(s: &SvdResult, m: usize, scale: f64) -> Result<ComplexMatrix> {
    let rows = s.u.rows();
    let cols = s.vt.rows();
    let null = s.null_basis();
    let corange_perp = s.range_complement_basis();
    if m > null.cols().min(corange_perp.cols()) {
        return Err(Error::OutOfRange(format!(
            "cannot raise the rank by {m}: nullity {} and corank {}",
            null.cols(),
            corange_perp.cols()
        )));
    }
    let mut sources: Vec<Vec<_>> = Vec::new();
    let mut targets: Vec<Vec<_>> = Vec::new();
    let mut rest_n = null.clone();
    let mut rest_r = corange_perp.clone();
    if rows == cols {
        let w = intersection_basis(&null, &corange_perp);
        let pw = projector_onto(&w);
        let id = ComplexMatrix::identity(rows);
        for j in 0..w.cols().min(m) {
            sources.push(w.column(j));
            targets.push(w.column(j));
        }
        let tol = ToleranceConfig::default();
        rest_n = orthonormal_basis(&(&(&id - &pw) * &null), &tol);
        rest_r = orthonormal_basis(&(&(&id - &pw) * &corange_perp), &tol);
    }
    let mut j = 0;
    while sources.len() < m {
        sources.push(rest_n.column(j));
        targets.push(rest_r.column(j));
        j += 1;
    }
    let src = ComplexMatrix::from_columns(cols, &sources);
    let tgt = ComplexMatrix::from_columns(rows, &targets);
    Ok((&tgt * &src.adjoint()).scale_re(scale))
}

/// A matrix in `C_k(A)` built from `A` by a partial-isometry bump (`k < 0`) or by
/// cutting `A` down to a subspace of its coimage (`k > 0`).
pub fn stratum_representative(a: &ComplexMatrix, k: StratumIndex, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let range = index_range(a, tol)?;
    if !range.contains(k) {
        return Err(Error::OutOfRange(format!("k = {k} outside [{}, {}]", range.k_min, range.k_max)));
    }
    let s = svd(a, tol)?;
    let b = if k == 0 {
        a.clone()
    } else if k < 0 {
        a + &rank_bump(&s, (-k) as usize, 1.0)?
    } else {
        let keep = s.rank - k as usize;
        let basis = s.corange_basis().column_range(0, keep);
        a * &projector_onto(&basis)
    };
    debug_assert_eq!(stratum_index(&b, a, tol).ok(), Some(k));
    Ok(b)
}

/// `G B K⁻¹`.
pub fn act(gk: &GroupPair, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if gk.g.rows() != b.rows() || gk.k.rows() != b.cols() {
        return Err(Error::shape("group pair does not match the matrix shape"));
    }
    let kinv = inverse(&gk.k).map_err(|_| Error::pre("K is singular"))?;
    if inverse(&gk.g).is_err() {
        return Err(Error::pre("G is singular"));
    }
    Ok(&(&gk.g * b) * &kinv)
}

/// `(G, K)` with `G B₁ K⁻¹ = B₂` for two matrices of equal rank.
pub fn transitivity_witness(b1: &ComplexMatrix, b2: &ComplexMatrix, tol: &ToleranceConfig) -> Result<GroupPair> {
    same_shape(b1, b2)?;
    let s1 = svd(b1, tol)?;
    let s2 = svd(b2, tol)?;
    if s1.rank != s2.rank {
        return Err(Error::hyp(format!("ranks differ ({} vs {}): not in one stratum", s1.rank, s2.rank)));
    }
    let (m, r) = (b1.rows(), s1.rank);
    let mut mid = ComplexMatrix::identity(m);
    for i in 0..r {
        mid[(i, i)] = (s2.singular_values[i] / s1.singular_values[i]).into();
    }
    let g = &(&s2.u * &mid) * &s1.u.adjoint();
    let k = s2.v() * &s1.vt;
    let gk = GroupPair { g, k };
    let res = act(&gk, b1)?.dist(b2);
    let scale = 1.0 + b1.frobenius() + b2.frobenius();
    if res > 1e-8 * scale {
        return Err(Error::inconsistent(format!("transitivity witness residual {res:e}")));
    }
    Ok(gk)
}

/// Local section through `A`: `σ(B) = (BA† + P_{R(B)}^⊥ P_{R(A)}^⊥, P_{N(B)}P_{N(A)} + P_{N(B)}^⊥ P_{N(A)}^⊥)`.
pub fn local_section_sigma(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<GroupPair> {
    same_shape(a, b)?;
    let sa = svd(a, tol)?;
    let sb = svd(b, tol)?;
    let k = index_from_svds(&sb, &sa, tol)?;
    if k != 0 {
        return Err(Error::hyp(format!("B lies in C_{k}(A), not C_0(A)")));
    }
    let pa = pinv_from_svd(&sa);
    let pb = pinv_from_svd(&sb);
    let (m, n) = a.shape();
    let im = ComplexMatrix::identity(m);
    let in_ = ComplexMatrix::identity(n);
    let s1 = b * &pa.pinv + &(&im - &pb.range_proj) * &(&im - &pa.range_proj);
    let s2 = &pb.null_proj * &pa.null_proj + &(&in_ - &pb.null_proj) * &(&in_ - &pa.null_proj);
    for (name, c) in [("first", &s1), ("second", &s2)] {
        if svd(c, tol)?.rank < c.rows() {
            return Err(Error::Geometry(format!("{name} section component is singular: B is outside the section's neighbourhood")));
        }
    }
    let gk = GroupPair { g: s1, k: s2 };
    let res = act(&gk, a)?.dist(b);
    if res > 1e-8 * (1.0 + a.frobenius() + b.frobenius()) {
        return Err(Error::inconsistent(format!("section residual {res:e}")));
    }
    Ok(gk)
}

/// Moves `B` into `C_{k_target}(A)` by adding `(eps/m)` times a rank-`m` partial isometry on `N(B)`.
pub fn approximate_in_stratum(
    b: &ComplexMatrix,
    a: &ComplexMatrix,
    k_target: StratumIndex,
    eps: f64,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    same_shape(a, b)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::input("eps must be positive"));
    }
    let range = index_range(a, tol)?;
    if !range.contains(k_target) {
        return Err(Error::OutOfRange(format!(
            "k = {k_target} outside [{}, {}]",
            range.k_min, range.k_max
        )));
    }
    let sb = svd(b, tol)?;
    let sa = svd(a, tol)?;
    let l = index_from_svds(&sb, &sa, tol)?;
    if k_target > l {
        return Err(Error::Obstruction(format!(
            "target C_{k_target} needs rank {} < rank(B) = {}; small perturbations cannot lower the rank",
            sa.rank as i64 - k_target,
            sb.rank
        )));
    }
    let m = (l - k_target) as usize;
    if m == 0 {
        return Ok(b.clone());
    }
    Ok(b + &rank_bump(&sb, m, eps / m as f64)?)
}

/// Rank-`|k|` matrix `C` with `B + C ∈ C_0(A)`.
///
/// For `k < 0` this is `−B P_S` with `S ⊆ N(A) ∩ N(B)^⊥`; for `k > 0` it is `A P_S`
/// with `S ⊆ N(B) ∩ N(A)^⊥`, `dim S = |k|`.
pub fn correct_to_stratum_zero(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    same_shape(a, b)?;
    let sa = svd(a, tol)?;
    let sb = svd(b, tol)?;
    let k = index_from_svds(&sb, &sa, tol)?;
    if k == 0 {
        return Err(Error::pre("B already lies in C_0(A)"));
    }
    let need = k.unsigned_abs() as usize;
    let (inter, base) = if k < 0 {
        (intersection_basis(&sa.null_basis(), &sb.corange_basis()), b)
    } else {
        (intersection_basis(&sb.null_basis(), &sa.corange_basis()), a)
    };
    if inter.cols() < need {
        return Err(Error::Geometry(format!(
            "intersection has dimension {} < {need}: B is not close enough to A",
            inter.cols()
        )));
    }
    let ps = projector_onto(&inter.column_range(0, need));
    let c = if k < 0 { -(base * &ps) } else { base * &ps };
    let fixed = b + &c;
    let k_new = stratum_index(&fixed, a, tol)?;
    if k_new != 0 {
        return Err(Error::inconsistent(format!("correction landed in C_{k_new}(A)")));
    }
    Ok(c)
}

/// One row of a continuity report.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityTerm {
    pub n: usize,
    pub index: i64,
    pub pinv_norm: f64,
    pub pinv_gap: f64,
    pub nullproj_gap_gauge: f64,
    pub nullproj_gap_op: f64,
    pub intersection_dim: usize,
}

/// Tail verdicts for the six equivalent continuity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContinuityVerdicts {
    /// (i) every tail index vanishes
    pub index_zero: bool,
    /// (ii) `sup ‖B_n†‖ ≤ 10 ‖B†‖` on the tail
    pub pinv_bounded: bool,
    /// (iii) last pseudoinverse gap below the Lipschitz-scaled threshold
    pub pinv_converges: bool,
    /// (iv) nullspace projector gap in the gauge below `1 − residual_abs`
    pub nullproj_gauge: bool,
    /// (v) nullspace projector gap in operator norm below `1 − residual_abs`
    pub nullproj_op: bool,
    /// (vi) `N(B_n)^⊥ ∩ N(B) = {0}`
    pub trivial_intersection: bool,
}

impl ContinuityVerdicts {
    pub fn as_array(&self) -> [bool; 6] {
        [
            self.index_zero,
            self.pinv_bounded,
            self.pinv_converges,
            self.nullproj_gauge,
            self.nullproj_op,
            self.trivial_intersection,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub terms: Vec<ContinuityTerm>,
    pub n0: usize,
    pub verdicts: ContinuityVerdicts,
    pub consistent: bool,
    /// `‖B†‖`
    pub reference_pinv_norm: f64,
    /// Threshold used for condition (iii).
    pub gap_threshold: f64,
    /// Fraction of tail steps on which the pseudoinverse gap did not increase.
    pub decreasing_fraction: f64,
}

/// Evaluates the six continuity conditions for `B_n → B` on the tail `seq[n0..]`.
///
/// Condition (iii) compares the last gap `‖B_N† − B†‖_g` with
/// `L(B)·‖B_N − B‖_g + residual_abs·(1 + ‖B†‖_g)`, `L` the local Lipschitz constant.
pub fn continuity_report(
    b: &ComplexMatrix,
    seq: &[ComplexMatrix],
    n0: usize,
    g: GaugeNorm,
    tol: &ToleranceConfig,
) -> Result<ContinuityReport> {
    if seq.is_empty() || n0 >= seq.len() {
        return Err(Error::input("continuity report needs a nonempty tail"));
    }
    let sb = svd(b, tol)?;
    let pb: PinvResult = pinv_from_svd(&sb);
    let null_b = sb.null_basis();
    let mut terms = Vec::with_capacity(seq.len());
    for (i, bn) in seq.iter().enumerate() {
        same_shape(b, bn)?;
        let sn = svd(bn, tol)?;
        let pn = pinv_from_svd(&sn);
        let index = index_from_svds(&sn, &sb, tol)?;
        let dnull = &pn.null_proj - &pb.null_proj;
        terms.push(ContinuityTerm {
            n: i + 1,
            index,
            pinv_norm: pn.pinv_norm(),
            pinv_gap: gauge_norm(&(&pn.pinv - &pb.pinv), g),
            nullproj_gap_gauge: gauge_norm(&dnull, g),
            nullproj_gap_op: op_norm(&dnull),
            intersection_dim: crate::matcore::intersection_dim(&sn.corange_basis(), &null_b),
        });
    }
    let tail = &terms[n0..];
    let ref_norm = pb.pinv_norm();
    let lip = if sb.rank == 0 { 0.0 } else { lipschitz_constant(b, tol)? };
    let last = seq.last().unwrap();
    let threshold = lip * gauge_norm(&(last - b), g) + tol.residual_abs * (1.0 + gauge_norm(&pb.pinv, g));
    let steps = tail.windows(2).count();
    let decreasing = tail.windows(2).filter(|w| w[1].pinv_gap <= w[0].pinv_gap).count();
    let verdicts = ContinuityVerdicts {
        index_zero: tail.iter().all(|t| t.index == 0),
        pinv_bounded: tail.iter().all(|t| t.pinv_norm <= 10.0 * ref_norm + tol.residual_abs),
        pinv_converges: tail.last().unwrap().pinv_gap <= threshold,
        // a nullity change forces a gap of exactly 1, which roundoff can put just below 1
        nullproj_gauge: tail.iter().all(|t| t.nullproj_gap_gauge < 1.0 - tol.residual_abs),
        nullproj_op: tail.iter().all(|t| t.nullproj_gap_op < 1.0 - tol.residual_abs),
        trivial_intersection: tail.iter().all(|t| t.intersection_dim == 0),
    };
    let arr = verdicts.as_array();
    Ok(ContinuityReport {
        consistent: arr.iter().all(|&v| v == arr[0]),
        terms,
        n0,
        verdicts,
        reference_pinv_norm: ref_norm,
        gap_threshold: threshold,
        decreasing_fraction: if steps == 0 { 1.0 } else { decreasing as f64 / steps as f64 },
    })
}

/// `μ(B) = B†`, checking that `μ` carries `C_k(A)` onto `C_k(A†)`.
pub fn mp_map(b: &ComplexMatrix, a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    same_shape(a, b)?;
    let sb = svd(b, tol)?;
    let sa = svd(a, tol)?;
    let bp = pinv_from_svd(&sb).pinv;
    let ap = pinv_from_svd(&sa).pinv;
    let k = index_from_svds(&sb, &sa, tol)?;
    let k_dual = stratum_index(&bp, &ap, tol)?;
    if k != k_dual {
        return Err(Error::inconsistent(format!("index {k} of B but {k_dual} of B†")));
    }
    Ok(bp)
}

/// `T_Bμ(V) = −B†VB† + (B*B)†V*(I−BB†) + (I−B†B)V*(BB*)†`.
///
/// With `check` set, `V` must pass [`tangent_membership`].
pub fn mp_tangent(b: &ComplexMatrix, v: &ComplexMatrix, check: bool, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    same_shape(b, v)?;
    let sb = svd(b, tol)?;
    let p = pinv_from_svd(&sb);
    if check {
        let corner = corner_block(&p, v);
        if corner > tangent_tol(tol) * v.frobenius() {
            return Err(Error::pre(format!("V is not tangent to the stratum (corner block {corner:e})")));
        }
    }
    let bp = &p.pinv;
    let (m, n) = b.shape();
    let vs = v.adjoint();
    let btb_p = bp * &bp.adjoint();
    let bbt_p = &bp.adjoint() * bp;
    let t1 = -(&(bp * v) * bp);
    let t2 = &(&btb_p * &vs) * &(ComplexMatrix::identity(m) - b * bp);
    let t3 = &(&(ComplexMatrix::identity(n) - bp * b) * &vs) * &bbt_p;
    Ok(t1 + t2 + t3)
}

/// Central difference of `t ↦ (e^{tX} B e^{−tY})†` at `t = 0`.
pub fn mp_tangent_fd(
    b: &ComplexMatrix,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    h: f64,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let curve = |t: f64| -> Result<ComplexMatrix> {
        let c = &(&expm(&x.scale_re(t)) * b) * &expm(&y.scale_re(-t));
        Ok(crate::pinv::moore_penrose(&c, tol)?.pinv)
    };
    Ok((curve(h)? - curve(-h)?).scale_re(0.5 / h))
}

fn corner_block(p: &PinvResult, z: &ComplexMatrix) -> f64 {
    let m = z.rows();
    (&(&(ComplexMatrix::identity(m) - &p.range_proj) * z) * &p.null_proj).frobenius()
}

fn tangent_tol(tol: &ToleranceConfig) -> f64 {
    tol.residual_abs.max(1e3 * f64::EPSILON)
}

/// Result of a tangent-space test.
#[derive(Debug, Clone)]
pub struct TangentMembership {
    pub member: bool,
    /// `‖(I − P_{R(B)}) Z P_{N(B)}‖_F`
    pub corner_norm: f64,
    /// `(X, Y)` with `Z = XB − BY` when `member`.
    pub witness: Option<(ComplexMatrix, ComplexMatrix)>,
    /// Index of `B` relative to the reference matrix.
    pub index: StratumIndex,
}

/// Tests whether `Z` is tangent at `B` to the stratum through `B`, i.e. `Z = XB − BY`.
///
/// The witness is `X = (I − P_{R(B)}) Z B†`, `Y = −B† Z`.
pub fn tangent_membership(
    b: &ComplexMatrix,
    a: &ComplexMatrix,
    z: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<TangentMembership> {
    same_shape(a, b)?;
    same_shape(b, z)?;
    let sb = svd(b, tol)?;
    let sa = svd(a, tol)?;
    let index = index_from_svds(&sb, &sa, tol)?;
    let p = pinv_from_svd(&sb);
    let corner = corner_block(&p, z);
    let member = corner <= tangent_tol(tol) * z.frobenius();
    let witness = member.then(|| {
        let m = b.rows();
        let x = &(&(ComplexMatrix::identity(m) - &p.range_proj) * z) * &p.pinv;
        let y = -(&p.pinv * z);
        (x, y)
    });
    Ok(TangentMembership { member, corner_norm: corner, witness, index })
}
