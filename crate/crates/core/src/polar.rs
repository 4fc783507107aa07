//! Polar decomposition, congruence and partial-isometry orbits, and the local
//! trivializations of the modulus and polar-factor maps.

use crate::codim::{direct_rotation, Projector};
use crate::error::{Error, Result};
use crate::matcore::{
    eigh, inverse, projector_onto, psd_pinv_sqrt, psd_sqrt, singular_values, svd, unitary_defect, ComplexMatrix,
    ToleranceConfig,
};
use crate::pinv::pinv;
use crate::strata::{stratum_index, StratumIndex};

/// `A = V|A|` with `V` a partial isometry and `N(V) = N(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarParts {
    pub polar_factor: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

/// Matrix `X` with `X*X` an orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometry {
    matrix: ComplexMatrix,
}

impl PartialIsometry {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let p = matrix.adj_mul(&matrix);
        let defect = (&p * &p).dist(&p);
        if defect > 1e-9 {
            return Err(Error::input(format!("not a partial isometry: ‖(X*X)² − X*X‖_F = {defect:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `X*X`, the projector onto `N(X)^⊥`.
    pub fn initial_projector(&self) -> ComplexMatrix {
        self.matrix.adj_mul(&self.matrix)
    }

    /// `XX*`, the projector onto `R(X)`.
    pub fn final_projector(&self) -> ComplexMatrix {
        &self.matrix * &self.matrix.adjoint()
    }

    pub fn rank(&self) -> usize {
        self.initial_projector().trace().re.round() as usize
    }
}

fn scale_of(a: &ComplexMatrix) -> f64 {
    1.0 + a.frobenius()
}

fn range_projector(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    Ok(projector_onto(&svd(a, tol)?.range_basis()))
}

pub fn polar_decompose(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PolarParts> {
    let s = svd(a, tol)?;
    let r = s.rank;
    let ur = s.u.column_range(0, r);
    let vr = s.v().column_range(0, r);
    let sig = ComplexMatrix::real_diag(&s.singular_values[..r]);
    Ok(PolarParts {
        polar_factor: &ur * &vr.adjoint(),
        modulus: (&(&vr * &sig) * &vr.adjoint()).hermitian_part(),
    })
}

/// Unitary `U` with `U P U* = Q` for projectors of equal rank. Uses the direct rotation
/// when the gap allows it and otherwise maps orthonormal bases of the ranges and
/// nullspaces onto each other.
fn unitary_between(p: &ComplexMatrix, q: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let (pp, qq) = (Projector::new_unchecked(p.clone()), Projector::new_unchecked(q.clone()));
    if pp.rank() != qq.rank() {
        return Err(Error::hyp(format!("projector ranks differ ({} vs {})", pp.rank(), qq.rank())));
    }
    match direct_rotation(&pp, &qq, tol) {
        Ok(u) => Ok(u),
        Err(Error::GapTooLarge { .. }) | Err(Error::Inconsistent(_)) => {
            let (rp, np) = pp.bases()?;
            let (rq, nq) = qq.bases()?;
            Ok(&rq.hstack(&nq) * &rp.hstack(&np).adjoint())
        }
        Err(e) => Err(e),
    }
}

/// Invertible `G` with `G C G* = D` for PSD matrices of equal rank.
pub fn congruence_witness(c: &ComplexMatrix, d: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    if c.shape() != d.shape() || !c.is_square() {
        return Err(Error::shape("C and D must be square of the same size"));
    }
    let (rc, rd) = (svd(c, tol)?.rank, svd(d, tol)?.rank);
    if rc != rd {
        return Err(Error::hyp(format!("nullspace index is {} (ranks {rc} and {rd})", rc as i64 - rd as i64)));
    }
    let n = c.rows();
    let id = ComplexMatrix::identity(n);
    let pc = range_projector(c, tol)?;
    let pd = range_projector(d, tol)?;
    let null_c = &id - &pc;
    let u = unitary_between(&(&id - &pd), &null_c, tol)?;
    let x = &(&u * &psd_sqrt(d)?) * &u.adjoint();
    let g0 = &(&x * &psd_pinv_sqrt(c, tol)?) + &null_c;
    let g = &u.adjoint() * &g0;
    let res = (&(&g * c) * &g.adjoint()).dist(d);
    if res > 1e-8 * scale_of(d) {
        return Err(Error::inconsistent(format!("congruence witness residual {res:e}")));
    }
    Ok(g)
}

/// Section of `G ↦ G C G*` near `C`: an invertible `σ` with `σ C σ* = B`.
///
/// With `P = P_R(C)`, `Q = P_R(B)` and `S = QP + (I−Q)(I−P)`, the unitary part
/// `U = S(S*S)^{-1/2}` satisfies `UPU* = Q`, and
/// `σ = B^{1/2} U (C†)^{1/2} + (I−Q) U (I−P)`.
pub fn positive_section(c: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    if c.shape() != b.shape() || !c.is_square() {
        return Err(Error::shape("C and B must be square of the same size"));
    }
    let (rc, rb) = (svd(c, tol)?.rank, svd(b, tol)?.rank);
    if rc != rb {
        return Err(Error::hyp(format!("ranks differ ({rc} vs {rb})")));
    }
    let n = c.rows();
    let id = ComplexMatrix::identity(n);
    let p = range_projector(c, tol)?;
    let q = range_projector(b, tol)?;
    let (ip, iq) = (&id - &p, &id - &q);
    let s = &(&q * &p) + &(&iq * &ip);
    let smin = singular_values(&s)?.last().copied().unwrap_or(0.0);
    if smin < 1e-8 {
        return Err(Error::Geometry(format!("B is outside the section neighbourhood (σ_min(S) = {smin:e})")));
    }
    let u = &s * &eigh(&s.adj_mul(&s))?.apply(|l| 1.0 / l.sqrt());
    let sigma = &(&(&psd_sqrt(b)? * &u) * &psd_pinv_sqrt(c, tol)?) + &(&(&iq * &u) * &ip);
    let res = (&(&sigma * c) * &sigma.adjoint()).dist(b);
    if res > 1e-8 * scale_of(b) {
        return Err(Error::inconsistent(format!("positive section residual {res:e}")));
    }
    Ok(sigma)
}

/// Unitary `U_T` with `U_T P_𝒮 U_T* = P_{T(𝒮)}` for invertible `T`.
///
/// `T₀ = Q + (I−P)(I−Q)` with `Q = T P_𝒮 T⁻¹` and `P = P_{T(𝒮)}`, `T₁ = T₀T`,
/// `U_T = T₁|T₁|⁻¹`.
pub fn aligning_unitary(t: &ComplexMatrix, s_basis: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    if !t.is_square() || s_basis.rows() != t.rows() {
        return Err(Error::shape("T must be square and S_basis must have as many rows as T"));
    }
    let t_inv = inverse(t).map_err(|_| Error::pre("T is singular"))?;
    let n = t.rows();
    let id = ComplexMatrix::identity(n);
    let ps = projector_onto(s_basis);
    let q = &(t * &ps) * &t_inv;
    let p = if s_basis.cols() == 0 {
        ComplexMatrix::zeros(n, n)
    } else {
        range_projector(&(t * s_basis), tol)?
    };
    let t0 = &q + &(&(&id - &p) * &(&id - &q));
    let t1 = &t0 * t;
    let u = &t1 * &eigh(&t1.adj_mul(&t1))?.apply(|l| 1.0 / l.sqrt());
    let defect = unitary_defect(&u);
    if defect > 1e-10 * n as f64 {
        return Err(Error::inconsistent(format!("aligning unitary defect {defect:e}")));
    }
    Ok(u)
}

/// Unitaries `(U, W)` with `U V₀ W* = V` for partial isometries of equal rank.
pub fn isometry_orbit_witness(
    v0: &PartialIsometry,
    v: &PartialIsometry,
    tol: &ToleranceConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (a0, a) = (v0.matrix(), v.matrix());
    if a0.shape() != a.shape() {
        return Err(Error::shape("partial isometries have different shapes"));
    }
    if v0.rank() != v.rank() {
        return Err(Error::hyp(format!("ranks differ ({} vs {})", v0.rank(), v.rank())));
    }
    let w = unitary_between(&v0.initial_projector(), &v.initial_projector(), tol)?;
    let f0 = v0.final_projector();
    let z = unitary_between(&f0, &v.final_projector(), tol)?;
    let id = ComplexMatrix::identity(a.rows());
    let u = &(&(a * &w) * &a0.adjoint()) + &(&z * &(&id - &f0));
    let res = (&(&u * a0) * &w.adjoint()).dist(a);
    if res > 1e-8 * scale_of(a) {
        return Err(Error::inconsistent(format!("isometry orbit residual {res:e}")));
    }
    Ok((u, w))
}

/// `B ↦ |B|`, checking that the stratum index is preserved.
pub fn modulus_map(b: &ComplexMatrix, a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let mb = polar_decompose(b, tol)?.modulus;
    let ma = polar_decompose(a, tol)?.modulus;
    check_index(stratum_index(&mb, &ma, tol)?, stratum_index(b, a, tol)?, "|B| vs |A|")?;
    Ok(mb)
}

/// `B ↦ V_B`, checking the index and `V_A − V_B = A(|A|† − |B|†) + (A − B)|B|†`.
pub fn polar_factor_map(b: &ComplexMatrix, a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PartialIsometry> {
    let pb = polar_decompose(b, tol)?;
    let pa = polar_decompose(a, tol)?;
    check_index(stratum_index(&pb.polar_factor, &pa.polar_factor, tol)?, stratum_index(b, a, tol)?, "V_B vs V_A")?;
    let (mpa, mpb) = (pinv(&pa.modulus, tol)?, pinv(&pb.modulus, tol)?);
    let rhs = &(a * &(&mpa - &mpb)) + &(&(a - b) * &mpb);
    let res = (&pa.polar_factor - &pb.polar_factor).dist(&rhs);
    let scale = 1.0 + (a.frobenius() + b.frobenius()) * (mpa.frobenius() + mpb.frobenius());
    if res > 1e-8 * scale {
        return Err(Error::inconsistent(format!("polar factor identity residual {res:e}")));
    }
    PartialIsometry::new(pb.polar_factor)
}

fn check_index(got: StratumIndex, want: StratumIndex, what: &str) -> Result<()> {
    if got != want {
        return Err(Error::inconsistent(format!("index of {what} is {got}, expected {want}")));
    }
    Ok(())
}

/// Whether `|X| = C₀` and `X` lies in the stratum of `A` matching that of `C₀` in the
/// congruence orbit decomposition of `|A|`.
pub fn fiber_membership_alpha(
    x: &ComplexMatrix,
    c0: &ComplexMatrix,
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let mx = polar_decompose(x, tol)?.modulus;
    if mx.shape() != c0.shape() {
        return Err(Error::shape("C0 must be square with the column count of X"));
    }
    if mx.dist(c0) > 1e-8 * scale_of(c0) {
        return Ok(false);
    }
    let k = stratum_index(c0, &polar_decompose(a, tol)?.modulus, tol)?;
    Ok(stratum_index(x, a, tol)? == k)
}

fn chart_err(e: Error) -> Error {
    match e {
        Error::Geometry(m) | Error::Hypothesis(m) => Error::Geometry(format!("outside the chart: {m}")),
        other => other,
    }
}

/// Chart of the modulus map at `C₀`: `B ↦ (|B|, V_B U_{γ(|B|)} C₀)` with `γ` the positive
/// section at `C₀` and `U_γ` its aligning unitary for `R(C₀)`.
pub fn trivialize_alpha(
    b: &ComplexMatrix,
    c0: &ComplexMatrix,
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let modulus = modulus_map(b, a, tol)?;
    let vb = polar_decompose(b, tol)?.polar_factor;
    let u = alpha_unitary(&modulus, c0, tol)?;
    let fiber = &(&vb * &u) * c0;
    if !fiber_membership_alpha(&fiber, c0, a, tol)? {
        return Err(Error::inconsistent("fiber element is not in the fiber over C0"));
    }
    Ok((modulus, fiber))
}

/// Inverse chart: `(C, V C₀) ↦ V U_{γ(C)}* C`.
pub fn untrivialize_alpha(
    c: &ComplexMatrix,
    fiber: &ComplexMatrix,
    c0: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let v = fiber * &pinv(c0, tol)?;
    let u = alpha_unitary(c, c0, tol)?;
    Ok(&(&v * &u.adjoint()) * c)
}

fn alpha_unitary(c: &ComplexMatrix, c0: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let gamma = positive_section(c0, c, tol).map_err(chart_err)?;
    aligning_unitary(&gamma, &svd(c0, tol)?.range_basis(), tol)
}

/// Chart of the polar-factor map at `V₀`: `B ↦ (V_B, V₀ W*|B|W)` with `W` the right
/// unitary of the orbit witness `U V₀ W* = V_B`.
pub fn trivialize_v(
    b: &ComplexMatrix,
    v0: &PartialIsometry,
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(PartialIsometry, ComplexMatrix)> {
    let factor = polar_factor_map(b, a, tol)?;
    let (_, w) = isometry_orbit_witness(v0, &factor, tol).map_err(chart_err)?;
    let modulus = polar_decompose(b, tol)?.modulus;
    let fiber = v0.matrix() * &(&(&w.adjoint() * &modulus) * &w);
    // v⁻¹(V₀) membership: the modulus of the fiber element lives on N(V₀)^⊥
    let c = polar_decompose(&fiber, tol)?.modulus;
    let e = v0.initial_projector();
    if (&(&e * &c) * &e).dist(&c) > 1e-8 * scale_of(&c) || fiber.dist(&(v0.matrix() * &c)) > 1e-8 * scale_of(&c) {
        return Err(Error::inconsistent("fiber element is not in the fiber over V0"));
    }
    Ok((factor, fiber))
}

/// Inverse chart: `(V, V₀C) ↦ V W C W*` with `W` recomputed from `V`.
pub fn untrivialize_v(
    v: &PartialIsometry,
    fiber: &ComplexMatrix,
    v0: &PartialIsometry,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let (_, w) = isometry_orbit_witness(v0, v, tol).map_err(chart_err)?;
    let c = v0.matrix().adj_mul(fiber);
    Ok(v.matrix() * &(&(&w * &c) * &w.adjoint()))
}
