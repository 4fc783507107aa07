//! Orthogonal projections, essential codimension and the direct rotation.

use crate::error::{Error, Result};
use crate::matcore::{eigh, intersection_dim, op_norm, projector_onto, unitary_defect, ComplexMatrix, ToleranceConfig};

/// Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape("projector must be square"));
        }
        let idem = (&matrix * &matrix).dist(&matrix);
        let herm = matrix.dist(&matrix.adjoint());
        if idem > 1e-9 || herm > 1e-9 {
            return Err(Error::input(format!(
                "not an orthogonal projector: ‖P²−P‖_F = {idem:e}, ‖P−P*‖_F = {herm:e}"
            )));
        }
        let e = eigh(&matrix)?;
        if let Some(l) = e.eigenvalues.iter().find(|&&l| l.abs() > 1e-8 && (l - 1.0).abs() > 1e-8) {
            return Err(Error::input(format!("projector eigenvalue {l} is not 0 or 1")));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are projectors by construction (`U Uᴴ` of orthonormal columns).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Projector onto the span of orthonormal columns.
    pub fn from_basis(basis: &ComplexMatrix) -> Self {
        Self { matrix: projector_onto(basis) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round().max(0.0) as usize
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        Self { matrix: ComplexMatrix::identity(self.dim()) - &self.matrix }
    }

    /// Orthonormal bases of `R(P)` and `N(P)`.
    pub fn bases(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let e = eigh(&self.matrix)?;
        let n = self.dim();
        let k = e.eigenvalues.iter().filter(|&&l| l < 0.5).count();
        Ok((e.q.column_range(k, n), e.q.column_range(0, k)))
    }

    pub fn range_basis(&self) -> Result<ComplexMatrix> {
        Ok(self.bases()?.0)
    }

    pub fn null_basis(&self) -> Result<ComplexMatrix> {
        Ok(self.bases()?.1)
    }
}

/// `‖P − Q‖`.
pub fn gap(p: &Projector, q: &Projector) -> f64 {
    op_norm(&(p.matrix() - q.matrix()))
}

/// Intersection dimensions `(dim N(Q)∩R(P), dim R(Q)∩N(P))`.
pub fn codimension_parts(p: &Projector, q: &Projector) -> Result<(usize, usize)> {
    if p.dim() != q.dim() {
        return Err(Error::shape("projectors act on different spaces"));
    }
    let (rp, np) = p.bases()?;
    let (rq, nq) = q.bases()?;
    Ok((intersection_dim(&nq, &rp), intersection_dim(&rq, &np)))
}

/// `[P:Q] = dim(N(Q)∩R(P)) − dim(R(Q)∩N(P))`, cross-checked against `rank P − rank Q`.
pub fn essential_codimension(p: &Projector, q: &Projector, _tol: &ToleranceConfig) -> Result<i64> {
    let (a, b) = codimension_parts(p, q)?;
    let k = a as i64 - b as i64;
    let by_rank = p.rank() as i64 - q.rank() as i64;
    if k != by_rank {
        return Err(Error::inconsistent(format!(
            "essential codimension {k} from intersections disagrees with rank difference {by_rank}"
        )));
    }
    Ok(k)
}

/// Unitary `U` with `U P U* = Q`, close to `I` when `P` is close to `Q`.
///
/// `U = (I − (P−Q)²)^{-1/2} (QP + (I−Q)(I−P))`.
pub fn direct_rotation(p: &Projector, q: &Projector, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    if p.dim() != q.dim() {
        return Err(Error::shape("projectors act on different spaces"));
    }
    let g = gap(p, q);
    if g >= 1.0 - tol.residual_abs {
        return Err(Error::GapTooLarge { gap: g });
    }
    let n = p.dim();
    let id = ComplexMatrix::identity(n);
    let pm = p.matrix();
    let qm = q.matrix();
    let d = pm - qm;
    let m = &id - &(&d * &d);
    let clamp = tol.residual_abs;
    let m_inv_sqrt = eigh(&m.hermitian_part())?.apply(|l| 1.0 / l.max(clamp).sqrt());
    let s = qm * pm + &(&id - qm) * &(&id - pm);
    let u = &m_inv_sqrt * &s;
    let defect = unitary_defect(&u);
    let conj = (&(&u * pm) * &u.adjoint()).dist(qm);
    if defect > 1e-10 * n as f64 || conj > 1e-9 * n as f64 {
        return Err(Error::inconsistent(format!(
            "direct rotation lost accuracy (unitary defect {defect:e}, conjugation residual {conj:e})"
        )));
    }
    Ok(u)
}
