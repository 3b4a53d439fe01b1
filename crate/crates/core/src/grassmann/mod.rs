//! Subspaces of C^d and their orthogonal projections.
//!
//! A rank-n projection is identified with its n-dimensional range. The
//! orthonormal basis is the canonical representation; projection matrices
//! are derived from it on demand.

mod angles;
mod oracle;
mod relations;

pub use angles::{
    angle_between_lines, gap_distance, gap_distance_subspaces, min_angle, min_angle_subspaces,
    principal_angles, principal_angles_general, trace_product, trace_product_subspaces,
    PrincipalAngles,
};
pub use oracle::principal_angles_oracle;
pub use relations::{
    direct_sum, intersection, intersection_with_flag, is_adjacent, is_one_orthogonal,
    is_orthogonal, is_trivial_intersection, Intersection,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{
    dot, nullspace, orthonormalize, svd, unit, CMatrix, Tolerance, C64,
};

/// An n-dimensional subspace of C^d held as a d x n matrix with orthonormal columns.
#[derive(Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in C^{}) {:?}", self.dim(), self.ambient_dim(), self.basis)
    }
}

impl Subspace {
    /// Wraps a basis that must already be orthonormal within `eps_entry`.
    pub fn new(basis: CMatrix, tol: &Tolerance) -> Result<Self> {
        let (d, n) = basis.shape();
        if n == 0 || n > d {
            return Err(Error::DimensionMismatch(format!(
                "subspace dimension {n} must lie in 1..={d}"
            )));
        }
        let r = basis.orthonormality_residual();
        if r > tol.eps_entry {
            return Err(Error::InvalidMatrix(format!(
                "basis columns are not orthonormal (residual {r:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    /// Column span of an arbitrary full-column-rank matrix.
    pub fn span(m: &CMatrix, tol: &Tolerance) -> Result<Self> {
        if m.cols() == 0 || m.cols() > m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot span a {}-dimensional subspace of C^{}",
                m.cols(),
                m.rows()
            )));
        }
        Ok(Subspace {
            basis: orthonormalize(m, tol)?,
        })
    }

    pub fn span_of(vectors: &[Vec<C64>], tol: &Tolerance) -> Result<Self> {
        let d = vectors.first().map_or(0, Vec::len);
        Self::span(&CMatrix::from_columns(d, vectors)?, tol)
    }

    /// Span of the listed standard basis vectors of C^d.
    pub fn coordinate(d: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= d) {
            return Err(Error::DimensionMismatch(format!("index out of range for C^{d}")));
        }
        let cols: Vec<Vec<C64>> = indices.iter().map(|&i| CMatrix::basis_vector(d, i)).collect();
        Self::new(CMatrix::from_columns(d, &cols)?, &Tolerance::default())
    }

    /// The line through a nonzero vector.
    pub fn line(v: &[C64]) -> Result<Self> {
        let u = unit(v).ok_or_else(|| Error::InvalidMatrix("zero vector spans no line".into()))?;
        Ok(Subspace {
            basis: CMatrix::column_vector(&u),
        })
    }

    pub fn full(d: usize) -> Self {
        Subspace {
            basis: CMatrix::identity(d),
        }
    }

    pub(crate) fn from_orthonormal(basis: CMatrix) -> Self {
        debug_assert!(basis.orthonormality_residual() < 1e-8);
        Subspace { basis }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Orthogonal projection `B B^H` onto this subspace.
    pub fn projection_matrix(&self) -> CMatrix {
        &self.basis * &self.basis.adjoint()
    }

    pub fn to_projection(&self) -> Projection {
        subspace_to_projection(self)
    }

    /// `x - P x` for the projection P onto this subspace.
    pub fn residual(&self, x: &[C64]) -> Vec<C64> {
        let coeffs = self.basis.adjoint().mul_vec(x).expect("ambient dims agree");
        let px = self.basis.mul_vec(&coeffs).expect("shape");
        x.iter().zip(&px).map(|(a, b)| a - b).collect()
    }

    /// Whether `x` lies in this subspace up to `eps_entry` (relative to `||x||`).
    pub fn contains(&self, x: &[C64], tol: &Tolerance) -> bool {
        let nx = crate::numerics::norm(x);
        crate::numerics::norm(&self.residual(x)) <= 10.0 * tol.eps_entry * nx.max(1.0)
    }

    /// Orthogonal complement of the line `[v]` inside this subspace (`v` must lie in it).
    pub fn complement_of_vector(&self, v: &[C64], tol: &Tolerance) -> Result<Option<Subspace>> {
        let coeffs = self.basis.adjoint().mul_vec(v)?;
        let row = CMatrix::from_row_major(1, coeffs.len(), coeffs.iter().map(|z| z.conj()).collect())?;
        let null = nullspace(&row, tol)?;
        if null.cols() == 0 {
            return Ok(None);
        }
        Ok(Some(Subspace::from_orthonormal(&self.basis * &null)))
    }

    /// Orthogonal complement in the ambient space; `None` when this is the full space.
    pub fn orthogonal_complement(&self, tol: &Tolerance) -> Result<Option<Subspace>> {
        let null = nullspace(&self.basis.adjoint(), tol)?;
        if null.cols() == 0 {
            return Ok(None);
        }
        Ok(Some(Subspace::from_orthonormal(null)))
    }

    /// Image under left multiplication by a matrix with orthonormal columns.
    pub fn transform(&self, isometry: &CMatrix) -> Result<Subspace> {
        let b = isometry.matmul(&self.basis)?;
        Ok(Subspace::from_orthonormal(b))
    }

    /// Unit vector spanning a line subspace, with the first significant entry real positive.
    pub fn representative(&self) -> Vec<C64> {
        crate::numerics::normalize_phase(&self.basis.col(0), 1e-6)
    }

    /// Inner product of the first basis vectors; used on lines.
    pub fn line_overlap(&self, other: &Subspace) -> f64 {
        dot(&self.basis.col(0), &other.basis.col(0)).norm()
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            ambient_dim: self.ambient_dim(),
            basis: self.basis.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SubspaceJson::deserialize(d)?;
        if j.basis.rows() != j.ambient_dim {
            return Err(D::Error::custom(format!(
                "basis has {} rows but ambient_dim is {}",
                j.basis.rows(),
                j.ambient_dim
            )));
        }
        Subspace::new(j.basis, &Tolerance::default()).map_err(D::Error::custom)
    }
}

/// An orthogonal projection of known rank, together with an orthonormal basis of its range.
#[derive(Debug, Clone)]
pub struct Projection {
    matrix: CMatrix,
    rank: usize,
    range: Option<Subspace>,
}

impl Projection {
    /// Validates a Hermitian idempotent matrix and extracts its range.
    pub fn new(matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotAProjection(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermitian_residual();
        if herm > tol.eps_entry {
            return Err(Error::NotAProjection(format!("Hermitian residual {herm:e}")));
        }
        let idem = (&(&matrix * &matrix) - &matrix).max_abs();
        if idem > tol.eps_entry {
            return Err(Error::NotAProjection(format!("idempotency residual {idem:e}")));
        }
        let tr = matrix.trace();
        let rank = tr.re.round().max(0.0) as usize;
        if tr.im.abs() > tol.eps_entry || (tr.re - rank as f64).abs() > tol.eps_entry {
            return Err(Error::NotAProjection(format!("trace {tr} is not an integer")));
        }
        let range = range_of(&matrix, rank, tol)?;
        Ok(Projection {
            matrix,
            rank,
            range,
        })
    }

    pub fn zero(d: usize) -> Self {
        Projection {
            matrix: CMatrix::zeros(d, d),
            rank: 0,
            range: None,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn range(&self) -> Option<&Subspace> {
        self.range.as_ref()
    }

    pub(crate) fn nonzero_range(&self) -> Result<&Subspace> {
        self.range.as_ref().ok_or(Error::ZeroProjection)
    }
}

fn range_of(matrix: &CMatrix, rank: usize, tol: &Tolerance) -> Result<Option<Subspace>> {
    let f = svd(matrix)?;
    for &s in &f.s {
        if s > tol.eps_rank && s < 1.0 - tol.eps_rank {
            return Err(Error::IllConditionedProjection { value: s });
        }
    }
    let count = f.s.iter().filter(|&&s| s >= 1.0 - tol.eps_rank).count();
    if count != rank {
        return Err(Error::NotAProjection(format!(
            "trace says rank {rank} but {count} singular values are 1"
        )));
    }
    if rank == 0 {
        return Ok(None);
    }
    Ok(Some(Subspace::from_orthonormal(f.u.leading_columns(rank))))
}

pub fn subspace_to_projection(s: &Subspace) -> Projection {
    Projection {
        matrix: s.projection_matrix(),
        rank: s.dim(),
        range: Some(s.clone()),
    }
}

/// Range of a nonzero projection.
pub fn projection_to_subspace(p: &Projection) -> Result<Subspace> {
    p.nonzero_range().cloned()
}
