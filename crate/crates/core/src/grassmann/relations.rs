use std::f64::consts::FRAC_PI_2;

use super::angles::{min_angle_subspaces, principal_angles_general};
use super::{Projection, Subspace};
use crate::error::{Error, Result};
use crate::numerics::{operator_norm, Tolerance};

/// Result of an intersection together with a conditioning flag.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub subspace: Option<Subspace>,
    /// Set when some principal angle lies within a factor 10 of `eps_angle`,
    /// i.e. the dimension decision could flip under a small perturbation.
    pub ambiguous: bool,
}

impl Intersection {
    pub fn dim(&self) -> usize {
        self.subspace.as_ref().map_or(0, Subspace::dim)
    }
}

/// `S ∩ T`, spanned by the principal vectors whose angle is below `eps_angle`.
pub fn intersection(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<Option<Subspace>> {
    Ok(intersection_with_flag(s, t, tol)?.subspace)
}

pub fn intersection_with_flag(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<Intersection> {
    let pa = principal_angles_general(s, t)?;
    let k = pa.angles.iter().filter(|&&a| a < tol.eps_angle).count();
    let ambiguous = pa
        .angles
        .iter()
        .any(|&a| a >= tol.eps_angle / 10.0 && a <= tol.eps_angle * 10.0);
    let subspace = (k > 0).then(|| Subspace::from_orthonormal(pa.left_frame.leading_columns(k)));
    Ok(Intersection {
        subspace,
        ambiguous,
    })
}

/// `S ⊥ T`, decided twice: from the minimal angle and from `||PQ||`.
/// The two decisions must agree.
pub fn is_orthogonal(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<bool> {
    let ma = min_angle_subspaces(s, t)?;
    let by_angle = (ma - FRAC_PI_2).abs() < tol.eps_angle;
    let pq = s.projection_matrix().matmul(&t.projection_matrix())?;
    let norm_pq = operator_norm(&pq)?;
    let by_product = norm_pq <= tol.eps_entry;
    if by_angle != by_product {
        return Err(Error::ToleranceConflict(format!(
            "ma = {ma} says orthogonal={by_angle} but ||PQ|| = {norm_pq:e} says {by_product}"
        )));
    }
    Ok(by_angle)
}

/// `S ∩ T = {0}`, i.e. `ma(S, T) > eps_angle`.
pub fn is_trivial_intersection(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<bool> {
    Ok(min_angle_subspaces(s, t)? > tol.eps_angle)
}

/// `dim(S ∩ T) = n - 1` for two n-dimensional subspaces.
pub fn is_adjacent(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<bool> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "adjacency needs equal dimensions, got {} and {}",
            s.dim(),
            t.dim()
        )));
    }
    Ok(intersection_with_flag(s, t, tol)?.dim() + 1 == s.dim())
}

/// 1-orthogonality: the subspaces meet in a line and the complements of
/// that line inside each of them are mutually orthogonal.
pub fn is_one_orthogonal(s: &Subspace, t: &Subspace, tol: &Tolerance) -> Result<bool> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "1-orthogonality needs equal dimensions, got {} and {}",
            s.dim(),
            t.dim()
        )));
    }
    let n = s.dim();
    if n < 2 {
        return Err(Error::UndefinedRelation(
            "1-orthogonality is defined for dimension at least 2".into(),
        ));
    }
    if s.ambient_dim() != t.ambient_dim() {
        return Err(Error::DimensionMismatch("ambient dimensions differ".into()));
    }
    if s.ambient_dim() < 2 * n - 1 {
        return Ok(false);
    }
    let meet = intersection_with_flag(s, t, tol)?;
    let line = match (&meet.subspace, meet.dim()) {
        (Some(l), 1) => l.basis().col(0),
        _ => return Ok(false),
    };
    let (Some(sc), Some(tc)) = (
        s.complement_of_vector(&line, tol)?,
        t.complement_of_vector(&line, tol)?,
    ) else {
        return Ok(false);
    };
    Ok(min_angle_subspaces(&sc, &tc)? > FRAC_PI_2 - tol.eps_angle)
}

/// Block-diagonal projection `P ⊕ Q` on `C^{d1} ⊕ C^{d2}`.
pub fn direct_sum(p: &Projection, q: &Projection) -> Projection {
    let matrix = p.matrix().block_diag(q.matrix());
    let range = match (p.range(), q.range()) {
        (None, None) => None,
        (a, b) => {
            let ba = a.map(|s| s.basis().clone()).unwrap_or_else(|| {
                crate::numerics::CMatrix::zeros(p.ambient_dim(), 0)
            });
            let bb = b.map(|s| s.basis().clone()).unwrap_or_else(|| {
                crate::numerics::CMatrix::zeros(q.ambient_dim(), 0)
            });
            Some(Subspace::from_orthonormal(ba.block_diag(&bb)))
        }
    };
    Projection {
        matrix,
        rank: p.rank() + q.rank(),
        range,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::min_angle;
    use crate::numerics::{CMatrix, C64, ONE, ZERO};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn tilted() -> Subspace {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Subspace::span_of(&[vec![ONE, ZERO, ZERO], vec![ZERO, h, h]], &tol()).unwrap()
    }

    #[test]
    fn intersection_examples() {
        let a = Subspace::coordinate(3, &[0, 1]).unwrap();
        let b = Subspace::coordinate(3, &[1, 2]).unwrap();
        let i = intersection(&a, &b, &tol()).unwrap().unwrap();
        assert_eq!(i.dim(), 1);
        assert!((i.basis()[(1, 0)].norm() - 1.0).abs() < 1e-14);

        let l1 = Subspace::coordinate(2, &[0]).unwrap();
        let l2 = Subspace::coordinate(2, &[1]).unwrap();
        assert!(intersection(&l1, &l2, &tol()).unwrap().is_none());
    }

    #[test]
    fn orthogonality_examples() {
        let l1 = Subspace::coordinate(2, &[0]).unwrap();
        let l2 = Subspace::coordinate(2, &[1]).unwrap();
        assert!(is_orthogonal(&l1, &l2, &tol()).unwrap());
        assert!(!is_orthogonal(&l1, &l1, &tol()).unwrap());
        assert!(!is_trivial_intersection(&l1, &l1, &tol()).unwrap());

        let diag = Subspace::line(&[ONE, ONE]).unwrap();
        assert!(!is_orthogonal(&l1, &diag, &tol()).unwrap());
        assert!(is_trivial_intersection(&l1, &diag, &tol()).unwrap());
    }

    #[test]
    fn orthogonality_routes_can_conflict() {
        // angle pi/2 - 1e-9: within eps_angle of pi/2 but ||PQ|| ~ 1e-9 > eps_entry
        let eps: f64 = 1e-9;
        let l1 = Subspace::coordinate(2, &[0]).unwrap();
        let l2 = Subspace::line(&[C64::new(eps.sin(), 0.0), C64::new(eps.cos(), 0.0)]).unwrap();
        assert!(matches!(
            is_orthogonal(&l1, &l2, &tol()),
            Err(Error::ToleranceConflict(_))
        ));
    }

    #[test]
    fn adjacency_examples() {
        let a = Subspace::coordinate(4, &[0, 1]).unwrap();
        let b = Subspace::coordinate(4, &[0, 2]).unwrap();
        let c = Subspace::coordinate(4, &[2, 3]).unwrap();
        assert!(is_adjacent(&a, &b, &tol()).unwrap());
        assert!(!is_adjacent(&a, &a, &tol()).unwrap());
        assert!(!is_adjacent(&a, &c, &tol()).unwrap());
    }

    #[test]
    fn one_orthogonality_examples() {
        for n in 2..=4 {
            let d = 2 * n - 1;
            let u: Vec<usize> = (0..n).collect();
            let v: Vec<usize> = (n - 1..d).collect();
            let su = Subspace::coordinate(d, &u).unwrap();
            let sv = Subspace::coordinate(d, &v).unwrap();
            assert!(is_one_orthogonal(&su, &sv, &tol()).unwrap(), "n = {n}");
            assert!(!is_one_orthogonal(&su, &su, &tol()).unwrap());
        }
        let s = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert!(!is_one_orthogonal(&s, &tilted(), &tol()).unwrap());

        let l = Subspace::coordinate(3, &[0]).unwrap();
        assert!(matches!(
            is_one_orthogonal(&l, &l, &tol()),
            Err(Error::UndefinedRelation(_))
        ));
    }

    #[test]
    fn direct_sum_examples() {
        let p = Projection::new(CMatrix::real_diag(&[1.0]), &tol()).unwrap();
        let q = Projection::new(CMatrix::real_diag(&[0.0, 1.0]), &tol()).unwrap();
        let s = direct_sum(&p, &q);
        assert_eq!(s.matrix(), &CMatrix::real_diag(&[1.0, 0.0, 1.0]));
        assert_eq!(s.rank(), 2);
        assert_eq!(s.range().unwrap().dim(), 2);

        let q2 = Subspace::coordinate(2, &[0, 1]).unwrap().to_projection();
        assert_eq!(direct_sum(&p, &q2).rank(), 3);

        let z = direct_sum(&Projection::zero(2), &p);
        assert_eq!(z.rank(), 1);
        let e = Subspace::coordinate(3, &[2]).unwrap().to_projection();
        assert!(min_angle(&z, &e).unwrap() < 1e-15);
    }
}
