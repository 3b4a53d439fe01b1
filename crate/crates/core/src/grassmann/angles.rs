use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{Projection, Subspace};
use crate::error::{Error, Result};
use crate::numerics::{dot, norm, operator_norm, svd, CMatrix, C64};

/// Principal angles in ascending order with matching principal vectors.
///
/// Column k of `left_frame` lies in the first subspace, column k of
/// `right_frame` in the second, and `|<x_k, y_k>| = cos(angles[k])`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrincipalAngles {
    pub angles: Vec<f64>,
    pub left_frame: CMatrix,
    pub right_frame: CMatrix,
}

impl PrincipalAngles {
    pub fn min(&self) -> f64 {
        self.angles.first().copied().unwrap_or(FRAC_PI_2)
    }

    pub fn max(&self) -> f64 {
        self.angles.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `arccos |<x, y>|` for unit vectors.
pub fn angle_between_lines(x: &[C64], y: &[C64], eps_entry: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    for v in [x, y] {
        let n = norm(v);
        if (n - 1.0).abs() > eps_entry {
            return Err(Error::NotUnit { norm: n });
        }
    }
    // sine from the component of y orthogonal to x, so tiny angles keep full precision
    let h = dot(x, y);
    let c = h.norm();
    let perp: Vec<C64> = y.iter().zip(x).map(|(b, a)| b - a * h).collect();
    Ok(norm(&perp).atan2(c).clamp(0.0, FRAC_PI_2))
}

/// Principal angles between two subspaces of the same dimension.
pub fn principal_angles(s: &Subspace, t: &Subspace) -> Result<PrincipalAngles> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimensions {} and {} differ",
            s.dim(),
            t.dim()
        )));
    }
    principal_angles_general(s, t)
}

/// Principal angles between subspaces of possibly different dimensions;
/// there are `min(dim s, dim t)` of them.
///
/// Cosines come from the SVD of `S^H T`. Angles up to pi/4 are taken from
/// the sines, the singular values of `T - S S^H T`, which keeps small
/// angles accurate.
pub fn principal_angles_general(s: &Subspace, t: &Subspace) -> Result<PrincipalAngles> {
    if s.ambient_dim() != t.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            s.ambient_dim(),
            t.ambient_dim()
        )));
    }
    if t.dim() > s.dim() {
        let swapped = principal_angles_general(t, s)?;
        return Ok(PrincipalAngles {
            angles: swapped.angles,
            left_frame: swapped.right_frame,
            right_frame: swapped.left_frame,
        });
    }
    let (sb, tb) = (s.basis(), t.basis());
    let cross = &sb.adjoint() * tb;
    let f = svd(&cross)?;
    let k = t.dim();
    let residual = tb - &(sb * &cross);
    let mut sines = svd(&residual)?.s;
    sines.reverse();

    let mut angles = Vec::with_capacity(k);
    let mut last: f64 = 0.0;
    for i in 0..k {
        let c = f.s[i].clamp(0.0, 1.0);
        let theta = if c * c >= 0.5 {
            sines[i].clamp(0.0, 1.0).asin()
        } else {
            c.acos()
        };
        last = last.max(theta);
        angles.push(last);
    }
    let left_frame = sb * &f.u.leading_columns(k);
    let right_frame = tb * &f.v;
    Ok(PrincipalAngles {
        angles,
        left_frame,
        right_frame,
    })
}

/// Smallest principal angle between the ranges of two nonzero projections of any ranks.
pub fn min_angle(p: &Projection, q: &Projection) -> Result<f64> {
    min_angle_subspaces(p.nonzero_range()?, q.nonzero_range()?)
}

pub fn min_angle_subspaces(s: &Subspace, t: &Subspace) -> Result<f64> {
    Ok(principal_angles_general(s, t)?.min())
}

/// Operator-norm distance `||P - Q||`.
pub fn gap_distance(p: &Projection, q: &Projection) -> Result<f64> {
    let diff = p.matrix().try_sub(q.matrix())?;
    operator_norm(&diff)
}

pub fn gap_distance_subspaces(s: &Subspace, t: &Subspace) -> Result<f64> {
    gap_distance(&s.to_projection(), &t.to_projection())
}

/// `Re tr(PQ)`.
pub fn trace_product(p: &Projection, q: &Projection) -> Result<f64> {
    let prod = p.matrix().matmul(q.matrix())?;
    let tr = prod.trace();
    debug_assert!(tr.im.abs() < 1e-8, "tr(PQ) = {tr}");
    Ok(tr.re)
}

/// `tr(PQ) = ||S^H T||_F^2` computed from the bases.
pub fn trace_product_subspaces(s: &Subspace, t: &Subspace) -> Result<f64> {
    if s.ambient_dim() != t.ambient_dim() {
        return Err(Error::DimensionMismatch("ambient dimensions differ".into()));
    }
    let cross = &s.basis().adjoint() * t.basis();
    Ok(cross.frobenius_norm().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Tolerance, ONE, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn line_angles() {
        let e1 = [ONE, ZERO];
        let e2 = [ZERO, ONE];
        let diag = [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)];
        assert_eq!(angle_between_lines(&e1, &e1, 1e-10).unwrap(), 0.0);
        assert!((angle_between_lines(&e1, &e2, 1e-10).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((angle_between_lines(&e1, &diag, 1e-10).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(
            angle_between_lines(&[c(2.0), ZERO], &e1, 1e-10),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn coordinate_examples() {
        let s = Subspace::coordinate(4, &[0, 1]).unwrap();
        let a = principal_angles(&s, &s).unwrap();
        assert_eq!(a.angles, vec![0.0, 0.0]);

        let t = Subspace::coordinate(4, &[2, 3]).unwrap();
        let a = principal_angles(&s, &t).unwrap();
        for x in a.angles {
            assert!((x - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn tilted_plane() {
        let tol = Tolerance::default();
        let s = Subspace::coordinate(3, &[0, 1]).unwrap();
        let t = Subspace::span_of(
            &[
                vec![ONE, ZERO, ZERO],
                vec![ZERO, c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
            ],
            &tol,
        )
        .unwrap();
        let a = principal_angles(&s, &t).unwrap();
        assert!(a.angles[0].abs() < 1e-15);
        assert!((a.angles[1] - FRAC_PI_4).abs() < 1e-15);
        for k in 0..2 {
            let ip = dot(&a.left_frame.col(k), &a.right_frame.col(k)).norm();
            assert!((ip - a.angles[k].cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn unequal_rank_min_angle() {
        let tol = Tolerance::default();
        let p = Subspace::coordinate(3, &[0]).unwrap();
        let q = Subspace::span_of(
            &[
                vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), ZERO],
                vec![ZERO, ZERO, ONE],
            ],
            &tol,
        )
        .unwrap();
        let ma = min_angle(&p.to_projection(), &q.to_projection()).unwrap();
        assert!((ma - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(principal_angles_general(&q, &p).unwrap().len(), 1);
        assert!(principal_angles(&p, &q).is_err());
    }

    #[test]
    fn zero_projection_rejected() {
        let p = Projection::zero(2);
        let q = Subspace::coordinate(2, &[0]).unwrap().to_projection();
        assert!(matches!(min_angle(&p, &q), Err(Error::ZeroProjection)));
    }

    #[test]
    fn gap_and_trace_examples() {
        let p = Subspace::coordinate(4, &[0, 1]).unwrap().to_projection();
        let q = Subspace::coordinate(4, &[2, 3]).unwrap().to_projection();
        assert!(gap_distance(&p, &p).unwrap().abs() < 1e-15);
        assert!((gap_distance(&p, &q).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_product(&p, &p).unwrap() - 2.0).abs() < 1e-15);
        assert!(trace_product(&p, &q).unwrap().abs() < 1e-15);

        let l1 = Subspace::coordinate(2, &[0]).unwrap();
        let l2 = Subspace::line(&[c(1.0), c(1.0)]).unwrap();
        let (p1, p2) = (l1.to_projection(), l2.to_projection());
        let gap = gap_distance(&p1, &p2).unwrap();
        let tr = trace_product(&p1, &p2).unwrap();
        assert!((gap - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((tr - 0.5).abs() < 1e-15);
        assert!((gap - (1.0 - tr).sqrt()).abs() < 1e-15);
        assert!((trace_product_subspaces(&l1, &l2).unwrap() - 0.5).abs() < 1e-15);
    }
}
