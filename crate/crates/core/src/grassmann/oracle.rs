//! Second, independent route to principal angles.
//!
//! Follows the recursive definition directly: the first angle and its
//! principal vectors maximise `|<x, y>|` over unit vectors of the two
//! subspaces; both subspaces are then deflated by the found vectors and the
//! search repeats on the remainders. The maximiser comes from the top
//! eigenvector of `M^H M` (`M = S^H T`), found with a real symmetric Jacobi
//! eigensolver on the 2k x 2k real embedding. Nothing here goes through the
//! SVD used by the main route.

use super::angles::PrincipalAngles;
use super::Subspace;
use crate::error::{Error, Result};
use crate::numerics::{axpy, dot, norm, CMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;

pub fn principal_angles_oracle(s: &Subspace, t: &Subspace) -> Result<PrincipalAngles> {
    if s.ambient_dim() != t.ambient_dim() || s.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "need equal shapes, got {}x{} and {}x{}",
            s.ambient_dim(),
            s.dim(),
            t.ambient_dim(),
            t.dim()
        )));
    }
    let d = s.ambient_dim();
    let n = s.dim();
    let mut sb = s.basis().clone();
    let mut tb = t.basis().clone();
    let mut angles = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);

    for _ in 0..n {
        let cross = &sb.adjoint() * &tb;
        let gram = &cross.adjoint() * &cross;
        let v = top_eigenvector(&gram)?;
        let w = cross.mul_vec(&v)?;
        let wn = norm(&w);
        let a: Vec<C64> = if wn > 0.0 {
            w.iter().map(|z| z / wn).collect()
        } else {
            CMatrix::basis_vector(sb.cols(), 0)
        };
        let x = sb.mul_vec(&a)?;
        let y = tb.mul_vec(&v)?;
        let h = dot(&x, &y);
        let perp: Vec<C64> = y.iter().zip(&x).map(|(yi, xi)| yi - xi * h).collect();
        angles.push(norm(&perp).atan2(h.norm()));
        xs.push(x);
        ys.push(y);

        if sb.cols() > 1 {
            sb = &sb * &orthogonal_complement(&a);
            tb = &tb * &orthogonal_complement(&v);
        }
    }

    Ok(PrincipalAngles {
        angles,
        left_frame: CMatrix::from_columns(d, &xs)?,
        right_frame: CMatrix::from_columns(d, &ys)?,
    })
}

/// Orthonormal basis (as columns) of the complement of a unit vector in C^k,
/// by Gram-Schmidt on the standard basis.
fn orthogonal_complement(a: &[C64]) -> CMatrix {
    let k = a.len();
    let mut basis: Vec<Vec<C64>> = vec![a.to_vec()];
    let mut order: Vec<usize> = (0..k).collect();
    // least aligned coordinates first, so the dropped candidate is the one closest to `a`
    order.sort_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()));
    for &i in order.iter().take(k - 1) {
        let mut w = CMatrix::basis_vector(k, i);
        for _ in 0..2 {
            for b in &basis {
                let h = dot(b, &w);
                axpy(-h, b, &mut w);
            }
        }
        let nw = norm(&w);
        basis.push(w.iter().map(|z| z / nw).collect());
    }
    CMatrix::from_columns(k, &basis[1..]).expect("k-1 columns of length k")
}

/// Unit eigenvector for the largest eigenvalue of a Hermitian matrix.
fn top_eigenvector(h: &CMatrix) -> Result<Vec<C64>> {
    let k = h.rows();
    let m = 2 * k;
    // [[Re, -Im], [Im, Re]]
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..k {
        for j in 0..k {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + k][j + k] = z.re;
            a[i][j + k] = -z.im;
            a[i + k][j] = z.im;
        }
    }
    let (vals, vecs) = symmetric_jacobi(a)?;
    let best = (0..m)
        .max_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("nonempty");
    let mut v: Vec<C64> = (0..k)
        .map(|i| C64::new(vecs[i][best], vecs[i + k][best]))
        .collect();
    let nv = norm(&v);
    if nv == 0.0 {
        v = vec![ZERO; k];
        v[0] = C64::new(1.0, 0.0);
    } else {
        v.iter_mut().for_each(|z| *z /= nv);
    }
    Ok(v)
}

/// Cyclic Jacobi for a real symmetric matrix; returns eigenvalues and eigenvectors (columns).
fn symmetric_jacobi(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = a.len();
    let mut v = vec![vec![0.0; m]; m];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p][q].abs();
                // negligible against the diagonal, or at rounding level for the whole
                // matrix (needed for the exactly paired eigenvalues of the embedding)
                if apq <= f64::EPSILON * (a[p][p] * a[q][q]).abs().sqrt() || apq <= f64::EPSILON * scale {
                    continue;
                }
                rotated = true;
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                for j in 0..m {
                    let (x, y) = (a[p][j], a[q][j]);
                    a[p][j] = c * x - s * y;
                    a[q][j] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            let vals = (0..m).map(|i| a[i][i]).collect();
            return Ok((vals, v));
        }
    }
    Err(Error::FactorizationFailure { sweeps: MAX_SWEEPS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Tolerance, ONE};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn jacobi_eigen_of_small_symmetric() {
        let (vals, vecs) = symmetric_jacobi(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-14 && (sorted[1] - 3.0).abs() < 1e-14);
        let top = if vals[0] > vals[1] { 0 } else { 1 };
        assert!((vecs[0][top].abs() - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn matches_coordinate_examples() {
        let tol = Tolerance::default();
        let s = Subspace::coordinate(4, &[0, 1]).unwrap();
        assert_eq!(principal_angles_oracle(&s, &s).unwrap().angles, vec![0.0, 0.0]);
        let t = Subspace::coordinate(4, &[2, 3]).unwrap();
        for a in principal_angles_oracle(&s, &t).unwrap().angles {
            assert!((a - FRAC_PI_2).abs() < 1e-15);
        }
        let s3 = Subspace::coordinate(3, &[0, 1]).unwrap();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let t3 = Subspace::span_of(&[vec![ONE, ZERO, ZERO], vec![ZERO, h, h]], &tol).unwrap();
        let a = principal_angles_oracle(&s3, &t3).unwrap().angles;
        assert!(a[0].abs() < 1e-15);
        assert!((a[1] - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn complement_is_orthonormal() {
        let a = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO];
        let c = orthogonal_complement(&a);
        assert_eq!(c.shape(), (3, 2));
        assert!(c.orthonormality_residual() < 1e-15);
        for j in 0..2 {
            assert!(dot(&a, &c.col(j)).norm() < 1e-15);
        }
    }
}
