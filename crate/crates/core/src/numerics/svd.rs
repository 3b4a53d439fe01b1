//! Complex singular value decomposition by one-sided (Hestenes) Jacobi
//! rotations, plus the factorizations built on it.

use super::matrix::{axpy, dot, norm, CMatrix, C64, ZERO};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

/// Thin SVD `M = U diag(S) V^H` with `k = min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    /// Non-negative, sorted descending.
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let sigma: Vec<C64> = self.s.iter().map(|&x| C64::new(x, 0.0)).collect();
        let us = &self.u * &CMatrix::diag(&sigma);
        &us * &self.v.adjoint()
    }

    pub fn max_singular_value(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn min_singular_value(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.s)
}

/// Operator (spectral) norm.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    Ok(svd(m)?.max_singular_value())
}

fn jacobi_tall(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut a = m.columns();
    let mut v = CMatrix::identity(cols).columns();

    // columns below this squared norm are numerical zeros and are left alone
    let negligible = (f64::EPSILON * f64::EPSILON) * a.iter().map(|c| norm_sqr(c)).sum::<f64>();
    let mut converged = cols < 2;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::FactorizationFailure { sweeps: MAX_SWEEPS });
        }
        sweep += 1;
        converged = true;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = norm_sqr(&a[p]);
                let beta = norm_sqr(&a[q]);
                let gamma = dot(&a[p], &a[q]);
                let g = gamma.norm();
                if g == 0.0
                    || g <= ORTHO_TOL * (alpha * beta).sqrt()
                    || alpha <= negligible
                    || beta <= negligible
                {
                    continue;
                }
                converged = false;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
    }

    let mut sigma: Vec<f64> = a.iter().map(|col| norm(col)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let s_max = order.first().map_or(0.0, |&i| sigma[i]);

    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sj = sigma[j];
        if sj > 0.0 && sj > s_max * 1e-300 {
            let inv = C64::new(1.0 / sj, 0.0);
            u_cols.push(a[j].iter().map(|z| z * inv).collect());
        } else {
            sigma[j] = 0.0;
            u_cols.push(vec![ZERO; rows]);
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u_cols, &missing, rows);

    let s: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    let v_cols: Vec<Vec<C64>> = order.iter().map(|&j| v[j].clone()).collect();
    Ok(Svd {
        u: CMatrix::from_columns(rows, &u_cols)?,
        s,
        v: CMatrix::from_columns(cols, &v_cols)?,
    })
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Applies the unitary 2x2 transform (phase on column q, then a real rotation).
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let xp = &mut lo[p];
    let xq = &mut hi[0];
    for (ap, aq) in xp.iter_mut().zip(xq.iter_mut()) {
        let x = *ap;
        let y = *aq * phase;
        *ap = x * c - y * s;
        *aq = x * s + y * c;
    }
}

/// Fills the listed (zero) columns with unit vectors orthogonal to every other column.
fn complete_orthonormal(cols: &mut [Vec<C64>], missing: &[usize], dim: usize) {
    let mut candidate = 0;
    for &k in missing {
        loop {
            assert!(candidate < dim, "cannot complete orthonormal set in C^{dim}");
            let mut w = CMatrix::basis_vector(dim, candidate);
            candidate += 1;
            for _ in 0..2 {
                for (j, c) in cols.iter().enumerate() {
                    if j == k || norm(c) == 0.0 {
                        continue;
                    }
                    let h = dot(c, &w);
                    axpy(-h, c, &mut w);
                }
            }
            let nw = norm(&w);
            if nw > 0.5 {
                let inv = C64::new(1.0 / nw, 0.0);
                cols[k] = w.iter().map(|z| z * inv).collect();
                break;
            }
        }
    }
}

/// Orthonormal basis for the column space of a full-column-rank matrix.
///
/// Returns the polar factor `U V^H` of the thin SVD, so already-orthonormal
/// input comes back unchanged.
pub fn orthonormalize(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    if m.cols() > m.rows() {
        return Err(Error::RankDeficient {
            index: m.rows(),
            value: 0.0,
        });
    }
    if m.cols() == 0 {
        return Ok(m.clone());
    }
    let f = svd(m)?;
    let s_min = f.min_singular_value();
    if s_min <= tol.eps_rank * f.max_singular_value() || s_min == 0.0 {
        return Err(Error::RankDeficient {
            index: f.s.len() - 1,
            value: s_min,
        });
    }
    Ok(&f.u * &f.v.adjoint())
}

/// Orthonormal basis of `{x : ||Mx|| <= eps_rank ||M||}`; may have zero columns.
pub fn nullspace(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let n = m.cols();
    let square = if m.rows() < n {
        let mut padded = CMatrix::zeros(n, n);
        for i in 0..m.rows() {
            for j in 0..n {
                padded[(i, j)] = m[(i, j)];
            }
        }
        padded
    } else {
        m.clone()
    };
    let f = svd(&square)?;
    let cutoff = tol.eps_rank * f.max_singular_value();
    let keep: Vec<usize> = (0..f.s.len()).filter(|&k| f.s[k] <= cutoff).collect();
    Ok(f.v.select_columns(&keep))
}

/// Numerical rank with the relative `eps_rank` threshold.
pub fn rank(m: &CMatrix, tol: &Tolerance) -> Result<usize> {
    let s = singular_values(m)?;
    let cutoff = tol.eps_rank * s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > cutoff).count())
}

/// Unit vector with its first entry above `threshold` in modulus made real positive.
pub fn normalize_phase(v: &[C64], threshold: f64) -> Vec<C64> {
    match v.iter().find(|z| z.norm() > threshold) {
        Some(z) => {
            let ph = (z.conj()) / z.norm();
            v.iter().map(|x| x * ph).collect()
        }
        None => v.to_vec(),
    }
}

pub(crate) fn unit(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|z| z / n).collect())
}
