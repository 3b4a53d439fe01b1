//! Self-validating evidence for three facts about small cases:
//!
//! * at d = 2n > 2, complementation `P -> I - P` is not of the form `U P U*`;
//! * at d = 2 it is, via `I - P = U P^t U*` with `U = [[0, 1], [-1, 0]]`;
//! * for `n + 1 <= d < 2n` any two n-dimensional subspaces intersect, so the
//!   minimal angle vanishes identically.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::principal_angles;
use crate::numerics::{singular_values, CMatrix, Tolerance, C64, ONE, ZERO};
use crate::sampling::Seed;

/// Identity residual allowed at each point of the 2x2 grid.
pub const TWO_BY_TWO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: f64,
    pub z: C64,
    /// `||(I - P) - U P^t U*||`, entrywise maximum.
    pub identity_residual: f64,
    /// `||P^t - conj(P)||`, entrywise maximum.
    pub transpose_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "evidence", rename_all = "snake_case")]
pub enum Certificate {
    /// If `I - P = U P U*` held for all rank-n P on C^{2n}, then for the
    /// average A of three diagonal projections `I - A = U A U*`; but A is
    /// invertible while `I - A` is singular.
    ComplementNotStandard {
        n: usize,
        projections: Vec<CMatrix>,
        a: CMatrix,
        min_singular_value_a: f64,
        eigenvector_residual: f64,
        min_singular_value_i_minus_a: f64,
    },
    TwoByTwoIdentity {
        u: CMatrix,
        points: Vec<GridPoint>,
        max_residual: f64,
    },
    DegenerateRegime {
        n: usize,
        d: usize,
        seed: Seed,
        samples: usize,
        max_min_angle: f64,
        min_intersection_dim: usize,
    },
}

/// Rank-n diagonal projections on C^{2n}: all contain position 0, and
/// position blocks of n - 1 taken cyclically from 1..2n cover the rest.
fn diagonal_family(n: usize) -> Vec<CMatrix> {
    let m = 2 * n - 1;
    (0..3)
        .map(|i| {
            let mut diag = vec![0.0; 2 * n];
            diag[0] = 1.0;
            for k in 0..n - 1 {
                diag[1 + (i * (n - 1) + k) % m] = 1.0;
            }
            CMatrix::real_diag(&diag)
        })
        .collect()
}

fn average(ps: &[CMatrix]) -> Result<CMatrix> {
    let mut sum = CMatrix::zeros(ps[0].rows(), ps[0].cols());
    for p in ps {
        sum = sum.try_add(p)?;
    }
    // divide rather than scale by 1/3 so that 3/3 is exactly 1
    let data = sum.data().iter().map(|z| z / ps.len() as f64).collect();
    CMatrix::from_row_major(sum.rows(), sum.cols(), data)
}

fn smallest_singular_value(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

pub fn certificate_complement_not_standard(n: usize) -> Result<Certificate> {
    if n < 2 {
        return Err(Error::Regime("the obstruction needs n >= 2".into()));
    }
    let projections = diagonal_family(n);
    let a = average(&projections)?;
    let (min_sv_a, eig, min_sv_c) = complement_evidence(&a)?;
    Ok(Certificate::ComplementNotStandard {
        n,
        projections,
        a,
        min_singular_value_a: min_sv_a,
        eigenvector_residual: eig,
        min_singular_value_i_minus_a: min_sv_c,
    })
}

fn complement_evidence(a: &CMatrix) -> Result<(f64, f64, f64)> {
    let d = a.rows();
    let i_minus_a = CMatrix::identity(d).try_sub(a)?;
    let e1 = CMatrix::basis_vector(d, 0);
    let r: Vec<C64> = a.mul_vec(&e1)?.iter().zip(&e1).map(|(x, y)| x - y).collect();
    Ok((
        smallest_singular_value(a)?,
        crate::numerics::norm(&r),
        smallest_singular_value(&i_minus_a)?,
    ))
}

/// `P(p, z) = [[p, z s], [conj(z) s, 1 - p]]` with `s = sqrt(p (1 - p))`.
pub fn rank_one_2x2(p: f64, z: C64) -> CMatrix {
    let s = (p * (1.0 - p)).sqrt();
    CMatrix::from_rows(&[
        vec![C64::new(p, 0.0), z * s],
        vec![z.conj() * s, C64::new(1.0 - p, 0.0)],
    ])
    .expect("2x2")
}

fn two_by_two_point(u: &CMatrix, p: f64, z: C64) -> GridPoint {
    let pm = rank_one_2x2(p, z);
    let lhs = &CMatrix::identity(2) - &pm;
    let rhs = &(u * &pm.transpose()) * &u.adjoint();
    GridPoint {
        p,
        z,
        identity_residual: (&lhs - &rhs).max_abs(),
        transpose_residual: (&pm.transpose() - &pm.conj()).max_abs(),
    }
}

pub fn certificate_two_by_two() -> Result<Certificate> {
    let u = CMatrix::from_rows(&[vec![ZERO, ONE], vec![-ONE, ZERO]])?;
    let zs = [ONE, C64::new(0.0, 1.0), C64::from_polar(1.0, FRAC_PI_4), -ONE];
    let mut points = Vec::new();
    for k in 0..=10 {
        for &z in &zs {
            points.push(two_by_two_point(&u, k as f64 / 10.0, z));
        }
    }
    let max_residual = points
        .iter()
        .map(|g| g.identity_residual.max(g.transpose_residual))
        .fold(0.0, f64::max);
    if let Some(bad) = points
        .iter()
        .find(|g| g.identity_residual.max(g.transpose_residual) > TWO_BY_TWO_TOLERANCE)
    {
        return Err(Error::CertificateFailure(format!(
            "2x2 identity fails at p = {}, z = {}",
            bad.p, bad.z
        )));
    }
    Ok(Certificate::TwoByTwoIdentity {
        u,
        points,
        max_residual,
    })
}

fn degenerate_scan(n: usize, d: usize, seed: Seed, samples: usize, tol: &Tolerance) -> Result<(f64, usize)> {
    let mut max_ma = 0.0f64;
    let mut min_dim = n;
    for t in 0..samples {
        let mut smp = seed.trial(t as u64);
        let s = smp.subspace(d, n)?;
        let q = smp.subspace(d, n)?;
        let pa = principal_angles(&s, &q)?;
        max_ma = max_ma.max(pa.min());
        min_dim = min_dim.min(pa.angles.iter().filter(|&&a| a < tol.eps_angle).count());
    }
    Ok((max_ma, min_dim))
}

pub fn certificate_degenerate_regime(n: usize, d: usize, seed: Seed, samples: usize, tol: &Tolerance) -> Result<Certificate> {
    if !(n < d && d < 2 * n) {
        return Err(Error::Regime(format!(
            "degenerate regime needs n + 1 <= d < 2n, got n = {n}, d = {d}"
        )));
    }
    let samples = samples.max(1000);
    let (max_ma, min_dim) = degenerate_scan(n, d, seed, samples, tol)?;
    let cert = Certificate::DegenerateRegime {
        n,
        d,
        seed,
        samples,
        max_min_angle: max_ma,
        min_intersection_dim: min_dim,
    };
    cert.validate(tol)?;
    Ok(cert)
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::ComplementNotStandard { .. } => "complement_not_standard",
            Certificate::TwoByTwoIdentity { .. } => "two_by_two_identity",
            Certificate::DegenerateRegime { .. } => "degenerate_regime",
        }
    }

    /// Recomputes every piece of evidence from the raw data it contains.
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        let fail = |msg: String| Err(Error::CertificateFailure(msg));
        match self {
            Certificate::ComplementNotStandard {
                n, projections, a, ..
            } => {
                let d = 2 * n;
                if projections.len() != 3 {
                    return fail(format!("expected 3 projections, got {}", projections.len()));
                }
                let mut covered = vec![false; d];
                for (k, p) in projections.iter().enumerate() {
                    if p.shape() != (d, d) {
                        return fail(format!("projection {k} is not {d}x{d}"));
                    }
                    let mut rank = 0;
                    for i in 0..d {
                        for j in 0..d {
                            let z = p[(i, j)];
                            let ok = if i == j { z == ONE || z == ZERO } else { z == ZERO };
                            if !ok {
                                return fail(format!("projection {k} is not a 0/1 diagonal matrix"));
                            }
                        }
                        if p[(i, i)] == ONE {
                            rank += 1;
                            covered[i] = true;
                        }
                    }
                    if rank != *n || p[(0, 0)] != ONE {
                        return fail(format!("projection {k} has rank {rank} or misses position 0"));
                    }
                }
                if covered.iter().any(|c| !c) {
                    return fail("diagonal positions not jointly covered".into());
                }
                let recomputed = average(projections)?;
                if &recomputed != a {
                    return fail("stored A differs from the average of the projections".into());
                }
                let (sa, eig, sc) = complement_evidence(&recomputed)?;
                if sa < 1.0 / 3.0 - tol.eps_entry {
                    return fail(format!("A is not invertible enough: smallest singular value {sa}"));
                }
                if eig > tol.eps_entry {
                    return fail(format!("e1 is not an eigenvector for 1: residual {eig:e}"));
                }
                if sc > tol.eps_rank {
                    return fail(format!("I - A is not singular: smallest singular value {sc:e}"));
                }
                Ok(())
            }
            Certificate::TwoByTwoIdentity { u, points, .. } => {
                if points.is_empty() {
                    return fail("empty grid".into());
                }
                for g in points {
                    let r = two_by_two_point(u, g.p, g.z);
                    let worst = r.identity_residual.max(r.transpose_residual);
                    if worst > TWO_BY_TWO_TOLERANCE {
                        return fail(format!("identity fails at p = {}, z = {}: {worst:e}", g.p, g.z));
                    }
                }
                Ok(())
            }
            Certificate::DegenerateRegime {
                n,
                d,
                seed,
                samples,
                max_min_angle,
                min_intersection_dim,
            } => {
                let (max_ma, min_dim) = degenerate_scan(*n, *d, *seed, *samples, tol)?;
                if max_ma != *max_min_angle || min_dim != *min_intersection_dim {
                    return fail("recorded evidence does not match a fresh scan".into());
                }
                if max_ma > 10.0 * tol.eps_angle {
                    return fail(format!("minimal angle {max_ma:e} observed in the degenerate regime"));
                }
                if min_dim < 2 * n - d {
                    return fail(format!("intersection of dimension {min_dim} < {}", 2 * n - d));
                }
                Ok(())
            }
        }
    }
}
