//! Constructive recovery of the isometry behind a minimal-angle preserver.
//!
//! A preserver of n-dimensional subspaces induces a map on lines: for a
//! unit vector x pick a sharp pair `U ∩ V = [x]` and set
//! `psi([x]) = phi(U) ∩ phi(V)`. The line map is then read off on a few
//! probe lines to reconstruct the isometry column by column.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::sharp::{find_sharp_pair, random_sharp_pair};
use crate::error::{Error, Result};
use crate::grassmann::{gap_distance_subspaces, intersection_with_flag, min_angle_subspaces, Subspace};
use crate::maps::{apply_isometry, complement, same_subspace, IsometryMap, PrecomposeComplement, SubspaceMap};
use crate::numerics::{dot, CMatrix, Tolerance, C64, I, ONE, ZERO};
use crate::sampling::Seed;

/// Entries below this modulus are skipped when fixing the global phase.
const PHASE_THRESHOLD: f64 = 1e-5;

/// Validation residual separating the two branches.
pub const BRANCH_THRESHOLD: f64 = 1e-3;

/// Sampled evaluations of the induced line map.
#[derive(Debug, Clone)]
pub struct LineMap {
    pub evaluations: Vec<(Subspace, Subspace)>,
    /// Largest angle between candidate images obtained from different sharp pairs.
    pub well_definedness: f64,
    pub source: String,
}

impl LineMap {
    pub fn get(&self, line: &Subspace, tol: &Tolerance) -> Option<&Subspace> {
        self.evaluations
            .iter()
            .find(|(from, _)| same_subspace(from, line, tol))
            .map(|(_, to)| to)
    }

    fn require(&self, line: &Subspace, tol: &Tolerance) -> Result<&Subspace> {
        self.get(line, tol).ok_or_else(|| {
            Error::Domain(format!("line map not evaluated at {:?}", line.representative()))
        })
    }
}

/// Evaluates the induced line map on `lines`, using one deterministic and
/// `pairs_per_line - 1` random sharp pairs per line. All candidate images
/// must agree within `10 eps_angle`.
pub fn build_line_map(
    phi: &dyn SubspaceMap,
    lines: &[Subspace],
    pairs_per_line: usize,
    seed: Seed,
    tol: &Tolerance,
) -> Result<LineMap> {
    let (d, n) = phi.domain();
    let mut evaluations = Vec::with_capacity(lines.len());
    let mut residual = 0.0f64;
    for (i, line) in lines.iter().enumerate() {
        if line.dim() != 1 || line.ambient_dim() != d {
            return Err(Error::DimensionMismatch(format!("probe {i} is not a line in C^{d}")));
        }
        let x = line.basis().col(0);
        if n == 1 {
            evaluations.push((line.clone(), phi.apply(line, tol)?));
            continue;
        }
        let mut sampler = seed.trial(i as u64);
        let mut first: Option<Subspace> = None;
        for k in 0..pairs_per_line.max(1) {
            let (u, v) = if k == 0 {
                find_sharp_pair(&x, n, d)?
            } else {
                random_sharp_pair(&x, n, &mut sampler)?
            };
            let meet = intersection_with_flag(&phi.apply(&u, tol)?, &phi.apply(&v, tol)?, tol)?;
            let image = match (meet.dim(), meet.subspace) {
                (1, Some(s)) => s,
                (dim, _) => {
                    return Err(Error::PreserverViolation(format!(
                        "images of a sharp pair through probe {i} meet in dimension {dim}, expected 1"
                    )))
                }
            };
            match &first {
                None => first = Some(image),
                Some(f) => residual = residual.max(min_angle_subspaces(f, &image)?),
            }
        }
        evaluations.push((line.clone(), first.expect("at least one pair")));
    }
    if residual > 10.0 * tol.eps_angle {
        return Err(Error::PreserverViolation(format!(
            "induced line map is not well defined: candidates differ by {residual:.3e} rad"
        )));
    }
    Ok(LineMap {
        evaluations,
        well_definedness: residual,
        source: phi.describe(),
    })
}

fn line_of(v: Vec<C64>) -> Subspace {
    Subspace::line(&v).expect("probe vectors are nonzero")
}

/// `[e_j]` for all j, `[(e_1 + e_j)/sqrt 2]` for j >= 2, and `[(e_1 + i e_2)/sqrt 2]`.
pub fn probe_lines(d: usize) -> Vec<Subspace> {
    let mut out: Vec<Subspace> = (0..d).map(|j| line_of(CMatrix::basis_vector(d, j))).collect();
    for j in 1..d {
        let mut v = vec![ZERO; d];
        v[0] = ONE;
        v[j] = ONE;
        out.push(line_of(v));
    }
    if d >= 2 {
        let mut v = vec![ZERO; d];
        v[0] = ONE;
        v[1] = I;
        out.push(line_of(v));
    }
    out
}

/// Multiplies a matrix by the phase that makes its first entry (column-major
/// order, modulus above `1e-5`) real positive.
pub fn fix_global_phase(m: &CMatrix) -> CMatrix {
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m[(i, j)];
            if z.norm() > PHASE_THRESHOLD {
                return m.scale(z.conj() / z.norm());
            }
        }
    }
    m.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `phi(S) = U S`.
    Standard,
    /// `phi(S) = U S^⊥`, only possible when d = 2n.
    Complement,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryResult {
    pub isometry: IsometryMap,
    pub global_phase_fixed: bool,
    /// Largest gap between `phi(S)` and the prediction over validation samples.
    pub max_residual: f64,
    pub branch: Branch,
    pub well_definedness: f64,
    pub preservation_residual: f64,
}

/// Reconstructs `U` from a line map defined on [`probe_lines`].
pub fn recover_isometry(psi: &LineMap, d: usize, tol: &Tolerance) -> Result<(IsometryMap, bool)> {
    let probes = probe_lines(d);
    let rep = |k: usize| -> Result<Vec<C64>> { Ok(psi.require(&probes[k], tol)?.representative()) };
    let tolerance = tol.eps_angle;
    let u1 = rep(0)?;
    let out_dim = u1.len();
    let mut cols = vec![u1.clone()];
    for j in 1..d {
        let w = rep(j)?;
        let s = rep(d + j - 1)?;
        let a = dot(&u1, &s);
        let b = dot(&w, &s);
        let lost = (a.norm() - FRAC_1_SQRT_2).abs().max((b.norm() - FRAC_1_SQRT_2).abs());
        if lost > tolerance || dot(&u1, &w).norm() > tolerance {
            return Err(Error::NotWignerMap(format!(
                "cannot phase-align column {j}: overlap defect {lost:.3e} at [(e1 + e{})/sqrt 2]",
                j + 1
            )));
        }
        let c = b / a;
        let c = c / c.norm();
        cols.push(w.iter().map(|z| z * c).collect());
    }

    let conjugate = if d >= 2 {
        let t = rep(2 * d - 1)?;
        let ratio = dot(&cols[1], &t) / dot(&u1, &t);
        if (ratio - I).norm() <= tolerance {
            false
        } else if (ratio + I).norm() <= tolerance {
            true
        } else {
            return Err(Error::NotWignerMap(format!(
                "[(e1 + i e2)/sqrt 2] maps to ratio {ratio}, neither i nor -i"
            )));
        }
    } else {
        false
    };

    let raw = CMatrix::from_columns(out_dim, &cols)?;
    let fixed = fix_global_phase(&raw);
    let phase_fixed = raw.max_abs() > PHASE_THRESHOLD;
    let iso = IsometryMap::new(fixed, conjugate, tol)
        .map_err(|e| Error::NotWignerMap(format!("recovered columns are not orthonormal: {e}")))?;
    Ok((iso, phase_fixed))
}

/// Largest absolute difference in minimal angle over sampled pairs: random
/// pairs, sharp pairs and orthogonal pairs, or all pairs of a finite domain.
pub fn preservation_residual(phi: &dyn SubspaceMap, trials: usize, seed: Seed, tol: &Tolerance) -> Result<f64> {
    let (d, n) = phi.domain();
    let mut pairs: Vec<(Subspace, Subspace)> = Vec::new();
    if let Some(keys) = phi.finite_domain() {
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                pairs.push((keys[i].clone(), keys[j].clone()));
            }
        }
    } else {
        for t in 0..trials {
            let mut smp = seed.trial(t as u64);
            pairs.push((smp.subspace(d, n)?, smp.subspace(d, n)?));
            if n >= 2 && d >= 2 * n - 1 {
                let x = smp.unit_vector(d);
                pairs.push(random_sharp_pair(&x, n, &mut smp)?);
            }
            if 2 * n <= d {
                let f = smp.orthonormal_frame(d, 2 * n);
                let first: Vec<usize> = (0..n).collect();
                let second: Vec<usize> = (n..2 * n).collect();
                pairs.push((
                    Subspace::new(f.select_columns(&first), tol)?,
                    Subspace::new(f.select_columns(&second), tol)?,
                ));
            }
        }
    }
    let mut worst = 0.0f64;
    for (s, t) in &pairs {
        let before = min_angle_subspaces(s, t)?;
        let after = min_angle_subspaces(&phi.apply(s, tol)?, &phi.apply(t, tol)?)?;
        let diff = (before - after).abs();
        if diff > worst || diff.is_nan() {
            worst = diff;
        }
    }
    Ok(worst)
}

fn attempt(
    phi: &dyn SubspaceMap,
    branch: Branch,
    trials: usize,
    seed: Seed,
    tol: &Tolerance,
) -> Result<RecoveryResult> {
    let (d, n) = phi.domain();
    let composed;
    let target: &dyn SubspaceMap = match branch {
        Branch::Standard => phi,
        Branch::Complement => {
            composed = PrecomposeComplement { inner: phi };
            &composed
        }
    };
    let psi = build_line_map(target, &probe_lines(d), 2, seed, tol)?;
    let (iso, phase_fixed) = recover_isometry(&psi, d, tol)?;
    let mut max_residual = 0.0f64;
    for t in 0..trials.max(1) {
        let s = seed.trial((trials + t) as u64).subspace(d, n)?;
        let expected = match branch {
            Branch::Standard => apply_isometry(&iso, &s)?,
            Branch::Complement => apply_isometry(&iso, &complement(&s, tol)?)?,
        };
        let got = phi.apply(&s, tol)?;
        let r = if got.ambient_dim() != expected.ambient_dim() {
            f64::INFINITY
        } else {
            gap_distance_subspaces(&got, &expected)?
        };
        if r > max_residual || r.is_nan() {
            max_residual = r;
        }
    }
    Ok(RecoveryResult {
        isometry: iso,
        global_phase_fixed: phase_fixed,
        max_residual,
        branch,
        well_definedness: psi.well_definedness,
        preservation_residual: 0.0,
    })
}

/// End-to-end: check minimal-angle preservation on samples, build the
/// induced line map, recover the isometry, and validate `phi(S) = U S`
/// (or `U S^⊥` when d = 2n) on fresh samples.
pub fn verify_preserver(phi: &dyn SubspaceMap, trials: usize, seed: Seed, tol: &Tolerance) -> Result<RecoveryResult> {
    let (d, n) = phi.domain();
    let pres = preservation_residual(phi, trials, seed, tol)?;
    if !(pres <= 10.0 * tol.eps_angle) {
        return Err(Error::PreserverViolation(format!(
            "minimal angle changes by {pres:.3e} rad on a sampled pair"
        )));
    }
    if phi.finite_domain().is_some() {
        return Err(Error::Domain(
            "a finite table cannot be probed off its domain; only preservation was checked".into(),
        ));
    }
    let standard = attempt(phi, Branch::Standard, trials, seed, tol);
    let result = match standard {
        Ok(r) if r.max_residual <= BRANCH_THRESHOLD => Ok(r),
        first if d == 2 * n => match attempt(phi, Branch::Complement, trials, seed, tol) {
            Ok(r) if r.max_residual <= BRANCH_THRESHOLD => Ok(r),
            second => pick(first, second),
        },
        other => other,
    };
    result.map(|mut r| {
        r.preservation_residual = pres;
        r
    })
}

/// Reports the better of two failed attempts.
fn pick(a: Result<RecoveryResult>, b: Result<RecoveryResult>) -> Result<RecoveryResult> {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(if y.max_residual < x.max_residual { y } else { x }),
        (Ok(x), Err(_)) | (Err(_), Ok(x)) => Ok(x),
        (Err(e), Err(_)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::GrassmannMap;
    use crate::sampling::Conjugation;

    #[test]
    fn identity_line_map() {
        let tol = Tolerance::default();
        let phi = GrassmannMap::standard(IsometryMap::identity(4), 2).unwrap();
        let probes = probe_lines(4);
        let psi = build_line_map(&phi, &probes, 2, Seed(1), &tol).unwrap();
        for (from, to) in &psi.evaluations {
            assert!(min_angle_subspaces(from, to).unwrap() < 1e-7);
        }
        let (u, _) = recover_isometry(&psi, 4, &tol).unwrap();
        assert!((u.matrix() - &CMatrix::identity(4)).max_abs() < 1e-10);
        assert!(!u.is_conjugate());
    }

    #[test]
    fn recovers_random_unitary_up_to_phase() {
        let tol = Tolerance::default();
        for (k, flag) in [Conjugation::Linear, Conjugation::Conjugate].into_iter().enumerate() {
            let u0 = Seed(10 + k as u64).sampler().isometry(5, 6, flag).unwrap();
            let phi = GrassmannMap::standard(u0.clone(), 2).unwrap();
            let r = verify_preserver(&phi, 20, Seed(3), &tol).unwrap();
            assert_eq!(r.branch, Branch::Standard);
            assert_eq!(r.isometry.is_conjugate(), u0.is_conjugate());
            assert!(r.max_residual < 1e-7, "{}", r.max_residual);
            let diff = (r.isometry.matrix() - &fix_global_phase(u0.matrix())).max_abs();
            assert!(diff < 1e-7, "{diff}");
        }
    }

    #[test]
    fn complement_branch() {
        let tol = Tolerance::default();
        let u0 = Seed(2).sampler().unitary(4, Conjugation::Linear).unwrap();
        let phi = GrassmannMap::complement_standard(u0, 2).unwrap();
        let r = verify_preserver(&phi, 20, Seed(3), &tol).unwrap();
        assert_eq!(r.branch, Branch::Complement);
        assert!(r.max_residual < 1e-7);
    }

    #[test]
    fn lines_recovered_directly() {
        let tol = Tolerance::default();
        let u0 = Seed(6).sampler().unitary(3, Conjugation::Conjugate).unwrap();
        let phi = GrassmannMap::standard(u0, 1).unwrap();
        let r = verify_preserver(&phi, 10, Seed(1), &tol).unwrap();
        assert!(r.isometry.is_conjugate());
        assert!(r.max_residual < 1e-7);
    }

    #[test]
    fn table_violating_preservation_rejected() {
        let tol = Tolerance::default();
        let mut smp = Seed(8).sampler();
        let a = smp.subspace(4, 2).unwrap();
        let b = smp.subspace(4, 2).unwrap();
        let phi = GrassmannMap::table(vec![(a.clone(), a), (b.clone(), complement(&b, &tol).unwrap())]).unwrap();
        let e = verify_preserver(&phi, 5, Seed(1), &tol).unwrap_err();
        assert!(matches!(e, Error::PreserverViolation(_)), "{e:?}");
    }

    #[test]
    fn phase_convention() {
        let m = CMatrix::identity(2).scale(I);
        let f = fix_global_phase(&m);
        assert!((f[(0, 0)] - ONE).norm() < 1e-15);
    }
}
