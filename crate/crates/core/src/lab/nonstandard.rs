//! Evidence that the block selector map preserves the minimal angle without
//! being standard. Standard maps are monotone (`P <= Q` implies
//! `U P U* <= U Q U*`), so a nested pair whose selections are not nested
//! rules the selector map out.

use serde::Serialize;

use crate::error::Result;
use crate::grassmann::Subspace;
use crate::maps::Selector;
use crate::numerics::{norm, Tolerance};
use crate::sampling::Seed;

/// Evidence that the selector does not respect inclusion.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityWitness {
    pub p: Subspace,
    /// `P` enlarged by one random direction.
    pub q: Subspace,
    pub rho_p: Subspace,
    pub rho_q: Subspace,
    /// Largest distance of a unit basis vector of `rho(P)` from `rho(Q)`.
    pub containment_residual: f64,
}

/// Smallest residual that counts as a witness; far above rounding.
pub const WITNESS_THRESHOLD: f64 = 1e-3;

/// Searches random nested pairs `P < Q` with `dim Q = dim P + 1` for one
/// whose selections are not nested.
pub fn find_nonmonotonicity_witness(
    selector: &Selector,
    n: usize,
    d: usize,
    seed: Seed,
    attempts: usize,
    tol: &Tolerance,
) -> Result<Option<MonotonicityWitness>> {
    if n + 1 > d {
        return Ok(None);
    }
    for t in 0..attempts {
        let mut smp = seed.trial(t as u64);
        let p = smp.subspace(d, n)?;
        let extra = smp.unit_vector(d);
        let q = Subspace::span(&p.basis().hstack(&crate::numerics::CMatrix::column_vector(&extra))?, tol)?;
        let rho_p = selector.select(&p, tol)?;
        let rho_q = match selector {
            Selector::Identity => q.clone(),
            _ => selector.select(&q, tol)?,
        };
        let residual = (0..rho_p.dim())
            .map(|j| norm(&rho_q.residual(&rho_p.basis().col(j))))
            .fold(0.0, f64::max);
        if residual > WITNESS_THRESHOLD {
            return Ok(Some(MonotonicityWitness {
                p,
                q,
                rho_p,
                rho_q,
                containment_residual: residual,
            }));
        }
    }
    Ok(None)
}
