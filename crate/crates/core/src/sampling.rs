//! Seeded random subspaces, unitaries and isometries.
//!
//! Every stream is ChaCha20 (`rand_chacha` 0.9) seeded with
//! `ChaCha20Rng::seed_from_u64(seed)`. Trial `i` of a run uses stream
//! number `i` of the same key, so trials can be generated in any order
//! and still match a serial run.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{Projection, Subspace};
use crate::maps::IsometryMap;
use crate::numerics::{orthonormalize, CMatrix, Tolerance, C64};

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "GRASSMANN_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0)
    }

    /// Independent generator for trial `index`.
    pub fn stream(self, index: u64) -> ChaCha20Rng {
        let mut rng = self.rng();
        rng.set_stream(index);
        rng
    }

    pub fn sampler(self) -> Sampler<ChaCha20Rng> {
        Sampler::new(self.rng())
    }

    pub fn trial(self, index: u64) -> Sampler<ChaCha20Rng> {
        Sampler::new(self.stream(index))
    }

    /// Child seed for sub-run `index`, taken from that trial's stream.
    pub fn derive(self, index: u64) -> Seed {
        Seed(self.stream(index).next_u64())
    }

    /// Seed from the environment, falling back to `default`.
    pub fn from_env_or(default: u64) -> Seed {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map_or(Seed(default), Seed)
    }
}

/// How the conjugation flag of a sampled isometry is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjugation {
    Linear,
    Conjugate,
    Coin,
}

/// Stateful sampler over any RNG.
pub struct Sampler<R: Rng> {
    rng: R,
}

impl<R: Rng> Sampler<R> {
    pub fn new(rng: R) -> Self {
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        let data = (0..rows * cols).map(|_| self.complex_normal()).collect();
        CMatrix::from_row_major(rows, cols, data).expect("finite samples")
    }

    pub fn unit_vector(&mut self, d: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..d).map(|_| self.complex_normal()).collect();
            let n = crate::numerics::norm(&v);
            if n > 1e-8 {
                return v.iter().map(|z| z / n).collect();
            }
        }
    }

    /// d x k matrix with orthonormal columns, Haar-distributed.
    pub fn orthonormal_frame(&mut self, d: usize, k: usize) -> CMatrix {
        let tol = Tolerance::default();
        loop {
            let g = self.gaussian_matrix(d, k);
            // a Gaussian matrix is rank-deficient with probability zero
            if let Ok(q) = orthonormalize(&g, &tol) {
                return q;
            }
        }
    }

    pub fn subspace(&mut self, d: usize, n: usize) -> Result<Subspace> {
        check_dims(d, n)?;
        Ok(Subspace::from_orthonormal(self.orthonormal_frame(d, n)))
    }

    pub fn line(&mut self, d: usize) -> Result<Subspace> {
        self.subspace(d, 1)
    }

    pub fn unitary(&mut self, d: usize, conjugation: Conjugation) -> Result<IsometryMap> {
        self.isometry(d, d, conjugation)
    }

    /// Isometry `C^d -> C^{d_out}`.
    pub fn isometry(
        &mut self,
        d: usize,
        d_out: usize,
        conjugation: Conjugation,
    ) -> Result<IsometryMap> {
        if d == 0 || d > d_out {
            return Err(Error::DimensionMismatch(format!(
                "no isometry from C^{d} into C^{d_out}"
            )));
        }
        let m = self.orthonormal_frame(d_out, d);
        let conjugate = match conjugation {
            Conjugation::Linear => false,
            Conjugation::Conjugate => true,
            Conjugation::Coin => self.rng.random_bool(0.5),
        };
        IsometryMap::new(m, conjugate, &Tolerance::default())
    }
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if n == 0 || n > d {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {n} must lie in 1..={d}"
        )));
    }
    Ok(())
}

/// Haar-random n-dimensional subspace of C^d.
pub fn random_subspace(seed: Seed, d: usize, n: usize) -> Result<Subspace> {
    seed.sampler().subspace(d, n)
}

/// Haar-random unitary of C^d.
pub fn random_unitary(seed: Seed, d: usize, conjugation: Conjugation) -> Result<IsometryMap> {
    seed.sampler().unitary(d, conjugation)
}

/// Haar-random isometry `C^d -> C^{d_out}`.
pub fn random_isometry(
    seed: Seed,
    d: usize,
    d_out: usize,
    conjugation: Conjugation,
) -> Result<IsometryMap> {
    seed.sampler().isometry(d, d_out, conjugation)
}

/// Rank-n projections `R_1, ..., R_{k_max}` converging to `p`.
///
/// `R_k` is the span of `B + 2^{-k} G` where `B` is an orthonormal basis of
/// the range of `p` and `G` a fixed Gaussian direction with `B^H G = 0`
/// scaled to unit Frobenius norm. The tangents of the angles to `p` are
/// `2^{-k}` times the singular values of `G`, so `gap(R_k, p) < 2^{-k}` and
/// the gaps decrease strictly.
pub fn converging_sequence(seed: Seed, p: &Projection, k_max: u32) -> Result<Vec<Projection>> {
    let range = p.range().ok_or(Error::ZeroProjection)?;
    let (d, n) = (range.ambient_dim(), range.dim());
    if n == d {
        // the full space is isolated in its Grassmannian
        return Ok((0..k_max).map(|_| p.clone()).collect());
    }
    let mut sampler = seed.sampler();
    let b = range.basis();
    let tol = Tolerance::default();
    let dir = loop {
        let g = sampler.gaussian_matrix(d, n);
        let g = &g - &(b * &(&b.adjoint() * &g));
        let f = g.frobenius_norm();
        if f > 1e-6 {
            break g.scale_real(1.0 / f);
        }
    };
    (1..=k_max)
        .map(|k| {
            let step = 0.5f64.powi(k as i32);
            let m = b + &dir.scale_real(step);
            Ok(Subspace::span(&m, &tol)?.to_projection())
        })
        .collect()
}
