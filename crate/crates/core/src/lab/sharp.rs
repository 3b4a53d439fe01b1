//! 1-orthogonal (sharp) pairs and triples, and the check that a map
//! carries sharp triples through a common line to sharp triples through a
//! common line.

use std::f64::consts::FRAC_PI_2;

use serde_json::json;

use crate::error::{Error, Result};
use crate::grassmann::{angle_between_lines, principal_angles_general, Subspace};
use crate::maps::{GrassmannMap, SubspaceMap};
use crate::numerics::{axpy, dot, norm, orthonormalize, CMatrix, Tolerance, C64};
use crate::report::Report;
use crate::sampling::{Sampler, Seed};

/// Completes a unit vector to an orthonormal frame of `count` vectors by
/// Gram-Schmidt on the standard basis, least aligned coordinates first.
/// The first column is `x` itself.
pub fn complete_frame(x: &[C64], count: usize) -> Result<CMatrix> {
    let d = x.len();
    if count > d {
        return Err(Error::Regime(format!("cannot fit {count} orthonormal vectors in C^{d}")));
    }
    let nx = norm(x);
    if (nx - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit { norm: nx });
    }
    let mut frame = vec![x.to_vec()];
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| x[i].norm().total_cmp(&x[j].norm()));
    for &i in &order {
        if frame.len() == count {
            break;
        }
        let mut w = CMatrix::basis_vector(d, i);
        for _ in 0..2 {
            for f in &frame {
                let h = dot(f, &w);
                axpy(-h, f, &mut w);
            }
        }
        let nw = norm(&w);
        if nw > 1e-3 {
            frame.push(w.iter().map(|z| z / nw).collect());
        }
    }
    CMatrix::from_columns(d, &frame)
}

fn check_sharp_regime(n: usize, d: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Regime("1-orthogonal pairs need n >= 2".into()));
    }
    if d < 2 * n - 1 {
        return Err(Error::Regime(format!(
            "1-orthogonal pairs of dimension {n} need d >= {}, got {d}",
            2 * n - 1
        )));
    }
    Ok(())
}

fn split_pair(frame: &CMatrix, n: usize) -> (Subspace, Subspace) {
    let u: Vec<usize> = (0..n).collect();
    let v: Vec<usize> = std::iter::once(0).chain(n..2 * n - 1).collect();
    (
        Subspace::from_orthonormal(frame.select_columns(&u)),
        Subspace::from_orthonormal(frame.select_columns(&v)),
    )
}

/// `U = [x, f_1..f_{n-1}]`, `V = [x, f_n..f_{2n-2}]` from the deterministic
/// completion of `x`; `U ∩ V = [x]` and the rest of U is orthogonal to the rest of V.
pub fn find_sharp_pair(x: &[C64], n: usize, d: usize) -> Result<(Subspace, Subspace)> {
    check_sharp_regime(n, d)?;
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!("vector has length {}, expected {d}", x.len())));
    }
    Ok(split_pair(&complete_frame(x, 2 * n - 1)?, n))
}

/// Same as [`find_sharp_pair`] with a Haar-random completion of `x`.
pub fn random_sharp_pair<R: rand::Rng>(
    x: &[C64],
    n: usize,
    sampler: &mut Sampler<R>,
) -> Result<(Subspace, Subspace)> {
    let d = x.len();
    check_sharp_regime(n, d)?;
    let tol = Tolerance::default();
    let rest = loop {
        let g = sampler.gaussian_matrix(d, 2 * n - 2);
        let xm = CMatrix::column_vector(x);
        let g = &g - &(&xm * &(&xm.adjoint() * &g));
        if let Ok(q) = orthonormalize(&g, &tol) {
            break q;
        }
    };
    let frame = CMatrix::column_vector(x).hstack(&rest)?;
    Ok(split_pair(&frame, n))
}

/// Distance of a pair from being 1-orthogonal: its principal angles should
/// be `0, pi/2, ..., pi/2`. Subspaces of unequal dimension score `pi/2`.
pub fn sharp_residual(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.dim() != b.dim() || a.dim() < 2 {
        return Ok(FRAC_PI_2);
    }
    let pa = principal_angles_general(a, b)?;
    let first = pa.angles[0];
    let rest = pa.angles[1..]
        .iter()
        .map(|t| (FRAC_PI_2 - t).abs())
        .fold(0.0, f64::max);
    Ok(first.max(rest))
}

/// Unit vector spanning the (numerically) common line of a nearly sharp pair.
fn common_line(a: &Subspace, b: &Subspace) -> Result<Vec<C64>> {
    Ok(principal_angles_general(a, b)?.left_frame.col(0))
}

/// `U, V, W` pairwise 1-orthogonal through the common line `[e]`, with the
/// auxiliary pairwise orthogonal family `L ∋ e`, `M_j ∋ f_j`, `M'_j ∋ f'_j`,
/// `M''_j ∋ f''_j` used to pin down the images.
#[derive(Debug, Clone)]
pub struct SharpConfiguration {
    pub e: Vec<C64>,
    pub u: Subspace,
    pub v: Subspace,
    pub w: Subspace,
    /// `L` first, then the `M` family of U, of V, of W, each of length n - 1.
    pub aux: Vec<Subspace>,
}

impl SharpConfiguration {
    pub fn subspaces(&self) -> Vec<&Subspace> {
        [&self.u, &self.v, &self.w].into_iter().chain(&self.aux).collect()
    }
}

/// Ambient dimension needed to fit a configuration: `3n - 2` pairwise
/// orthogonal n-dimensional auxiliary subspaces.
pub fn sharp_configuration_dim(n: usize) -> usize {
    n * (3 * n - 2)
}

pub fn sharp_configurations(seed: Seed, n: usize, d: usize, count: usize) -> Result<Vec<SharpConfiguration>> {
    check_sharp_regime(n, d)?;
    let need = sharp_configuration_dim(n);
    if d < need {
        return Err(Error::Regime(format!(
            "sharp configurations with n = {n} need d >= {need}, got {d}"
        )));
    }
    let k = 3 * n - 2;
    (0..count)
        .map(|i| {
            let q = seed.trial(i as u64).orthonormal_frame(d, need);
            let span = |cols: Vec<usize>| Subspace::from_orthonormal(q.select_columns(&cols));
            let with_e = |start: usize| span(std::iter::once(0).chain(start..start + n - 1).collect());
            let aux = (0..k)
                .map(|j| span(std::iter::once(j).chain(k + j * (n - 1)..k + (j + 1) * (n - 1)).collect()))
                .collect();
            Ok(SharpConfiguration {
                e: q.col(0),
                u: with_e(1),
                v: with_e(n),
                w: with_e(2 * n - 1),
                aux,
            })
        })
        .collect()
}

/// Checks on `trials` sampled configurations that the images of a sharp
/// triple through a common line are again pairwise sharp and share one line.
/// The auxiliary family is used to check the intermediate steps: images of
/// the orthogonal family stay orthogonal, and each image meets the images of
/// its auxiliary subspaces.
pub fn check_sharp_propagation(phi: &dyn SubspaceMap, trials: usize, seed: Seed, tol: &Tolerance) -> Result<Report> {
    let (d, n) = phi.domain();
    let configs = sharp_configurations(seed, n, d, trials)?;
    let mut report = Report::new(
        "sharp-propagation",
        seed,
        "U, V, W pairwise 1-orthogonal with a common line map to pairwise 1-orthogonal images with a common line",
    );
    let threshold = tol.eps_angle;
    let (mut hyp_max, mut aux_max, mut sharp_max, mut line_max) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for (t, cfg) in configs.iter().enumerate() {
        let t = t as u64;
        // inputs satisfy the hypotheses by construction; verify anyway
        let mut hyp = 0.0f64;
        for (a, b) in [(&cfg.u, &cfg.v), (&cfg.u, &cfg.w), (&cfg.v, &cfg.w)] {
            hyp = hyp.max(sharp_residual(a, b)?);
            hyp = hyp.max(angle_between_lines(&common_line(a, b)?, &cfg.e, 1e-8)?);
        }
        hyp_max = hyp_max.max(hyp);
        report.observe(t, hyp, threshold, || "input triple is not sharp through a common line".into());

        let img: Vec<Subspace> = cfg
            .subspaces()
            .into_iter()
            .map(|s| phi.apply(s, tol))
            .collect::<Result<_>>()?;
        let (fu, fv, fw, faux) = (&img[0], &img[1], &img[2], &img[3..]);

        let mut aux = 0.0f64;
        for i in 0..faux.len() {
            for j in i + 1..faux.len() {
                let ma = principal_angles_general(&faux[i], &faux[j])?.min();
                aux = aux.max(FRAC_PI_2 - ma);
            }
        }
        // U meets L and M_j; V meets L and M'_j; W meets L and M''_j
        let k = n - 1;
        for (which, image) in [fu, fv, fw].into_iter().enumerate() {
            let own = std::iter::once(0).chain(1 + which * k..1 + (which + 1) * k);
            for a in own {
                aux = aux.max(principal_angles_general(image, &faux[a])?.min());
            }
        }
        aux_max = aux_max.max(aux);
        report.observe(t, aux, threshold, || "auxiliary family: orthogonality or intersection lost".into());

        let mut sharp = 0.0f64;
        for (a, b) in [(fu, fv), (fu, fw), (fv, fw)] {
            sharp = sharp.max(sharp_residual(a, b)?);
        }
        sharp_max = sharp_max.max(sharp);

        let line = if sharp < FRAC_PI_2 {
            let l_uv = common_line(fu, fv)?;
            let l_uw = common_line(fu, fw)?;
            let l_vw = common_line(fv, fw)?;
            angle_between_lines(&l_uv, &l_uw, 1e-8)?.max(angle_between_lines(&l_uv, &l_vw, 1e-8)?)
        } else {
            FRAC_PI_2
        };
        line_max = line_max.max(line);

        report.record(t, sharp, threshold, || format!("images not pairwise 1-orthogonal (residual {sharp:.3e})"));
        report.observe(t, line, threshold, || format!("image intersections differ by {line:.3e} rad"));
    }
    Ok(report.with_details(json!({
        "n": n,
        "d": d,
        "hypothesis_residual": hyp_max,
        "auxiliary_residual": aux_max,
        "sharp_residual": sharp_max,
        "common_line_residual": line_max,
    })))
}

/// Table map on the first configuration for `seed` that is the identity
/// except on `W`, which it sends to a subspace meeting `U` trivially. It
/// breaks the intersection hypothesis, so the propagation check must fail.
pub fn negative_control_table(seed: Seed, n: usize, d: usize) -> Result<GrassmannMap> {
    let cfg = sharp_configurations(seed, n, d, 1)?.remove(0);
    // second basis vector of L is orthogonal to everything in U, V and W
    let g = cfg.aux[0].basis().col(1);
    let mut cols = vec![g];
    cols.extend((1..n).map(|j| cfg.w.basis().col(j)));
    let broken = Subspace::span_of(&cols, &Tolerance::default())?;
    let mut pairs: Vec<(Subspace, Subspace)> = cfg.subspaces().into_iter().map(|s| (s.clone(), s.clone())).collect();
    pairs[2].1 = broken;
    GrassmannMap::table(pairs)
}
