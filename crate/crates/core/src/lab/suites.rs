//! Named property suites. Each produces one [`Report`]; the command-line
//! front end and the acceptance tests both call through here.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::Rng;
use serde_json::json;

use super::certificates::{certificate_degenerate_regime, Certificate};
use super::nonstandard::find_nonmonotonicity_witness;
use super::recovery::{fix_global_phase, verify_preserver, Branch};
use super::sharp::{check_sharp_propagation, negative_control_table};
use crate::error::{Error, Result};
use crate::grassmann::{
    direct_sum, gap_distance, min_angle, min_angle_subspaces, principal_angles, principal_angles_oracle,
    trace_product, Projection,
};
use crate::maps::{apply_isometry, apply_map, construct_nonstandard_demo, GrassmannMap, Selector};
use crate::numerics::{singular_values, Tolerance};
use crate::report::Report;
use crate::sampling::{converging_sequence, Conjugation, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    SvdLaw,
    Formulas,
    DirectSum,
    Maps,
    Recover,
    SharpPropagation,
    Continuity,
    Nonstandard,
    Degenerate,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Oracle,
        Suite::SvdLaw,
        Suite::Formulas,
        Suite::DirectSum,
        Suite::Maps,
        Suite::Recover,
        Suite::SharpPropagation,
        Suite::Continuity,
        Suite::Nonstandard,
        Suite::Degenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::SvdLaw => "svd-law",
            Suite::Formulas => "formulas",
            Suite::DirectSum => "direct-sum",
            Suite::Maps => "maps",
            Suite::Recover => "recover",
            Suite::SharpPropagation => "sharp-propagation",
            Suite::Continuity => "continuity",
            Suite::Nonstandard => "nonstandard",
            Suite::Degenerate => "degenerate",
        }
    }

    /// Accepts the canonical names plus short aliases.
    pub fn from_name(name: &str) -> Option<Suite> {
        let s = name.to_ascii_lowercase().replace('_', "-");
        Some(match s.as_str() {
            "oracle" | "angles" => Suite::Oracle,
            "svd-law" | "svlaw" | "singular-values" => Suite::SvdLaw,
            "formulas" => Suite::Formulas,
            "direct-sum" | "lemma21" => Suite::DirectSum,
            "maps" | "standard" => Suite::Maps,
            "recover" | "recovery" => Suite::Recover,
            "sharp-propagation" | "sharp" | "lemma22" => Suite::SharpPropagation,
            "continuity" => Suite::Continuity,
            "nonstandard" => Suite::Nonstandard,
            "degenerate" => Suite::Degenerate,
            _ => return None,
        })
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Oracle | Suite::SvdLaw | Suite::Formulas | Suite::DirectSum | Suite::Degenerate => 1000,
            Suite::Maps | Suite::Nonstandard => 500,
            Suite::Recover => 4,
            Suite::SharpPropagation => 200,
            Suite::Continuity => 50,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: Seed,
    /// Ambient dimension; per-block dimension for the direct-sum suite.
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub n_blocks: usize,
    pub trials: usize,
    pub tol: Tolerance,
}

impl SuiteConfig {
    pub fn new(seed: Seed, trials: usize) -> Self {
        SuiteConfig {
            seed,
            d: None,
            n: None,
            n_blocks: 2,
            trials,
            tol: Tolerance::default(),
        }
    }

    pub fn with_dims(mut self, d: Option<usize>, n: Option<usize>) -> Self {
        self.d = d;
        self.n = n;
        self
    }

    /// `(d, n)` for a trial: the configured values, or a random draw with
    /// `n <= 3` and `d <= 8`.
    fn dims_for<R: Rng>(&self, rng: &mut R) -> Result<(usize, usize)> {
        let (d, n) = match (self.d, self.n) {
            (Some(d), Some(n)) => (d, n),
            (Some(d), None) => (d, rng.random_range(1..=d.min(3))),
            (None, Some(n)) => (rng.random_range(n..=n.max(8)), n),
            (None, None) => {
                let n = rng.random_range(1..=3);
                (rng.random_range(n..=8), n)
            }
        };
        check_dims(d, n)?;
        Ok((d, n))
    }
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if n == 0 || n > d {
        return Err(Error::DimensionMismatch(format!("need 1 <= n <= d, got n = {n}, d = {d}")));
    }
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    cfg.tol.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    match suite {
        Suite::Oracle => oracle(cfg),
        Suite::SvdLaw => svd_law(cfg),
        Suite::Formulas => formulas(cfg),
        Suite::DirectSum => direct_sum_suite(cfg),
        Suite::Maps => maps(cfg),
        Suite::Recover => recover(cfg),
        Suite::SharpPropagation => sharp(cfg),
        Suite::Continuity => continuity(cfg),
        Suite::Nonstandard => nonstandard(cfg),
        Suite::Degenerate => degenerate(cfg),
    }
}

fn oracle(cfg: &SuiteConfig) -> Result<Report> {
    let mut r = Report::new(
        Suite::Oracle.name(),
        cfg.seed,
        "principal angles from the SVD agree with the recursive max-overlap definition",
    );
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let (d, n) = cfg.dims_for(smp.rng())?;
        let (s, q) = (smp.subspace(d, n)?, smp.subspace(d, n)?);
        let a = principal_angles(&s, &q)?.angles;
        let b = principal_angles_oracle(&s, &q)?.angles;
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r.record(t, diff, 1e-8, || format!("d = {d}, n = {n}: {a:?} vs {b:?}"));
    }
    Ok(r)
}

/// Expected spectrum of `P - Q`: each sine twice, padded with zeros to length d.
fn doubled_sines(angles: &[f64], d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = angles.iter().flat_map(|t| [t.sin(), t.sin()]).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(d, 0.0);
    v
}

fn svd_law(cfg: &SuiteConfig) -> Result<Report> {
    let mut r = Report::new(
        Suite::SvdLaw.name(),
        cfg.seed,
        "nonzero singular values of P - Q are the sines of the nonzero principal angles, each twice",
    );
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let (d, n) = cfg.dims_for(smp.rng())?;
        let (s, q) = (smp.subspace(d, n)?, smp.subspace(d, n)?);
        let angles = principal_angles(&s, &q)?.angles;
        let diff = &s.projection_matrix() - &q.projection_matrix();
        let sv = singular_values(&diff)?;
        let expected = doubled_sines(&angles, d);
        let dev = sv.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r.record(t, dev, 1e-8, || format!("d = {d}, n = {n}: {sv:?} vs {expected:?}"));
    }
    Ok(r)
}

fn formulas(cfg: &SuiteConfig) -> Result<Report> {
    let mut r = Report::new(
        Suite::Formulas.name(),
        cfg.seed,
        "gap = sine of the largest angle; tr(PQ) = sum of squared cosines; for lines gap = sqrt(1 - tr(PQ))",
    );
    let (mut g_max, mut t_max, mut l_max) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let (d, n) = cfg.dims_for(smp.rng())?;
        let (s, q) = (smp.subspace(d, n)?, smp.subspace(d, n)?);
        let (p, qq) = (s.to_projection(), q.to_projection());
        let pa = principal_angles(&s, &q)?;
        let gap = gap_distance(&p, &qq)?;
        let tr = trace_product(&p, &qq)?;
        let e_gap = (gap - pa.max().sin()).abs();
        let e_tr = (tr - pa.angles.iter().map(|a| a.cos().powi(2)).sum::<f64>()).abs();

        let (x, y) = (smp.line(d.max(2))?, smp.line(d.max(2))?);
        let (px, py) = (x.to_projection(), y.to_projection());
        let e_line = (gap_distance(&px, &py)? - (1.0 - trace_product(&px, &py)?).max(0.0).sqrt()).abs();

        g_max = g_max.max(e_gap);
        t_max = t_max.max(e_tr);
        l_max = l_max.max(e_line);
        r.record(t, e_gap.max(e_tr).max(e_line), 1e-8, || {
            format!("d = {d}, n = {n}: gap {e_gap:.2e}, trace {e_tr:.2e}, rank-one {e_line:.2e}")
        });
    }
    Ok(r.with_details(json!({"gap": g_max, "trace": t_max, "rank_one": l_max})))
}

fn direct_sum_suite(cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.d.unwrap_or(3);
    if d == 0 || cfg.n_blocks == 0 {
        return Err(Error::DimensionMismatch("need d >= 1 and at least one block".into()));
    }
    let mut r = Report::new(
        Suite::DirectSum.name(),
        cfg.seed,
        "minimal angle of block-diagonal sums is the minimum over the blocks, for any block ranks",
    );
    let mut unequal = 0u64;
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let mut ps: Vec<Projection> = Vec::new();
        let mut qs: Vec<Projection> = Vec::new();
        for _ in 0..cfg.n_blocks {
            let rp = cfg.n.unwrap_or_else(|| smp.rng().random_range(1..=d)).min(d);
            let rq = smp.rng().random_range(1..=d);
            unequal += u64::from(rp != rq);
            ps.push(smp.subspace(d, rp)?.to_projection());
            qs.push(smp.subspace(d, rq)?.to_projection());
        }
        let mut block_min = f64::INFINITY;
        for (p, q) in ps.iter().zip(&qs) {
            block_min = block_min.min(min_angle(p, q)?);
        }
        let sum_p = ps[1..].iter().fold(ps[0].clone(), |acc, p| direct_sum(&acc, p));
        let sum_q = qs[1..].iter().fold(qs[0].clone(), |acc, q| direct_sum(&acc, q));
        let whole = min_angle(&sum_p, &sum_q)?;
        let diff = (whole - block_min).abs();
        r.record(t, diff, 1e-7, || format!("ma of sum {whole} vs block minimum {block_min}"));
    }
    Ok(r.with_details(json!({"d_block": d, "n_blocks": cfg.n_blocks, "unequal_rank_blocks": unequal})))
}

fn maps(cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.d.unwrap_or(5);
    let n = cfg.n.unwrap_or(2);
    check_dims(d, n)?;
    let mut r = Report::new(
        Suite::Maps.name(),
        cfg.seed,
        "standard maps preserve all principal angles; complement maps at d = 2n preserve the minimal angle",
    );
    let (mut std_max, mut comp_max) = (0.0f64, 0.0f64);
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let u = smp.isometry(d, d + (t as usize % 3), Conjugation::Coin)?;
        let (s, q) = (smp.subspace(d, n)?, smp.subspace(d, n)?);
        let before = principal_angles(&s, &q)?.angles;
        let after = principal_angles(&apply_isometry(&u, &s)?, &apply_isometry(&u, &q)?)?.angles;
        let e_std = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std_max = std_max.max(e_std);
        r.record(t, e_std, 1e-8, || format!("principal angles moved by {e_std:.3e}"));

        let v = smp.unitary(2 * n, Conjugation::Coin)?;
        let phi = GrassmannMap::complement_standard(v, n)?;
        let (a, b) = (smp.subspace(2 * n, n)?, smp.subspace(2 * n, n)?);
        let ma0 = min_angle_subspaces(&a, &b)?;
        let ma1 = min_angle_subspaces(&apply_map(&phi, &a, &cfg.tol)?, &apply_map(&phi, &b, &cfg.tol)?)?;
        let e_comp = (ma0 - ma1).abs();
        comp_max = comp_max.max(e_comp);
        r.observe(t, e_comp, 1e-7, || format!("complement map moved the minimal angle by {e_comp:.3e}"));
    }
    Ok(r.with_details(json!({"d": d, "n": n, "standard": std_max, "complement": comp_max})))
}

fn recover(cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.d.unwrap_or(6);
    let n = cfg.n.unwrap_or(2);
    check_dims(d, n)?;
    let mut r = Report::new(
        Suite::Recover.name(),
        cfg.seed,
        "a minimal-angle preserver is recovered as S -> U S (or U S^perp at d = 2n) with the right conjugation",
    );
    let samples = 30;
    let mut runs = Vec::new();
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let flag = if t % 2 == 0 { Conjugation::Linear } else { Conjugation::Conjugate };
        let u0 = smp.isometry(d, d + (t as usize / 2) % 2, flag)?;
        let phi = GrassmannMap::standard(u0.clone(), n)?;
        let mut cases = vec![(phi, u0, Branch::Standard)];
        if d == 2 * n && n >= 2 {
            let v0 = smp.unitary(d, Conjugation::Coin)?;
            cases.push((GrassmannMap::complement_standard(v0.clone(), n)?, v0, Branch::Complement));
        }
        for (k, (phi, u0, branch)) in cases.into_iter().enumerate() {
            match verify_preserver(&phi, samples, cfg.seed.derive(2 * t + k as u64), &cfg.tol) {
                Ok(res) => {
                    let cols = (res.isometry.matrix() - &fix_global_phase(u0.matrix())).max_abs();
                    let worst = res.max_residual.max(cols);
                    r.record(t, worst, 1e-7, || format!("{branch:?} map: residual {:.3e}, columns {cols:.3e}", res.max_residual));
                    if res.branch != branch {
                        r.fail(t, res.max_residual, format!("classified as {:?}, expected {branch:?}", res.branch));
                    }
                    if res.isometry.is_conjugate() != u0.is_conjugate() {
                        r.fail(t, res.max_residual, "conjugation flag not recovered");
                    }
                    runs.push(json!({
                        "trial": t,
                        "expected_branch": branch,
                        "branch": res.branch,
                        "conjugate": res.isometry.is_conjugate(),
                        "max_residual": res.max_residual,
                        "column_residual": cols,
                        "well_definedness": res.well_definedness,
                    }));
                }
                Err(e) => {
                    r.trials += 1;
                    r.fail(t, f64::INFINITY, format!("{branch:?} map: {e}"));
                }
            }
        }
    }
    Ok(r.with_details(json!({"d": d, "n": n, "runs": runs})))
}

fn sharp(cfg: &SuiteConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(2);
    let d = cfg.d.unwrap_or(20);
    check_dims(d, n)?;
    let u = cfg.seed.trial(u64::MAX).isometry(d, d + 1, Conjugation::Coin)?;
    let phi = GrassmannMap::standard(u, n)?;
    let mut r = check_sharp_propagation(&phi, cfg.trials, cfg.seed, &cfg.tol)?;
    let control = negative_control_table(cfg.seed, n, d)?;
    let control_report = check_sharp_propagation(&control, 1, cfg.seed, &cfg.tol)?;
    let rejected = !control_report.pass;
    if !rejected {
        r.fail(0, control_report.max_residual, "negative-control table map was not rejected");
    }
    if let Some(serde_json::Value::Object(m)) = r.details.as_mut() {
        m.insert("negative_control_rejected".into(), json!(rejected));
        m.insert("negative_control_residual".into(), json!(control_report.max_residual));
    }
    Ok(r)
}

fn continuity(cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.d.unwrap_or(5);
    let n = cfg.n.unwrap_or(2);
    check_dims(d, n)?;
    if n == d {
        return Err(Error::Regime("the complement of the full space is empty".into()));
    }
    let mut r = Report::new(
        Suite::Continuity.name(),
        cfg.seed,
        "along R_k -> P, pi/2 - ma(R_k, P^perp) <= 2 gap(R_k, P) once gap <= 0.1",
    );
    let mut constant = 0.0f64;
    for t in 0..cfg.trials as u64 {
        let s = cfg.seed.trial(t).subspace(d, n)?;
        let p = s.to_projection();
        let perp = s.orthogonal_complement(&cfg.tol)?.expect("n < d");
        let seq = converging_sequence(cfg.seed.derive(t), &p, 30)?;
        let mut excess = 0.0f64;
        for rk in &seq {
            let gap = gap_distance(rk, &p)?;
            if gap > 0.1 || gap == 0.0 {
                continue;
            }
            let defect = FRAC_PI_2 - min_angle_subspaces(rk.range().expect("rank n"), &perp)?;
            constant = constant.max(defect / gap);
            excess = excess.max(defect - 2.0 * gap);
        }
        r.record(t, excess.max(0.0), 0.0, || format!("defect exceeds 2 gap by {excess:.3e}"));
    }
    Ok(r.with_details(json!({"d": d, "n": n, "observed_constant": constant})))
}

fn nonstandard(cfg: &SuiteConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(2);
    let d = cfg.d.unwrap_or(4);
    check_dims(d, n)?;
    if n < 2 {
        return Err(Error::Regime("a proper nonzero selection needs n >= 2".into()));
    }
    let selector = Selector::Pivoted { rank: 1 };
    let phi = construct_nonstandard_demo(selector.clone(), n, d)?;
    let mut r = Report::new(
        Suite::Nonstandard.name(),
        cfg.seed,
        "S -> S + rho(S) with rho(S) <= S preserves the minimal angle, yet rho is not monotone",
    );
    for t in 0..cfg.trials as u64 {
        let mut smp = cfg.seed.trial(t);
        let (s, q) = (smp.subspace(d, n)?, smp.subspace(d, n)?);
        let ma0 = min_angle_subspaces(&s, &q)?;
        let ma1 = min_angle_subspaces(&apply_map(&phi, &s, &cfg.tol)?, &apply_map(&phi, &q, &cfg.tol)?)?;
        let e = (ma0 - ma1).abs();
        r.record(t, e, 1e-7, || format!("minimal angle moved by {e:.3e}"));
    }
    let witness = if n < d {
        find_nonmonotonicity_witness(&selector, n, d, cfg.seed.derive(0), 100, &cfg.tol)?
    } else {
        None
    };
    if witness.is_none() {
        r.fail(0, 0.0, "no non-monotonicity witness found");
    }
    Ok(r.with_details(json!({
        "map": phi.to_json()?,
        "witness": witness,
    })))
}

fn degenerate(cfg: &SuiteConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(2);
    let d = cfg.d.unwrap_or(n + 1);
    let cert = certificate_degenerate_regime(n, d, cfg.seed, cfg.trials, &cfg.tol);
    let mut r = Report::new(
        Suite::Degenerate.name(),
        cfg.seed,
        "for n + 1 <= d < 2n any two n-dimensional subspaces meet, so the minimal angle is always zero",
    );
    match cert {
        Ok(c) => {
            if let Certificate::DegenerateRegime { samples, max_min_angle, .. } = &c {
                r.trials = *samples as u64;
                r.max_residual = *max_min_angle;
            }
            Ok(r.with_details(serde_json::to_value(&c)?))
        }
        Err(Error::CertificateFailure(msg)) => {
            r.trials = cfg.trials as u64;
            r.fail(0, f64::INFINITY, msg);
            Ok(r)
        }
        Err(e) => Err(e),
    }
}
