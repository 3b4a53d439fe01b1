use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grassmann_core::grassmann::{gap_distance_subspaces, principal_angles_general, trace_product_subspaces, Subspace};
use grassmann_core::lab::{
    certificate_complement_not_standard, certificate_degenerate_regime, certificate_two_by_two, run_suite,
    Certificate, Suite, SuiteConfig,
};
use grassmann_core::numerics::{CMatrix, Tolerance};
use grassmann_core::report::Report;
use grassmann_core::sampling::{Seed, SEED_ENV};

#[derive(Parser, Debug)]
#[command(name = "grassmann", version, about = "Principal angles and minimal-angle preserver checks on complex Grassmann spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal angles, minimal angle, gap and tr(PQ) of two subspaces read from JSON files.
    Angles { a: PathBuf, b: PathBuf },
    /// Run a property suite: oracle, svd-law, formulas, direct-sum, maps,
    /// recover, sharp-propagation, continuity, nonstandard, degenerate.
    Check { suite: String },
    /// Produce and validate a certificate or demonstration.
    Demo { name: DemoName },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum DemoName {
    Nonstandard,
    Degenerate,
    TwoByTwo,
    ComplementCert,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Options {
    /// Seed for every random draw.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Ambient dimension (per block for direct-sum).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    d: Option<u64>,
    /// Subspace dimension.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Number of diagonal blocks for direct-sum.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n_blocks: u64,
    /// Number of trials; each suite has its own default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long, global = true, value_parser = parse_eps)]
    eps_angle: Option<f64>,
    #[arg(long, global = true, value_parser = parse_eps)]
    eps_rank: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_eps(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1e-3 {
        Ok(v)
    } else {
        Err(format!("{v} must lie in (0, 1e-3)"))
    }
}

impl Options {
    fn tolerance(&self) -> Result<Tolerance> {
        let mut tol = Tolerance::default();
        if let Some(e) = self.eps_angle {
            tol = tol.with_eps_angle(e)?;
        }
        if let Some(e) = self.eps_rank {
            tol = tol.with_eps_rank(e)?;
        }
        Ok(tol)
    }

    fn suite_config(&self, suite: Suite) -> Result<SuiteConfig> {
        let trials = self.trials.map_or(suite.default_trials(), |t| t as usize);
        let mut cfg = SuiteConfig::new(Seed(self.seed), trials)
            .with_dims(self.d.map(|d| d as usize), self.n.map(|n| n as usize));
        cfg.n_blocks = self.n_blocks as usize;
        cfg.tol = self.tolerance()?;
        Ok(cfg)
    }
}

/// Rendered output plus whether the command succeeded.
struct Output {
    value: Value,
    text: String,
    pass: bool,
}

fn read_subspace(path: &Path, tol: &Tolerance) -> Result<Subspace> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    if v.get("basis").is_some() {
        Ok(serde_json::from_value(v).with_context(|| format!("{} is not a valid subspace", path.display()))?)
    } else {
        let m: CMatrix =
            serde_json::from_value(v).with_context(|| format!("{} is neither a subspace nor a matrix", path.display()))?;
        Ok(Subspace::span(&m, tol).with_context(|| format!("columns of {} do not span a subspace", path.display()))?)
    }
}

fn cmd_angles(a: &Path, b: &Path, opts: &Options) -> Result<Output> {
    let tol = opts.tolerance()?;
    let s = read_subspace(a, &tol)?;
    let t = read_subspace(b, &tol)?;
    if s.ambient_dim() != t.ambient_dim() {
        bail!("ambient dimensions differ: {} vs {}", s.ambient_dim(), t.ambient_dim());
    }
    let pa = principal_angles_general(&s, &t)?;
    let gap = gap_distance_subspaces(&s, &t)?;
    let tr = trace_product_subspaces(&s, &t)?;
    let value = json!({
        "ambient_dim": s.ambient_dim(),
        "dims": [s.dim(), t.dim()],
        "angles": pa.angles,
        "min_angle": pa.min(),
        "gap": gap,
        "trace_product": tr,
    });
    let text = format!(
        "angles: {}\nminimal angle: {:.12}\ngap: {:.12}\ntr(PQ): {:.12}\n",
        pa.angles.iter().map(|a| format!("{a:.12}")).collect::<Vec<_>>().join(" "),
        pa.min(),
        gap,
        tr
    );
    Ok(Output { value, text, pass: true })
}

fn report_output(r: Report) -> Result<Output> {
    Ok(Output {
        text: r.to_text(),
        pass: r.pass,
        value: serde_json::to_value(&r)?,
    })
}

fn cmd_check(name: &str, opts: &Options) -> Result<Output> {
    let Some(suite) = Suite::from_name(name) else {
        let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        bail!("unknown suite {name:?}; known suites: {}", known.join(", "));
    };
    report_output(run_suite(suite, &opts.suite_config(suite)?)?)
}

fn certificate_text(c: &Certificate, valid: bool) -> String {
    let head = format!("{}: {}\n", c.kind(), if valid { "VALID" } else { "INVALID" });
    let body = match c {
        Certificate::ComplementNotStandard {
            n,
            min_singular_value_a,
            eigenvector_residual,
            min_singular_value_i_minus_a,
            ..
        } => format!(
            "  n = {n}\n  smallest singular value of A: {min_singular_value_a}\n  ||(A - I) e1||: {eigenvector_residual}\n  smallest singular value of I - A: {min_singular_value_i_minus_a}\n"
        ),
        Certificate::TwoByTwoIdentity { points, max_residual, .. } => {
            format!("  {} grid points, max residual {max_residual:.3e}\n", points.len())
        }
        Certificate::DegenerateRegime {
            n,
            d,
            samples,
            max_min_angle,
            min_intersection_dim,
            ..
        } => format!(
            "  n = {n}, d = {d}, {samples} pairs\n  largest minimal angle: {max_min_angle:.3e}\n  smallest intersection dimension: {min_intersection_dim}\n"
        ),
    };
    head + &body
}

fn cmd_demo(name: DemoName, opts: &Options) -> Result<Output> {
    let tol = opts.tolerance()?;
    let cert = match name {
        DemoName::Nonstandard => {
            return report_output(run_suite(Suite::Nonstandard, &opts.suite_config(Suite::Nonstandard)?)?)
        }
        DemoName::Degenerate => {
            let n = opts.n.unwrap_or(2) as usize;
            let d = opts.d.map_or(n + 1, |d| d as usize);
            let samples = opts.trials.unwrap_or(1000) as usize;
            certificate_degenerate_regime(n, d, Seed(opts.seed), samples, &tol)?
        }
        DemoName::TwoByTwo => certificate_two_by_two()?,
        DemoName::ComplementCert => certificate_complement_not_standard(opts.n.unwrap_or(2) as usize)?,
    };
    let valid = cert.validate(&tol).is_ok();
    Ok(Output {
        text: certificate_text(&cert, valid),
        value: json!({"valid": valid, "certificate": cert}),
        pass: valid,
    })
}

fn emit(out: &Output, opts: &Options) -> Result<()> {
    let rendered = match opts.format {
        Format::Json => serde_json::to_string_pretty(&out.value)? + "\n",
        Format::Text => out.text.clone(),
    };
    match &opts.out {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Angles { a, b } => cmd_angles(a, b, &cli.opts),
        Command::Check { suite } => cmd_check(suite, &cli.opts),
        Command::Demo { name } => cmd_demo(*name, &cli.opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&out, &cli.opts).map(|_| out.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
