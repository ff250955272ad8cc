//! `leray`: simulations, admissibility checks and estimate sweeps for the
//! generalized Leray-α equation on the periodic torus.
//!
//! Exit codes: 0 success, 1 config or runtime error, 2 blow-up detected,
//! 3 parameters not admissible or an estimate check failed.

mod load;
mod manifest;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use leray_core::besov::{build_filter_bank, norm_sweep, write_norm_csv, BesovParams};
use leray_core::checkpoint::{read_checkpoint, write_checkpoint};
use leray_core::multipliers::{
    kernel_samples, resolved_t_grid, single_mode_samples, sobolev_t_grid, verify_semigroup_lp_lq,
    verify_sobolev_smoothing, RateOptions,
};
use leray_core::random::random_scalar;
use leray_core::report::{write_reports_csv, write_reports_json};
use leray_core::solver::*;
use leray_core::symbol::GFamily;
use leray_core::{EstimateReport, LpExponent, SpectralVectorField, TorusGrid, DOMAIN_NOTE};

use load::{read_json, ConfigError};
use manifest::OutDir;
use suites::Suite;

const EXIT_ERROR: u8 = 1;
const EXIT_BLOWUP: u8 = 2;
const EXIT_REJECTED: u8 = 3;

#[derive(Parser)]
#[command(name = "leray", version = manifest::version(), about = "Generalized Leray-alpha solver and estimate checks")]
struct Cli {
    /// Worker threads for parameter sweeps.
    #[arg(long, env = "LERAY_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    A,
    B,
}

impl From<VariantArg> for TheoremVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::A => TheoremVariant::A,
            VariantArg::B => TheoremVariant::B,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a run config and write diagnostics, checkpoints and a manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the admissibility inequalities for a run config.
    CheckParams {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "a", ignore_case = true)]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one estimate-verification suite.
    Verify {
        /// One of semigroup, sobolev, kernel, mikhlin, products, embeddings, global, smoothing.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Besov norms of random samples or of a checkpointed field.
    BesovNorm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print version, conventions and registries.
    Info,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    let result = match cli.command {
        Command::Simulate { config, out, seed } => simulate(&config, &out, seed),
        Command::CheckParams { config, variant, out } => check_params(&config, variant.into(), out.as_deref()),
        Command::Verify {
            suite,
            config,
            out,
            seed,
        } => verify(&suite, &config, out.as_deref(), seed),
        Command::BesovNorm { config, out, seed } => besov(&config, out.as_deref(), seed),
        Command::Info => info(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn load_run(path: &Path, seed: Option<u64>) -> Result<SolverConfig> {
    let mut cfg: SolverConfig = read_json(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| ConfigError(e.to_string()))?;
    Ok(cfg)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    blew_up: bool,
    blowup_time: Option<f64>,
    steps: usize,
    samples: usize,
    advisories: &'a [String],
    admissibility: &'a AdmissibilityResult,
    x_norm: XNorm,
    global_regime: String,
    smoothing: &'a [SmoothingRow],
    domain: &'a str,
}

/// Rate checks of the run's `𝓛₁` on a grid refined to at least 128 modes
/// per axis.
fn rate_reports(cfg: &SolverConfig) -> Result<Vec<EstimateReport>> {
    let grid = TorusGrid::new(cfg.grid.dim, cfg.grid.modes.max(128), cfg.grid.length)?;
    let s = cfg.dissipation();
    let opts = RateOptions {
        log_eps: cfg.log_eps.max(0.1),
        ..RateOptions::default()
    };
    let mut scales = resolved_t_grid(&grid, s.gamma, 6)?;
    scales.push(10.0);
    let samples = kernel_samples(&grid, &s, &scales)?;
    let t = resolved_t_grid(&grid, s.gamma, 20)?;
    let mut out = vec![verify_semigroup_lp_lq(&s, cfg.p, LpExponent::INFINITY, &t, &samples, &opts)?];
    if cfg.s2 > cfg.s1 {
        let t = sobolev_t_grid(&grid, s.gamma, cfg.s2 - cfg.s1, 20)?;
        let two = LpExponent::new(2.0)?;
        out.push(verify_sobolev_smoothing(&s, cfg.s1, cfg.s2, two, &t, &single_mode_samples(&grid), &opts)?);
    }
    Ok(out)
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>) -> Result<u8> {
    let cfg = load_run(config, seed)?;
    let mut dir = OutDir::create(out, "simulate", Some(config))?;
    dir.set_seed(cfg.seed);
    let grid = cfg.torus()?;
    let kind = cfg.initial.clone().unwrap_or(InitialData::RandomDivfree {
        sigma: 1.0,
        amplitude: 1.0,
    });
    let u0 = make_initial_data(&kind, &grid, cfg.seed)?;
    dir.lap("setup");

    let traj = integrate(&u0, &cfg)?;
    dir.lap("integrate");

    let adm = check_admissibility(&cfg.admissibility_params(), TheoremVariant::A);
    let x_norm = monitor_x_norm(&traj, cfg.s1, cfg.s2, cfg.p, cfg.q, cfg.gamma1)?;
    let r_list: Vec<f64> = (0..=4).map(|i| cfg.s1 + 0.5 * i as f64).collect();
    let smoothing = smoothing_diagnostic(&traj, &r_list, cfg.s1, cfg.gamma1, cfg.p, cfg.q)?;
    let global = global_criterion_monitor(&cfg)?;
    dir.lap("monitors");

    dir.write("trajectory.csv", |w| Ok(write_trajectory_csv(w, &traj)?))?;
    dir.write("checkpoints/initial.bin", |w| Ok(write_checkpoint(w, &traj.samples[0].u)?))?;
    dir.write("checkpoints/final.bin", |w| Ok(write_checkpoint(w, &traj.last().u)?))?;
    let mut advisories = traj.advisories.clone();
    advisories.extend(global.advisories.iter().cloned());
    if traj.blew_up {
        advisories.push(format!(
            "blow-up at t={:?}; trajectory truncated after {} steps",
            traj.blowup_time, traj.steps
        ));
    }
    let summary = RunSummary {
        blew_up: traj.blew_up,
        blowup_time: traj.blowup_time,
        steps: traj.steps,
        samples: traj.samples.len(),
        advisories: &advisories,
        admissibility: &adm,
        x_norm,
        global_regime: global.regime.to_string(),
        smoothing: &smoothing,
        domain: DOMAIN_NOTE,
    };
    dir.write_json("summary.json", &summary)?;
    if cfg.rate_checks {
        let reports = rate_reports(&cfg)?;
        dir.write("reports.csv", |w| Ok(write_reports_csv(w, &reports)?))?;
        for r in &reports {
            println!("{}", r.summary());
        }
    }
    dir.lap("write");
    dir.finish()?;

    for a in &advisories {
        eprintln!("advisory: {a}");
    }
    let last = traj.last();
    println!(
        "t={} steps={} l2={:.6e} h_s1={:.6e} regime={}",
        last.t, traj.steps, last.diag.l2, last.diag.h_s1, global.regime
    );
    Ok(if traj.blew_up { EXIT_BLOWUP } else { 0 })
}

fn check_params(config: &Path, variant: TheoremVariant, out: Option<&Path>) -> Result<u8> {
    let cfg = load_run(config, None)?;
    let res = check_admissibility(&cfg.admissibility_params(), variant);
    print!("{}", res.table());
    if let Some(out) = out {
        let mut dir = OutDir::create(out, "check-params", Some(config))?;
        dir.write_json("admissibility.json", &res)?;
        dir.finish()?;
    }
    Ok(if res.admissible { 0 } else { EXIT_REJECTED })
}

fn verify(suite: &str, config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<u8> {
    let suite: Suite = suite.parse().map_err(ConfigError)?;
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let start = Instant::now();
    let reports = suites::run(suite, &text, seed).map_err(|e| match e.downcast::<ConfigError>() {
        Ok(c) => ConfigError(format!("{}: {}", config.display(), c.0)).into(),
        Err(e) => e,
    })?;
    for r in &reports {
        println!("{}", r.summary());
    }
    if let Some(out) = out {
        let mut dir = OutDir::create(out, "verify", Some(config))?;
        if let Some(s) = seed {
            dir.set_seed(s);
        }
        dir.lap("sweep");
        dir.write("reports.csv", |w| Ok(write_reports_csv(w, &reports)?))?;
        dir.write("reports.json", |w| Ok(write_reports_json(w, &reports)?))?;
        dir.finish()?;
    }
    eprintln!("{} rows in {:.2} s", reports.len(), start.elapsed().as_secs_f64());
    Ok(if suites::all_pass(&reports) { 0 } else { EXIT_REJECTED })
}

fn hundred() -> usize {
    100
}
fn sigma() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormConfig {
    grid: Option<GridSpec>,
    /// Read the field from a checkpoint instead of sampling.
    checkpoint: Option<PathBuf>,
    params: Vec<BesovParams>,
    #[serde(default = "hundred")]
    samples: usize,
    #[serde(default = "sigma")]
    sigma: f64,
    #[serde(default)]
    seed: u64,
}

fn besov(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<u8> {
    let cfg: NormConfig = read_json(config)?;
    let fields: Vec<SpectralVectorField> = match (&cfg.checkpoint, &cfg.grid) {
        (Some(path), _) => {
            let path = config.parent().unwrap_or(Path::new(".")).join(path);
            let file = std::fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            vec![read_checkpoint(std::io::BufReader::new(file))?]
        }
        (None, Some(spec)) => {
            let grid = spec.build().map_err(|e| ConfigError(format!("at `grid`: {e}")))?;
            let base = seed.unwrap_or(cfg.seed);
            (0..cfg.samples as u64)
                .map(|i| random_scalar(&grid, cfg.sigma, base.wrapping_add(i)))
                .collect()
        }
        (None, None) => return Err(ConfigError("need `grid` or `checkpoint`".into()).into()),
    };
    let bank = build_filter_bank(fields[0].grid())?;
    let rows = norm_sweep(&fields, &cfg.params, &bank)?;
    match out {
        Some(out) => {
            let mut dir = OutDir::create(out, "besov-norm", Some(config))?;
            dir.write("norms.csv", |w| Ok(write_norm_csv(w, &rows)?))?;
            dir.finish()?;
        }
        None => write_norm_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(0)
}

fn info() -> Result<u8> {
    let families = [
        GFamily::ConstantOne,
        GFamily::LogHalf,
        GFamily::MikhlinCustom {
            coefficients: vec![1.0],
        },
        GFamily::Power { eps: 0.5 },
    ];
    println!("leray {}", manifest::version());
    println!("domain: {DOMAIN_NOTE}");
    println!("fft: forward scaled by N^-n, frequencies in [-N/2, N/2), xi = k 2pi/L");
    println!("dealiasing: 2/3 rule on every physical-space product");
    println!(
        "g families: {}",
        families.iter().map(|g| g.id()).collect::<Vec<_>>().join(", ")
    );
    println!("suites: {}", suites::SUITES.join(", "));
    println!("threads: {}", rayon::current_num_threads());
    Ok(0)
}
