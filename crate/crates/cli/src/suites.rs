//! Parameter sweeps behind `leray verify`.

use std::str::FromStr;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Deserialize;

use leray_core::besov::{
    build_filter_bank, verify_embeddings, verify_product_est_chemin, verify_product_est_standard, EmbeddingPair,
    HolderSplit,
};
use leray_core::multipliers::*;
use leray_core::random::random_scalar;
use leray_core::report::ReportStatus;
use leray_core::solver::{integrate, make_initial_data, smoothing_diagnostic, GridSpec, InitialData, SolverConfig};
use leray_core::symbol::{log_grid, GFamily, SymbolSpec};
use leray_core::{EstimateReport, LpExponent, SpectralVectorField};

use crate::load::{parse_json, ConfigError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Semigroup,
    Sobolev,
    Kernel,
    Mikhlin,
    Products,
    Embeddings,
    Global,
    Smoothing,
}

pub const SUITES: [&str; 8] = [
    "semigroup",
    "sobolev",
    "kernel",
    "mikhlin",
    "products",
    "embeddings",
    "global",
    "smoothing",
];

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "semigroup" => Suite::Semigroup,
            "sobolev" => Suite::Sobolev,
            "kernel" => Suite::Kernel,
            "mikhlin" => Suite::Mikhlin,
            "products" => Suite::Products,
            "embeddings" => Suite::Embeddings,
            "global" => Suite::Global,
            "smoothing" => Suite::Smoothing,
            _ => return Err(format!("unknown suite `{s}` (expected one of {})", SUITES.join(", "))),
        })
    }
}

fn constant_one() -> GFamily {
    GFamily::ConstantOne
}
fn t_count() -> usize {
    20
}
fn slope_tol() -> f64 {
    DEFAULT_SLOPE_TOL
}
fn log_eps() -> f64 {
    0.1
}
fn c_max() -> f64 {
    1e3
}
fn hundred() -> usize {
    100
}
fn two() -> f64 {
    2.0
}


#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemigroupCase {
    gamma: f64,
    #[serde(default = "constant_one")]
    g: GFamily,
    p: LpExponent,
    q: LpExponent,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemigroupSuite {
    grid: GridSpec,
    cases: Vec<SemigroupCase>,
    #[serde(default = "t_count")]
    t_count: usize,
    #[serde(default = "slope_tol")]
    slope_tol: f64,
    #[serde(default = "log_eps")]
    log_eps: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SobolevCase {
    gamma: f64,
    #[serde(default = "constant_one")]
    g: GFamily,
    s1: f64,
    s2: f64,
    #[serde(default = "two_exp")]
    p: LpExponent,
}

fn two_exp() -> LpExponent {
    LpExponent::new(2.0).expect("2 is a valid exponent")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SobolevSuite {
    grid: GridSpec,
    cases: Vec<SobolevCase>,
    #[serde(default = "t_count")]
    t_count: usize,
    #[serde(default = "slope_tol")]
    slope_tol: f64,
    #[serde(default = "log_eps")]
    log_eps: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelCase {
    #[serde(default = "constant_one")]
    g: GFamily,
    gamma: f64,
    n: usize,
}

fn t_min() -> f64 {
    1e-6
}
fn t_max() -> f64 {
    0.5
}
fn rel_tol() -> f64 {
    1e-10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSuite {
    cases: Vec<KernelCase>,
    #[serde(default = "t_min")]
    t_min: f64,
    #[serde(default = "t_max")]
    t_max: f64,
    #[serde(default = "t_count")]
    t_count: usize,
    #[serde(default = "rel_tol")]
    rel_tol: f64,
    #[serde(default = "slope_tol")]
    slope_tol: f64,
}

fn k_max() -> usize {
    3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MikhlinCase {
    g: GFamily,
    #[serde(default = "k_max")]
    k_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MikhlinSuite {
    cases: Vec<MikhlinCase>,
    #[serde(default = "c_max")]
    c_max: f64,
    #[serde(default)]
    method: DerivativeMethod,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StandardCase {
    s: f64,
    p: LpExponent,
    q: LpExponent,
    p1: LpExponent,
    p2: LpExponent,
    q1: LpExponent,
    q2: LpExponent,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheminCase {
    s1: f64,
    s2: f64,
    p1: LpExponent,
    p2: LpExponent,
    p: LpExponent,
    q: LpExponent,
}

/// `count` random scalars with seeds `seed + offset + 2i`.
fn random_set(grid: &leray_core::TorusGrid, count: usize, sigma: f64, seed: u64, offset: u64) -> Vec<SpectralVectorField> {
    (0..count as u64)
        .map(|i| random_scalar(grid, sigma, seed.wrapping_add(offset).wrapping_add(2 * i)))
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductsSuite {
    grid: GridSpec,
    #[serde(default = "hundred")]
    samples: usize,
    #[serde(default = "two")]
    sigma: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "c_max")]
    c_max: f64,
    #[serde(default)]
    standard: Vec<StandardCase>,
    #[serde(default)]
    chemin: Vec<CheminCase>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingsSuite {
    grid: GridSpec,
    #[serde(default = "hundred")]
    samples: usize,
    #[serde(default = "two")]
    sigma: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "c_max")]
    c_max: f64,
    pairs: Vec<EmbeddingPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalCase {
    #[serde(default = "constant_one")]
    g1: GFamily,
    #[serde(default = "constant_one")]
    g2: GFamily,
}

fn r_max() -> f64 {
    1e6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalSuite {
    cases: Vec<GlobalCase>,
    #[serde(default = "r_max")]
    r_max: f64,
}

fn refine_tol() -> f64 {
    0.1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothingSuite {
    solver: SolverConfig,
    r: Vec<f64>,
    /// Relative change of each supremum allowed under `N → 2N`.
    #[serde(default = "refine_tol")]
    refine_tol: f64,
}

/// Parse the suite config and run every tuple; rows come back in config order.
pub fn run(suite: Suite, text: &str, seed: Option<u64>) -> Result<Vec<EstimateReport>> {
    match suite {
        Suite::Semigroup => semigroup(parse_json(text)?),
        Suite::Sobolev => sobolev(parse_json(text)?),
        Suite::Kernel => kernel(parse_json(text)?),
        Suite::Mikhlin => mikhlin(parse_json(text)?),
        Suite::Products => {
            let mut cfg: ProductsSuite = parse_json(text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            products(cfg)
        }
        Suite::Embeddings => {
            let mut cfg: EmbeddingsSuite = parse_json(text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            embeddings(cfg)
        }
        Suite::Global => global(parse_json(text)?),
        Suite::Smoothing => {
            let mut cfg: SmoothingSuite = parse_json(text)?;
            if let Some(s) = seed {
                cfg.solver.seed = s;
            }
            smoothing(cfg)
        }
    }
}

/// Exit status of a sweep: rejected tuples do not count as failures.
pub fn all_pass(reports: &[EstimateReport]) -> bool {
    reports.iter().all(|r| r.pass || r.status == ReportStatus::Rejected)
}

fn grid_of(spec: &GridSpec) -> Result<leray_core::TorusGrid> {
    spec.build().map_err(|e| ConfigError(format!("at `grid`: {e}")).into())
}

fn symbol(gamma: f64, g: &GFamily) -> Result<SymbolSpec> {
    SymbolSpec::new(gamma, g.clone()).map_err(|e| ConfigError(format!("at `cases`: {e}")).into())
}

fn semigroup(cfg: SemigroupSuite) -> Result<Vec<EstimateReport>> {
    let grid = grid_of(&cfg.grid)?;
    let opts = RateOptions {
        slope_tol: cfg.slope_tol,
        log_eps: cfg.log_eps,
    };
    cfg.cases
        .par_iter()
        .map(|c| {
            let s = symbol(c.gamma, &c.g)?;
            let mut scales = resolved_t_grid(&grid, c.gamma, 6)?;
            scales.push(10.0);
            let samples = kernel_samples(&grid, &s, &scales)?;
            let t = resolved_t_grid(&grid, c.gamma, cfg.t_count)?;
            Ok(verify_semigroup_lp_lq(&s, c.p, c.q, &t, &samples, &opts)?)
        })
        .collect()
}

fn sobolev(cfg: SobolevSuite) -> Result<Vec<EstimateReport>> {
    let grid = grid_of(&cfg.grid)?;
    let samples = single_mode_samples(&grid);
    let opts = RateOptions {
        slope_tol: cfg.slope_tol,
        log_eps: cfg.log_eps,
    };
    cfg.cases
        .par_iter()
        .map(|c| {
            let s = symbol(c.gamma, &c.g)?;
            let t = sobolev_t_grid(&grid, c.gamma, c.s2 - c.s1, cfg.t_count)?;
            Ok(verify_sobolev_smoothing(&s, c.s1, c.s2, c.p, &t, &samples, &opts)?)
        })
        .collect()
}

fn kernel(cfg: KernelSuite) -> Result<Vec<EstimateReport>> {
    let t = log_grid(cfg.t_min, cfg.t_max, cfg.t_count);
    let opts = KernelOptions {
        rel_tol: cfg.rel_tol,
        slope_tol: cfg.slope_tol,
        ..KernelOptions::default()
    };
    cfg.cases
        .par_iter()
        .map(|c| {
            c.g.validate()?;
            Ok(check_kernel_condition(&c.g, c.gamma, c.n, &t, &opts)?.0)
        })
        .collect()
}

fn mikhlin(cfg: MikhlinSuite) -> Result<Vec<EstimateReport>> {
    let r = default_r_grid();
    cfg.cases
        .iter()
        .map(|c| {
            c.g.validate()?;
            Ok(check_mikhlin(&c.g, c.k_max, &r, cfg.c_max, cfg.method)?)
        })
        .collect()
}

fn products(cfg: ProductsSuite) -> Result<Vec<EstimateReport>> {
    let grid = grid_of(&cfg.grid)?;
    let bank = build_filter_bank(&grid)?;
    let pairs: Vec<_> = random_set(&grid, cfg.samples, cfg.sigma, cfg.seed, 0)
        .into_iter()
        .zip(random_set(&grid, cfg.samples, cfg.sigma, cfg.seed, 1))
        .collect();
    let mut out = Vec::new();
    for c in &cfg.standard {
        let split = HolderSplit {
            p1: c.p1,
            p2: c.p2,
            q1: c.q1,
            q2: c.q2,
        };
        out.push(verify_product_est_standard(&pairs, c.s, c.p, c.q, split, &bank, cfg.c_max)?);
    }
    for c in &cfg.chemin {
        out.push(verify_product_est_chemin(
            &pairs, c.s1, c.s2, c.p1, c.p2, c.p, c.q, &bank, cfg.c_max,
        )?);
    }
    if out.is_empty() {
        bail!(ConfigError("at `standard`/`chemin`: no product tuples given".into()));
    }
    Ok(out)
}

fn embeddings(cfg: EmbeddingsSuite) -> Result<Vec<EstimateReport>> {
    let grid = grid_of(&cfg.grid)?;
    let bank = build_filter_bank(&grid)?;
    let samples = random_set(&grid, cfg.samples, cfg.sigma, cfg.seed, 0);
    Ok(verify_embeddings(&samples, &cfg.pairs, &bank, cfg.c_max)?)
}

fn global(cfg: GlobalSuite) -> Result<Vec<EstimateReport>> {
    cfg.cases
        .iter()
        .map(|c| {
            c.g1.validate()?;
            c.g2.validate()?;
            Ok(check_global_integral(&c.g1, &c.g2, cfg.r_max)?.report(&c.g1, &c.g2))
        })
        .collect()
}

fn smoothing(cfg: SmoothingSuite) -> Result<Vec<EstimateReport>> {
    let base = cfg.solver;
    base.validate().map_err(|e| ConfigError(format!("at `solver`: {e}")))?;
    let kind = base.initial.clone().unwrap_or(InitialData::RandomDivfree {
        sigma: 2.0,
        amplitude: 0.1,
    });
    let coarse = base.grid;
    let fine = GridSpec {
        modes: 2 * coarse.modes,
        ..coarse
    };
    let rows = [coarse, fine]
        .par_iter()
        .map(|spec| {
            let mut c = base.clone();
            c.grid = *spec;
            let u0 = make_initial_data(&kind, &c.torus()?, c.seed)?;
            let traj = integrate(&u0, &c)?;
            if traj.blew_up {
                bail!("trajectory blew up at t={:?} on N={}", traj.blowup_time, spec.modes);
            }
            Ok(smoothing_diagnostic(&traj, &cfg.r, c.s1, c.gamma1, c.p, c.q)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows[0]
        .iter()
        .zip(&rows[1])
        .map(|(a, b)| {
            let change = (b.sup - a.sup).abs() / a.sup;
            let ok = a.sup.is_finite() && b.sup.is_finite() && a.sup > 0.0;
            let mut rep = EstimateReport::new("smoothing")
                .param("r", b.r)
                .param("s1", base.s1)
                .param("gamma1", base.gamma1)
                .param("N", fine.modes)
                .samples(format!("N={} vs N={}", coarse.modes, fine.modes))
                .note(format!(
                    "weight (r-s1)/gamma1: sup at t={:.3e}; weight (r-s1)/2: sup={:.6e}; refinement change={:.3}%",
                    b.t_at_sup,
                    b.sup_half,
                    100.0 * change
                ))
                .decide_constant(change, cfg.refine_tol);
            rep.fitted_constant = Some(b.sup);
            rep.pass &= ok;
            rep
        })
        .collect())
}
