//! Mild-solution time integration of the generalized Leray-α equation,
//! Picard iteration and the contraction-space / regularity monitors.

mod admissibility;
mod monitor;
mod picard;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::besov::{besov_from_blocks, block_norms, build_filter_bank, LPFilterBank};
use crate::error::{Error, Result};
use crate::field::{LpExponent, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::random::{random_field, Band};
use crate::report::fmt_f64;
use crate::spectral::{leray_project, nonlinear_w, WVariant};
use crate::symbol::{GFamily, SymbolSpec};

pub use admissibility::{
    check_admissibility, AdmissibilityParams, AdmissibilityResult, Inequality, TheoremVariant, Witness,
};
pub use monitor::{
    global_criterion_monitor, monitor_x_norm, smoothing_diagnostic, GlobalRegime, GlobalVerdict, SmoothingRow, XNorm,
};
pub use picard::{picard_iterate, PicardResult};

/// Growth factor of `‖u‖_{L²}` over its initial value treated as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e6;

fn two_pi() -> f64 {
    2.0 * PI
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_log_eps() -> f64 {
    1e-6
}

fn constant_one() -> GFamily {
    GFamily::ConstantOne
}

/// Grid description inside a run config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub modes: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim, self.modes, self.length)
    }
}

impl From<TorusGrid> for GridSpec {
    fn from(g: TorusGrid) -> Self {
        Self {
            dim: g.dim(),
            modes: g.modes(),
            length: g.length(),
        }
    }
}

/// Initial velocity fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `u = A(sin x cos y, -cos x sin y)` (2D only).
    #[serde(rename = "taylor_green_2d")]
    TaylorGreen2d {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Leray-projected random field with spectrum `(1+|ξ|)^{-σ}` on the
    /// retained modes, rescaled to `‖u‖_{L²} = amplitude`.
    RandomDivfree { sigma: f64, amplitude: f64 },
    /// `u = a cos(k·x)`, projected.
    SingleMode { k: Vec<i64>, amplitude: Vec<f64> },
}

/// Full description of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "one")]
    pub nu: f64,
    pub gamma1: f64,
    #[serde(default = "constant_one")]
    pub g1: GFamily,
    pub gamma2: f64,
    #[serde(default = "constant_one")]
    pub g2: GFamily,
    pub s1: f64,
    pub s2: f64,
    pub p: LpExponent,
    pub q: LpExponent,
    /// Time horizon `T`.
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub w_variant: WVariant,
    #[serde(default)]
    pub seed: u64,
    /// Record a sample every `cadence` uniform steps.
    #[serde(default = "one_usize")]
    pub cadence: usize,
    /// Number of geometric sub-steps `dt·2^{-m}` inserted before the first
    /// uniform step.
    #[serde(default)]
    pub near_zero_levels: usize,
    /// Replace `W` by zero (linear semigroup run).
    #[serde(default)]
    pub linear_only: bool,
    /// Require `γ₁ > 1` (semigroup-rate hypotheses).
    #[serde(default)]
    pub rate_checks: bool,
    /// `ε` used when the log variant replaces `γ₁` by `γ₁ - ε`.
    #[serde(default = "default_log_eps")]
    pub log_eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialData>,
}

impl SolverConfig {
    /// A config with default solver settings and `g₁ = g₂ ≡ 1`.
    pub fn new(grid: TorusGrid, gamma1: f64, gamma2: f64, horizon: f64, dt: f64) -> Self {
        Self {
            grid: grid.into(),
            alpha: 0.0,
            nu: 1.0,
            gamma1,
            g1: GFamily::ConstantOne,
            gamma2,
            g2: GFamily::ConstantOne,
            s1: 0.0,
            s2: 0.0,
            p: LpExponent::new(2.0).expect("2 is a valid exponent"),
            q: LpExponent::new(2.0).expect("2 is a valid exponent"),
            horizon,
            dt,
            w_variant: WVariant::Standard,
            seed: 0,
            cadence: 1,
            near_zero_levels: 0,
            linear_only: false,
            rate_checks: false,
            log_eps: default_log_eps(),
            initial: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build().map_err(|e| Error::param("grid", e.to_string()))?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be finite and > 0")))
            }
        };
        positive("dt", self.dt)?;
        positive("horizon", self.horizon)?;
        positive("nu", self.nu)?;
        positive("gamma1", self.gamma1)?;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{} must be finite and >= 0", self.alpha)));
        }
        for (name, v) in [("gamma2", self.gamma2), ("s1", self.s1), ("s2", self.s2)] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("{v} is not finite")));
            }
        }
        if self.rate_checks && !(self.gamma1 > 1.0) {
            return Err(Error::param("gamma1", "rate checks need gamma1 > 1"));
        }
        if self.cadence == 0 {
            return Err(Error::param("cadence", "must be >= 1"));
        }
        if !(self.log_eps > 0.0) {
            return Err(Error::param("log_eps", "must be > 0"));
        }
        self.g1.validate().map_err(|e| Error::param("g1", e.to_string()))?;
        self.g2.validate().map_err(|e| Error::param("g2", e.to_string()))?;
        Ok(())
    }

    pub fn torus(&self) -> Result<TorusGrid> {
        self.grid.build()
    }

    /// `𝓛₁` symbol (without `ν`).
    pub fn dissipation(&self) -> SymbolSpec {
        SymbolSpec {
            gamma: self.gamma1,
            g: self.g1.clone(),
        }
    }

    /// `𝓛₂` symbol.
    pub fn regularization(&self) -> SymbolSpec {
        SymbolSpec {
            gamma: self.gamma2,
            g: self.g2.clone(),
        }
    }

    /// Weight exponent `a = (s₂ - s₁)/γ₁`.
    pub fn weight_exponent(&self) -> f64 {
        (self.s2 - self.s1) / self.gamma1
    }

    /// Output times: `0`, the geometric ladder `dt·2^{-m}` (if any), then
    /// uniform steps of `dt` with the last step clipped to the horizon.
    pub fn time_grid(&self) -> Vec<f64> {
        let mut t = vec![0.0];
        for m in (1..=self.near_zero_levels).rev() {
            t.push(self.dt * 0.5f64.powi(m as i32));
        }
        let steps = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        for i in 1..=steps {
            t.push((i as f64 * self.dt).min(self.horizon));
        }
        t
    }

    /// Step sizes between consecutive [`Self::time_grid`] entries; uniform
    /// steps are exactly `dt` except a clipped final step.
    pub fn step_sizes(&self) -> Vec<f64> {
        let t = self.time_grid();
        let m = self.near_zero_levels;
        t.windows(2)
            .enumerate()
            .map(|(i, w)| {
                let h = w[1] - w[0];
                if i >= m && (h - self.dt).abs() <= 1e-9 * self.dt {
                    self.dt
                } else {
                    h
                }
            })
            .collect()
    }

    pub fn admissibility_params(&self) -> AdmissibilityParams {
        AdmissibilityParams {
            n: self.grid.dim,
            p: self.p,
            s1: self.s1,
            s2: self.s2,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            log_variant: self.g1.is_log_type() || self.g2.is_log_type(),
            log_eps: self.log_eps,
        }
    }
}

/// Build an initial field; always divergence-free.
pub fn make_initial_data(kind: &InitialData, grid: &TorusGrid, seed: u64) -> Result<SpectralVectorField> {
    let dim = grid.dim();
    let f = match kind {
        InitialData::Zero => SpectralVectorField::zero_vector(*grid),
        InitialData::TaylorGreen2d { amplitude } => {
            if dim != 2 {
                return Err(Error::param("initial", format!("taylor_green_2d needs n=2, got n={dim}")));
            }
            let kappa = grid.wavenumber_unit();
            let (mut ux, mut uy) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
            for idx in 0..grid.len() {
                let [x, y, _] = grid.point(idx);
                let (x, y) = (kappa * x, kappa * y);
                ux.push(amplitude * x.sin() * y.cos());
                uy.push(-amplitude * x.cos() * y.sin());
            }
            leray_project(&SpectralVectorField::from_physical(*grid, &[ux, uy])?)?
        }
        InitialData::RandomDivfree { sigma, amplitude } => {
            let raw = leray_project(&random_field(grid, dim, *sigma, seed, Band::Retained))?;
            let norm = raw.l2_norm();
            if norm == 0.0 {
                raw
            } else {
                raw.scaled(amplitude / norm)
            }
        }
        InitialData::SingleMode { k, amplitude } => {
            if k.len() != dim || amplitude.len() != dim {
                return Err(Error::param("initial", format!("k and amplitude need {dim} entries")));
            }
            let mut f = SpectralVectorField::zero_vector(*grid);
            let half: Vec<Complex64> = amplitude.iter().map(|a| Complex64::new(a / 2.0, 0.0)).collect();
            f.set_mode(k, &half);
            leray_project(&f)?
        }
    };
    Ok(f)
}

/// Per-sample diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub l2: f64,
    pub h_s1: f64,
    pub besov_s1: f64,
    pub besov_s2: f64,
    /// `t^a ‖u(t)‖_{B^{s₂}_{p,q}}`.
    pub weighted: f64,
    pub div_residual: f64,
    pub mean: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    pub u: SpectralVectorField,
    pub diag: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub samples: Vec<TrajectorySample>,
    pub blew_up: bool,
    pub blowup_time: Option<f64>,
    pub steps: usize,
    pub advisories: Vec<String>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory holds the initial sample")
    }
}

pub(crate) fn diagnostics(u: &SpectralVectorField, t: f64, cfg: &SolverConfig, bank: &LPFilterBank) -> Result<Diagnostics> {
    let blocks = block_norms(u, cfg.p, bank)?;
    let besov_s2 = besov_from_blocks(&blocks, cfg.s2, cfg.q);
    let a = cfg.weight_exponent();
    Ok(Diagnostics {
        l2: u.l2_norm(),
        h_s1: u.sobolev_norm(cfg.s1, LpExponent::new(2.0)?),
        besov_s1: besov_from_blocks(&blocks, cfg.s1, cfg.q),
        besov_s2,
        weighted: if t == 0.0 && a > 0.0 { 0.0 } else { t.powf(a) * besov_s2 },
        div_residual: u.divergence_residual(),
        mean: u.mean(),
    })
}

/// Fourier-diagonal propagators of the linear part, cached per step size.
pub(crate) struct Linear {
    symbol: Vec<f64>,
    cache: HashMap<u64, (Vec<f64>, Vec<f64>)>,
}

impl Linear {
    pub(crate) fn new(grid: &TorusGrid, cfg: &SolverConfig) -> Self {
        let l1 = cfg.dissipation();
        let symbol = (0..grid.len()).map(|i| cfg.nu * l1.symbol(grid.wavenumber(i))).collect();
        Self {
            symbol,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// `(e^{h ν𝓛₁}, e^{h/2 ν𝓛₁})` per mode.
    pub(crate) fn factors(&mut self, h: f64) -> &(Vec<f64>, Vec<f64>) {
        let sym = &self.symbol;
        self.cache.entry(h.to_bits()).or_insert_with(|| {
            let full = sym.iter().map(|s| (h * s).exp()).collect();
            let half = sym.iter().map(|s| (0.5 * h * s).exp()).collect();
            (full, half)
        })
    }

    /// `e^{t ν𝓛₁} f`.
    pub(crate) fn propagate(&self, f: &SpectralVectorField, t: f64) -> SpectralVectorField {
        let sym = &self.symbol;
        f.map_modes(|i| (t * sym[i]).exp())
    }
}

/// Right-hand side `N(u) = -W(u,u)` (zero for linear runs).
pub(crate) fn nonlinear(u: &SpectralVectorField, cfg: &SolverConfig, l2: &SymbolSpec) -> Result<SpectralVectorField> {
    if cfg.linear_only {
        return Ok(SpectralVectorField::zero_vector(*u.grid()));
    }
    Ok(nonlinear_w(u, u, cfg.alpha, l2, cfg.w_variant)?.scaled(-1.0))
}

/// One integrating-factor midpoint step of size `h`:
/// `u* = E_{h/2}(u + h/2·N(u))`, `u⁺ = E_h u + h·E_{h/2} N(u*)`.
pub(crate) fn if_midpoint_step(
    u: &SpectralVectorField,
    h: f64,
    lin: &mut Linear,
    cfg: &SolverConfig,
    l2: &SymbolSpec,
) -> Result<SpectralVectorField> {
    let n0 = nonlinear(u, cfg, l2)?;
    let mut pre = u.clone();
    pre.axpy(0.5 * h, &n0)?;
    let (full, half) = lin.factors(h).clone();
    let mid = pre.map_modes(|i| half[i]);
    let n_mid = nonlinear(&mid, cfg, l2)?;
    let mut next = u.map_modes(|i| full[i]);
    next.axpy(h, &n_mid.map_modes(|i| half[i]))?;
    leray_project(&next)
}

fn check_initial(u0: &SpectralVectorField, grid: &TorusGrid) -> Result<()> {
    grid.ensure_same(u0.grid())?;
    if u0.ncomp() != grid.dim() {
        return Err(Error::ComponentMismatch {
            expected: grid.dim(),
            found: u0.ncomp(),
        });
    }
    let res = u0.divergence_residual();
    if res > 1e-10 {
        return Err(Error::param("u0", format!("divergence residual {res:e} exceeds 1e-10")));
    }
    Ok(())
}

pub(crate) fn exploded(u: &SpectralVectorField, l2_initial: f64) -> bool {
    !u.is_finite() || (l2_initial > 0.0 && u.l2_norm() > BLOWUP_FACTOR * l2_initial)
}

/// Advance `u0` over `config.time_grid()` with the integrating-factor
/// midpoint scheme, re-projecting every step and sampling diagnostics at
/// the ladder times, every `cadence` uniform steps and at the horizon.
pub fn integrate(u0: &SpectralVectorField, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.torus()?;
    check_initial(u0, &grid)?;
    let bank = build_filter_bank(&grid)?;
    let l2 = config.regularization();
    let mut lin = Linear::new(&grid, config);

    let mut advisories = Vec::new();
    let adm = check_admissibility(&config.admissibility_params(), TheoremVariant::A);
    if !adm.admissible {
        advisories.push(format!("parameters outside the variant A list: {}", adm.failed().join("; ")));
    }

    let times = config.time_grid();
    let ladder = config.near_zero_levels;
    let l2_initial = u0.l2_norm();
    let mut u = leray_project(u0)?;
    let mut samples = vec![TrajectorySample {
        t: 0.0,
        diag: diagnostics(&u, 0.0, config, &bank)?,
        u: u.clone(),
    }];
    let mut blew_up = false;
    let mut blowup_time = None;
    let mut steps = 0;
    for (i, h) in config.step_sizes().into_iter().enumerate() {
        let t1 = times[i + 1];
        let next = if_midpoint_step(&u, h, &mut lin, config, &l2)?;
        steps += 1;
        if exploded(&next, l2_initial) {
            blew_up = true;
            blowup_time = Some(t1);
            break;
        }
        u = next;
        let step_no = i + 1;
        let uniform = step_no.saturating_sub(ladder);
        let last = step_no + 1 == times.len();
        if step_no <= ladder || uniform % config.cadence == 0 || last {
            samples.push(TrajectorySample {
                t: t1,
                diag: diagnostics(&u, t1, config, &bank)?,
                u: u.clone(),
            });
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        samples,
        blew_up,
        blowup_time,
        steps,
        advisories,
    })
}

pub const TRAJECTORY_CSV_HEADER: [&str; 6] = ["t", "l2", "h_s1", "besov_s1", "besov_s2", "weighted"];

pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_CSV_HEADER)?;
    for s in &traj.samples {
        let d = &s.diag;
        out.write_record([s.t, d.l2, d.h_s1, d.besov_s1, d.besov_s2, d.weighted].map(fmt_f64))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{divergence, tensor_product};

    fn tg_config(n: usize, dt: f64, horizon: f64) -> SolverConfig {
        let mut cfg = SolverConfig::new(TorusGrid::standard(2, n).unwrap(), 2.0, 1.0, horizon, dt);
        cfg.nu = 0.1;
        cfg.s1 = 0.5;
        cfg.s2 = 1.0;
        cfg
    }

    #[test]
    fn config_rejects_bad_dt() {
        let mut cfg = tg_config(16, 0.1, 1.0);
        cfg.dt = 0.0;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("dt"), "{err}");
    }

    #[test]
    fn time_grid_layout() {
        let mut cfg = tg_config(16, 0.25, 1.0);
        cfg.near_zero_levels = 2;
        assert_eq!(cfg.time_grid(), vec![0.0, 0.0625, 0.125, 0.25, 0.5, 0.75, 1.0]);
        let cfg = tg_config(16, 0.3, 1.0);
        let t = cfg.time_grid();
        assert_eq!(*t.last().unwrap(), 1.0);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn taylor_green_is_four_modes() {
        let grid = TorusGrid::standard(2, 16).unwrap();
        let u = make_initial_data(&InitialData::TaylorGreen2d { amplitude: 1.0 }, &grid, 0).unwrap();
        let big = u.coeffs().iter().filter(|c| c.norm() > 1e-12).count();
        assert_eq!(big, 8);
        assert!(u.divergence_residual() < 1e-14);
        let g3 = TorusGrid::standard(3, 8).unwrap();
        assert!(make_initial_data(&InitialData::TaylorGreen2d { amplitude: 1.0 }, &g3, 0).is_err());
    }

    #[test]
    fn single_mode_unchanged_by_projection() {
        let grid = TorusGrid::standard(2, 16).unwrap();
        let u = make_initial_data(
            &InitialData::SingleMode {
                k: vec![1, 0],
                amplitude: vec![0.0, 1.0],
            },
            &grid,
            0,
        )
        .unwrap();
        let idx = grid.index_of(&[1, 0]);
        assert_eq!(u.coeff(idx, 1), Complex64::new(0.5, 0.0));
        assert_eq!(u.coeff(idx, 0), Complex64::default());
    }

    #[test]
    fn random_divfree_amplitude() {
        let grid = TorusGrid::standard(2, 32).unwrap();
        let u = make_initial_data(&InitialData::RandomDivfree { sigma: 2.0, amplitude: 0.3 }, &grid, 7).unwrap();
        assert!(u.divergence_residual() <= 1e-12);
        assert!((u.l2_norm() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = tg_config(16, 0.1, 0.5);
        let u0 = SpectralVectorField::zero_vector(TorusGrid::standard(2, 16).unwrap());
        let traj = integrate(&u0, &cfg).unwrap();
        assert!(traj.samples.iter().all(|s| s.u.coeff_norm() == 0.0));
        assert!(!traj.blew_up);
    }

    #[test]
    fn linear_single_mode_decay() {
        let grid = TorusGrid::standard(2, 16).unwrap();
        let mut cfg = tg_config(16, 1e-3, 0.5);
        cfg.linear_only = true;
        cfg.gamma1 = 1.5;
        cfg.g1 = GFamily::LogHalf;
        cfg.cadence = 100;
        let u0 = make_initial_data(
            &InitialData::SingleMode {
                k: vec![2, 1],
                amplitude: vec![1.0, -2.0],
            },
            &grid,
            0,
        )
        .unwrap();
        let traj = integrate(&u0, &cfg).unwrap();
        let r = 5f64.sqrt();
        for s in &traj.samples {
            let exact = (-cfg.nu * s.t * r.powf(1.5) / GFamily::LogHalf.eval(r)).exp() * u0.l2_norm();
            assert!((s.diag.l2 - exact).abs() <= 1e-6 * exact);
        }
    }

    #[test]
    fn navier_stokes_reduction_is_bit_identical() {
        let grid = TorusGrid::standard(2, 16).unwrap();
        let mut cfg = tg_config(16, 0.01, 0.05);
        cfg.gamma2 = 0.7;
        let u0 = make_initial_data(&InitialData::RandomDivfree { sigma: 1.0, amplitude: 1.0 }, &grid, 3).unwrap();
        let traj = integrate(&u0, &cfg).unwrap();

        // Reference: plain pseudo-spectral Navier-Stokes, no Helmholtz factors.
        let ns = |u: &SpectralVectorField| -> SpectralVectorField {
            let d = divergence(&tensor_product(u, u).unwrap());
            leray_project(&d).unwrap().scaled(-1.0)
        };
        let sym: Vec<f64> = (0..grid.len()).map(|i| -0.1 * grid.wavenumber(i).powf(2.0)).collect();
        let mut u = leray_project(&u0).unwrap();
        for _ in 0..5 {
            let h = 0.01;
            let n0 = ns(&u);
            let mut pre = u.clone();
            pre.axpy(0.5 * h, &n0).unwrap();
            let mid = pre.map_modes(|i| (0.5 * h * sym[i]).exp());
            let n_mid = ns(&mid);
            let mut next = u.map_modes(|i| (h * sym[i]).exp());
            next.axpy(h, &n_mid.map_modes(|i| (0.5 * h * sym[i]).exp())).unwrap();
            u = leray_project(&next).unwrap();
        }
        assert_eq!(traj.last().u.coeffs(), u.coeffs());
    }

    #[test]
    fn trajectory_csv_schema() {
        let grid = TorusGrid::standard(2, 16).unwrap();
        let cfg = tg_config(16, 0.1, 0.3);
        let u0 = make_initial_data(&InitialData::TaylorGreen2d { amplitude: 1.0 }, &grid, 0).unwrap();
        let traj = integrate(&u0, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,l2,h_s1,besov_s1,besov_s2,weighted");
        assert!(lines.all(|l| l.split(',').count() == 6));
    }
}
