//! Contraction-space norms, higher-regularity suprema and the global
//! regime monitor.

use serde::Serialize;

use crate::besov::{besov_from_blocks, block_norms, build_filter_bank};
use crate::error::{Error, Result};
use crate::field::LpExponent;
use crate::multipliers::{check_global_integral, GlobalIntegral, IntegralClass};

use super::{Linear, SolverConfig, Trajectory};

/// The two pieces of the contraction-space norm over sampled times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XNorm {
    /// `sup_t ‖u(t) - e^{tν𝓛₁}u₀‖_{B^{s₁}_{p,q}}`.
    pub sup_deviation: f64,
    /// `sup_t t^a ‖u(t)‖_{B^{s₂}_{p,q}}`.
    pub sup_weighted: f64,
    /// `t^a ‖u(t)‖_{B^{s₂}_{p,q}}` at the smallest sampled `t > 0`,
    /// the sampled stand-in for the `t → 0⁺` limit.
    pub weighted_near_zero: f64,
    pub t_near_zero: f64,
    pub a: f64,
}

/// Evaluate the contraction-space norm of a trajectory.
pub fn monitor_x_norm(
    traj: &Trajectory,
    s1: f64,
    s2: f64,
    p: LpExponent,
    q: LpExponent,
    gamma1: f64,
) -> Result<XNorm> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::param("trajectory", "empty"))?;
    let grid = *first.u.grid();
    let bank = build_filter_bank(&grid)?;
    let lin = Linear::new(&grid, &traj.config);
    let a = (s2 - s1) / gamma1;
    let mut out = XNorm {
        sup_deviation: 0.0,
        sup_weighted: 0.0,
        weighted_near_zero: f64::NAN,
        t_near_zero: f64::NAN,
        a,
    };
    for s in &traj.samples {
        let dev = s.u.sub(&lin.propagate(&first.u, s.t))?;
        let dev_norm = besov_from_blocks(&block_norms(&dev, p, &bank)?, s1, q);
        out.sup_deviation = out.sup_deviation.max(dev_norm);
        if s.t > 0.0 {
            let w = s.t.powf(a) * besov_from_blocks(&block_norms(&s.u, p, &bank)?, s2, q);
            out.sup_weighted = out.sup_weighted.max(w);
            if out.t_near_zero.is_nan() {
                out.t_near_zero = s.t;
                out.weighted_near_zero = w;
            }
        }
    }
    Ok(out)
}

/// Supremum of `t^b ‖u(t)‖_{B^r_{p,q}}` for one `r`, with
/// `b = (r-s₁)/γ₁` and the alternative `b = (r-s₁)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingRow {
    pub r: f64,
    pub sup: f64,
    pub t_at_sup: f64,
    pub sup_half: f64,
    pub t_at_sup_half: f64,
}

pub fn smoothing_diagnostic(
    traj: &Trajectory,
    r_list: &[f64],
    s1: f64,
    gamma1: f64,
    p: LpExponent,
    q: LpExponent,
) -> Result<Vec<SmoothingRow>> {
    if let Some(r) = r_list.iter().find(|&&r| !(r >= s1)) {
        return Err(Error::param("r", format!("{r} < s1 = {s1}")));
    }
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::param("trajectory", "empty"))?;
    let bank = build_filter_bank(first.u.grid())?;
    let mut rows: Vec<SmoothingRow> = r_list
        .iter()
        .map(|&r| SmoothingRow {
            r,
            sup: 0.0,
            t_at_sup: 0.0,
            sup_half: 0.0,
            t_at_sup_half: 0.0,
        })
        .collect();
    for s in &traj.samples {
        let blocks = block_norms(&s.u, p, &bank)?;
        for row in &mut rows {
            let norm = besov_from_blocks(&blocks, row.r, q);
            let weight = |b: f64| if b == 0.0 { 1.0 } else { s.t.powf(b) };
            let v = weight((row.r - s1) / gamma1) * norm;
            let v_half = weight((row.r - s1) / 2.0) * norm;
            if v > row.sup {
                row.sup = v;
                row.t_at_sup = s.t;
            }
            if v_half > row.sup_half {
                row.sup_half = v_half;
                row.t_at_sup_half = s.t;
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum GlobalRegime {
    GlobalRegime,
    LocalOnly,
}

impl std::fmt::Display for GlobalRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GlobalRegime::GlobalRegime => "GLOBAL-REGIME",
            GlobalRegime::LocalOnly => "LOCAL-ONLY",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalVerdict {
    pub regime: GlobalRegime,
    /// `2γ₁ + γ₂`.
    pub dissipation_sum: f64,
    pub sum_ok: bool,
    pub integral: GlobalIntegral,
    /// Scope warnings (the criterion is stated for `n = 3`, `p = 2`).
    pub advisories: Vec<String>,
}

/// `2γ₁+γ₂ ≥ 5` together with divergence of `∫₁^∞ ds/(s g₁²g₂)`.
pub fn global_criterion_monitor(config: &SolverConfig) -> Result<GlobalVerdict> {
    let mut advisories = Vec::new();
    if config.grid.dim != 3 {
        advisories.push(format!("criterion stated for n=3 (run has n={})", config.grid.dim));
    }
    if config.p.value() != 2.0 {
        advisories.push(format!("criterion stated for p=2 (run has p={})", config.p));
    }
    let sum = 2.0 * config.gamma1 + config.gamma2;
    let sum_ok = sum >= 5.0;
    let integral = check_global_integral(&config.g1, &config.g2, 1e6)?;
    let regime = if sum_ok && integral.class == IntegralClass::Divergent {
        GlobalRegime::GlobalRegime
    } else {
        GlobalRegime::LocalOnly
    };
    Ok(GlobalVerdict {
        regime,
        dissipation_sum: sum,
        sum_ok,
        integral,
        advisories,
    })
}
