//! Numerical checks of the multiplier hypotheses: Mikhlin-type derivative
//! bounds on `g`, the kernel-boundedness integral, the global-existence
//! integral and the empirical `L^p → L^q` / Sobolev smoothing rates of the
//! semigroup `e^{t𝓛}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LpExponent, SpectralVectorField};
use crate::fit::loglog_fit;
use crate::grid::TorusGrid;
use crate::jet::Jet;
use crate::quadrature;
use crate::report::EstimateReport;
use crate::spectral::semigroup_apply;
use crate::symbol::{log_grid, GFamily, SymbolSpec};

/// Default absolute tolerance on fitted exponents.
pub const DEFAULT_SLOPE_TOL: f64 = 0.1;

/// How derivatives of `g` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    /// Closed-form composition through Taylor jets.
    #[default]
    Jet,
    /// 8th-order central differences with step `r·10⁻³`.
    FiniteDifference,
}

/// Log-spaced sample radii on `[10⁻³, 10⁶]`.
pub fn default_r_grid() -> Vec<f64> {
    log_grid(1e-3, 1e6, 271)
}

/// Sup over `r_grid` of `|g^{(k)}(r)| r^k` for each `1 ≤ k ≤ k_max`; passes
/// iff every supremum is finite and at most `c_max`.
pub fn check_mikhlin(
    g: &GFamily,
    k_max: usize,
    r_grid: &[f64],
    c_max: f64,
    method: DerivativeMethod,
) -> Result<EstimateReport> {
    if k_max < 1 {
        return Err(Error::param("k_max", "must be >= 1"));
    }
    let mut sups = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut sup = 0.0f64;
        for &r in r_grid {
            let d = match method {
                DerivativeMethod::Jet => g.derivative(k, r),
                DerivativeMethod::FiniteDifference => g.derivative_fd(k, r),
            };
            if !d.is_finite() {
                return Err(Error::Derivative(format!("g^({k})({r:e}) = {d}")));
            }
            sup = sup.max(d.abs() * r.powi(k as i32));
        }
        sups.push(sup);
    }
    let worst = sups.iter().cloned().fold(0.0, f64::max);
    let mut note = sups
        .iter()
        .enumerate()
        .map(|(i, s)| format!("k{}={:.4e}", i + 1, s))
        .collect::<Vec<_>>()
        .join(" ");
    if let Some(k) = sups.iter().position(|&s| !(s <= c_max)) {
        note += &format!("; first failing k={}", k + 1);
    }
    Ok(EstimateReport::new("mikhlin")
        .param("g", g.label())
        .param("k_max", k_max)
        .param("method", format!("{method:?}"))
        .samples(format!(
            "{} log-spaced radii on [{:e}, {:e}]",
            r_grid.len(),
            r_grid.first().copied().unwrap_or(0.0),
            r_grid.last().copied().unwrap_or(0.0)
        ))
        .note(note)
        .decide_constant(worst, c_max))
}

/// Options for [`check_kernel_condition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub rel_tol: f64,
    pub slope_tol: f64,
    /// Decades between successive inner cut-offs `δ` near `r = 0`.
    pub decades_per_level: i32,
    pub levels: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            slope_tol: DEFAULT_SLOPE_TOL,
            decades_per_level: 4,
            levels: 4,
        }
    }
}

/// Per-`t` result of the kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    /// `|∫₀^∞ ∂_r^{n+1}(r^{n-1} e^{-r^γ/g(r t^{-1/γ})}) dr|` (literal form).
    pub literal: f64,
    /// `∫₀^∞ |∂_r^{n+1}(...)| dr`, the termwise majorant.
    pub absolute: f64,
    /// Whether the inner-cutoff ladder converged at `r = 0`.
    pub converged: bool,
    pub r_cut: f64,
}

/// `∂_r^{n+1}(r^{n-1} e^{-r^γ/g(c r)})` at `r`, with `c = t^{-1/γ}`.
pub fn kernel_integrand(g: &GFamily, gamma: f64, n: usize, c: f64, r: f64) -> f64 {
    let order = n + 1;
    let x = Jet::variable(r, order);
    let poly = x.powi((n - 1) as u32);
    let expo = x.powf(gamma).div(&g.eval_jet(&x.scale(c)));
    let f = &poly * &(-&expo).exp();
    f.derivative(order)
}

fn kernel_cutoff(g: &GFamily, gamma: f64, c: f64) -> f64 {
    // e^{-R^γ/g} < 1e-30 with a margin.
    let mut r: f64 = 1.0;
    while r.powf(gamma) / g.eval(r * c) < 80.0 && r < 1e8 {
        r *= 1.25;
    }
    r
}

/// Evaluate the kernel integral for one `t`.
pub fn kernel_sample(g: &GFamily, gamma: f64, n: usize, t: f64, opts: &KernelOptions) -> Result<KernelSample> {
    let c = t.powf(-1.0 / gamma);
    let r_cut = kernel_cutoff(g, gamma, c);
    let signed = |u: f64| {
        let r = u.exp();
        kernel_integrand(g, gamma, n, c, r) * r
    };
    let absolute = |u: f64| signed(u).abs();
    let quad = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        let q = quadrature::integrate(f, a, b, 1e-300, opts.rel_tol, 4000);
        if q.converged {
            Ok(q.value)
        } else {
            Err(Error::Derivative(format!(
                "quadrature did not converge on [{:e}, {:e}] (t={t:e})",
                a.exp(),
                b.exp()
            )))
        }
    };
    let step = opts.decades_per_level as f64 * std::f64::consts::LN_10;
    let top = r_cut.ln();
    let first = -step;
    let main_signed = quad(&signed, first, top)?;
    let main_abs = quad(&absolute, first, top)?;

    let mut incs = Vec::with_capacity(opts.levels);
    let mut signed_total = main_signed;
    for lvl in 0..opts.levels {
        let hi = first - step * lvl as f64;
        let lo = hi - step;
        let inc_abs = quad(&absolute, lo, hi)?;
        signed_total += quad(&signed, lo, hi)?;
        incs.push(inc_abs);
    }
    let scale = main_abs.max(1e-300);
    let converged = incs
        .windows(2)
        .all(|w| w[1] <= 0.9 * w[0] || w[1] <= 1e-13 * scale);
    let mut abs_total = main_abs + incs.iter().sum::<f64>();
    if converged {
        if let [.., a, b] = incs[..] {
            if a > 0.0 && b > 0.0 && b < a {
                let ratio = b / a;
                abs_total += b * ratio / (1.0 - ratio);
            }
        }
    } else {
        abs_total = f64::INFINITY;
    }
    Ok(KernelSample {
        t,
        literal: signed_total.abs(),
        absolute: abs_total,
        converged,
        r_cut,
    })
}

/// Check that the kernel integral is bounded independently of `t ∈ (0,1)`.
///
/// The literal value `|∫ ∂^{n+1}(...)|` is reported alongside the
/// termwise majorant `∫|∂^{n+1}(...)|`; the exponent fit and the pass
/// decision use the majorant (it is strictly positive and bounds the
/// literal value). Non-integrability at `r = 0` is detected by a
/// refinement ladder of inner cut-offs and reported as a failure.
pub fn check_kernel_condition(
    g: &GFamily,
    gamma: f64,
    n: usize,
    t_grid: &[f64],
    opts: &KernelOptions,
) -> Result<(EstimateReport, Vec<KernelSample>)> {
    if !(1..=3).contains(&n) {
        return Err(Error::param("n", format!("{n} (expected 1, 2 or 3)")));
    }
    if t_grid.len() < 20 || t_grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::param("t_grid", "need >= 20 points inside (0, 1)"));
    }
    let base = EstimateReport::new("kernel")
        .param("g", g.label())
        .param("gamma", gamma)
        .param("n", n)
        .samples(format!(
            "{} t in [{:e}, {:e}]",
            t_grid.len(),
            t_grid[0],
            t_grid[t_grid.len() - 1]
        ));
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        match kernel_sample(g, gamma, n, t, opts) {
            Ok(s) => samples.push(s),
            Err(e) => return Ok((base.errored(e.to_string()), samples)),
        }
    }
    if samples.iter().any(|s| !s.converged) {
        let report = base
            .note("integrand not integrable at r=0 (inner-cutoff ladder diverges)")
            .decide_constant(f64::INFINITY, f64::INFINITY);
        return Ok((report, samples));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let abs: Vec<f64> = samples.iter().map(|s| s.absolute).collect();
    let sup_abs = abs.iter().cloned().fold(0.0, f64::max);
    let sup_lit = samples.iter().map(|s| s.literal).fold(0.0, f64::max);
    let fit = loglog_fit(&ts, &abs)?;
    let mut report = base
        .note(format!("sup literal={sup_lit:.4e}; sup majorant={sup_abs:.4e}"))
        .decide_exponent_band(fit.slope, 0.0, 0.0, f64::INFINITY, opts.slope_tol);
    report.fitted_constant = Some(sup_abs);
    Ok((report, samples))
}

/// Outcome of the global-existence integral test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntegralClass {
    Divergent,
    Convergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalIntegral {
    pub class: IntegralClass,
    /// `(R, I(R))` on the doubling ladder.
    pub partial: Vec<(f64, f64)>,
    /// Local decay exponent `β` of `h(u) = 1/(g₁²g₂)(e^u)` in `u = ln s`,
    /// i.e. `h ~ u^{-β}` at the top of the ladder.
    pub decay_exponent: f64,
}

impl GlobalIntegral {
    pub fn report(&self, g1: &GFamily, g2: &GFamily) -> EstimateReport {
        let (r, i) = self.partial.last().copied().unwrap_or((1.0, 0.0));
        let mut rep = EstimateReport::new("global_integral")
            .param("g1", g1.label())
            .param("g2", g2.label())
            .samples(format!("doubling ladder 2..{r:e} ({} rungs)", self.partial.len()))
            .note(format!("{:?}; I(R_max)={i:.6e}", self.class));
        rep.fitted_exponent = Some(self.decay_exponent);
        rep.predicted_exponent = Some(1.0);
        rep.fitted_constant = Some(i);
        rep.tolerance = GLOBAL_BETA_TOL;
        rep.pass = self.class == IntegralClass::Divergent;
        rep
    }
}

/// Slack on the decay exponent: `β ≤ 1 + tol` classifies as divergent.
pub const GLOBAL_BETA_TOL: f64 = 0.1;

/// Partial integrals `I(R) = ∫₁^R ds/(s g₁(s)² g₂(s))` on a doubling ladder.
///
/// In `u = ln s` the integrand is `h(u) = 1/(g₁²g₂)(e^u)`; the integral
/// diverges iff `h` decays no faster than `u^{-1}`. The classification
/// estimates the local exponent `β = -d ln h / d ln u` at the top of the
/// ladder and reports DIVERGENT iff `β ≤ 1 + 0.1`.
pub fn check_global_integral(g1: &GFamily, g2: &GFamily, r_max: f64) -> Result<GlobalIntegral> {
    if !(r_max >= 1e6) {
        return Err(Error::param("r_max", format!("{r_max} < 1e6")));
    }
    let h = |u: f64| {
        let s = u.exp();
        let a = g1.eval(s);
        1.0 / (a * a * g2.eval(s))
    };
    let mut partial = Vec::new();
    let mut total = 0.0;
    let mut u_lo = 0.0;
    let mut r = 1.0;
    while r < r_max {
        r *= 2.0;
        let u_hi = r.ln();
        let q = quadrature::integrate(h, u_lo, u_hi, 1e-300, 1e-12, 200);
        total += q.value;
        partial.push((r, total));
        u_lo = u_hi;
    }
    let u_top = r.ln();
    let u_prev = (r / 2.0).ln();
    let (h_top, h_prev) = (h(u_top), h(u_prev));
    let beta = if h_top > 0.0 && h_prev > 0.0 {
        -(h_top.ln() - h_prev.ln()) / (u_top.ln() - u_prev.ln())
    } else {
        f64::INFINITY
    };
    let class = if beta <= 1.0 + GLOBAL_BETA_TOL {
        IntegralClass::Divergent
    } else {
        IntegralClass::Convergent
    };
    Ok(GlobalIntegral {
        class,
        partial,
        decay_exponent: beta,
    })
}

/// Options for the empirical rate sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub slope_tol: f64,
    /// Allowed extra singularity `ε` for logarithmic `g`.
    pub log_eps: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            slope_tol: DEFAULT_SLOPE_TOL,
            log_eps: 0.1,
        }
    }
}

/// Periodic smoothed deltas `e^{σ𝓛}δ` for each scale `σ`: a broadband
/// family containing near-extremizers of `e^{t𝓛}: L^p → L^q` at every
/// resolved `t`.
pub fn kernel_samples(grid: &TorusGrid, s: &SymbolSpec, scales: &[f64]) -> Result<Vec<SpectralVectorField>> {
    let mut delta = SpectralVectorField::zero_scalar(*grid).untag();
    let inv_vol = 1.0 / grid.volume();
    delta
        .coeffs_mut()
        .iter_mut()
        .for_each(|c| *c = Complex64::new(inv_vol, 0.0));
    scales.iter().map(|&sig| semigroup_apply(&delta, sig, s)).collect()
}

/// Unit-amplitude single modes `cos(m x₁)` for `m = 1..N/2-1`.
pub fn single_mode_samples(grid: &TorusGrid) -> Vec<SpectralVectorField> {
    (1..grid.modes() as i64 / 2)
        .map(|m| {
            let mut f = SpectralVectorField::zero_scalar(*grid);
            let mut k = vec![0i64; grid.dim()];
            k[0] = m;
            f.set_mode(&k, &[Complex64::new(0.5, 0.0)]);
            f
        })
        .collect()
}

/// Log-spaced times on which `e^{t𝓛}` kernels are resolved by the grid
/// and still narrow compared with the period.
pub fn resolved_t_grid(grid: &TorusGrid, gamma: f64, count: usize) -> Result<Vec<f64>> {
    let h = grid.length() / grid.modes() as f64 * grid.wavenumber_unit();
    let lo = (3.0 * h).powf(gamma);
    let hi = 0.4f64.powf(gamma);
    if !(hi > 2.0 * lo) || count < 2 {
        return Err(Error::param(
            "grid",
            format!("N={} too coarse for a resolved time window at gamma={gamma}", grid.modes()),
        ));
    }
    Ok(log_grid(lo, hi, count))
}

/// Times at which the peak `λ* = (a/(γt))^{1/γ}` of `λ^a e^{-tλ^γ}` sits
/// between `4` and a quarter of the grid's axis cutoff.
pub fn sobolev_t_grid(grid: &TorusGrid, gamma: f64, gap: f64, count: usize) -> Result<Vec<f64>> {
    let a = if gap > 0.0 { gap } else { 1.0 };
    let k_hi = grid.modes() as f64 / 4.0 * grid.wavenumber_unit();
    if !(k_hi > 8.0) || count < 2 {
        return Err(Error::param("grid", format!("N={} too coarse for the smoothing window", grid.modes())));
    }
    let lo = a / (gamma * k_hi.powf(gamma));
    let hi = a / (gamma * 4f64.powf(gamma));
    Ok(log_grid(lo, hi, count))
}

fn ratio_sweep(
    t_grid: &[f64],
    samples: &[SpectralVectorField],
    s: &SymbolSpec,
    num: impl Fn(&SpectralVectorField) -> f64,
    den: impl Fn(&SpectralVectorField) -> f64,
) -> Result<Vec<f64>> {
    let dens: Vec<f64> = samples.iter().map(&den).collect();
    t_grid
        .iter()
        .map(|&t| {
            let mut best = 0.0f64;
            for (f, d) in samples.iter().zip(&dens) {
                if *d == 0.0 {
                    continue;
                }
                let evolved = semigroup_apply(f, t, s)?;
                best = best.max(num(&evolved) / d);
            }
            Ok(best)
        })
        .collect()
}

/// Empirical `‖e^{t𝓛}f‖_{L^q} / ‖f‖_{L^p}` rate.
///
/// For each `t` the ratio is maximized over `samples`; the log-log slope
/// over `t_grid` must lie within `slope_tol` of `-(n/p - n/q)/γ` (for
/// logarithmic `g`, of the band `[-(n/p-n/q)/γ - ε, -(n/p-n/q)/γ]`).
pub fn verify_semigroup_lp_lq(
    s: &SymbolSpec,
    p: LpExponent,
    q: LpExponent,
    t_grid: &[f64],
    samples: &[SpectralVectorField],
    opts: &RateOptions,
) -> Result<EstimateReport> {
    if p > q {
        return Err(Error::param("p", format!("p={p} > q={q}")));
    }
    let grid = *samples
        .first()
        .ok_or_else(|| Error::param("samples", "empty sample set"))?
        .grid();
    let n = grid.dim() as f64;
    let ratios = ratio_sweep(t_grid, samples, s, |f| f.lp_norm(q), |f| f.lp_norm(p))?;
    let fit = loglog_fit(t_grid, &ratios)?;
    let predicted = -(n * p.reciprocal() - n * q.reciprocal()) / s.gamma;
    let lo = if s.g.is_log_type() { predicted - opts.log_eps } else { predicted };
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let mut rep = EstimateReport::new("semigroup")
        .param("g", s.g.label())
        .param("gamma", s.gamma)
        .param("n", grid.dim())
        .param("N", grid.modes())
        .param("p", p)
        .param("q", q)
        .samples(format!(
            "{} samples; {} t in [{:e}, {:e}]",
            samples.len(),
            t_grid.len(),
            t_grid[0],
            t_grid[t_grid.len() - 1]
        ))
        .note(format!("band=[{lo:.4}, {predicted:.4}]"))
        .decide_exponent_band(fit.slope, predicted, lo, predicted, opts.slope_tol);
    rep.fitted_constant = Some(max_ratio);
    Ok(rep)
}

/// Empirical `‖e^{t𝓛}f‖_{H^{s₂,p}} / ‖f‖_{H^{s₁,p}}` rate, predicted
/// `-(s₂-s₁)/γ` (or `-(s₂-s₁)/(γ-ε)` for logarithmic `g`).
#[allow(clippy::too_many_arguments)]
pub fn verify_sobolev_smoothing(
    s: &SymbolSpec,
    s1: f64,
    s2: f64,
    p: LpExponent,
    t_grid: &[f64],
    samples: &[SpectralVectorField],
    opts: &RateOptions,
) -> Result<EstimateReport> {
    if s1 > s2 {
        return Err(Error::param("s1", format!("s1={s1} > s2={s2}")));
    }
    let grid = *samples
        .first()
        .ok_or_else(|| Error::param("samples", "empty sample set"))?
        .grid();
    let ratios = ratio_sweep(t_grid, samples, s, |f| f.sobolev_norm(s2, p), |f| f.sobolev_norm(s1, p))?;
    let fit = loglog_fit(t_grid, &ratios)?;
    let predicted = -(s2 - s1) / s.gamma;
    let lo = if s.g.is_log_type() {
        -(s2 - s1) / (s.gamma - opts.log_eps)
    } else {
        predicted
    };
    Ok(EstimateReport::new("sobolev")
        .param("g", s.g.label())
        .param("gamma", s.gamma)
        .param("s1", s1)
        .param("s2", s2)
        .param("p", p)
        .param("N", grid.modes())
        .samples(format!("{} samples; {} t", samples.len(), t_grid.len()))
        .note(format!("band=[{lo:.4}, {predicted:.4}]"))
        .decide_exponent_band(fit.slope, predicted, lo, predicted, opts.slope_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mikhlin_constant_and_log() {
        let r = default_r_grid();
        let rep = check_mikhlin(&GFamily::ConstantOne, 4, &r, 1e3, DerivativeMethod::Jet).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.fitted_constant, Some(0.0));
        // n = 3: k_max = n/2 + 1 rounded up.
        let rep = check_mikhlin(&GFamily::LogHalf, 3, &r, 1e3, DerivativeMethod::Jet).unwrap();
        assert!(rep.pass, "{}", rep.summary());
    }

    #[test]
    fn mikhlin_power_fails_at_first_derivative() {
        let rep = check_mikhlin(&GFamily::Power { eps: 1.0 }, 2, &default_r_grid(), 1e3, DerivativeMethod::Jet).unwrap();
        assert!(!rep.pass);
        assert!(rep.note.contains("first failing k=1"), "{}", rep.note);
    }

    #[test]
    fn mikhlin_rejects_zero_order() {
        assert!(check_mikhlin(&GFamily::LogHalf, 0, &default_r_grid(), 1e3, DerivativeMethod::Jet).is_err());
    }

    #[test]
    fn kernel_integrand_matches_finite_differences() {
        let g = GFamily::LogHalf;
        let (gamma, n, c) = (2.0, 2, 3.0);
        let f = |r: f64| r.powi(n as i32 - 1) * (-(r.powf(gamma)) / g.eval(c * r)).exp();
        for &r in &[0.3, 0.9, 1.7] {
            let exact = kernel_integrand(&g, gamma, n, c, r);
            let fd = crate::jet::central_derivative(f, r, n + 1, 1e-2);
            assert!((exact - fd).abs() < 1e-7 * exact.abs().max(1.0), "r={r}: {exact} vs {fd}");
        }
    }

    #[test]
    fn global_integral_examples() {
        let one = GFamily::ConstantOne;
        let res = check_global_integral(&one, &one, 1e6).unwrap();
        assert_eq!(res.class, IntegralClass::Divergent);
        let (r, i) = *res.partial.last().unwrap();
        assert!((i - r.ln()).abs() < 1e-9);
        let res = check_global_integral(&GFamily::Power { eps: 0.5 }, &one, 1e6).unwrap();
        assert_eq!(res.class, IntegralClass::Convergent);
        // Integrand s^{-2}: I(R) = 1 - 1/R.
        let (r, i) = *res.partial.last().unwrap();
        assert!((i - (1.0 - 1.0 / r)).abs() < 1e-9);
        assert!(check_global_integral(&one, &one, 1e3).is_err());
    }
}
