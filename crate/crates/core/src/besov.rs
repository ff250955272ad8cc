//! Discrete Littlewood-Paley decomposition on the torus, Besov norms, the
//! Bony paraproduct and randomized checks of the product estimates and
//! Besov embeddings.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LpExponent, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::report::{fmt_f64, EstimateReport};
use crate::spectral::dealiased_product;

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth monotone cut-off: `1` on `[0,1]`, `0` on `[2,∞)`.
pub fn theta(r: f64) -> f64 {
    let a = bump(2.0 - r);
    let b = bump(r - 1.0);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `ψ̂₀(r) = θ(r) - θ(2r)`, supported in `1/2 < r < 2`.
pub fn psi0_hat(r: f64) -> f64 {
    theta(r) - theta(2.0 * r)
}

/// `ψ̂_j(r) = ψ̂₀(2^{-j} r)`.
pub fn psi_hat(j: usize, r: f64) -> f64 {
    psi0_hat(r * 0.5f64.powi(j as i32))
}

/// Low-frequency multiplier `Ψ̂(r) = θ(2r)`.
pub fn low_hat(r: f64) -> f64 {
    theta(2.0 * r)
}

/// Dyadic annulus `2^{j-1} < |ξ| < 2^{j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub j: usize,
    pub inner: f64,
    pub outer: f64,
}

/// Littlewood-Paley multipliers sampled on a grid.
#[derive(Debug, Clone)]
pub struct LPFilterBank {
    grid: TorusGrid,
    low: Vec<f64>,
    blocks: Vec<Vec<f64>>,
    annuli: Vec<Annulus>,
    residual: f64,
}

/// Build the bank. The top block index is the smallest `J` with
/// `2^J ≥ max|ξ|`, so every grid frequency is covered and
/// `Ψ̂ + Σ_{j≤J} ψ̂_j` telescopes to `θ(2^{-J}|ξ|) = 1`.
pub fn build_filter_bank(grid: &TorusGrid) -> Result<LPFilterBank> {
    let kmax = grid.max_wavenumber();
    let j_max = kmax.log2().ceil().max(0.0) as usize;
    let n = grid.len();
    let radii: Vec<f64> = (0..n).map(|i| grid.wavenumber(i)).collect();
    let low: Vec<f64> = radii.iter().map(|&r| low_hat(r)).collect();
    let blocks: Vec<Vec<f64>> = (0..=j_max)
        .map(|j| radii.iter().map(|&r| psi_hat(j, r)).collect())
        .collect();
    let annuli = (0..=j_max)
        .map(|j| Annulus {
            j,
            inner: 2f64.powi(j as i32 - 1),
            outer: 2f64.powi(j as i32 + 1),
        })
        .collect();
    let residual = (0..n)
        .map(|i| (1.0 - low[i] - blocks.iter().map(|b| b[i]).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    if residual > 1e-12 {
        return Err(Error::PartitionOfUnity(residual));
    }
    Ok(LPFilterBank {
        grid: *grid,
        low,
        blocks,
        annuli,
        residual,
    })
}

impl LPFilterBank {
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn j_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn annuli(&self) -> &[Annulus] {
        &self.annuli
    }

    /// Max over grid frequencies of `|1 - Ψ̂ - Σ ψ̂_j|`.
    pub fn partition_residual(&self) -> f64 {
        self.residual
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn block(&self, j: usize) -> Result<&[f64]> {
        self.blocks.get(j).map(|b| b.as_slice()).ok_or(Error::BlockOutOfRange {
            j: j as i32,
            j_max: self.j_max(),
        })
    }

    /// Weights of the extended block index: `-1` is the low-pass `Ψ`.
    pub fn weights(&self, j: i32) -> Result<&[f64]> {
        if j == -1 {
            Ok(&self.low)
        } else if j >= 0 {
            self.block(j as usize)
        } else {
            Err(Error::BlockOutOfRange { j, j_max: self.j_max() })
        }
    }

    fn check(&self, f: &SpectralVectorField) -> Result<()> {
        self.grid.ensure_same(f.grid())
    }
}

/// `Δ_j f`.
pub fn lp_block(f: &SpectralVectorField, j: i32, bank: &LPFilterBank) -> Result<SpectralVectorField> {
    if j < 0 {
        return Err(Error::BlockOutOfRange { j, j_max: bank.j_max() });
    }
    bank.check(f)?;
    let w = bank.weights(j)?;
    Ok(f.map_modes(|i| w[i]))
}

/// `Ψ * f`.
pub fn low_pass(f: &SpectralVectorField, bank: &LPFilterBank) -> Result<SpectralVectorField> {
    bank.check(f)?;
    Ok(f.map_modes(|i| bank.low[i]))
}

/// `S_j f = Ψ*f + Σ_{0≤k≤j} Δ_k f`; empty (zero) for `j < -1`.
pub fn partial_sum(f: &SpectralVectorField, j: i32, bank: &LPFilterBank) -> Result<SpectralVectorField> {
    bank.check(f)?;
    let top = j.min(bank.j_max() as i32);
    let n = bank.grid.len();
    let mut w = vec![0.0; n];
    for k in -1..=top {
        for (acc, v) in w.iter_mut().zip(bank.weights(k)?) {
            *acc += v;
        }
    }
    Ok(f.map_modes(|i| w[i]))
}

/// Besov exponents `(s, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: LpExponent,
    pub q: LpExponent,
}

impl BesovParams {
    pub fn new(s: f64, p: LpExponent, q: LpExponent) -> Self {
        Self { s, p, q }
    }
}

fn lq_combine(values: impl Iterator<Item = f64>, q: LpExponent) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        let qv = q.value();
        values.map(|v| v.powf(qv)).sum::<f64>().powf(1.0 / qv)
    }
}

/// `‖Ψ*f‖_{L^p}` followed by `‖Δ_j f‖_{L^p}` for `j = 0..=J`.
pub fn block_norms(f: &SpectralVectorField, p: LpExponent, bank: &LPFilterBank) -> Result<Vec<f64>> {
    bank.check(f)?;
    let grid = bank.grid;
    let n = grid.len();
    if p.value() == 2.0 {
        let mut acc = vec![0.0; bank.blocks.len() + 1];
        for idx in 0..n {
            let e: f64 = (0..f.ncomp()).map(|c| f.coeff(idx, c).norm_sqr()).sum();
            if e == 0.0 {
                continue;
            }
            acc[0] += bank.low[idx].powi(2) * e;
            for (j, b) in bank.blocks.iter().enumerate() {
                acc[j + 1] += b[idx].powi(2) * e;
            }
        }
        let vol = grid.volume();
        return Ok(acc.into_iter().map(|a| (a * vol).sqrt()).collect());
    }
    let mut out = Vec::with_capacity(bank.blocks.len() + 1);
    out.push(low_pass(f, bank)?.lp_norm(p));
    for j in 0..=bank.j_max() {
        out.push(lp_block(f, j as i32, bank)?.lp_norm(p));
    }
    Ok(out)
}

/// `‖f‖_{B^s_{p,q}} = ‖Ψ*f‖_p + (Σ_j (2^{js}‖Δ_j f‖_p)^q)^{1/q}`.
pub fn besov_norm(f: &SpectralVectorField, params: BesovParams, bank: &LPFilterBank) -> Result<f64> {
    let norms = block_norms(f, params.p, bank)?;
    Ok(besov_from_blocks(&norms, params.s, params.q))
}

/// Combine precomputed [`block_norms`] into a Besov norm.
pub fn besov_from_blocks(norms: &[f64], s: f64, q: LpExponent) -> f64 {
    let tail = norms[1..]
        .iter()
        .enumerate()
        .map(|(j, v)| 2f64.powf(j as f64 * s) * v);
    norms[0] + lq_combine(tail, q)
}

/// Bony decomposition `fg = T_f g + T_g f + R(f,g)`.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    pub t_f_g: SpectralVectorField,
    pub t_g_f: SpectralVectorField,
    pub remainder: SpectralVectorField,
}

impl Paraproduct {
    pub fn total(&self) -> Result<SpectralVectorField> {
        self.t_f_g.add(&self.t_g_f)?.add(&self.remainder)
    }
}

/// Paraproduct pieces over the block indices `-1..=J` (`Δ_{-1} = Ψ`):
/// `T_f g = Σ_k S_{k-3}f Δ_k g`, `T_g f = Σ_k S_{k-3}g Δ_k f`,
/// `R = Σ_k Δ_k f Σ_{|l|≤2} Δ_{k+l} g`. Every product is dealiased, so the
/// pieces sum to the dealiased product `fg`.
pub fn paraproduct_decompose(
    f: &SpectralVectorField,
    g: &SpectralVectorField,
    bank: &LPFilterBank,
) -> Result<Paraproduct> {
    f.check_compatible(g)?;
    bank.check(f)?;
    let top = bank.j_max() as i32;
    let blocks = |h: &SpectralVectorField| -> Result<Vec<SpectralVectorField>> {
        (-1..=top).map(|k| Ok(h.map_modes(|i| bank.weights(k).map(|w| w[i]).unwrap_or(0.0)))).collect()
    };
    let (fb, gb) = (blocks(f)?, blocks(g)?);
    let at = |v: &[SpectralVectorField], k: i32| -> Option<usize> {
        if (-1..=top).contains(&k) {
            Some((k + 1) as usize)
        } else {
            None
        }
        .filter(|&i| i < v.len())
    };
    let zero = f.scaled(0.0).untag();
    let mut t_f_g = zero.clone();
    let mut t_g_f = zero.clone();
    let mut remainder = zero.clone();
    // Running partial sums S_{k-3}.
    let mut sf = zero.clone();
    let mut sg = zero;
    for k in -1..=top {
        if let Some(i) = at(&fb, k - 3) {
            sf.axpy(1.0, &fb[i])?;
            sg.axpy(1.0, &gb[i])?;
        }
        let ik = (k + 1) as usize;
        if k - 3 >= -1 {
            t_f_g.axpy(1.0, &dealiased_product(&sf, &gb[ik])?)?;
            t_g_f.axpy(1.0, &dealiased_product(&sg, &fb[ik])?)?;
        }
        let mut band = f.scaled(0.0).untag();
        for l in -2..=2 {
            if let Some(i) = at(&gb, k + l) {
                band.axpy(1.0, &gb[i])?;
            }
        }
        remainder.axpy(1.0, &dealiased_product(&fb[ik], &band)?)?;
    }
    Ok(Paraproduct {
        t_f_g,
        t_g_f,
        remainder,
    })
}

/// Exponent split for the standard product estimate:
/// `1/p = 1/p₁ + 1/p₂ = 1/q₁ + 1/q₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSplit {
    pub p1: LpExponent,
    pub p2: LpExponent,
    pub q1: LpExponent,
    pub q2: LpExponent,
}

impl HolderSplit {
    pub fn validate(&self, p: LpExponent) -> Result<()> {
        let target = p.reciprocal();
        let a = self.p1.reciprocal() + self.p2.reciprocal();
        let b = self.q1.reciprocal() + self.q2.reciprocal();
        if (a - target).abs() > 1e-12 {
            return Err(Error::HolderSplit(format!("1/p1 + 1/p2 = {a} but 1/p = {target}")));
        }
        if (b - target).abs() > 1e-12 {
            return Err(Error::HolderSplit(format!("1/q1 + 1/q2 = {b} but 1/p = {target}")));
        }
        Ok(())
    }
}

fn max_ratio(values: impl Iterator<Item = Result<(f64, f64)>>) -> Result<(f64, usize)> {
    let mut best = 0.0f64;
    let mut used = 0;
    for v in values {
        let (num, den) = v?;
        if den > 0.0 {
            best = best.max(num / den);
            used += 1;
        }
    }
    Ok((best, used))
}

/// `‖fg‖_{B^s_{p,q}} / (‖f‖_{L^{p₁}}‖g‖_{B^s_{p₂,q}} + ‖f‖_{B^s_{q₁,q}}‖g‖_{L^{q₂}})`
/// maximized over `pairs`; samples with a zero denominator are skipped.
pub fn verify_product_est_standard(
    pairs: &[(SpectralVectorField, SpectralVectorField)],
    s: f64,
    p: LpExponent,
    q: LpExponent,
    split: HolderSplit,
    bank: &LPFilterBank,
    c_max: f64,
) -> Result<EstimateReport> {
    let base = EstimateReport::new("product_standard")
        .param("s", s)
        .param("p", p)
        .param("q", q)
        .param("p1", split.p1)
        .param("p2", split.p2)
        .param("q1", split.q1)
        .param("q2", split.q2)
        .param("N", bank.grid.modes());
    if !(s > 0.0) {
        return Ok(base.rejected("s>0 violated"));
    }
    split.validate(p)?;
    let (ratio, used) = max_ratio(pairs.iter().map(|(f, g)| {
        let fg = dealiased_product(f, g)?;
        let num = besov_norm(&fg, BesovParams::new(s, p, q), bank)?;
        let den = f.lp_norm(split.p1) * besov_norm(g, BesovParams::new(s, split.p2, q), bank)?
            + besov_norm(f, BesovParams::new(s, split.q1, q), bank)? * g.lp_norm(split.q2);
        Ok((num, den))
    }))?;
    Ok(base
        .samples(format!("{used} of {} pairs", pairs.len()))
        .decide_constant(ratio, c_max))
}

/// `‖fg‖_{B^s_{p,q}} / (‖f‖_{B^{s₁}_{p₁,q}}‖g‖_{B^{s₂}_{p₂,q}})` with
/// `s = s₁+s₂-n(1/p₁+1/p₂-1/p)`, maximized over `pairs`. Parameter
/// tuples outside the hypotheses are rejected with the failed
/// inequality named.
#[allow(clippy::too_many_arguments)]
pub fn verify_product_est_chemin(
    pairs: &[(SpectralVectorField, SpectralVectorField)],
    s1: f64,
    s2: f64,
    p1: LpExponent,
    p2: LpExponent,
    p: LpExponent,
    q: LpExponent,
    bank: &LPFilterBank,
    c_max: f64,
) -> Result<EstimateReport> {
    let n = bank.grid.dim() as f64;
    let base = EstimateReport::new("product_chemin")
        .param("s1", s1)
        .param("s2", s2)
        .param("p1", p1)
        .param("p2", p2)
        .param("p", p)
        .param("q", q)
        .param("N", bank.grid.modes());
    let mut failed = Vec::new();
    if !(s1 < n * p1.reciprocal()) {
        failed.push("s₁<n/p₁");
    }
    if !(s2 < n * p2.reciprocal()) {
        failed.push("s₂<n/p₂");
    }
    if !(s1 + s2 > 0.0) {
        failed.push("s₁+s₂>0");
    }
    if !(p.reciprocal() <= p1.reciprocal() + p2.reciprocal() + 1e-12) {
        failed.push("1/p≤1/p₁+1/p₂");
    }
    if !failed.is_empty() {
        return Ok(base.rejected(format!("hypothesis violated: {}", failed.join(", "))));
    }
    let s = s1 + s2 - n * (p1.reciprocal() + p2.reciprocal() - p.reciprocal());
    let (ratio, used) = max_ratio(pairs.iter().map(|(f, g)| {
        let fg = dealiased_product(f, g)?;
        let num = besov_norm(&fg, BesovParams::new(s, p, q), bank)?;
        let den = besov_norm(f, BesovParams::new(s1, p1, q), bank)? * besov_norm(g, BesovParams::new(s2, p2, q), bank)?;
        Ok((num, den))
    }))?;
    Ok(base
        .param("s", s)
        .samples(format!("{used} of {} pairs", pairs.len()))
        .decide_constant(ratio, c_max))
}

/// One of the four Besov embedding inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingPair {
    /// `‖f‖_{B^{β₁}_{p,q₂}} ≤ C‖f‖_{B^{β₂}_{p,q₁}}`, `q₁ ≤ q₂`, `β₁ ≤ β₂`.
    Summability {
        beta1: f64,
        beta2: f64,
        p: LpExponent,
        q1: LpExponent,
        q2: LpExponent,
    },
    /// `‖f‖_{B^{γ₂}_{p₂,q}} ≤ C‖f‖_{B^{γ₁}_{p₁,q}}` with `γ₁ = γ₂ + n(1/p₁-1/p₂)`.
    Integrability {
        gamma2: f64,
        p1: LpExponent,
        p2: LpExponent,
        q: LpExponent,
    },
    /// `‖f‖_{H^{s,p}} ≤ C‖f‖_{B^r_{p,q}}`, `r > s > 0`.
    Sobolev { s: f64, r: f64, p: LpExponent, q: LpExponent },
    /// `‖f‖_{H^{s,2}} ≈ ‖f‖_{B^s_{2,2}} ≤ C‖f‖_{B^r_{2,q}}`, `r > s > 0`.
    Hilbert { s: f64, r: f64, q: LpExponent },
}

impl EmbeddingPair {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::param("embedding", why.to_string()));
        match *self {
            EmbeddingPair::Summability { beta1, beta2, q1, q2, .. } => {
                if q1 > q2 {
                    return bad("q1 > q2");
                }
                if beta1 > beta2 {
                    return bad("beta1 > beta2");
                }
            }
            EmbeddingPair::Integrability { p1, p2, .. } => {
                if p1 > p2 {
                    return bad("p1 > p2");
                }
            }
            EmbeddingPair::Sobolev { s, r, .. } | EmbeddingPair::Hilbert { s, r, .. } => {
                if !(r > s && s > 0.0) {
                    return bad("need r > s > 0");
                }
            }
        }
        Ok(())
    }

    fn label(&self) -> String {
        match *self {
            EmbeddingPair::Summability { beta1, beta2, p, q1, q2 } => {
                format!("B^{beta1}_({p},{q2}) <= B^{beta2}_({p},{q1})")
            }
            EmbeddingPair::Integrability { gamma2, p1, p2, q } => {
                format!("B^{gamma2}_({p2},{q}) <= B^gamma1_({p1},{q})")
            }
            EmbeddingPair::Sobolev { s, r, p, q } => format!("H^({s},{p}) <= B^{r}_({p},{q})"),
            EmbeddingPair::Hilbert { s, r, q } => format!("H^({s},2) = B^{s}_(2,2) <= B^{r}_(2,{q})"),
        }
    }
}

/// Check each embedding on `samples`: the fitted constant is the max of
/// left/right over samples and the report passes iff it is at most
/// `c_max`. The Hilbert pair additionally records the range of
/// `‖f‖_{H^{s,2}}/‖f‖_{B^s_{2,2}}` in the note.
pub fn verify_embeddings(
    samples: &[SpectralVectorField],
    pairs: &[EmbeddingPair],
    bank: &LPFilterBank,
    c_max: f64,
) -> Result<Vec<EstimateReport>> {
    let n = bank.grid.dim() as f64;
    let two = LpExponent::new(2.0)?;
    let mut reports = Vec::with_capacity(pairs.len());
    for pair in pairs {
        pair.validate()?;
        let mut equiv = (f64::INFINITY, 0.0f64);
        let (ratio, used) = max_ratio(samples.iter().map(|f| {
            Ok(match *pair {
                EmbeddingPair::Summability { beta1, beta2, p, q1, q2 } => (
                    besov_norm(f, BesovParams::new(beta1, p, q2), bank)?,
                    besov_norm(f, BesovParams::new(beta2, p, q1), bank)?,
                ),
                EmbeddingPair::Integrability { gamma2, p1, p2, q } => {
                    let gamma1 = gamma2 + n * (p1.reciprocal() - p2.reciprocal());
                    (
                        besov_norm(f, BesovParams::new(gamma2, p2, q), bank)?,
                        besov_norm(f, BesovParams::new(gamma1, p1, q), bank)?,
                    )
                }
                EmbeddingPair::Sobolev { s, r, p, q } => {
                    (f.sobolev_norm(s, p), besov_norm(f, BesovParams::new(r, p, q), bank)?)
                }
                EmbeddingPair::Hilbert { s, r, q } => {
                    let h = f.sobolev_norm(s, two);
                    let b = besov_norm(f, BesovParams::new(s, two, two), bank)?;
                    if b > 0.0 {
                        equiv = (equiv.0.min(h / b), equiv.1.max(h / b));
                    }
                    (h, besov_norm(f, BesovParams::new(r, two, q), bank)?)
                }
            })
        }))?;
        let mut rep = EstimateReport::new("embedding")
            .param("pair", pair.label())
            .param("N", bank.grid.modes())
            .samples(format!("{used} of {} fields", samples.len()));
        if matches!(pair, EmbeddingPair::Hilbert { .. }) && equiv.1 > 0.0 {
            rep = rep.note(format!("H^s/B^s_(2,2) in [{:.4}, {:.4}]", equiv.0, equiv.1));
        }
        reports.push(rep.decide_constant(ratio, c_max));
    }
    Ok(reports)
}

/// One row of a norm sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRow {
    pub sample_id: usize,
    pub params: BesovParams,
    pub norm: f64,
}

pub const NORM_CSV_HEADER: [&str; 5] = ["sample_id", "s", "p", "q", "norm"];

/// Evaluate every `(sample, params)` combination.
pub fn norm_sweep(samples: &[SpectralVectorField], params: &[BesovParams], bank: &LPFilterBank) -> Result<Vec<NormRow>> {
    let mut rows = Vec::with_capacity(samples.len() * params.len());
    for (id, f) in samples.iter().enumerate() {
        for &bp in params {
            rows.push(NormRow {
                sample_id: id,
                params: bp,
                norm: besov_norm(f, bp, bank)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_norm_csv<W: Write>(w: W, rows: &[NormRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(NORM_CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.sample_id.to_string(),
            fmt_f64(r.params.s),
            r.params.p.to_string(),
            r.params.q.to_string(),
            fmt_f64(r.norm),
        ])?;
    }
    out.flush()?;
    Ok(())
}
