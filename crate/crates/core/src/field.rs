//! Spectral vector and tensor fields on a torus grid.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::TorusGrid;

/// An integrability exponent in `[1, ∞]`.
///
/// Serialized as a JSON number, or the string `"inf"` for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LpExponent(f64);

impl LpExponent {
    pub const INFINITY: LpExponent = LpExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 && !p.is_nan() {
            Ok(Self(p))
        } else {
            Err(Error::param("p", format!("{p} is not in [1, inf]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(v) => v,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Text(t) => return Err(serde::de::Error::custom(format!("bad exponent `{t}`"))),
        };
        LpExponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// Discrete `L^p` norm of pointwise magnitudes: Riemann sum with cell
/// volume weights, max for `p = ∞`.
pub fn lp_norm_of_magnitudes(grid: &TorusGrid, magnitudes: &[f64], p: LpExponent) -> f64 {
    if p.is_infinite() {
        return magnitudes.iter().fold(0.0, |m, &v| m.max(v));
    }
    let p = p.value();
    let dv = grid.cell_volume();
    if p == 2.0 {
        return (magnitudes.iter().map(|v| v * v).sum::<f64>() * dv).sqrt();
    }
    // Scale by the max before powering to keep large p finite.
    let scale = magnitudes.iter().fold(0.0f64, |m, &v| m.max(v));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = magnitudes.iter().map(|v| (v / scale).powf(p)).sum();
    scale * (sum * dv).powf(1.0 / p)
}

/// Complex Fourier coefficients of a real `ncomp`-component field.
///
/// Vector fields carry `n` components; scalar fields are one-component
/// fields. Coefficients are stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: TorusGrid,
    ncomp: usize,
    coeffs: Vec<Complex64>,
    div_free: bool,
}

impl SpectralVectorField {
    pub fn zeros(grid: TorusGrid, ncomp: usize) -> Self {
        Self {
            grid,
            ncomp,
            coeffs: vec![Complex64::default(); ncomp * grid.len()],
            div_free: ncomp == grid.dim(),
        }
    }

    /// Zero vector field with `n` components.
    pub fn zero_vector(grid: TorusGrid) -> Self {
        Self::zeros(grid, grid.dim())
    }

    pub fn zero_scalar(grid: TorusGrid) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn from_coeffs(grid: TorusGrid, ncomp: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != ncomp * grid.len() {
            return Err(Error::ComponentMismatch {
                expected: ncomp * grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid,
            ncomp,
            coeffs,
            div_free: false,
        })
    }

    /// Transform real physical samples (one slice per component).
    pub fn from_physical(grid: TorusGrid, components: &[Vec<f64>]) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(components.len() * grid.len());
        for comp in components {
            if comp.len() != grid.len() {
                return Err(Error::ComponentMismatch {
                    expected: grid.len(),
                    found: comp.len(),
                });
            }
            let mut buf: Vec<Complex64> = comp.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::forward(&grid, &mut buf);
            coeffs.extend(buf);
        }
        Ok(Self {
            grid,
            ncomp: components.len(),
            coeffs,
            div_free: false,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn is_div_free(&self) -> bool {
        self.div_free
    }

    pub(crate) fn set_div_free(&mut self, tag: bool) {
        self.div_free = tag;
    }

    /// Drop the divergence-free tag (after an arbitrary edit).
    pub fn untag(mut self) -> Self {
        self.div_free = false;
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutable coefficients; clears the divergence-free tag.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.div_free = false;
        &mut self.coeffs
    }

    pub(crate) fn coeffs_mut_keep_tag(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        self.div_free = false;
        let n = self.grid.len();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn coeff(&self, idx: usize, c: usize) -> Complex64 {
        self.coeffs[c * self.grid.len() + idx]
    }

    /// Set the amplitude of mode `k` and its Hermitian partner `-k`, so the
    /// physical field is `2 Re(a e^{ik·x})` (or `a` at `k = 0`).
    pub fn set_mode(&mut self, freq: &[i64], amplitude: &[Complex64]) {
        self.div_free = false;
        let n = self.grid.len();
        let idx = self.grid.index_of(freq);
        let cidx = self.grid.conjugate_index(idx);
        for (c, a) in amplitude.iter().enumerate().take(self.ncomp) {
            if idx == cidx {
                self.coeffs[c * n + idx] = Complex64::new(a.re, 0.0);
            } else {
                self.coeffs[c * n + idx] = *a;
                self.coeffs[c * n + cidx] = a.conj();
            }
        }
    }

    /// Physical samples, one vector per component (imaginary parts dropped).
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.to_physical_complex()
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.re).collect())
            .collect()
    }

    pub fn to_physical_complex(&self) -> Vec<Vec<Complex64>> {
        (0..self.ncomp)
            .map(|c| {
                let mut buf = self.component(c).to_vec();
                fft::inverse(&self.grid, &mut buf);
                buf
            })
            .collect()
    }

    /// Largest imaginary part of the physical field relative to its maximum.
    pub fn imaginary_residual(&self) -> f64 {
        let phys = self.to_physical_complex();
        let (mut im, mut re) = (0.0f64, 0.0f64);
        for comp in &phys {
            for v in comp {
                im = im.max(v.im.abs());
                re = re.max(v.re.abs());
            }
        }
        if re == 0.0 {
            im
        } else {
            im / re
        }
    }

    /// `max_k |c(-k) - conj(c(k))|` over paired modes.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for idx in 0..n {
            let cidx = self.grid.conjugate_index(idx);
            for c in 0..self.ncomp {
                let a = self.coeffs[c * n + idx];
                let b = self.coeffs[c * n + cidx];
                worst = worst.max((b - a.conj()).norm());
            }
        }
        worst
    }

    /// Euclidean norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_k |ξ·û(k)| / (|ξ| ‖û‖)` over nonzero modes (0 for a zero field).
    pub fn divergence_residual(&self) -> f64 {
        if self.ncomp != self.grid.dim() {
            return f64::NAN;
        }
        let norm = self.coeff_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for idx in 1..n {
            let xi = self.grid.wavevector(idx);
            let kn = self.grid.wavenumber(idx);
            let mut dot = Complex64::default();
            for c in 0..self.ncomp {
                dot += self.coeffs[c * n + idx] * xi[c];
            }
            worst = worst.max(dot.norm() / kn);
        }
        worst / norm
    }

    /// Mean value (zero-mode amplitude) per component.
    pub fn mean(&self) -> Vec<f64> {
        (0..self.ncomp).map(|c| self.coeff(0, c).re).collect()
    }

    /// `L²` norm via Parseval (exact for the Riemann-sum norm).
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()).sqrt()
    }

    /// Real `L²` inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        Ok(s * self.grid.volume())
    }

    /// Pointwise Euclidean magnitude of the physical field.
    pub fn magnitudes(&self) -> Vec<f64> {
        let phys = self.to_physical();
        let n = self.grid.len();
        (0..n)
            .map(|i| phys.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    /// Discrete `L^p` norm of the pointwise magnitude.
    pub fn lp_norm(&self, p: LpExponent) -> f64 {
        if p.value() == 2.0 {
            return self.l2_norm();
        }
        lp_norm_of_magnitudes(&self.grid, &self.magnitudes(), p)
    }

    /// Bessel-potential norm `‖(1-Δ)^{s/2} f‖_{L^p}`.
    pub fn sobolev_norm(&self, s: f64, p: LpExponent) -> f64 {
        let mut g = self.clone();
        let n = self.grid.len();
        for idx in 0..n {
            let k = self.grid.wavenumber(idx);
            let w = (1.0 + k * k).powf(s / 2.0);
            for c in 0..self.ncomp {
                g.coeffs[c * n + idx] *= w;
            }
        }
        g.lp_norm(p)
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`; the tag survives only if both are tagged.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
        self.div_free = self.div_free && other.div_free;
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.ncomp != other.ncomp {
            return Err(Error::ComponentMismatch {
                expected: self.ncomp,
                found: other.ncomp,
            });
        }
        Ok(())
    }

    /// Apply a per-mode real factor to every component.
    pub fn map_modes(&self, factor: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        let n = self.grid.len();
        for idx in 0..n {
            let f = factor(idx);
            for c in 0..self.ncomp {
                out.coeffs[c * n + idx] *= f;
            }
        }
        out
    }
}

/// Coefficients of an `n×n` tensor field, entry `(i, j)` stored at block
/// `i*n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTensorField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralTensorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        let d = grid.dim();
        Self {
            grid,
            coeffs: vec![Complex64::default(); d * d * grid.len()],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn entry(&self, i: usize, j: usize) -> &[Complex64] {
        let n = self.grid.len();
        let b = i * self.grid.dim() + j;
        &self.coeffs[b * n..(b + 1) * n]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        let b = i * self.grid.dim() + j;
        &mut self.coeffs[b * n..(b + 1) * n]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for b in 0..self.grid.dim() * self.grid.dim() {
            for idx in 0..n {
                let cidx = self.grid.conjugate_index(idx);
                let a = self.coeffs[b * n + idx];
                let c = self.coeffs[b * n + cidx];
                worst = worst.max((c - a.conj()).norm());
            }
        }
        worst
    }
}
