//! Periodic torus grids and their Fourier frequency lattice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform periodic grid on `[0, L)^n` with `N` modes per axis.
///
/// Mode indices are stored in FFT order; integer frequencies run over
/// `[-N/2, N/2)` along each axis and the physical wavevector is
/// `k * 2π / L`. Storage is row-major with the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    modes: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, modes: usize, length: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidGrid(format!("dimension {dim} (expected 2 or 3)")));
        }
        if modes < 8 || !modes.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{modes} modes per axis (need an even power of two >= 8)"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("period length {length}")));
        }
        Ok(Self { dim, modes, length })
    }

    /// Grid on the standard `2π`-periodic torus.
    pub fn standard(dim: usize, modes: usize) -> Result<Self> {
        Self::new(dim, modes, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points (equal to the number of Fourier modes).
    pub fn len(&self) -> usize {
        self.modes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber scale `2π / L`.
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn cell_volume(&self) -> f64 {
        (self.length / self.modes as f64).powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Signed integer frequency for an FFT-ordered axis index.
    pub fn axis_frequency(&self, index: usize) -> i64 {
        let n = self.modes as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT-ordered axis index for a signed frequency (wrapped modulo `N`).
    pub fn axis_index(&self, freq: i64) -> usize {
        freq.rem_euclid(self.modes as i64) as usize
    }

    /// Integer frequency vector of a flat mode index (unused axes are zero).
    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = self.axis_frequency(rem % self.modes);
            rem /= self.modes;
        }
        out
    }

    /// Physical wavevector `ξ = k·2π/L` of a flat mode index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.frequency(idx);
        let unit = self.wavenumber_unit();
        [k[0] as f64 * unit, k[1] as f64 * unit, k[2] as f64 * unit]
    }

    /// Euclidean norm `|ξ|` of the physical wavevector.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        let xi = self.wavevector(idx);
        (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
    }

    /// Flat index of an integer frequency vector (components wrapped).
    pub fn index_of(&self, freq: &[i64]) -> usize {
        let mut idx = 0;
        for axis in 0..self.dim {
            let f = freq.get(axis).copied().unwrap_or(0);
            idx = idx * self.modes + self.axis_index(f);
        }
        idx
    }

    /// Flat index of `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let k = self.frequency(idx);
        self.index_of(&[-k[0], -k[1], -k[2]])
    }

    /// True when some axis sits on the unpaired Nyquist frequency `-N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let k = self.frequency(idx);
        let half = (self.modes / 2) as i64;
        k[..self.dim].iter().any(|&f| f == -half)
    }

    /// Modes kept by the 2/3 truncation: `3|k_i| < N` on every axis.
    pub fn is_retained(&self, idx: usize) -> bool {
        let k = self.frequency(idx);
        let n = self.modes as i64;
        k[..self.dim].iter().all(|&f| 3 * f.abs() < n)
    }

    /// Largest `|k_i|` kept by the 2/3 truncation.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.modes as i64 - 1) / 3
    }

    /// Largest `|ξ|` over all grid frequencies.
    pub fn max_wavenumber(&self) -> f64 {
        (self.modes / 2) as f64 * self.wavenumber_unit() * (self.dim as f64).sqrt()
    }

    /// Physical coordinates of a flat grid-point index.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.length / self.modes as f64;
        let mut out = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = (rem % self.modes) as f64 * h;
            rem /= self.modes;
        }
        out
    }

    pub fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "n={} N={} L={} vs n={} N={} L={}",
                self.dim, self.modes, self.length, other.dim, other.modes, other.length
            )))
        }
    }
}
