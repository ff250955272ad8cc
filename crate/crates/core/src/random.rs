//! Seeded random sample fields.
//!
//! Each Fourier mode draws its coefficient from its own generator keyed by
//! `(seed, k)`, so a field sampled on a finer grid agrees with the coarse
//! one on every shared mode. This is what makes grid-refinement
//! comparisons meaningful.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_chacha::ChaCha8Rng;

use crate::field::SpectralVectorField;
use crate::grid::TorusGrid;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mode_rng(seed: u64, k: [i64; 3]) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for v in k {
        h = splitmix(h ^ (v as u64));
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// True for the representative of each `{k, -k}` pair: the first nonzero
/// component is positive.
fn is_positive_half(k: [i64; 3]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Which modes a random field may populate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Every paired (non-Nyquist) mode.
    Full,
    /// Only modes kept by the 2/3 truncation.
    Retained,
}

/// Random real field with complex Gaussian coefficients of standard
/// deviation `(1+|ξ|)^{-σ}`, zero mean. `ncomp` independent components.
pub fn random_field(grid: &TorusGrid, ncomp: usize, sigma: f64, seed: u64, band: Band) -> SpectralVectorField {
    let mut f = SpectralVectorField::zeros(*grid, ncomp).untag();
    let n = grid.len();
    let coeffs = f.coeffs_mut();
    for idx in 1..n {
        let k = grid.frequency(idx);
        if !is_positive_half(k) || grid.is_nyquist(idx) {
            continue;
        }
        if band == Band::Retained && !grid.is_retained(idx) {
            continue;
        }
        let cidx = grid.conjugate_index(idx);
        let amp = (1.0 + grid.wavenumber(idx)).powf(-sigma);
        let mut rng = mode_rng(seed, k);
        for c in 0..ncomp {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re, im) * (amp * FRAC_1_SQRT_2);
            coeffs[c * n + idx] = z;
            coeffs[c * n + cidx] = z.conj();
        }
    }
    f
}

/// A scalar sample field for Besov sweeps.
pub fn random_scalar(grid: &TorusGrid, sigma: f64, seed: u64) -> SpectralVectorField {
    random_field(grid, 1, sigma, seed, Band::Full)
}
