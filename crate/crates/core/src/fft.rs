//! Multi-dimensional complex FFTs on a [`TorusGrid`], built from `rustfft`
//! one-dimensional plans applied axis by axis.
//!
//! Convention: `û(k) = N^{-n} Σ_x u(x) e^{-ik·x}` so that
//! `u(x) = Σ_k û(k) e^{ik·x}`; a unit-amplitude Fourier coefficient is a
//! unit-amplitude physical wave.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

fn transform_axes(grid: &TorusGrid, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
    let n = grid.modes();
    let dim = grid.dim();
    debug_assert_eq!(data.len(), grid.len());
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];

    // Last axis is contiguous: rustfft handles the batch directly.
    plan.process_with_scratch(data, &mut scratch);

    let mut lines = vec![Complex64::default(); data.len()];
    for axis in (0..dim - 1).rev() {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        // Gather every line along `axis` into contiguous storage.
        let mut line = 0;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let dst = &mut lines[line * n..(line + 1) * n];
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = data[base + i * stride];
                }
                line += 1;
            }
        }
        plan.process_with_scratch(&mut lines, &mut scratch);
        let mut line = 0;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let src = &lines[line * n..(line + 1) * n];
                for (i, s) in src.iter().enumerate() {
                    data[base + i * stride] = *s;
                }
                line += 1;
            }
        }
    }
}

/// Physical samples to normalized Fourier coefficients, in place.
pub fn forward(grid: &TorusGrid, data: &mut [Complex64]) {
    let (fwd, _) = plans(grid.modes());
    transform_axes(grid, data, &fwd);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Fourier coefficients to physical samples, in place.
pub fn inverse(grid: &TorusGrid, data: &mut [Complex64]) {
    let (_, inv) = plans(grid.modes());
    transform_axes(grid, data, &inv);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_wave_has_unit_coefficient() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                Complex64::new((3.0 * x[0] - 2.0 * x[1]).cos(), 0.0)
            })
            .collect();
        forward(&g, &mut data);
        let a = g.index_of(&[3, -2]);
        let b = g.index_of(&[-3, 2]);
        for (i, c) in data.iter().enumerate() {
            let expect = if i == a || i == b { 0.5 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14, "{i}: {c}");
        }
    }

    #[test]
    fn round_trip_3d() {
        let g = TorusGrid::standard(3, 8).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&g, &mut data);
        inverse(&g, &mut data);
        for (a, b) in orig.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_direct_dft_3d() {
        let g = TorusGrid::standard(3, 8).unwrap();
        let phys: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.731).sin(), 0.0))
            .collect();
        let mut data = phys.clone();
        forward(&g, &mut data);
        for probe in [0usize, 5, 77, 300, 511] {
            let xi = g.wavevector(probe);
            let mut acc = Complex64::default();
            for (j, v) in phys.iter().enumerate() {
                let x = g.point(j);
                let phase = -(xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]);
                acc += v * Complex64::from_polar(1.0, phase);
            }
            acc /= g.len() as f64;
            assert!((acc - data[probe]).norm() < 1e-12);
        }
    }
}
