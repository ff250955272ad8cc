//! Fourier-diagonal operators, the Leray projection and the Leray-α
//! bilinear term, all evaluated per mode in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{SpectralTensorField, SpectralVectorField};
use crate::symbol::SymbolSpec;

/// Which regularizing operator multiplies the advected field in `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WVariant {
    /// `P(1-α²𝓛₂)⁻¹ div(u ⊗ (1-α²𝓛₂)v)`: the positive-definite operator
    /// in both slots.
    #[default]
    Standard,
    /// `P(1-α²𝓛₂)⁻¹ div(u ⊗ (1+α²𝓛₂)v)`: the mixed-sign form.
    MixedSign,
}

/// Multiply every mode by `-|ξ|^γ/g(|ξ|)`.
///
/// The zero mode is sent to `0` for `γ > 0`; for `γ ≤ 0` the symbol is
/// singular there and a nonzero mean is rejected.
pub fn apply_multiplier(f: &SpectralVectorField, s: &SymbolSpec) -> Result<SpectralVectorField> {
    let grid = *f.grid();
    if s.gamma <= 0.0 && (0..f.ncomp()).any(|c| f.coeff(0, c) != Complex64::default()) {
        return Err(Error::SingularZeroMode { gamma: s.gamma });
    }
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| if idx == 0 { 0.0 } else { s.symbol(grid.wavenumber(idx)) });
    out.set_div_free(tag);
    Ok(out)
}

/// Multiply every mode by `exp(-t|ξ|^γ/g(|ξ|))`.
pub fn semigroup_apply(f: &SpectralVectorField, t: f64, s: &SymbolSpec) -> Result<SpectralVectorField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("{t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| s.semigroup(t, grid.wavenumber(idx)));
    out.set_div_free(tag);
    Ok(out)
}

/// Per-mode factor of `(1 - α²𝓛₂)`; infinite where the symbol is singular.
pub fn helmholtz_symbol(alpha: f64, s2: &SymbolSpec, r: f64) -> f64 {
    1.0 - alpha * alpha * s2.symbol(r)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} must be finite and >= 0")))
    }
}

/// Apply `(1 - α²𝓛₂)`.
pub fn helmholtz_forward(f: &SpectralVectorField, alpha: f64, s2: &SymbolSpec) -> Result<SpectralVectorField> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    if s2.gamma < 0.0 && (0..f.ncomp()).any(|c| f.coeff(0, c) != Complex64::default()) {
        return Err(Error::SingularZeroMode { gamma: s2.gamma });
    }
    let grid = *f.grid();
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| {
        let m = helmholtz_symbol(alpha, s2, grid.wavenumber(idx));
        if m.is_finite() {
            m
        } else {
            0.0
        }
    });
    out.set_div_free(tag);
    Ok(out)
}

/// Apply `(1 + α²𝓛₂)`, the mixed-sign regularizer.
pub fn mixed_forward(f: &SpectralVectorField, alpha: f64, s2: &SymbolSpec) -> Result<SpectralVectorField> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    if s2.gamma < 0.0 && (0..f.ncomp()).any(|c| f.coeff(0, c) != Complex64::default()) {
        return Err(Error::SingularZeroMode { gamma: s2.gamma });
    }
    let grid = *f.grid();
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| {
        let m = 1.0 + alpha * alpha * s2.symbol(grid.wavenumber(idx));
        if m.is_finite() {
            m
        } else {
            0.0
        }
    });
    out.set_div_free(tag);
    Ok(out)
}

/// Apply `(1 - α²𝓛₂)⁻¹`: per mode `1/(1 + α²|ξ|^{γ₂}/g₂(|ξ|))`.
pub fn helmholtz_inverse(f: &SpectralVectorField, alpha: f64, s2: &SymbolSpec) -> Result<SpectralVectorField> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| {
        let m = helmholtz_symbol(alpha, s2, grid.wavenumber(idx));
        if m.is_finite() {
            1.0 / m
        } else {
            0.0
        }
    });
    out.set_div_free(tag);
    Ok(out)
}

/// Hodge projection onto divergence-free fields:
/// `û(k) ↦ û(k) - ξ(ξ·û(k))/|ξ|²`.
///
/// The zero mode is left unchanged. Nyquist modes have no Hermitian
/// partner on the grid and are set to zero.
pub fn leray_project(f: &SpectralVectorField) -> Result<SpectralVectorField> {
    let grid = *f.grid();
    let dim = grid.dim();
    if f.ncomp() != dim {
        return Err(Error::ComponentMismatch {
            expected: dim,
            found: f.ncomp(),
        });
    }
    let n = grid.len();
    let mut out = f.clone();
    let coeffs = out.coeffs_mut_keep_tag();
    for idx in 1..n {
        if grid.is_nyquist(idx) {
            for c in 0..dim {
                coeffs[c * n + idx] = Complex64::default();
            }
            continue;
        }
        let xi = grid.wavevector(idx);
        let k2: f64 = xi[..dim].iter().map(|v| v * v).sum();
        let mut dot = Complex64::default();
        for c in 0..dim {
            dot += coeffs[c * n + idx] * xi[c];
        }
        let dot = dot / k2;
        for c in 0..dim {
            coeffs[c * n + idx] -= dot * xi[c];
        }
    }
    out.set_div_free(true);
    Ok(out)
}

/// Zero every mode outside the 2/3-rule retained set.
pub fn dealias(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = *f.grid();
    let tag = f.is_div_free();
    let mut out = f.map_modes(|idx| if grid.is_retained(idx) { 1.0 } else { 0.0 });
    out.set_div_free(tag);
    out
}

fn truncated_physical(f: &SpectralVectorField) -> Vec<Vec<f64>> {
    dealias(f).to_physical()
}

fn forward_truncated(grid: &crate::grid::TorusGrid, phys: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = phys.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(grid, &mut buf);
    for (idx, c) in buf.iter_mut().enumerate() {
        if !grid.is_retained(idx) {
            *c = Complex64::default();
        }
    }
    buf
}

/// Dealiased pointwise product of two scalar (one-component) fields, or
/// componentwise product of equal-width fields.
pub fn dealiased_product(f: &SpectralVectorField, g: &SpectralVectorField) -> Result<SpectralVectorField> {
    f.check_compatible(g)?;
    let grid = *f.grid();
    let (pf, pg) = (truncated_physical(f), truncated_physical(g));
    let mut coeffs = Vec::with_capacity(f.ncomp() * grid.len());
    for (a, b) in pf.iter().zip(&pg) {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        coeffs.extend(forward_truncated(&grid, &prod));
    }
    SpectralVectorField::from_coeffs(grid, f.ncomp(), coeffs)
}

/// `(u ⊗ v)_{ij} = u_i v_j`, formed in physical space with 2/3-rule
/// truncation of the inputs and the product.
pub fn tensor_product(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralTensorField> {
    u.grid().ensure_same(v.grid())?;
    let grid = *u.grid();
    let dim = grid.dim();
    for f in [u, v] {
        if f.ncomp() != dim {
            return Err(Error::ComponentMismatch {
                expected: dim,
                found: f.ncomp(),
            });
        }
    }
    let (pu, pv) = (truncated_physical(u), truncated_physical(v));
    let mut out = SpectralTensorField::zeros(grid);
    for i in 0..dim {
        for j in 0..dim {
            let prod: Vec<f64> = pu[i].iter().zip(&pv[j]).map(|(a, b)| a * b).collect();
            out.entry_mut(i, j).copy_from_slice(&forward_truncated(&grid, &prod));
        }
    }
    Ok(out)
}

/// `(div T)_i = Σ_j ∂_j T_{ji}`, so `div(u ⊗ v) = (u·∇)v` for
/// divergence-free `u`. Nyquist modes of the output are zeroed.
pub fn divergence(t: &SpectralTensorField) -> SpectralVectorField {
    let grid = *t.grid();
    let dim = grid.dim();
    let n = grid.len();
    let mut out = SpectralVectorField::zero_vector(grid).untag();
    let coeffs = out.coeffs_mut();
    for idx in 0..n {
        if idx == 0 || grid.is_nyquist(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        for i in 0..dim {
            let mut acc = Complex64::default();
            for (j, x) in xi.iter().enumerate().take(dim) {
                acc += t.entry(j, i)[idx] * *x;
            }
            coeffs[i * n + idx] = Complex64::new(-acc.im, acc.re);
        }
    }
    out
}

/// The Leray-α bilinear term
/// `W(u, v) = P(1-α²𝓛₂)⁻¹ div(u ⊗ R v)` with `R` chosen by `variant`.
pub fn nonlinear_w(
    u: &SpectralVectorField,
    v: &SpectralVectorField,
    alpha: f64,
    s2: &SymbolSpec,
    variant: WVariant,
) -> Result<SpectralVectorField> {
    let regularized = match variant {
        WVariant::Standard => helmholtz_forward(v, alpha, s2)?,
        WVariant::MixedSign => mixed_forward(v, alpha, s2)?,
    };
    let t = tensor_product(u, &regularized)?;
    let d = divergence(&t);
    leray_project(&helmholtz_inverse(&d, alpha, s2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::symbol::GFamily;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(grid: TorusGrid, k: &[i64], amp: &[Complex64]) -> SpectralVectorField {
        let mut f = SpectralVectorField::zeros(grid, amp.len());
        f.set_mode(k, amp);
        f
    }

    #[test]
    fn multiplier_single_modes() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let f = single(g, &[1, 0], &[c(0.5, 0.2)]);
        let out = apply_multiplier(&f, &SymbolSpec::fractional(2.0)).unwrap();
        let idx = g.index_of(&[1, 0]);
        assert!((out.coeff(idx, 0) - c(-0.5, -0.2)).norm() < 1e-15);

        let f = single(g, &[3, 4], &[c(1.0, 0.0)]);
        let out = apply_multiplier(&f, &SymbolSpec::fractional(1.0)).unwrap();
        assert!((out.coeff(g.index_of(&[3, 4]), 0) - c(-5.0, 0.0)).norm() < 1e-14);
        assert!((out.coeff(g.index_of(&[-3, -4]), 0) - c(-5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn multiplier_log_half_oracle() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let f = single(g, &[1, 1], &[c(1.0, 0.0)]);
        let s = SymbolSpec::new(2.0, GFamily::LogHalf).unwrap();
        let out = apply_multiplier(&f, &s).unwrap();
        // |k|² = 2, g = sqrt(ln(2 + 2)).
        let expect = -2.0 / 4f64.ln().sqrt();
        assert!((out.coeff(g.index_of(&[1, 1]), 0).re - expect).abs() < 1e-14);
    }

    #[test]
    fn multiplier_rejects_singular_mean() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let f = single(g, &[0, 0], &[c(1.0, 0.0)]);
        assert!(matches!(
            apply_multiplier(&f, &SymbolSpec::fractional(-1.0)),
            Err(Error::SingularZeroMode { .. })
        ));
        // Zero mean is fine.
        let f = single(g, &[1, 0], &[c(1.0, 0.0)]);
        assert!(apply_multiplier(&f, &SymbolSpec::fractional(0.0)).is_ok());
    }

    #[test]
    fn heat_semigroup_single_mode() {
        let g = TorusGrid::standard(3, 8).unwrap();
        let f = single(g, &[1, 0, 0], &[c(1.0, 0.0)]);
        let out = semigroup_apply(&f, 0.5, &SymbolSpec::fractional(2.0)).unwrap();
        let v = out.coeff(g.index_of(&[1, 0, 0]), 0).re;
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(semigroup_apply(&f, 0.0, &SymbolSpec::fractional(2.0)).unwrap(), f);
        assert!(semigroup_apply(&f, -1.0, &SymbolSpec::fractional(2.0)).is_err());
    }

    #[test]
    fn helmholtz_cases() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let s2 = SymbolSpec::fractional(2.0);
        let f = single(g, &[1, 0], &[c(1.0, 0.0)]);
        assert_eq!(helmholtz_inverse(&f, 0.0, &s2).unwrap(), f);
        let out = helmholtz_inverse(&f, 1.0, &s2).unwrap();
        assert!((out.coeff(g.index_of(&[1, 0]), 0).re - 0.5).abs() < 1e-15);
        assert!(helmholtz_inverse(&f, -1.0, &s2).is_err());
    }

    #[test]
    fn leray_examples() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let f = single(g, &[1, 0], &[c(0.0, 0.0), c(1.0, 0.0)]);
        let p = leray_project(&f).unwrap();
        assert!(p.sub(&f).unwrap().coeff_norm() < 1e-15);
        assert!(p.is_div_free());
        let f = single(g, &[1, 0], &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(leray_project(&f).unwrap().coeff_norm() < 1e-15);
        // Gradient field û ∝ k.
        let f = single(g, &[2, -3], &[c(0.0, 2.0), c(0.0, -3.0)]);
        assert!(leray_project(&f).unwrap().coeff_norm() < 1e-15);
    }

    #[test]
    fn tensor_of_zero_and_support() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let zero = SpectralVectorField::zero_vector(g);
        let v = single(g, &[1, 2], &[c(0.3, 0.1), c(0.2, -0.4)]);
        let t = tensor_product(&zero, &v).unwrap();
        assert!(t.coeffs().iter().all(|z| z.norm() == 0.0));

        let u = single(g, &[1, 0], &[c(0.5, 0.0), c(0.1, 0.2)]);
        let t = tensor_product(&u, &v).unwrap();
        // Support on ±k₁ ± k₂.
        let allowed: Vec<usize> = [[2, 2], [0, 2], [0, -2], [-2, -2]]
            .iter()
            .map(|k| g.index_of(k))
            .collect();
        for i in 0..2 {
            for j in 0..2 {
                for (idx, z) in t.entry(i, j).iter().enumerate() {
                    if z.norm() > 1e-14 {
                        assert!(allowed.contains(&idx), "mode {:?}", g.frequency(idx));
                    }
                }
            }
        }
        assert!(t.hermitian_residual() < 1e-15);
    }

    #[test]
    fn divergence_of_constant_is_zero() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let mut t = SpectralTensorField::zeros(g);
        t.entry_mut(0, 1)[0] = c(3.0, 0.0);
        assert!(divergence(&t).coeff_norm() == 0.0);
    }

    #[test]
    fn divergence_two_mode_hand_computation() {
        // u = (cos y, 0) [û(0,±1) = (1/2, 0)], v = (0, sin x) [v̂(±1,0) = (0, ∓i/2)].
        // (u·∇)v = cos y · ∂ₓ(0, sin x) = (0, cos x cos y).
        let g = TorusGrid::standard(2, 16).unwrap();
        let u = single(g, &[0, 1], &[c(0.5, 0.0), c(0.0, 0.0)]);
        let v = single(g, &[1, 0], &[c(0.0, 0.0), c(0.0, -0.5)]);
        let d = divergence(&tensor_product(&u, &v).unwrap());
        let phys = d.to_physical();
        for i in 0..g.len() {
            let x = g.point(i);
            assert!(phys[0][i].abs() < 1e-14);
            assert!((phys[1][i] - x[0].cos() * x[1].cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn w_vanishes_for_zero_v_and_reduces_at_alpha_zero() {
        let g = TorusGrid::standard(2, 16).unwrap();
        let u = leray_project(&single(g, &[1, 2], &[c(0.3, 0.1), c(0.2, -0.4)])).unwrap();
        let v = leray_project(&single(g, &[2, 1], &[c(0.1, 0.0), c(0.0, 0.3)])).unwrap();
        let s2 = SymbolSpec::fractional(1.3);
        let zero = SpectralVectorField::zero_vector(g);
        let w = nonlinear_w(&u, &zero, 1.0, &s2, WVariant::Standard).unwrap();
        assert_eq!(w.coeff_norm(), 0.0);
        let w0 = nonlinear_w(&u, &v, 0.0, &s2, WVariant::Standard).unwrap();
        let ns = leray_project(&divergence(&tensor_product(&u, &v).unwrap())).unwrap();
        assert!(w0.sub(&ns).unwrap().coeff_norm() < 1e-15);
    }
}
