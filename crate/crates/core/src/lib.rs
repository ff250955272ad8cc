//! Pseudo-spectral solver and estimate-verification toolkit for the
//! generalized Leray-α equation
//!
//! ```text
//! ∂ₜu + P(1-α²𝓛₂)⁻¹ div(u ⊗ (1-α²𝓛₂)u) = ν𝓛₁u,   div u = 0,
//! ```
//!
//! where `𝓛ᵢ` has symbol `-|ξ|^{γᵢ}/gᵢ(|ξ|)`, on the periodic torus
//! `[0, L)ⁿ`. All operators act mode-wise on Fourier coefficients.
//!
//! Module map:
//! - [`grid`], [`field`], [`fft`], [`spectral`], [`checkpoint`]: grids,
//!   spectral fields and the Fourier-diagonal operators.
//! - [`symbol`], [`multipliers`]: the `g` registry and numerical checks of
//!   the multiplier hypotheses and semigroup decay rates.
//! - [`besov`]: Littlewood-Paley blocks, Besov norms, paraproducts and the
//!   product-estimate / embedding sweeps.
//! - [`solver`]: time integration, Picard iteration, admissibility and
//!   regularity monitors.

pub mod besov;
pub mod checkpoint;
pub mod error;
pub mod fft;
pub mod field;
pub mod fit;
pub mod grid;
pub mod jet;
pub mod multipliers;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod solver;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
pub use field::{LpExponent, SpectralTensorField, SpectralVectorField};
pub use grid::TorusGrid;
pub use report::EstimateReport;
pub use symbol::{GFamily, SymbolSpec};

/// Header line attached to every report describing the discretization.
pub const DOMAIN_NOTE: &str =
    "periodic torus [0,L)^n discretization; whole-space estimates are checked on the torus";
