//! Dissipation symbols `-|ξ|^γ / g(|ξ|)` and the registry of `g` families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{self, Jet};

/// Registered `g` families. Every family is radial, nondecreasing and
/// bounded below by one (checked at registration).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum GFamily {
    /// `g ≡ 1`.
    ConstantOne,
    /// `g(r) = (ln(2 + r²))^{1/2}`.
    LogHalf,
    /// `g(r) = c₀ + Σ_{i≥1} cᵢ (r²/(1+r²))^i`; a bounded Mikhlin symbol
    /// when `c₀ ≥ 1` and `cᵢ ≥ 0`.
    MikhlinCustom { coefficients: Vec<f64> },
    /// `g(r) = max(1, r^ε)`. Polynomial growth; fails the Mikhlin bounds
    /// for `ε > 0` and serves as a counterexample.
    Power { eps: f64 },
}

impl GFamily {
    /// Look up a family by identifier and positional parameters.
    pub fn from_id(id: &str, params: &[f64]) -> Result<Self> {
        let fam = match id {
            "constant_one" => GFamily::ConstantOne,
            "log_half" => GFamily::LogHalf,
            "mikhlin_custom" => {
                if params.is_empty() {
                    return Err(Error::InvalidFamily {
                        family: id.into(),
                        reason: "needs at least one coefficient".into(),
                    });
                }
                GFamily::MikhlinCustom {
                    coefficients: params.to_vec(),
                }
            }
            "power" => match params {
                [eps] => GFamily::Power { eps: *eps },
                _ => {
                    return Err(Error::InvalidFamily {
                        family: id.into(),
                        reason: "expects exactly one parameter (eps)".into(),
                    })
                }
            },
            other => return Err(Error::UnknownFamily(other.into())),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn id(&self) -> &'static str {
        match self {
            GFamily::ConstantOne => "constant_one",
            GFamily::LogHalf => "log_half",
            GFamily::MikhlinCustom { .. } => "mikhlin_custom",
            GFamily::Power { .. } => "power",
        }
    }

    /// Short human-readable label including parameters.
    pub fn label(&self) -> String {
        match self {
            GFamily::ConstantOne | GFamily::LogHalf => self.id().to_string(),
            GFamily::MikhlinCustom { coefficients } => format!("mikhlin_custom{coefficients:?}"),
            GFamily::Power { eps } => format!("power({eps})"),
        }
    }

    /// Unbounded but slower than any power (the logarithmic class).
    pub fn is_log_type(&self) -> bool {
        matches!(self, GFamily::LogHalf)
    }

    pub fn is_constant(&self) -> bool {
        match self {
            GFamily::ConstantOne => true,
            GFamily::MikhlinCustom { coefficients } => coefficients.iter().skip(1).all(|&c| c == 0.0),
            GFamily::Power { eps } => *eps == 0.0,
            GFamily::LogHalf => false,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            GFamily::ConstantOne => 1.0,
            GFamily::LogHalf => (2.0 + r * r).ln().sqrt(),
            GFamily::MikhlinCustom { coefficients } => {
                let x = r * r / (1.0 + r * r);
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            GFamily::Power { eps } => {
                if r <= 1.0 {
                    1.0
                } else {
                    r.powf(*eps)
                }
            }
        }
    }

    /// Taylor expansion of `g ∘ x` for a jet argument `x`.
    pub fn eval_jet(&self, x: &Jet) -> Jet {
        let order = x.order();
        match self {
            GFamily::ConstantOne => Jet::constant(1.0, order),
            GFamily::LogHalf => x.powi(2).add_const(2.0).ln().sqrt(),
            GFamily::MikhlinCustom { coefficients } => {
                let x2 = x.powi(2);
                let y = x2.div(&x2.add_const(1.0));
                let mut acc = Jet::constant(0.0, order);
                for c in coefficients.iter().rev() {
                    acc = (&acc * &y).add_const(*c);
                }
                acc
            }
            GFamily::Power { eps } => {
                if x.value() <= 1.0 {
                    Jet::constant(1.0, order)
                } else {
                    x.powf(*eps)
                }
            }
        }
    }

    /// `g^{(k)}(r)` from the closed-form jet expansion.
    pub fn derivative(&self, k: usize, r: f64) -> f64 {
        self.eval_jet(&Jet::variable(r, k)).derivative(k)
    }

    /// `g^{(k)}(r)` by 8th-order central differences with relative step
    /// `max(10⁻³, ε^{1/(k+8)})`, which balances truncation against roundoff.
    pub fn derivative_fd(&self, k: usize, r: f64) -> f64 {
        if k == 0 {
            return self.eval(r);
        }
        let h = r * f64::EPSILON.powf(1.0 / (k as f64 + 8.0)).max(1e-3);
        jet::central_derivative(|x| self.eval(x.abs()), r, k, h)
    }

    /// Infimum of `g` over `[0, ∞)`: `1` for every family except
    /// `log_half`, whose value at the origin is `√(ln 2)`.
    pub fn lower_bound(&self) -> f64 {
        match self {
            GFamily::LogHalf => 2f64.ln().sqrt(),
            _ => 1.0,
        }
    }

    /// Sampled check of `g ≥ lower_bound()` and monotonicity on
    /// `{0} ∪ [10⁻³, 10⁶]`.
    pub fn validate(&self) -> Result<()> {
        if let GFamily::Power { eps } = self {
            if !(eps.is_finite() && *eps >= 0.0) {
                return Err(Error::InvalidFamily {
                    family: self.label(),
                    reason: format!("eps = {eps} must be finite and >= 0"),
                });
            }
        }
        let mut prev = self.eval(0.0);
        let bad = |reason: String| Error::InvalidFamily {
            family: self.label(),
            reason,
        };
        let floor = self.lower_bound() * (1.0 - 1e-15);
        if !(prev >= floor) {
            return Err(bad(format!("g(0) = {prev} < {}", self.lower_bound())));
        }
        for r in log_grid(1e-3, 1e6, 400) {
            let v = self.eval(r);
            if !v.is_finite() || v < floor {
                return Err(bad(format!("g({r:e}) = {v} < {}", self.lower_bound())));
            }
            if v < prev - 1e-12 * prev.abs() {
                return Err(bad(format!("decreasing near r = {r:e}")));
            }
            prev = v;
        }
        Ok(())
    }
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// A dissipation symbol `m(ξ) = -|ξ|^γ / g(|ξ|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub gamma: f64,
    pub g: GFamily,
}

impl SymbolSpec {
    pub fn new(gamma: f64, g: GFamily) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::param("gamma", format!("{gamma} is not finite")));
        }
        g.validate()?;
        Ok(Self { gamma, g })
    }

    /// Build from a registered family identifier.
    pub fn registered(gamma: f64, id: &str, params: &[f64]) -> Result<Self> {
        Self::new(gamma, GFamily::from_id(id, params)?)
    }

    /// Fractional Laplacian symbol with `g ≡ 1`.
    pub fn fractional(gamma: f64) -> Self {
        Self {
            gamma,
            g: GFamily::ConstantOne,
        }
    }

    pub fn g(&self, r: f64) -> f64 {
        self.g.eval(r)
    }

    /// `-r^γ / g(r)`, with the value `0` at `r = 0` for `γ > 0`.
    /// Returns `-∞` at `r = 0` when `γ < 0` and `-1/g(0)` when `γ = 0`.
    pub fn symbol(&self, r: f64) -> f64 {
        if r == 0.0 {
            return if self.gamma > 0.0 {
                0.0
            } else if self.gamma == 0.0 {
                -1.0 / self.g(0.0)
            } else {
                f64::NEG_INFINITY
            };
        }
        -r.powf(self.gamma) / self.g(r)
    }

    /// Semigroup symbol `exp(-t r^γ / g(r))`.
    pub fn semigroup(&self, t: f64, r: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        (t * self.symbol(r)).exp()
    }
}
