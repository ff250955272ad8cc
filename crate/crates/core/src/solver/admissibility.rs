//! Parameter admissibility for the two local existence theorems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::LpExponent;

/// Which inequality list to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremVariant {
    /// Standard product estimate: `s₂ > γ₂ ≥ k`, `kp < n`,
    /// `s₂-s₁ < min{γ₁/2, 1}`, `γ₁ ≥ s₂-s₁+1+n/p-k` for some `k > 0`.
    A,
    /// Low-regularity product estimate: `0 < s₂-s₁ < γ₁/2`,
    /// `s₁ > γ₂-n/p-1`, `γ₁ ≥ 2s₂-s₁-γ₂+n/p+1`, `n/p > γ₂/2`, `s₂ ≥ γ₂/2`.
    B,
}

impl FromStr for TheoremVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "A" | "a" => Ok(TheoremVariant::A),
            "B" | "b" => Ok(TheoremVariant::B),
            other => Err(Error::param("variant", format!("`{other}` (expected A or B)"))),
        }
    }
}

impl fmt::Display for TheoremVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremVariant::A => "A",
            TheoremVariant::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityParams {
    pub n: usize,
    pub p: LpExponent,
    pub s1: f64,
    pub s2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Logarithmic `g`: `γ₁` is replaced by `γ₁ - ε` in every inequality.
    pub log_variant: bool,
    pub log_eps: f64,
}

/// One evaluated inequality, `lhs ⋄ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub text: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(text: &str, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self {
            text: text.to_string(),
            lhs,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    K { k: f64 },
    /// `r₂ = -γ₂/2`, `r₁ = γ₂/2 + M`, `r = -1 + γ₂ + M - n/p`.
    M { m: f64, r: f64, r1: f64, r2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityResult {
    pub variant: TheoremVariant,
    pub log_variant: bool,
    /// The `γ₁` actually used (`γ₁ - ε` for the log variant).
    pub gamma1_effective: f64,
    pub inequalities: Vec<Inequality>,
    pub admissible: bool,
    pub witness: Option<Witness>,
}

impl AdmissibilityResult {
    pub fn failed(&self) -> Vec<String> {
        self.inequalities.iter().filter(|i| !i.holds).map(|i| i.text.clone()).collect()
    }

    /// Rows `inequality | lhs | rhs | holds`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for i in &self.inequalities {
            out += &format!(
                "{:<32} {:>12.6} {:>12.6}  {}\n",
                i.text,
                i.lhs,
                i.rhs,
                if i.holds { "ok" } else { "FAIL" }
            );
        }
        out
    }
}

const K_GRID: usize = 64;

fn list_a(pr: &AdmissibilityParams, g1: f64, k: f64) -> Vec<Inequality> {
    let n = pr.n as f64;
    let np = n * pr.p.reciprocal();
    let gap = pr.s2 - pr.s1;
    let kp = if pr.p.is_infinite() { f64::INFINITY } else { k * pr.p.value() };
    vec![
        Inequality::new("γ₁ > 1", g1, 1.0, g1 > 1.0),
        Inequality::new("γ₂ > 0", pr.gamma2, 0.0, pr.gamma2 > 0.0),
        Inequality::new("s₂ > γ₂", pr.s2, pr.gamma2, pr.s2 > pr.gamma2),
        Inequality::new("γ₂ ≥ k > 0", pr.gamma2, k, pr.gamma2 >= k && k > 0.0),
        Inequality::new("kp < n", kp, n, kp < n),
        Inequality::new("s₂−s₁ > 0", gap, 0.0, gap > 0.0),
        Inequality::new("s₂−s₁ < min{γ₁/2, 1}", gap, (g1 / 2.0).min(1.0), gap < (g1 / 2.0).min(1.0)),
        Inequality::new("γ₁ ≥ s₂−s₁+1+n/p−k", g1, gap + 1.0 + np - k, g1 >= gap + 1.0 + np - k),
    ]
}

fn list_b(pr: &AdmissibilityParams, g1: f64) -> Vec<Inequality> {
    let np = pr.n as f64 * pr.p.reciprocal();
    let (s1, s2, g2) = (pr.s1, pr.s2, pr.gamma2);
    let gap = s2 - s1;
    let bound = 2.0 * s2 - s1 - g2 + np + 1.0;
    vec![
        Inequality::new("γ₁ > 1", g1, 1.0, g1 > 1.0),
        Inequality::new("γ₂ > 0", g2, 0.0, g2 > 0.0),
        Inequality::new("s₂−s₁ > 0", gap, 0.0, gap > 0.0),
        Inequality::new("s₂−s₁ < γ₁/2", gap, g1 / 2.0, gap < g1 / 2.0),
        Inequality::new("s₁ > γ₂−n/p−1", s1, g2 - np - 1.0, s1 > g2 - np - 1.0),
        Inequality::new("γ₁ ≥ 2s₂−s₁−γ₂+n/p+1", g1, bound, g1 >= bound),
        Inequality::new("n/p > γ₂/2", np, g2 / 2.0, np > g2 / 2.0),
        Inequality::new("s₂ ≥ γ₂/2", s2, g2 / 2.0, s2 >= g2 / 2.0),
    ]
}

/// The list before eliminating `M`; all entries must hold for some `M > 0`.
fn list_b_with_m(pr: &AdmissibilityParams, g1: f64, m: f64) -> bool {
    let np = pr.n as f64 * pr.p.reciprocal();
    let (s1, s2, g2) = (pr.s1, pr.s2, pr.gamma2);
    m > 0.0
        && 0.0 < s2 - s1
        && s2 - s1 < g1 / 2.0
        && s1 >= g2 + m - np - 1.0
        && g1 >= 2.0 * s2 - s1 - g2 - m + np + 1.0
        && np > g2 / 2.0 + m
        && s2 >= g2 / 2.0 + m
}

/// Evaluate the selected inequality list.
///
/// Variant A searches `k` on a uniform grid of `(0, min(γ₂, n/p))` and
/// reports the inequalities at the largest `k` satisfying all of them (or
/// at the top of the range when none does). Variant B evaluates the final
/// list literally; an `M` witness for the list before eliminating `M` is
/// reported separately when one exists on the search grid.
pub fn check_admissibility(params: &AdmissibilityParams, variant: TheoremVariant) -> AdmissibilityResult {
    let g1 = if params.log_variant {
        params.gamma1 - params.log_eps
    } else {
        params.gamma1
    };
    let (inequalities, witness) = match variant {
        TheoremVariant::A => {
            let np = params.n as f64 * params.p.reciprocal();
            let k_sup = params.gamma2.min(np * (1.0 - 1e-9));
            let mut chosen = None;
            if k_sup > 0.0 {
                for i in (1..=K_GRID).rev() {
                    let k = k_sup * i as f64 / K_GRID as f64;
                    let list = list_a(params, g1, k);
                    if list.iter().all(|q| q.holds) {
                        chosen = Some((list, k));
                        break;
                    }
                }
            }
            match chosen {
                Some((list, k)) => (list, Some(Witness::K { k })),
                None => (list_a(params, g1, k_sup.max(0.0)), None),
            }
        }
        TheoremVariant::B => {
            let list = list_b(params, g1);
            let np = params.n as f64 * params.p.reciprocal();
            let m_sup = np - params.gamma2 / 2.0;
            let witness = (1..=K_GRID).rev().find_map(|i| {
                let m = m_sup * i as f64 / (K_GRID + 1) as f64;
                list_b_with_m(params, g1, m).then(|| Witness::M {
                    m,
                    r: -1.0 + params.gamma2 + m - np,
                    r1: params.gamma2 / 2.0 + m,
                    r2: -params.gamma2 / 2.0,
                })
            });
            (list, witness)
        }
    };
    let admissible = inequalities.iter().all(|i| i.holds);
    AdmissibilityResult {
        variant,
        log_variant: params.log_variant,
        gamma1_effective: g1,
        inequalities,
        admissible,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma1: f64, gamma2: f64, s1: f64, s2: f64) -> AdmissibilityParams {
        AdmissibilityParams {
            n: 3,
            p: LpExponent::new(2.0).unwrap(),
            s1,
            s2,
            gamma1,
            gamma2,
            log_variant: false,
            log_eps: 1e-6,
        }
    }

    #[test]
    fn variant_a_examples() {
        let ok = check_admissibility(&params(3.0, 0.5, 0.3, 0.6), TheoremVariant::A);
        assert!(ok.admissible, "{}", ok.table());
        assert!(matches!(ok.witness, Some(Witness::K { .. })));
        let bad = check_admissibility(&params(2.0, 0.5, 0.3, 0.6), TheoremVariant::A);
        assert!(!bad.admissible);
        assert!(bad.failed().iter().any(|t| t.contains("γ₁ ≥ s₂−s₁+1+n/p")));
    }

    #[test]
    fn variant_b_example() {
        let res = check_admissibility(&params(3.0, 1.0, -0.4, 0.5), TheoremVariant::B);
        assert!(res.admissible, "{}", res.table());
        // s₂ = γ₂/2 exactly leaves no room for M > 0.
        assert!(res.witness.is_none());
    }

    #[test]
    fn log_variant_shrinks_gamma1() {
        // Equality case for the last inequality of list A at k = γ₂.
        let mut pr = params(2.3, 0.5, 0.3, 0.6);
        assert!(check_admissibility(&pr, TheoremVariant::A).admissible);
        pr.log_variant = true;
        let res = check_admissibility(&pr, TheoremVariant::A);
        assert!(!res.admissible);
        assert!(res.gamma1_effective < 2.3);
    }

    #[test]
    fn variant_parses() {
        assert_eq!("B".parse::<TheoremVariant>().unwrap(), TheoremVariant::B);
        assert!("C".parse::<TheoremVariant>().is_err());
    }
}
