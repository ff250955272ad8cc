//! Independent re-evaluation of the admissibility lists.

#![allow(dead_code)]

use leray_core::solver::{AdmissibilityParams, TheoremVariant};
use leray_core::LpExponent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed-form verdict: the `k` search of list A is resolved analytically
/// (the last inequality is easiest at the largest admissible `k`).
pub fn oracle(params: &AdmissibilityParams, variant: TheoremVariant) -> bool {
    let AdmissibilityParams { n, p, s1, s2, gamma2: g2, .. } = *params;
    let g1 = if params.log_variant { params.gamma1 - params.log_eps } else { params.gamma1 };
    let np = n as f64 / p.value();
    let gap = s2 - s1;
    match variant {
        TheoremVariant::A => {
            let base = g1 > 1.0 && g2 > 0.0 && s2 > g2 && gap > 0.0 && gap < (g1 / 2.0).min(1.0);
            let k_ok = if g2 < np {
                g1 >= gap + 1.0 + np - g2
            } else {
                g1 > gap + 1.0
            };
            base && k_ok
        }
        TheoremVariant::B => {
            g1 > 1.0
                && g2 > 0.0
                && gap > 0.0
                && gap < g1 / 2.0
                && s1 > g2 - np - 1.0
                && g1 >= 2.0 * s2 - s1 - g2 + np + 1.0
                && np > g2 / 2.0
                && s2 >= g2 / 2.0
        }
    }
}

pub fn random_params(seed: u64, count: usize) -> Vec<AdmissibilityParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=3);
            let p = [1.0, 2.0, 3.0, 4.0][rng.gen_range(0..4)];
            let s1 = rng.gen_range(-1.0..1.0);
            AdmissibilityParams {
                n,
                p: LpExponent::new(p).unwrap(),
                s1,
                s2: s1 + rng.gen_range(-0.2..1.2),
                gamma1: rng.gen_range(0.8..5.0),
                gamma2: rng.gen_range(-0.2..2.5),
                log_variant: rng.gen_bool(0.3),
                log_eps: 1e-3,
            }
        })
        .collect()
}
