//! One pass/fail line per acceptance criterion. Run with
//! `cargo test -p leray-core --test acceptance`.

mod common;

use std::time::Instant;

use leray_core::besov::*;
use leray_core::multipliers::*;
use leray_core::random::random_scalar;
use leray_core::solver::*;
use leray_core::spectral::{dealiased_product, semigroup_apply};
use leray_core::symbol::{GFamily, SymbolSpec};
use leray_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<(bool, String), Box<dyn std::error::Error>>;

fn lp(v: f64) -> LpExponent {
    LpExponent::new(v).unwrap()
}

fn heat_kernel() -> Outcome {
    let start = Instant::now();
    let grid = TorusGrid::standard(2, 64)?;
    let s = SymbolSpec::new(2.0, GFamily::ConstantOne)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = [rng.gen_range(-31i64..32), rng.gen_range(-31i64..32)];
        if k == [0, 0] {
            continue;
        }
        let t = rng.gen_range(1e-4..0.05);
        let amp = num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut f = SpectralVectorField::zero_scalar(grid);
        f.set_mode(&k, &[amp]);
        let out = semigroup_apply(&f, t, &s)?;
        let idx = grid.index_of(&k);
        let exact = amp * (-t * (k[0] * k[0] + k[1] * k[1]) as f64).exp();
        worst = worst.max((out.coeff(idx, 0) - exact).norm() / exact.norm());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-12 && secs < 1.0, format!("max rel err {worst:.2e}, {secs:.3} s")))
}

fn taylor_green() -> Outcome {
    let start = Instant::now();
    let grid = TorusGrid::standard(2, 64)?;
    let mut cfg = SolverConfig::new(grid, 2.0, 1.0, 1.0, 1e-3);
    cfg.nu = 0.1;
    let u0 = make_initial_data(&InitialData::TaylorGreen2d { amplitude: 1.0 }, &grid, 0)?;
    let traj = integrate(&u0, &cfg)?;
    let exact = u0.scaled((-2.0 * cfg.nu).exp());
    let err = traj.last().u.sub(&exact)?.l2_norm();
    let secs = start.elapsed().as_secs_f64();

    let mut u1 = u0.clone();
    u1.axpy(1.0, &make_initial_data(&InitialData::RandomDivfree { sigma: 2.0, amplitude: 0.5 }, &grid, 11)?)?;
    let run = |dt: f64| -> leray_core::Result<SpectralVectorField> {
        let mut c = cfg.clone();
        c.dt = dt;
        c.cadence = usize::MAX;
        Ok(integrate(&u1, &c)?.last().u.clone())
    };
    let reference = run(1e-3 / 8.0)?;
    let e1 = run(0.02)?.sub(&reference)?.l2_norm();
    let e2 = run(0.01)?.sub(&reference)?.l2_norm();
    let ratio = e1 / e2;
    let pass = err <= 1e-6 && secs < 30.0 && (3.0..=5.0).contains(&ratio);
    Ok((pass, format!("TG error {err:.2e} in {secs:.1} s; perturbed TG error ratio {ratio:.2} per halving")))
}

fn semigroup_rates() -> Outcome {
    let grid = TorusGrid::standard(2, 256)?;
    let mut parts = Vec::new();
    let mut pass = true;
    for (gamma, g) in [
        (1.5, GFamily::ConstantOne),
        (2.0, GFamily::ConstantOne),
        (3.0, GFamily::ConstantOne),
        (2.0, GFamily::LogHalf),
    ] {
        let start = Instant::now();
        let s = SymbolSpec::new(gamma, g)?;
        let t = resolved_t_grid(&grid, gamma, 20)?;
        let samples = kernel_samples(&grid, &s, &resolved_t_grid(&grid, gamma, 6)?)?;
        let rep = verify_semigroup_lp_lq(&s, lp(2.0), LpExponent::INFINITY, &t, &samples, &RateOptions::default())?;
        let secs = start.elapsed().as_secs_f64();
        pass &= rep.pass && secs < 120.0;
        parts.push(format!("{}/{gamma} slope {:.4} ({secs:.1} s)", s.g.id(), rep.fitted_exponent.unwrap_or(f64::NAN)));
    }
    Ok((pass, parts.join("; ")))
}

fn sobolev_rates() -> Outcome {
    let grid = TorusGrid::standard(2, 128)?;
    let samples = single_mode_samples(&grid);
    let mut parts = Vec::new();
    let mut pass = true;
    for (gamma, s1, s2) in [(2.0, 0.0, 1.0), (1.5, 0.0, 1.5), (2.0, 0.5, 1.0), (3.0, 0.0, 1.0), (2.0, 1.0, 1.0)] {
        let s = SymbolSpec::new(gamma, GFamily::ConstantOne)?;
        let t = sobolev_t_grid(&grid, gamma, s2 - s1, 20)?;
        let rep = verify_sobolev_smoothing(&s, s1, s2, lp(2.0), &t, &samples, &RateOptions::default())?;
        pass &= rep.pass;
        parts.push(format!(
            "({s1},{s2},{gamma}) {:.3} vs {:.3}",
            rep.fitted_exponent.unwrap_or(f64::NAN),
            -(s2 - s1) / gamma
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn littlewood_paley() -> Outcome {
    let b = build_filter_bank(&TorusGrid::standard(2, 64)?)?;
    let residual = b.partition_residual();
    let top = b.j_max() as i32;
    let piece = |f: &SpectralVectorField, j: i32| -> leray_core::Result<SpectralVectorField> {
        let w = b.weights(j)?;
        Ok(f.map_modes(|i| w[i]))
    };
    let (mut orth, mut recon) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let f = random_scalar(b.grid(), 0.5, 2 * seed);
        let g = random_scalar(b.grid(), 0.5, 2 * seed + 1);
        let scale = f.coeff_norm() * g.coeff_norm();
        let fb: Vec<_> = (-1..=top).map(|j| piece(&f, j)).collect::<leray_core::Result<_>>()?;
        let gb: Vec<_> = (-1..=top).map(|j| piece(&g, j)).collect::<leray_core::Result<_>>()?;
        let at = |k: i32| (k + 1) as usize;
        for k in -1..=top {
            for j in -1..=top {
                if (j - k).abs() >= 2 {
                    orth = orth.max(piece(&fb[at(k)], j)?.coeff_norm() / f.coeff_norm());
                }
            }
            let para = dealiased_product(&partial_sum(&f, k - 3, &b)?, &gb[at(k)])?;
            for j in -1..=top {
                if (j - k).abs() >= 4 {
                    orth = orth.max(piece(&para, j)?.coeff_norm() / scale);
                }
            }
            for i in (k - 2).max(-1)..=(k + 2).min(top) {
                let res = dealiased_product(&fb[at(k)], &gb[at(i)])?;
                for j in (k + 5)..=top {
                    orth = orth.max(piece(&res, j)?.coeff_norm() / scale);
                }
            }
        }
        let fg = dealiased_product(&f, &g)?;
        let total = paraproduct_decompose(&f, &g, &b)?.total()?;
        recon = recon.max(total.sub(&fg)?.coeff_norm() / fg.coeff_norm());
    }
    let pass = residual <= 1e-12 && orth <= 1e-10 && recon <= 1e-10;
    Ok((pass, format!("partition {residual:.1e}; orthogonality {orth:.1e}; reconstruction {recon:.1e}")))
}

fn products() -> Outcome {
    let two = lp(2.0);
    let split = HolderSplit { p1: LpExponent::INFINITY, p2: two, q1: two, q2: LpExponent::INFINITY };
    let mut standard = Vec::new();
    let mut chemin = Vec::new();
    for modes in [32, 64] {
        let b = build_filter_bank(&TorusGrid::standard(2, modes)?)?;
        let pairs: Vec<_> = (0..100u64)
            .map(|s| (random_scalar(b.grid(), 2.0, 2 * s), random_scalar(b.grid(), 2.0, 2 * s + 1)))
            .collect();
        standard.push(verify_product_est_standard(&pairs, 1.0, two, two, split, &b, 1e3)?);
        chemin.push(verify_product_est_chemin(&pairs, 0.4, 0.4, two, two, two, two, &b, 1e3)?);
    }
    let change = |r: &[EstimateReport]| {
        let (a, b) = (r[0].fitted_constant.unwrap_or(f64::NAN), r[1].fitted_constant.unwrap_or(f64::NAN));
        (a, b, (b - a).abs() / a)
    };
    let (s32, s64, ds) = change(&standard);
    let (c32, c64, dc) = change(&chemin);
    let pass = standard.iter().chain(&chemin).all(|r| r.pass) && ds < 0.2 && dc < 0.2;
    Ok((
        pass,
        format!(
            "standard {s32:.4} -> {s64:.4} ({:.1}%); chemin {c32:.4} -> {c64:.4} ({:.1}%)",
            100.0 * ds,
            100.0 * dc
        ),
    ))
}

fn admissibility() -> Outcome {
    let p = |g1: f64, g2: f64, s1: f64, s2: f64| AdmissibilityParams {
        n: 3,
        p: lp(2.0),
        s1,
        s2,
        gamma1: g1,
        gamma2: g2,
        log_variant: false,
        log_eps: 1e-6,
    };
    let a_ok = check_admissibility(&p(3.0, 0.5, 0.3, 0.6), TheoremVariant::A).admissible;
    let a_bad = check_admissibility(&p(2.0, 0.5, 0.3, 0.6), TheoremVariant::A);
    let a_bad_ok = !a_bad.admissible && a_bad.failed().iter().any(|t| t.contains("γ₁ ≥ s₂−s₁+1+n/p"));
    let b_ok = check_admissibility(&p(3.0, 1.0, -0.4, 0.5), TheoremVariant::B).admissible;
    let mut mismatches = 0;
    let cases = common::random_params(7, 50);
    for params in &cases {
        for variant in [TheoremVariant::A, TheoremVariant::B] {
            if check_admissibility(params, variant).admissible != common::oracle(params, variant) {
                mismatches += 1;
            }
        }
    }
    let pass = a_ok && a_bad_ok && b_ok && mismatches == 0;
    Ok((
        pass,
        format!(
            "examples A={a_ok} A(γ₁=2) rejected={a_bad_ok} B={b_ok}; {mismatches} mismatches on {} random cases",
            cases.len()
        ),
    ))
}

fn picard() -> Outcome {
    let mut cfg = SolverConfig::new(TorusGrid::standard(2, 32)?, 2.0, 0.5, 0.5, 1.25e-3);
    cfg.alpha = 0.5;
    cfg.s1 = 0.3;
    cfg.s2 = 0.6;
    cfg.near_zero_levels = 10;
    let adm = check_admissibility(&cfg.admissibility_params(), TheoremVariant::A).admissible;
    let u0 = make_initial_data(&InitialData::RandomDivfree { sigma: 1.0, amplitude: 0.3 }, &cfg.torus()?, 11)?;
    let pic = picard_iterate(&u0, &cfg, 6)?;
    let end = integrate(&u0, &cfg)?.last().u.clone();
    let rel = pic.final_values.last().unwrap().sub(&end)?.l2_norm() / end.l2_norm();
    let max_rho = pic.ratios.iter().cloned().fold(0.0, f64::max);
    let pass = adm && !pic.blew_up && pic.ratios.len() == 5 && max_rho < 1.0 && rel <= 1e-6;
    Ok((pass, format!("admissible={adm}; max ρ_m {max_rho:.4} over m=1..5; relative gap {rel:.2e}")))
}

fn global_regime() -> Outcome {
    let grid = TorusGrid::standard(3, 32)?;
    let mut cfg = SolverConfig::new(grid, 2.0, 1.0, 5.0, 0.05);
    cfg.alpha = 0.5;
    cfg.s1 = 0.6;
    cfg.s2 = 1.05;
    let global = global_criterion_monitor(&cfg)?.regime;
    let mut local = cfg.clone();
    local.gamma1 = 1.5;
    let local = global_criterion_monitor(&local)?.regime;
    let u0 = make_initial_data(&InitialData::RandomDivfree { sigma: 1.0, amplitude: 0.5 }, &grid, 3)?;
    let traj = integrate(&u0, &cfg)?;
    let early = traj
        .samples
        .iter()
        .filter(|s| s.t <= 0.5)
        .map(|s| s.diag.h_s1)
        .fold(0.0, f64::max);
    let overall = traj.samples.iter().map(|s| s.diag.h_s1).fold(0.0, f64::max);
    let pass = global == GlobalRegime::GlobalRegime
        && local == GlobalRegime::LocalOnly
        && !traj.blew_up
        && overall <= 2.0 * early;
    Ok((
        pass,
        format!(
            "(2,1) {global}; (1.5,1) {local}; 3D N=32 T=5 sup H^s1 {overall:.4} vs early sup {early:.4}, final {:.2e}",
            traj.last().diag.h_s1
        ),
    ))
}

fn smoothing() -> Outcome {
    let s1 = 0.3;
    let r_list: Vec<f64> = (0..=4).map(|i| s1 + 0.5 * i as f64).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for (label, kind) in [
        ("taylor-green", InitialData::TaylorGreen2d { amplitude: 1.0 }),
        ("random", InitialData::RandomDivfree { sigma: 2.0, amplitude: 0.1 }),
    ] {
        let mut sups = Vec::new();
        for modes in [32, 64] {
            let mut cfg = SolverConfig::new(TorusGrid::standard(2, modes)?, 2.0, 0.5, 0.5, 1e-2);
            cfg.alpha = 0.5;
            cfg.s1 = s1;
            cfg.s2 = 0.6;
            cfg.near_zero_levels = 12;
            let u0 = make_initial_data(&kind, &cfg.torus()?, 5)?;
            let traj = integrate(&u0, &cfg)?;
            let rows = smoothing_diagnostic(&traj, &r_list, s1, cfg.gamma1, cfg.p, cfg.q)?;
            sups.push(rows.iter().map(|r| r.sup).collect::<Vec<_>>());
        }
        let change = sups[0]
            .iter()
            .zip(&sups[1])
            .map(|(a, b)| (b - a).abs() / a)
            .fold(0.0, f64::max);
        let finite = sups.iter().flatten().all(|v| v.is_finite() && *v > 0.0);
        pass &= finite && change < 0.1;
        parts.push(format!("{label} max change {:.2}%", 100.0 * change));
    }
    Ok((pass, format!("r up to s1+2; {}", parts.join("; "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("heat kernel", heat_kernel),
        ("taylor-green", taylor_green),
        ("semigroup rates", semigroup_rates),
        ("sobolev smoothing", sobolev_rates),
        ("littlewood-paley", littlewood_paley),
        ("product estimates", products),
        ("admissibility", admissibility),
        ("picard contraction", picard),
        ("global regime", global_regime),
        ("smoothing diagnostic", smoothing),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {}: {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
