mod common;

use leray_core::solver::*;
use leray_core::symbol::GFamily;
use leray_core::*;

fn two_d(modes: usize, horizon: f64, dt: f64) -> SolverConfig {
    let mut cfg = SolverConfig::new(TorusGrid::standard(2, modes).unwrap(), 2.0, 0.5, horizon, dt);
    cfg.alpha = 0.5;
    cfg.s1 = 0.3;
    cfg.s2 = 0.6;
    cfg
}

fn small_random(cfg: &SolverConfig, amplitude: f64, seed: u64) -> SpectralVectorField {
    make_initial_data(&InitialData::RandomDivfree { sigma: 1.0, amplitude }, &cfg.torus().unwrap(), seed).unwrap()
}

#[test]
fn taylor_green_decays_exactly_for_any_alpha() {
    for alpha in [0.0, 0.7] {
        let mut cfg = two_d(32, 0.5, 1e-2);
        cfg.alpha = alpha;
        cfg.nu = 0.1;
        let u0 = make_initial_data(&InitialData::TaylorGreen2d { amplitude: 1.0 }, &cfg.torus().unwrap(), 0).unwrap();
        let traj = integrate(&u0, &cfg).unwrap();
        for s in &traj.samples {
            let exact = u0.scaled((-2.0 * cfg.nu * s.t).exp());
            assert!(s.u.sub(&exact).unwrap().l2_norm() <= 1e-12 * u0.l2_norm(), "alpha={alpha} t={}", s.t);
        }
    }
}

#[test]
fn trajectory_invariants() {
    let mut cfg = two_d(32, 0.5, 1e-2);
    cfg.near_zero_levels = 4;
    let u0 = small_random(&cfg, 1.0, 9);
    let traj = integrate(&u0, &cfg).unwrap();
    assert!(!traj.blew_up);
    let t = traj.times();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*t.last().unwrap(), 0.5);
    for s in &traj.samples {
        assert!(s.diag.div_residual <= 1e-10);
        assert!(s.diag.mean.iter().all(|m| m.abs() <= 1e-14));
        assert!(s.diag.l2 <= u0.l2_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn integration_is_deterministic() {
    let cfg = two_d(16, 0.2, 1e-2);
    let u0 = small_random(&cfg, 1.0, 4);
    let a = integrate(&u0, &cfg).unwrap();
    let b = integrate(&u0, &cfg).unwrap();
    assert_eq!(a.last().u.coeffs(), b.last().u.coeffs());
}

#[test]
fn unstable_steps_are_reported_as_blowup() {
    let mut cfg = two_d(32, 5.0, 0.5);
    cfg.nu = 1e-4;
    let u0 = small_random(&cfg, 200.0, 2);
    let traj = integrate(&u0, &cfg).unwrap();
    assert!(traj.blew_up);
    assert!(traj.blowup_time.is_some());
}

#[test]
fn invalid_configs_name_the_field() {
    let mut cfg = two_d(16, 1.0, 0.1);
    cfg.horizon = -1.0;
    assert!(cfg.validate().unwrap_err().to_string().contains("horizon"));
    let mut cfg = two_d(16, 1.0, 0.1);
    cfg.alpha = -0.1;
    assert!(cfg.validate().unwrap_err().to_string().contains("alpha"));
    let mut cfg = two_d(16, 1.0, 0.1);
    cfg.g1 = GFamily::Power { eps: -1.0 };
    assert!(cfg.validate().is_err());
}

#[test]
fn x_norm_of_linear_flow() {
    let mut cfg = two_d(32, 0.5, 1e-2);
    cfg.linear_only = true;
    let u0 = small_random(&cfg, 1.0, 1);
    let traj = integrate(&u0, &cfg).unwrap();
    let x = monitor_x_norm(&traj, cfg.s1, cfg.s2, cfg.p, cfg.q, cfg.gamma1).unwrap();
    assert!(x.sup_deviation <= 1e-13);
    assert!(x.sup_weighted > 0.0);
    assert!((x.a - 0.15).abs() < 1e-12);
}

#[test]
fn weighted_norm_vanishes_near_zero() {
    let mut cfg = two_d(32, 0.1, 1e-2);
    cfg.near_zero_levels = 60;
    let u0 = small_random(&cfg, 0.1, 5);
    let traj = integrate(&u0, &cfg).unwrap();
    let x = monitor_x_norm(&traj, cfg.s1, cfg.s2, cfg.p, cfg.q, cfg.gamma1).unwrap();
    assert!(x.t_near_zero < 1e-19);
    assert!(x.weighted_near_zero <= 1e-2 * x.sup_weighted, "{x:?}");
}

#[test]
fn picard_contracts_and_matches_integrator() {
    let mut cfg = two_d(32, 0.5, 2.5e-3);
    cfg.near_zero_levels = 10;
    let u0 = small_random(&cfg, 0.3, 11);
    let pic = picard_iterate(&u0, &cfg, 6).unwrap();
    assert!(!pic.blew_up);
    assert!(pic.ratios.iter().all(|&r| r < 1.0), "{:?}", pic.ratios);
    let traj = integrate(&u0, &cfg).unwrap();
    let end = &traj.last().u;
    let rel = pic.final_values.last().unwrap().sub(end).unwrap().l2_norm() / end.l2_norm();
    assert!(rel <= 1e-6, "{rel}");
    assert!(picard_iterate(&u0, &cfg, 1).is_err());
}

#[test]
fn smoothing_rows_at_base_regularity() {
    let cfg = two_d(32, 0.5, 1e-2);
    let u0 = small_random(&cfg, 0.1, 3);
    let traj = integrate(&u0, &cfg).unwrap();
    let rows = smoothing_diagnostic(&traj, &[cfg.s1, cfg.s1 + 1.0], cfg.s1, cfg.gamma1, cfg.p, cfg.q).unwrap();
    let sup_s1 = traj.samples.iter().map(|s| s.diag.besov_s1).fold(0.0, f64::max);
    assert!((rows[0].sup - sup_s1).abs() <= 1e-12 * sup_s1);
    assert!(rows.iter().all(|r| r.sup.is_finite() && r.sup_half.is_finite()));
    assert!(smoothing_diagnostic(&traj, &[0.0], cfg.s1, cfg.gamma1, cfg.p, cfg.q).is_err());
}

#[test]
fn admissibility_examples() {
    let p = |g1: f64, g2: f64, s1: f64, s2: f64| AdmissibilityParams {
        n: 3,
        p: LpExponent::new(2.0).unwrap(),
        s1,
        s2,
        gamma1: g1,
        gamma2: g2,
        log_variant: false,
        log_eps: 1e-6,
    };
    assert!(check_admissibility(&p(3.0, 0.5, 0.3, 0.6), TheoremVariant::A).admissible);
    let bad = check_admissibility(&p(2.0, 0.5, 0.3, 0.6), TheoremVariant::A);
    assert!(!bad.admissible);
    assert!(bad.failed().iter().any(|t| t.contains("γ₁ ≥ s₂−s₁+1+n/p")));
    let b = check_admissibility(&p(3.0, 1.0, -0.4, 0.5), TheoremVariant::B);
    assert!(b.admissible, "{}", b.table());
    for res in [bad, b] {
        assert_eq!(res.admissible, res.inequalities.iter().all(|i| i.holds));
    }
}

#[test]
fn admissibility_matches_independent_oracle() {
    for params in common::random_params(2024, 200) {
        for variant in [TheoremVariant::A, TheoremVariant::B] {
            let res = check_admissibility(&params, variant);
            assert_eq!(res.admissible, common::oracle(&params, variant), "{variant} {params:?}\n{}", res.table());
        }
    }
}

#[test]
fn global_monitor_examples() {
    let cfg = |g1: f64, g2: f64| SolverConfig::new(TorusGrid::standard(3, 8).unwrap(), g1, g2, 1.0, 0.1);
    assert_eq!(global_criterion_monitor(&cfg(2.0, 1.0)).unwrap().regime, GlobalRegime::GlobalRegime);
    assert_eq!(global_criterion_monitor(&cfg(1.5, 1.0)).unwrap().regime, GlobalRegime::LocalOnly);
    let mut log = cfg(2.0, 1.0);
    log.g1 = GFamily::LogHalf;
    assert_eq!(global_criterion_monitor(&log).unwrap().regime, GlobalRegime::GlobalRegime);
    log.g2 = GFamily::LogHalf;
    assert_eq!(global_criterion_monitor(&log).unwrap().regime, GlobalRegime::LocalOnly);
    let two = SolverConfig::new(TorusGrid::standard(2, 8).unwrap(), 2.0, 1.0, 1.0, 0.1);
    assert!(!global_criterion_monitor(&two).unwrap().advisories.is_empty());
}
