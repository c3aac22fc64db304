//! Property tests for the spec-level invariants that hold across whole
//! parameter ranges rather than at single frozen points.

use optomech::dynamics::{build_rwa, eigen_stability, FluctuationModel, Verdict};
use optomech::linalg::C64;
use optomech::params::{derive_couplings, from_hz_over_2pi, normalize_phase, TaylorCoupling};
use optomech::scattering::{
    centered_grid, scatter_rwa, sweep_spectrum, SweepParams, Which,
};
use optomech::steadystate::{
    complex_beta_s, laser_amplitude, phase_condition_phi_b, photon_number_roots, real_beta_s,
    regime_of, Regime,
};
use optomech::params::SystemParams;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

proptest! {
    #[test]
    fn hz_conversion_is_linear(a in -1e12f64..1e12, b in -1e12f64..1e12) {
        let lhs = from_hz_over_2pi(a + b);
        let rhs = from_hz_over_2pi(a) + from_hz_over_2pi(b);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
    }

    #[test]
    fn coupling_signs_follow_derivatives(
        x_zpf in 1e-18f64..1e-12,
        d1 in -1e22f64..1e22,
        d2 in -1e32f64..1e32,
    ) {
        let (g0, chi) = derive_couplings(&TaylorCoupling {
            x_zpf,
            domega_dx: d1,
            d2omega_dx2: d2,
        });
        prop_assert!(g0 == 0.0 || (g0 > 0.0) == (d1 < 0.0));
        prop_assert!(chi == 0.0 || (chi > 0.0) == (d2 > 0.0));
    }

    #[test]
    fn phases_normalize_into_principal_range(phase in -1e6f64..1e6) {
        let p = normalize_phase(phase);
        prop_assert!((0.0..TAU).contains(&p));
    }

    #[test]
    fn beta_scales_with_sqrt_power(
        power in 1e-20f64..1e-10,
        gamma in 1e6f64..1e9,
        omega in 1e9f64..1e12,
    ) {
        let beta = |p: f64| {
            let eps = laser_amplitude(p, gamma, omega, 1.054571817e-34).unwrap();
            real_beta_s(eps, PI, gamma).unwrap()
        };
        let b1 = beta(power);
        let b2 = beta(2.0 * power);
        prop_assert!((b2 - b1 * 2.0f64.sqrt()).abs() <= 1e-12 * b2.max(1e-300));
    }

    #[test]
    fn complex_displacement_recovers_real_branch(
        eps in 1e-3f64..1e12,
        delta_m in 0.0f64..1e12,
        gamma in 1e-3f64..1e12,
    ) {
        let phi = phase_condition_phi_b(delta_m, gamma);
        prop_assert!((PI..1.5 * PI).contains(&phi));
        let omega_b = C64::i() * eps * C64::new(0.0, phi).exp();
        let b = complex_beta_s(omega_b, delta_m, gamma).unwrap();
        let b_real = real_beta_s(eps, phi, gamma).unwrap();
        prop_assert!(b.im.abs() <= 1e-12 * b.norm().max(1e-300));
        prop_assert!((b.re - b_real).abs() <= 1e-12 * b_real.abs().max(1e-300));
    }

    #[test]
    fn photon_cubic_roots_satisfy_polynomial(
        drive in 1e-2f64..1e2,
        g in 0.0f64..2.0,
        delta_c0 in -3.0f64..3.0,
        delta_m in 0.01f64..3.0,
        kappa in 0.01f64..3.0,
        gamma in 0.01f64..3.0,
    ) {
        let params = SystemParams {
            delta_c: 0.0, delta_m, kappa_a: kappa, gamma_b: gamma,
            chi: 0.0, g0: 0.0, hbar: 1.0,
        };
        let omega_a = C64::new(0.0, drive);
        let roots = photon_number_roots(&params, omega_a, g, delta_c0).unwrap();
        prop_assert!(!roots.is_empty());
        prop_assert!(roots.windows(2).all(|w| w[0] < w[1]));
        let d = 0.25 * gamma * gamma + delta_m * delta_m;
        for &n in &roots {
            let lhs = n * ((0.5 * kappa * d).powi(2) + (delta_c0 * d - 2.0 * g * g * delta_m * n).powi(2));
            let rhs = drive * drive * d * d;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(lhs), "root {} residual {}", n, lhs - rhs);
        }
        if g == 0.0 {
            prop_assert_eq!(roots.len(), 1);
        }
    }

    #[test]
    fn regime_tier_never_decreases(
        kappa in 1e-3f64..0.199,
        g_lo in 0.0f64..2.0,
        bump in 0.0f64..2.0,
    ) {
        // delta_m = 1; kappa range keeps the boundaries ordered.
        let lo = regime_of(g_lo, kappa, 1.0).unwrap();
        let hi = regime_of(g_lo + bump, kappa, 1.0).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn reciprocity_for_real_coupling(
        g in 0.01f64..4.0,
        xi in 0.05f64..2.0,
        delta in 1.0f64..300.0,
    ) {
        let params = SweepParams {
            delta_c2: delta, delta_m: delta, kappa_a: xi, gamma_b: xi, g_eff: g,
        };
        let grid = centered_grid(delta, 4.0 * xi, 31);
        let spec = sweep_spectrum(&params, &grid, Which::Rwa, true).unwrap();
        for p in &spec.points {
            prop_assert!((p.probs.t_ab - p.probs.t_ba).abs() <= 1e-12);
            prop_assert!((p.probs.p_ab - p.probs.p_ba).abs() <= 1e-12);
        }
    }
}

#[test]
fn weak_regime_below_half_kappa() {
    assert_eq!(regime_of(0.049, 0.1, 1.0).unwrap(), Regime::Weak);
    assert_eq!(regime_of(0.05, 0.1, 1.0).unwrap(), Regime::Strong);
    assert_eq!(regime_of(0.1, 0.1, 1.0).unwrap(), Regime::Ultrastrong);
    assert_eq!(regime_of(1.0, 0.1, 1.0).unwrap(), Regime::Ultrastrong);
    assert_eq!(regime_of(1.0 + 1e-12, 0.1, 1.0).unwrap(), Regime::DeepStrong);
}

#[test]
fn rwa_model_always_stable_under_symmetric_drive() {
    // Re eps = xi/2 independent of coupling, so the RWA gate never trips.
    for g in [0.1, 1.0, 50.0, 158.0] {
        let model = FluctuationModel::Rwa(build_rwa(158.0, 158.0, 1.0, 1.0, g));
        let report = eigen_stability(&model).unwrap();
        assert_eq!(report.verdict, Verdict::Stable, "G = {g}");
    }
}

#[test]
fn resonant_transfer_peaks_exactly_at_half_xi() {
    // |T(resonance) - 1| <= 1e-9 only at the critical coupling.
    let t_at = |g: f64| {
        let m = build_rwa(158.0, 158.0, 1.0, 1.0, g);
        scatter_rwa(158.0, &m).unwrap()[0][1].norm_sqr()
    };
    assert!((t_at(0.5) - 1.0).abs() <= 1e-9);
    for g in [0.4999, 0.5001, 0.45, 0.55] {
        assert!((t_at(g) - 1.0).abs() > 1e-9, "G = {g} too close to unity");
    }
}
