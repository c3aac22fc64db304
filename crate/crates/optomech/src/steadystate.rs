//! Classical steady-state solvers: displacement, mean fields, occupations,
//! effective coupling, and the coupling-regime classification.
//!
//! The mechanical drive enters as `Omega_b = i eps_b exp(i phi_b)` and the
//! optical drive as `Omega_a = i eps_a exp(i phi_a)`. The real-displacement
//! branch requires `phi_b` in `[pi, 1.5pi)` so that `cos(phi_b) <= 0`; the
//! real-photon-field branch requires `phi_a` in `[0, 0.5pi) u (1.5pi, 2pi]`.

use crate::linalg::C64;
use crate::params::{Drive, SystemParams};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteadyStateError {
    #[error("{field} must be positive, got {value}")]
    NonPositiveRate { field: &'static str, value: f64 },
    #[error("phase {phase} lies outside the required branch")]
    PhaseOutOfBranch { phase: f64 },
    #[error("delta_m = gamma_b = 0 leaves the mean-field denominator degenerate")]
    DegenerateDenominator,
    #[error("no root of the phase equation in the allowed branch")]
    NoRootInBranch,
    #[error("photon-number cubic produced no nonnegative root")]
    NoPhysicalRoot,
    #[error("regime boundaries collapse: 0.5 kappa_a >= 0.1 delta_m")]
    InconsistentBoundaries,
    #[error("chi must be positive to map couplings onto displacement intervals")]
    NonPositiveChi,
}

/// Drive amplitude from laser power: `eps = sqrt(2 P rate / (hbar omega_l))`.
pub fn laser_amplitude(
    power: f64,
    rate: f64,
    omega_l: f64,
    hbar: f64,
) -> Result<f64, SteadyStateError> {
    if rate <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate { field: "rate", value: rate });
    }
    if omega_l <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate { field: "omega_l", value: omega_l });
    }
    if hbar <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate { field: "hbar", value: hbar });
    }
    Ok((2.0 * power * rate / (hbar * omega_l)).sqrt())
}

/// The mechanical phase that keeps the displacement real and positive:
/// `phi_b = pi + atan(2 delta_m / gamma_b)`, guaranteed in `[pi, 1.5pi)`.
pub fn phase_condition_phi_b(delta_m: f64, gamma_b: f64) -> f64 {
    debug_assert!(gamma_b > 0.0 && delta_m >= 0.0);
    PI + (2.0 * delta_m / gamma_b).atan()
}

/// Real displacement branch `beta = -2 eps_b cos(phi_b) / gamma_b >= 0`.
pub fn real_beta_s(epsilon_b: f64, phi_b: f64, gamma_b: f64) -> Result<f64, SteadyStateError> {
    let c = phi_b.cos();
    if c > 0.0 {
        return Err(SteadyStateError::PhaseOutOfBranch { phase: phi_b });
    }
    Ok(-2.0 * epsilon_b * c / gamma_b)
}

/// Complex steady-state displacement `beta_s = Omega_b / (delta_m - i gamma_b/2)`.
pub fn complex_beta_s(omega_b: C64, delta_m: f64, gamma_b: f64) -> Result<C64, SteadyStateError> {
    if delta_m == 0.0 && gamma_b == 0.0 {
        return Err(SteadyStateError::DegenerateDenominator);
    }
    Ok(omega_b / C64::new(delta_m, -0.5 * gamma_b))
}

/// Transient displacement `beta(t) = beta_s + (beta0 - beta_s) e^{-(i delta_m + gamma_b/2) t}`.
pub fn transient_beta(
    t: f64,
    beta0: C64,
    omega_b: C64,
    delta_m: f64,
    gamma_b: f64,
) -> Result<C64, SteadyStateError> {
    debug_assert!(t >= 0.0);
    let beta_s = complex_beta_s(omega_b, delta_m, gamma_b)?;
    let decay = (C64::new(-0.5 * gamma_b, -delta_m) * t).exp();
    Ok(beta_s + (beta0 - beta_s) * decay)
}

/// Real optical mean field `alpha_R = 2 eps_a cos(phi_a) / kappa_a >= 0`.
pub fn alpha_real(epsilon_a: f64, phi_a: f64, kappa_a: f64) -> Result<f64, SteadyStateError> {
    let c = phi_a.cos();
    if c < 0.0 {
        return Err(SteadyStateError::PhaseOutOfBranch { phase: phi_a });
    }
    Ok(2.0 * epsilon_a * c / kappa_a)
}

/// Mechanical mean field for a given photon number:
/// `eta = i g |alpha|^2 / (i delta_m + gamma_b/2)`.
pub fn eta_of_alpha(
    alpha_sq: f64,
    g: f64,
    delta_m: f64,
    gamma_b: f64,
) -> Result<C64, SteadyStateError> {
    if delta_m == 0.0 && gamma_b == 0.0 {
        return Err(SteadyStateError::DegenerateDenominator);
    }
    Ok(C64::new(0.0, g * alpha_sq) / C64::new(0.5 * gamma_b, delta_m))
}

/// Self-consistent complex mean fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFields {
    pub alpha: C64,
    pub eta: C64,
    /// All nonnegative photon-number solutions of the cubic, ascending.
    pub photon_roots: Vec<f64>,
}

/// Solve the self-consistent mean-field problem for a complex drive.
///
/// The photon number obeys a real cubic obtained from the modulus of the
/// mean-field fixed point; its roots are found in closed form and polished
/// with one Newton step. `alpha` is reconstructed from the smallest
/// nonnegative root (the low-excitation branch).
pub fn complex_mean_fields(
    params: &SystemParams,
    omega_a: C64,
    g: f64,
    delta_c0: f64,
) -> Result<MeanFields, SteadyStateError> {
    if params.kappa_a <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate {
            field: "kappa_a",
            value: params.kappa_a,
        });
    }
    if params.gamma_b <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate {
            field: "gamma_b",
            value: params.gamma_b,
        });
    }
    let roots = photon_number_roots(params, omega_a, g, delta_c0)?;
    let n = *roots.first().ok_or(SteadyStateError::NoPhysicalRoot)?;
    let alpha = alpha_for_root(params, omega_a, g, delta_c0, n);
    let eta = eta_of_alpha(n, g, params.delta_m, params.gamma_b)?;
    Ok(MeanFields { alpha, eta, photon_roots: roots })
}

/// Reconstruct the complex optical mean field from a photon-number root.
pub fn alpha_for_root(
    params: &SystemParams,
    omega_a: C64,
    g: f64,
    delta_c0: f64,
    n: f64,
) -> C64 {
    let d = mechanical_lorentzian(params);
    let numerator = -C64::i() * omega_a * d;
    let denominator =
        C64::new(0.5 * params.kappa_a, delta_c0) * d - C64::new(0.0, 2.0 * g * g * params.delta_m * n);
    numerator / denominator
}

fn mechanical_lorentzian(params: &SystemParams) -> f64 {
    let half_gamma = 0.5 * params.gamma_b;
    half_gamma * half_gamma + params.delta_m * params.delta_m
}

/// Nonnegative roots of the photon-number cubic
/// `N [ (kappa_a D / 2)^2 + (delta_c0 D - 2 g^2 delta_m N)^2 ] = |Omega_a|^2 D^2`
/// with `D = (gamma_b/2)^2 + delta_m^2`, in ascending order.
pub fn photon_number_roots(
    params: &SystemParams,
    omega_a: C64,
    g: f64,
    delta_c0: f64,
) -> Result<Vec<f64>, SteadyStateError> {
    let d = mechanical_lorentzian(params);
    let drive_sq = omega_a.norm_sqr();
    let shift = 2.0 * g * g * params.delta_m;
    // a3 N^3 + a2 N^2 + a1 N + a0 = 0
    let a3 = shift * shift;
    let a2 = -2.0 * delta_c0 * d * shift;
    let a1 = d * d * (delta_c0 * delta_c0 + 0.25 * params.kappa_a * params.kappa_a);
    let a0 = -drive_sq * d * d;

    let mut roots = if a3 == 0.0 {
        // Linear cavity: a2 vanishes with a3 (both carry g^2 delta_m).
        vec![-a0 / a1]
    } else {
        cubic_real_roots(a2 / a3, a1 / a3, a0 / a3)
    };

    let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.abs()));
    for root in roots.iter_mut() {
        *root = polish_cubic_root(a3, a2, a1, a0, *root);
        if *root < 0.0 && *root > -1e-12 * scale {
            *root = 0.0;
        }
    }
    roots.retain(|r| *r >= 0.0);
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-8 * scale);
    if roots.is_empty() {
        return Err(SteadyStateError::NoPhysicalRoot);
    }
    Ok(roots)
}

/// Real roots of `x^3 + p x^2 + q x + r` by the trigonometric/Cardano method.
fn cubic_real_roots(p: f64, q: f64, r: f64) -> Vec<f64> {
    // Depress: x = t - p/3.
    let shift = p / 3.0;
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let disc = (b / 2.0) * (b / 2.0) + (a / 3.0) * (a / 3.0) * (a / 3.0);
    let mut roots = Vec::with_capacity(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-b / 2.0 + sq).cbrt();
        let v = (-b / 2.0 - sq).cbrt();
        roots.push(u + v - shift);
    } else if disc == 0.0 {
        let u = (-b / 2.0).cbrt();
        roots.push(2.0 * u - shift);
        roots.push(-u - shift);
    } else {
        // Three distinct real roots.
        let m = 2.0 * (-a / 3.0).sqrt();
        let theta = (3.0 * b / (a * m)).acos() / 3.0;
        for k in 0..3 {
            roots.push(m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift);
        }
    }
    roots
}

fn polish_cubic_root(a3: f64, a2: f64, a1: f64, a0: f64, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..3 {
        let f = ((a3 * x + a2) * x + a1) * x + a0;
        let df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if df == 0.0 {
            break;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Solve the transcendental phase condition for the optical drive,
/// returning the smallest-phase root (preferring `[0, 0.5pi)`).
pub fn solve_phi_a(
    params: &SystemParams,
    epsilon_a: f64,
    g: f64,
    delta_c0: f64,
) -> Result<f64, SteadyStateError> {
    solve_phi_a_all(params, epsilon_a, g, delta_c0)?
        .into_iter()
        .next()
        .ok_or(SteadyStateError::NoRootInBranch)
}

/// All roots of the phase condition in `[0, 0.5pi) u (1.5pi, 2pi]`,
/// ordered by branch and then by phase.
///
/// The residual `tan(phi) - rhs(phi)` changes sign across each root; the
/// brackets found by a dense scan are closed with bisection and polished
/// with Newton.
pub fn solve_phi_a_all(
    params: &SystemParams,
    epsilon_a: f64,
    g: f64,
    delta_c0: f64,
) -> Result<Vec<f64>, SteadyStateError> {
    if params.kappa_a <= 0.0 {
        return Err(SteadyStateError::NonPositiveRate {
            field: "kappa_a",
            value: params.kappa_a,
        });
    }
    let kappa = params.kappa_a;
    let lorentz4 = 4.0 * params.delta_m * params.delta_m + params.gamma_b * params.gamma_b;
    // rhs(phi) = a_lin - b_cos * cos^2(phi)
    let a_lin = 2.0 * delta_c0 / kappa;
    let amp = 2.0 * g * epsilon_a / kappa;
    let b_cos = (2.0 / kappa) * (8.0 * params.delta_m / lorentz4) * amp * amp;
    let residual = |phi: f64| phi.tan() - a_lin + b_cos * phi.cos().powi(2);
    let derivative = |phi: f64| {
        let sec = 1.0 / phi.cos();
        sec * sec - b_cos * (2.0 * phi).sin()
    };

    const SEGMENTS: usize = 4096;
    // Keep a sliver away from the tangent pole at 0.5pi and 1.5pi.
    let margin = 1e-9;
    let branches = [(0.0, 0.5 * PI - margin), (1.5 * PI + margin, 2.0 * PI)];
    let mut roots = Vec::new();
    for (lo, hi) in branches {
        let step = (hi - lo) / SEGMENTS as f64;
        let mut left = lo;
        let mut f_left = residual(left);
        for k in 1..=SEGMENTS {
            let right = lo + step * k as f64;
            let f_right = residual(right);
            if f_left == 0.0 {
                roots.push(left);
            } else if f_left * f_right < 0.0 {
                roots.push(refine_root(&residual, &derivative, left, right, f_left));
            }
            left = right;
            f_left = f_right;
        }
        if f_left == 0.0 {
            roots.push(left);
        }
    }
    // Verify the advertised residual bound on every root.
    roots.retain(|&phi| {
        let rhs = a_lin - b_cos * phi.cos().powi(2);
        (phi.tan() - rhs).abs() <= 1e-10 * (1.0 + rhs.abs())
    });
    if roots.is_empty() {
        return Err(SteadyStateError::NoRootInBranch);
    }
    Ok(roots)
}

fn refine_root(
    residual: &dyn Fn(f64) -> f64,
    derivative: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = residual(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = derivative(x);
        if d == 0.0 {
            break;
        }
        let next = x - residual(x) / d;
        if next < lo || next > hi {
            break;
        }
        x = next;
    }
    x
}

/// Average photon number from drive power and phase:
/// `N_a = 4 P_a [cos(2 phi_a) + 1] / (hbar omega_la kappa_a)`.
pub fn avg_photon_number(power_a: f64, phi_a: f64, omega_la: f64, kappa_a: f64, hbar: f64) -> f64 {
    debug_assert!(power_a >= 0.0);
    4.0 * power_a * ((2.0 * phi_a).cos() + 1.0) / (hbar * omega_la * kappa_a)
}

/// Average phonon number `N_b = beta^2 + G^2 / ((gamma_b/2)^2 + delta_m^2)`.
pub fn avg_phonon_number(beta: f64, g_eff: f64, gamma_b: f64, delta_m: f64) -> f64 {
    debug_assert!(beta >= 0.0);
    let d = 0.25 * gamma_b * gamma_b + delta_m * delta_m;
    beta * beta + g_eff * g_eff / d
}

/// Phonon number directly from drive power at the single-photon level:
/// `N_b = 8 P_b cos^2(phi_b) / (hbar omega_lb gamma_b) [1 + chi^2 / ((gamma_b/2)^2 + delta_m^2)]`.
#[allow(clippy::too_many_arguments)]
pub fn phonon_number_from_power(
    power_b: f64,
    phi_b: f64,
    omega_lb: f64,
    gamma_b: f64,
    delta_m: f64,
    chi: f64,
    hbar: f64,
) -> f64 {
    debug_assert!(power_b >= 0.0);
    let c = phi_b.cos();
    let d = 0.25 * gamma_b * gamma_b + delta_m * delta_m;
    8.0 * power_b * c * c / (hbar * omega_lb * gamma_b) * (1.0 + chi * chi / d)
}

/// Drive power needed to reach a displacement `beta` at phase `phi_b`.
/// Inverse of `real_beta_s` composed with `laser_amplitude`.
pub fn power_for_beta(
    beta: f64,
    phi_b: f64,
    gamma_b: f64,
    omega_lb: f64,
    hbar: f64,
) -> Result<f64, SteadyStateError> {
    let c = phi_b.cos();
    if c >= 0.0 {
        return Err(SteadyStateError::PhaseOutOfBranch { phase: phi_b });
    }
    Ok(beta * beta * gamma_b * hbar * omega_lb / (8.0 * c * c))
}

/// The four coupling regimes, ordered by effective coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Regime {
    Weak,
    Strong,
    Ultrastrong,
    DeepStrong,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
            Regime::Ultrastrong => "ultrastrong",
            Regime::DeepStrong => "deep strong",
        }
    }
}

/// Half-open (or unbounded) interval used in the regime report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    /// `None` marks an unbounded upper end.
    pub hi: Option<f64>,
}

/// Classification of an operating point plus the intervals its regime spans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Effective-coupling interval of the regime (rad/s).
    pub g_interval: Interval,
    /// Displacement interval required to stay in the regime.
    pub beta_required: Interval,
    /// Drive-power interval (W) at the report's phase.
    pub power_required: Interval,
    /// Phonon-number interval spanned by the regime.
    pub phonons: Interval,
}

/// Pure classifier on the effective coupling.
pub fn regime_of(g_eff: f64, kappa_a: f64, delta_m: f64) -> Result<Regime, SteadyStateError> {
    if 0.5 * kappa_a >= 0.1 * delta_m {
        return Err(SteadyStateError::InconsistentBoundaries);
    }
    Ok(if g_eff < 0.5 * kappa_a {
        Regime::Weak
    } else if g_eff < 0.1 * delta_m {
        Regime::Strong
    } else if g_eff <= delta_m {
        Regime::Ultrastrong
    } else {
        Regime::DeepStrong
    })
}

/// Classify an operating point and recompute the regime-boundary intervals
/// of displacement, drive power, and phonon number from the parameters.
pub fn classify_regime(
    g_eff: f64,
    _g0: f64,
    params: &SystemParams,
    drive_b: &Drive,
) -> Result<RegimeReport, SteadyStateError> {
    let regime = regime_of(g_eff, params.kappa_a, params.delta_m)?;
    if params.chi <= 0.0 {
        return Err(SteadyStateError::NonPositiveChi);
    }
    let (g_lo, g_hi) = match regime {
        Regime::Weak => (0.0, Some(0.5 * params.kappa_a)),
        Regime::Strong => (0.5 * params.kappa_a, Some(0.1 * params.delta_m)),
        Regime::Ultrastrong => (0.1 * params.delta_m, Some(params.delta_m)),
        Regime::DeepStrong => (params.delta_m, None),
    };
    let beta_of_g = |g: f64| g / params.chi;
    let power_of_beta = |beta: f64| {
        power_for_beta(beta, drive_b.phase, params.gamma_b, drive_b.frequency, params.hbar)
    };
    let phonons_of = |g: f64| avg_phonon_number(beta_of_g(g), g, params.gamma_b, params.delta_m);

    let beta_lo = beta_of_g(g_lo);
    let beta_hi = g_hi.map(beta_of_g);
    let power_lo = power_of_beta(beta_lo)?;
    let power_hi = match beta_hi {
        Some(b) => Some(power_of_beta(b)?),
        None => None,
    };
    Ok(RegimeReport {
        regime,
        g_interval: Interval { lo: g_lo, hi: g_hi },
        beta_required: Interval { lo: beta_lo, hi: beta_hi },
        power_required: Interval { lo: power_lo, hi: power_hi },
        phonons: Interval { lo: phonons_of(g_lo), hi: g_hi.map(phonons_of) },
    })
}

/// All steady-state quantities of the symmetric-optomechanics pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    /// Complex displacement from the exact mechanical steady state.
    pub beta_s: C64,
    /// Real displacement branch (present when the real-branch phase holds).
    pub beta_s_real: Option<f64>,
    /// Complex optical mean field from the self-consistent cubic.
    pub alpha: C64,
    /// Real optical mean field from the solved drive phase.
    pub alpha_r: f64,
    /// Mechanical mean field belonging to `alpha`.
    pub eta: C64,
    /// Mean photon number `alpha_r^2`.
    pub n_a: f64,
    /// Mean phonon number at the operating point.
    pub n_b: f64,
    /// Effective linearized coupling `G_R = g alpha_r`.
    pub g_eff: f64,
    /// Enhanced single-photon coupling `g = chi beta_s_real`.
    pub g_single: f64,
}

/// Steady state plus the solved phases and derived detunings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadySolution {
    pub state: SteadyState,
    /// Optical phase solving the real-coupling condition.
    pub phi_a: f64,
    /// Mechanical phase actually used (from the drive).
    pub phi_b: f64,
    /// Mechanical phase demanded by the real-branch condition.
    pub phi_b_constrained: f64,
    /// Normalized optical detuning `delta_c + chi beta^2`.
    pub delta_c0: f64,
    /// Modified optical detuning `delta_c0 - g (eta + eta*)`.
    pub delta_c2: f64,
    /// Photon-number roots of the mean-field cubic, ascending.
    pub photon_roots: Vec<f64>,
}

/// Run the full steady-state pipeline for a parameter set and drive pair.
///
/// The mechanical phase is taken from `drive_b` (the real-displacement
/// branch must hold for it); the optical phase is solved from the
/// real-coupling condition, so `drive_a.phase` does not enter here.
pub fn solve_steady_state(
    params: &SystemParams,
    drive_a: &Drive,
    drive_b: &Drive,
) -> Result<SteadySolution, SteadyStateError> {
    let epsilon_b =
        laser_amplitude(drive_b.power, params.gamma_b, drive_b.frequency, params.hbar)?;
    let phi_b = drive_b.phase;
    let beta = real_beta_s(epsilon_b, phi_b, params.gamma_b)?;
    let omega_b = C64::i() * epsilon_b * C64::new(0.0, phi_b).exp();
    let beta_s = complex_beta_s(omega_b, params.delta_m, params.gamma_b)?;
    let g = params.chi * beta;
    let delta_c0 = params.delta_c + params.chi * beta * beta;

    let epsilon_a =
        laser_amplitude(drive_a.power, params.kappa_a, drive_a.frequency, params.hbar)?;
    let phi_a = solve_phi_a(params, epsilon_a, g, delta_c0)?;
    let alpha_r = alpha_real(epsilon_a, phi_a, params.kappa_a)?;
    let eta_r = eta_of_alpha(alpha_r * alpha_r, g, params.delta_m, params.gamma_b)?;
    let delta_c2 = delta_c0 - g * 2.0 * eta_r.re;

    let omega_a = C64::i() * epsilon_a * C64::new(0.0, phi_a).exp();
    let fields = complex_mean_fields(params, omega_a, g, delta_c0)?;

    let g_eff = g * alpha_r;
    let n_b = avg_phonon_number(beta, g_eff, params.gamma_b, params.delta_m);
    Ok(SteadySolution {
        state: SteadyState {
            beta_s,
            beta_s_real: Some(beta),
            alpha: fields.alpha,
            alpha_r,
            eta: fields.eta,
            n_a: alpha_r * alpha_r,
            n_b,
            g_eff,
            g_single: g,
        },
        phi_a,
        phi_b,
        phi_b_constrained: phase_condition_phi_b(params.delta_m, params.gamma_b),
        delta_c0,
        delta_c2,
        photon_roots: fields.photon_roots,
    })
}
