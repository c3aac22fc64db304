//! Acceptance suite: every shipped numerical claim, checked at its stated
//! tolerance with one machine-readable result per check.
//!
//! Results carry the comparison that defines them (relative deviation,
//! upper bound, ...) so the JSON summary is self-describing. Runtimes are
//! measured per criterion group and reported against the stated budget.

use optomech::dynamics::{build_full, build_rwa, eigen_stability, FluctuationModel, Verdict};
use optomech::linalg::C64;

use optomech::scattering::{
    analytic_x_symmetric, centered_grid, peak_analysis, probabilities, scatter_full,
    scatter_rwa, sweep_spectrum, Channel, SweepParams, Which,
};
use optomech::steadystate::{
    avg_phonon_number, avg_photon_number, laser_amplitude, phonon_number_from_power,
    power_for_beta, real_beta_s,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

use crate::presets::{circuit_qed, SIDEBAND_RATIO};

/// How `observed` is judged against `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    /// `|observed - expected| <= tolerance * |expected|`
    RelWithin,
    /// `|observed - expected| <= tolerance`
    AbsWithin,
    /// `observed <= expected + tolerance`
    AtMost,
    /// `observed >= expected - tolerance`
    AtLeast,
    /// `observed > expected`
    Exceeds,
    /// 1.0 when the checked predicate held.
    Holds,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceResult {
    pub criterion_id: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub cmp: Cmp,
    pub pass: bool,
    pub runtime_ms: f64,
}

fn judge(cmp: Cmp, observed: f64, expected: f64, tolerance: f64) -> bool {
    match cmp {
        Cmp::RelWithin => (observed - expected).abs() <= tolerance * expected.abs(),
        Cmp::AbsWithin => (observed - expected).abs() <= tolerance,
        Cmp::AtMost => observed <= expected + tolerance,
        Cmp::AtLeast => observed >= expected - tolerance,
        Cmp::Exceeds => observed > expected,
        Cmp::Holds => observed == 1.0,
    }
}

struct Group {
    prefix: &'static str,
    budget_ms: f64,
    started: Instant,
    results: Vec<AcceptanceResult>,
}

impl Group {
    fn new(prefix: &'static str, budget_ms: f64) -> Self {
        Group { prefix, budget_ms, started: Instant::now(), results: Vec::new() }
    }

    fn push(&mut self, id: &str, cmp: Cmp, observed: f64, expected: f64, tolerance: f64) {
        let pass = judge(cmp, observed, expected, tolerance);
        self.results.push(AcceptanceResult {
            criterion_id: format!("{}.{id}", self.prefix),
            observed,
            expected,
            tolerance,
            cmp,
            pass,
            runtime_ms: 0.0,
        });
    }

    fn holds(&mut self, id: &str, ok: bool) {
        self.push(id, Cmp::Holds, if ok { 1.0 } else { 0.0 }, 1.0, 0.0);
    }

    fn finish(mut self) -> Vec<AcceptanceResult> {
        let elapsed = self.started.elapsed().as_secs_f64() * 1e3;
        for r in self.results.iter_mut() {
            r.runtime_ms = elapsed;
        }
        let pass = elapsed < self.budget_ms;
        self.results.push(AcceptanceResult {
            criterion_id: format!("{}.runtime", self.prefix),
            observed: elapsed,
            expected: self.budget_ms,
            tolerance: 0.0,
            cmp: Cmp::AtMost,
            pass,
            runtime_ms: elapsed,
        });
        self.results
    }
}

/// Run every criterion whose id starts with `filter` (all when `None`).
pub fn run(filter: Option<&str>) -> Vec<AcceptanceResult> {
    let groups: Vec<fn() -> Vec<AcceptanceResult>> = vec![
        table2_thresholds,
        single_photon_drive,
        critical_transmission,
        analytic_oracle,
        coupling_peaks,
        damping_crossover,
        vacuum_plateau,
        rwa_validity,
        decomposition_bound,
        energy_audit,
        stability_oracles,
        blockade_trend,
        consistency_chain,
    ];
    let mut results = Vec::new();
    for group in groups {
        results.extend(group());
    }
    if let Some(prefix) = filter {
        results.retain(|r| r.criterion_id.starts_with(prefix));
    }
    results
}

/// Criterion 1: published drive powers and phonon numbers at the three
/// regime boundaries, within 1%.
fn table2_thresholds() -> Vec<AcceptanceResult> {
    let mut g = Group::new("T2", 1000.0);
    let p = circuit_qed();
    let cases = [
        ("6.6", 6.6, 3.87e-15, 44.0),
        ("208", 208.0, 3.85e-12, 4.326e4),
        ("2080", 2080.0, 0.385e-9, 4.326e6),
    ];
    for (tag, beta, power_ref, phonons_ref) in cases {
        let power = power_for_beta(beta, PI, p.gamma_b, p.delta_m, p.hbar).unwrap();
        g.push(&format!("P.{tag}"), Cmp::RelWithin, power, power_ref, 0.01);
        // Round trip through the forward chain.
        let eps = laser_amplitude(power, p.gamma_b, p.delta_m, p.hbar).unwrap();
        let beta_back = real_beta_s(eps, PI, p.gamma_b).unwrap();
        g.push(&format!("beta.{tag}"), Cmp::RelWithin, beta_back, beta, 1e-12);
        let phonons = avg_phonon_number(beta, p.chi * beta, p.gamma_b, p.delta_m);
        g.push(&format!("N.{tag}"), Cmp::RelWithin, phonons, phonons_ref, 0.01);
    }
    g.finish()
}

/// Criterion 2: 8.93e-2 fW puts one photon in the cavity.
fn single_photon_drive() -> Vec<AcceptanceResult> {
    let mut g = Group::new("NA1", 1000.0);
    let p = circuit_qed();
    let n = avg_photon_number(8.93e-17, 0.0, p.delta_m, p.kappa_a, p.hbar);
    g.push("photon", Cmp::RelWithin, n, 1.0, 0.01);
    let n_pi = avg_photon_number(8.93e-17, PI, p.delta_m, p.kappa_a, p.hbar);
    g.push("photon_phase_pi", Cmp::RelWithin, n_pi, 1.0, 0.01);
    g.finish()
}

fn symmetric_sweep(g_eff: f64) -> SweepParams {
    SweepParams {
        delta_c2: SIDEBAND_RATIO,
        delta_m: SIDEBAND_RATIO,
        kappa_a: 1.0,
        gamma_b: 1.0,
        g_eff,
    }
}

/// Criterion 3: unit transmission at the critical coupling, reciprocity
/// across the grid.
fn critical_transmission() -> Vec<AcceptanceResult> {
    let mut g = Group::new("CRIT", 1000.0);
    let params = symmetric_sweep(0.5);
    let grid = centered_grid(SIDEBAND_RATIO, 5.0, 2001);
    let spec = sweep_spectrum(&params, &grid, Which::Both, false).unwrap();
    let at_resonance = spec
        .points
        .iter()
        .min_by(|a, b| {
            (a.omega - SIDEBAND_RATIO)
                .abs()
                .partial_cmp(&(b.omega - SIDEBAND_RATIO).abs())
                .unwrap()
        })
        .unwrap();
    g.push("t_resonance", Cmp::AbsWithin, at_resonance.probs.t_ab, 1.0, 1e-9);
    let max_recip = spec
        .points
        .iter()
        .map(|pt| (pt.probs.t_ab - pt.probs.t_ba).abs())
        .fold(0.0f64, f64::max);
    g.push("reciprocity", Cmp::AtMost, max_recip, 1e-12, 0.0);
    g.finish()
}

/// Criterion 4: numeric X at resonance against the closed form, 100 draws.
fn analytic_oracle() -> Vec<AcceptanceResult> {
    let mut g = Group::new("XORACLE", 1000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xi = 10f64.powf(rng.gen_range(-2.0..2.0));
        let ratio = 10f64.powf(rng.gen_range(-2.0..2.0));
        let g_eff = ratio * xi;
        let delta = xi * 10f64.powf(rng.gen_range(0.0..3.0));
        let sp = SweepParams { delta_c2: delta, delta_m: delta, kappa_a: xi, gamma_b: xi, g_eff };
        let numeric = scatter_rwa(delta, &sp.rwa_model()).unwrap();
        let analytic = analytic_x_symmetric(g_eff, xi);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((numeric[i][j] - analytic[i][j]).norm());
            }
        }
    }
    g.push("match", Cmp::AtMost, worst, 1e-10, 0.0);
    g.finish()
}

/// Criterion 5: peak counting and splitting versus coupling.
fn coupling_peaks() -> Vec<AcceptanceResult> {
    let mut g = Group::new("PEAKS6", 5000.0);
    let grid = centered_grid(SIDEBAND_RATIO, 5.0, 2001);
    let step = 10.0 / 2000.0;
    let mut splittings = Vec::new();
    for (g_eff, expected_peaks) in [(0.1, 1usize), (0.3, 1), (0.7, 2), (2.0, 2)] {
        let spec = sweep_spectrum(&symmetric_sweep(g_eff), &grid, Which::Rwa, false).unwrap();
        let peaks = peak_analysis(&spec, Channel::TAb);
        g.push(
            &format!("count.{g_eff}"),
            Cmp::AbsWithin,
            peaks.peak_count as f64,
            expected_peaks as f64,
            0.0,
        );
        if expected_peaks == 2 {
            let symmetric = peaks
                .symmetric_about
                .map(|m| (m - SIDEBAND_RATIO).abs() <= step)
                .unwrap_or(false);
            g.holds(&format!("symmetry.{g_eff}"), symmetric);
            splittings.push(peaks.splitting.unwrap_or(0.0));
        }
    }
    g.push("splitting_widens", Cmp::Exceeds, splittings[1], splittings[0], 0.0);
    g.finish()
}

/// Criterion 6: damping crossover at fixed critical coupling.
fn damping_crossover() -> Vec<AcceptanceResult> {
    let mut g = Group::new("PEAKS7", 5000.0);
    let grid = centered_grid(SIDEBAND_RATIO, 5.0, 2001);
    let run = |gamma: f64| {
        let sp = SweepParams {
            delta_c2: SIDEBAND_RATIO,
            delta_m: SIDEBAND_RATIO,
            kappa_a: 1.0,
            gamma_b: gamma,
            g_eff: 0.5,
        };
        let spec = sweep_spectrum(&sp, &grid, Which::Rwa, false).unwrap();
        let peaks = peak_analysis(&spec, Channel::TAb);
        let max_t = spec.points.iter().map(|p| p.probs.t_ab).fold(0.0f64, f64::max);
        (peaks.peak_count, max_t)
    };
    for gamma in [0.02, 0.2, 0.4] {
        let (count, _) = run(gamma);
        g.push(&format!("double.{gamma}"), Cmp::AbsWithin, count as f64, 2.0, 0.0);
    }
    let (count, max_t) = run(1.0);
    g.push("single.1", Cmp::AbsWithin, count as f64, 1.0, 0.0);
    g.push("unity.1", Cmp::AbsWithin, max_t, 1.0, 1e-9);
    let mut last = f64::INFINITY;
    let mut decreasing = true;
    for gamma in [1.4, 1.8, 4.0, 10.0] {
        let (count, max_t) = run(gamma);
        g.push(&format!("single.{gamma}"), Cmp::AbsWithin, count as f64, 1.0, 0.0);
        if max_t >= last {
            decreasing = false;
        }
        last = max_t;
    }
    g.holds("overdamped_decreasing", decreasing);
    g.finish()
}

/// Criterion 7: vacuum-contribution plateau near 1e-5.
fn vacuum_plateau() -> Vec<AcceptanceResult> {
    let mut g = Group::new("VAC", 2000.0);
    let p = circuit_qed();
    let theta_at = |g_eff: f64| {
        let sp = SweepParams {
            delta_c2: p.delta_m,
            delta_m: p.delta_m,
            kappa_a: p.kappa_a,
            gamma_b: p.gamma_b,
            g_eff,
        };
        let o = scatter_full(p.delta_m, &sp.full_model()).unwrap();
        o[0][2].norm_sqr() + o[0][3].norm_sqr()
    };
    let plateau = theta_at(p.delta_m);
    g.holds("plateau", plateau >= 1e-5 / 3.0 && plateau <= 3.0 * 1e-5);
    let mut prev = 0.0;
    let mut nondecreasing = true;
    for j in 1..=60 {
        let theta = theta_at(0.3 * p.delta_m * j as f64 / 60.0);
        if theta < prev * (1.0 - 1e-12) {
            nondecreasing = false;
        }
        prev = theta;
    }
    g.holds("monotone", nondecreasing);
    g.finish()
}

/// Criterion 8: RWA agreement over the whole coupling axis.
fn rwa_validity() -> Vec<AcceptanceResult> {
    let mut g = Group::new("RWA", 2000.0);
    let p = circuit_qed();
    let mut worst = 0.0f64;
    for j in 1..=200 {
        let g_eff = p.delta_m * j as f64 / 200.0;
        let sp = SweepParams {
            delta_c2: p.delta_m,
            delta_m: p.delta_m,
            kappa_a: p.kappa_a,
            gamma_b: p.gamma_b,
            g_eff,
        };
        let probs = probabilities(p.delta_m, &sp.full_model(), &sp.rwa_model()).unwrap();
        worst = worst.max((probs.p_ab - probs.t_ab).abs());
    }
    g.push("agreement", Cmp::AtMost, worst, 1e-3, 0.0);
    g.finish()
}

/// Criterion 9: the decomposition P - Theta ~ T on the dissipative
/// equilibrium grid. The fixed couplings are the nominal optical decay
/// (delta_m / 158) and the two ultrastrong fractions.
fn decomposition_bound() -> Vec<AcceptanceResult> {
    let mut g = Group::new("DECOMP", 5000.0);
    let delta = 1.0;
    let kappa_nominal = delta / SIDEBAND_RATIO;
    let mut worst = 0.0f64;
    for j in 1..=100 {
        let xi = delta * j as f64 / 101.0;
        for g_eff in [kappa_nominal, 0.2 * delta, 0.5 * delta] {
            let sp = SweepParams {
                delta_c2: delta,
                delta_m: delta,
                kappa_a: xi,
                gamma_b: xi,
                g_eff,
            };
            let probs = probabilities(delta, &sp.full_model(), &sp.rwa_model()).unwrap();
            worst = worst.max((probs.p_ab - probs.theta_vac_a - probs.t_ab).abs());
        }
    }
    g.push("max_gap", Cmp::AtMost, worst, 0.05, 0.0);
    g.finish()
}

/// Criterion 10: the legacy probability breaks the energy bound where the
/// corrected one does not.
fn energy_audit() -> Vec<AcceptanceResult> {
    let mut g = Group::new("AUDIT", 2000.0);
    let delta = 1.0;
    let mut max_sigma_excess = f64::NEG_INFINITY;
    let mut max_p_excess = f64::NEG_INFINITY;
    for j in 1..=100 {
        let xi = delta * j as f64 / 101.0;
        let sp = SweepParams {
            delta_c2: delta,
            delta_m: delta,
            kappa_a: xi,
            gamma_b: xi,
            g_eff: 0.5 * delta,
        };
        let probs = probabilities(delta, &sp.full_model(), &sp.rwa_model()).unwrap();
        max_sigma_excess = max_sigma_excess.max(probs.sigma_ab - probs.theta_vac_a);
        max_p_excess = max_p_excess.max(probs.p_ab - probs.theta_vac_a);
    }
    g.push("sigma_exceeds_unity", Cmp::Exceeds, max_sigma_excess, 1.0, 0.0);
    g.push("p_bounded", Cmp::AtMost, max_p_excess, 1.0, 1e-9);
    g.finish()
}

/// Criterion 11: Routh-Hurwitz versus eigenvalue verdicts on random draws,
/// plus the analytic RWA eigenvalues.
fn stability_oracles() -> Vec<AcceptanceResult> {
    let mut g = Group::new("STAB", 5000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut disagreements = 0usize;
    let mut checked = 0usize;
    for draw in 0..1000 {
        let mut sample = || 10f64.powf(rng.gen_range(-3.0..3.0));
        let (kappa, gamma, g_eff, dc2) = (sample(), sample(), sample(), sample());
        let model = if draw % 2 == 0 {
            FluctuationModel::Full(build_full(dc2, 1.0, kappa, gamma, g_eff))
        } else {
            FluctuationModel::Rwa(build_rwa(dc2, 1.0, kappa, gamma, g_eff))
        };
        let report = eigen_stability(&model).unwrap();
        if report.verdict == Verdict::Marginal {
            continue;
        }
        checked += 1;
        if report.routh_hurwitz_pass != report.eigen_pass {
            disagreements += 1;
        }
    }
    g.push("agreement", Cmp::AbsWithin, disagreements as f64, 0.0, 0.0);
    g.push("non_marginal_draws", Cmp::AtLeast, checked as f64, 800.0, 0.0);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xi = 10f64.powf(rng.gen_range(-2.0..2.0));
        let delta = xi * 10f64.powf(rng.gen_range(0.0..3.0));
        let g_eff = xi * 10f64.powf(rng.gen_range(-2.0..2.0));
        let model = FluctuationModel::Rwa(build_rwa(delta, delta, xi, xi, g_eff));
        let report = eigen_stability(&model).unwrap();
        let mut eigs = report.eigenvalues.clone();
        eigs.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        let expect = [C64::new(0.5 * xi, delta - g_eff), C64::new(0.5 * xi, delta + g_eff)];
        for (got, want) in eigs.iter().zip(expect.iter()) {
            worst = worst.max((got - want).norm() / want.norm());
        }
    }
    g.push("analytic_eigenvalues", Cmp::AtMost, worst, 1e-12, 0.0);
    g.finish()
}

/// Criterion 12: photon blocking beyond the critical coupling.
fn blockade_trend() -> Vec<AcceptanceResult> {
    let mut g = Group::new("BLOCK", 1000.0);
    let t_at = |g_eff: f64| {
        let sp = symmetric_sweep(g_eff);
        scatter_rwa(SIDEBAND_RATIO, &sp.rwa_model()).unwrap()[0][1].norm_sqr()
    };
    g.push("t_at_3kappa", Cmp::AtMost, t_at(3.0), 0.11, 0.0);
    let mut decreasing = true;
    let mut last = f64::INFINITY;
    for k in 0..=80 {
        let t = t_at(1.0 + 4.0 * k as f64 / 80.0);
        if t >= last {
            decreasing = false;
        }
        last = t;
    }
    g.holds("monotone_blockade", decreasing);
    g.finish()
}

/// Criterion 13: the power-to-phonon consistency chain.
fn consistency_chain() -> Vec<AcceptanceResult> {
    let mut g = Group::new("CHAIN", 1000.0);
    let p = circuit_qed();
    let mut worst = 0.0f64;
    for k in 0..=45 {
        let power = 1e-18 * 10f64.powf(9.0 * k as f64 / 45.0);
        let eps = laser_amplitude(power, p.gamma_b, p.delta_m, p.hbar).unwrap();
        let beta = real_beta_s(eps, PI, p.gamma_b).unwrap();
        let chained = avg_phonon_number(beta, p.chi * beta, p.gamma_b, p.delta_m);
        let direct =
            phonon_number_from_power(power, PI, p.delta_m, p.gamma_b, p.delta_m, p.chi, p.hbar);
        worst = worst.max((chained - direct).abs() / direct.abs().max(f64::MIN_POSITIVE));
    }
    g.push("consistency", Cmp::AtMost, worst, 1e-12, 0.0);
    g.finish()
}

/// Render the per-criterion lines and the overall verdict.
pub fn format_lines(results: &[AcceptanceResult]) -> Vec<String> {
    results
        .iter()
        .map(|r| {
            format!(
                "{} {} observed={:.6e} expected={:.6e} tol={:.1e} [{:.1} ms]",
                if r.pass { "PASS" } else { "FAIL" },
                r.criterion_id,
                r.observed,
                r.expected,
                r.tolerance,
                r.runtime_ms
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_restricts_to_prefix() {
        let results = run(Some("T2"));
        assert!(!results.is_empty());
        assert!(results.iter().all(|r| r.criterion_id.starts_with("T2")));
    }

    #[test]
    fn unknown_filter_yields_empty_list() {
        assert!(run(Some("nonexistent")).is_empty());
    }
}
