//! Frequency-domain scattering: the full and RWA scattering matrices,
//! transmission probabilities, vacuum contributions, spectral sweeps, and
//! peak analysis.
//!
//! Conventions follow the drift ordering: rows/columns of the full matrix
//! are `(delta_a, delta_b, delta_a_dag, delta_b_dag)` and the element at
//! row `a`, column `b` carries the `a -> b` laser transmission. The probe
//! frequency lives in the same rotating frame as the detunings, so
//! resonance means `omega = delta_c2 = delta_m`.

use crate::dynamics::{
    build_full, build_rwa, eigen_stability, FluctuationModel, FullModel, RwaModel, Verdict,
};
use crate::linalg::{self, C64};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("drift matrix is singular at probe frequency {omega} (residual {residual:.3e})")]
    SingularAtProbe { omega: f64, residual: f64 },
    #[error("model is unstable; pass allow_unstable to sweep anyway")]
    UnstableModel,
    #[error("frequency grid needs at least 2 points")]
    GridTooSmall,
    #[error("frequency grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("eigenvalue iteration failed during the stability gate")]
    StabilityCheckFailed,
}

/// Residual bound accepted for `(K - i omega I) inv = I`.
const INVERSION_RESIDUAL: f64 = 1e-10;

/// Scattering matrices of both models at one probe frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterMatrices {
    pub omega: f64,
    pub o_full: [[C64; 4]; 4],
    pub x_rwa: [[C64; 2]; 2],
}

/// All scattering probabilities evaluated at one probe frequency.
///
/// `theta_vac_*` are the anomalous-element (anti-RWA) contributions; they
/// are identically zero for the RWA matrix, which has no such elements, so
/// the RWA side carries no separate field. `sigma_ab` is the legacy
/// probability that double-counts the anomalous channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilitySet {
    pub p_ab: f64,
    pub p_ba: f64,
    pub theta_vac_a: f64,
    pub theta_vac_b: f64,
    pub t_ab: f64,
    pub t_ba: f64,
    pub sigma_ab: f64,
}

/// One sampled point of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub probs: ProbabilitySet,
}

/// The five numbers that fix both fluctuation models for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepParams {
    pub delta_c2: f64,
    pub delta_m: f64,
    pub kappa_a: f64,
    pub gamma_b: f64,
    pub g_eff: f64,
}

impl SweepParams {
    pub fn full_model(&self) -> FullModel {
        build_full(self.delta_c2, self.delta_m, self.kappa_a, self.gamma_b, self.g_eff)
    }

    pub fn rwa_model(&self) -> RwaModel {
        build_rwa(self.delta_c2, self.delta_m, self.kappa_a, self.gamma_b, self.g_eff)
    }
}

/// An ordered spectrum with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub points: Vec<SpectrumPoint>,
    pub params_snapshot: SweepParams,
}

/// Which model's stability gates a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    Full,
    Rwa,
    Both,
}

/// Full scattering matrix `O(omega) = mu^T [K - i omega I]^{-1} mu - I`.
pub fn scatter_full(omega: f64, model: &FullModel) -> Result<[[C64; 4]; 4], ScatterError> {
    let mut shifted = model.drift;
    for i in 0..4 {
        shifted[i][i] -= C64::new(0.0, omega);
    }
    let inv = linalg::inverse(&shifted, INVERSION_RESIDUAL)
        .map_err(|e| singular(omega, e))?;
    let mut out = inv.inv;
    let mu = &model.damping;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] *= mu[i] * mu[j];
        }
        out[i][i] -= 1.0;
    }
    Ok(out)
}

/// RWA scattering matrix `X(omega) = L^T [M - i omega I]^{-1} L - I`.
pub fn scatter_rwa(omega: f64, model: &RwaModel) -> Result<[[C64; 2]; 2], ScatterError> {
    let mut shifted = model.drift;
    for i in 0..2 {
        shifted[i][i] -= C64::new(0.0, omega);
    }
    let inv = linalg::inverse(&shifted, INVERSION_RESIDUAL)
        .map_err(|e| singular(omega, e))?;
    let mut out = inv.inv;
    let l = &model.damping;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] *= l[i] * l[j];
        }
        out[i][i] -= 1.0;
    }
    Ok(out)
}

fn singular(omega: f64, err: linalg::LinalgError) -> ScatterError {
    match err {
        linalg::LinalgError::Singular { residual } => {
            ScatterError::SingularAtProbe { omega, residual }
        }
        linalg::LinalgError::NoConverge => ScatterError::StabilityCheckFailed,
    }
}

/// Closed form of `X` at resonance in the symmetric dissipative-equilibrium
/// case (`omega = delta_c2 = delta_m`, `kappa_a = gamma_b = xi`):
/// diagonal `xi^2/2 / (xi^2/4 + G^2) - 1`, off-diagonal
/// `i xi G / (xi^2/4 + G^2)`.
pub fn analytic_x_symmetric(g_eff: f64, xi: f64) -> [[C64; 2]; 2] {
    let denom = 0.25 * xi * xi + g_eff * g_eff;
    let diag = C64::new(0.5 * xi * xi / denom - 1.0, 0.0);
    let off = C64::new(0.0, xi * g_eff / denom);
    [[diag, off], [off, diag]]
}

/// Evaluate every probability at one probe frequency.
pub fn probabilities(
    omega: f64,
    full: &FullModel,
    rwa: &RwaModel,
) -> Result<ProbabilitySet, ScatterError> {
    let o = scatter_full(omega, full)?;
    let x = scatter_rwa(omega, rwa)?;
    Ok(probabilities_from(&o, &x))
}

fn probabilities_from(o: &[[C64; 4]; 4], x: &[[C64; 2]; 2]) -> ProbabilitySet {
    let p_ab = o[0][1].norm_sqr();
    let p_ba = o[1][0].norm_sqr();
    let theta_vac_a = o[0][2].norm_sqr() + o[0][3].norm_sqr();
    let theta_vac_b = o[1][2].norm_sqr() + o[1][3].norm_sqr();
    let t_ab = x[0][1].norm_sqr();
    let t_ba = x[1][0].norm_sqr();
    let sigma_ab = p_ab + o[0][3].norm_sqr();
    ProbabilitySet { p_ab, p_ba, theta_vac_a, theta_vac_b, t_ab, t_ba, sigma_ab }
}

/// Sweep the probe frequency over a strictly increasing grid.
///
/// Grid points are independent, so they are evaluated in parallel and
/// collected back in grid order; results are identical for any schedule.
/// The stability of the gated model(s) is checked once up front unless
/// `allow_unstable` is set.
pub fn sweep_spectrum(
    params: &SweepParams,
    grid: &[f64],
    which: Which,
    allow_unstable: bool,
) -> Result<Spectrum, ScatterError> {
    if grid.len() < 2 {
        return Err(ScatterError::GridTooSmall);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ScatterError::GridNotIncreasing);
    }
    let full = params.full_model();
    let rwa = params.rwa_model();
    if !allow_unstable {
        let mut gated: Vec<FluctuationModel> = Vec::new();
        match which {
            Which::Full => gated.push(FluctuationModel::Full(full.clone())),
            Which::Rwa => gated.push(FluctuationModel::Rwa(rwa.clone())),
            Which::Both => {
                gated.push(FluctuationModel::Full(full.clone()));
                gated.push(FluctuationModel::Rwa(rwa.clone()));
            }
        }
        for model in &gated {
            let report =
                eigen_stability(model).map_err(|_| ScatterError::StabilityCheckFailed)?;
            if report.verdict == Verdict::Unstable {
                return Err(ScatterError::UnstableModel);
            }
        }
    }
    let points: Result<Vec<SpectrumPoint>, ScatterError> = grid
        .par_iter()
        .map(|&omega| {
            probabilities(omega, &full, &rwa).map(|probs| SpectrumPoint { omega, probs })
        })
        .collect();
    Ok(Spectrum { points: points?, params_snapshot: *params })
}

/// Selector for one probability channel of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Channel {
    PAb,
    PBa,
    ThetaVacA,
    ThetaVacB,
    TAb,
    TBa,
    SigmaAb,
}

impl Channel {
    pub fn extract(self, p: &ProbabilitySet) -> f64 {
        match self {
            Channel::PAb => p.p_ab,
            Channel::PBa => p.p_ba,
            Channel::ThetaVacA => p.theta_vac_a,
            Channel::ThetaVacB => p.theta_vac_b,
            Channel::TAb => p.t_ab,
            Channel::TBa => p.t_ba,
            Channel::SigmaAb => p.sigma_ab,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Channel::PAb => "p_ab",
            Channel::PBa => "p_ba",
            Channel::ThetaVacA => "theta_vac_a",
            Channel::ThetaVacB => "theta_vac_b",
            Channel::TAb => "t_ab",
            Channel::TBa => "t_ba",
            Channel::SigmaAb => "sigma_ab",
        }
    }
}

/// Peak structure of one spectral channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakAnalysis {
    pub peak_count: usize,
    pub peak_positions: Vec<f64>,
    pub peak_values: Vec<f64>,
    /// Midpoint of the two dominant peaks when it falls within one grid
    /// step of the resonance `delta_m`.
    pub symmetric_about: Option<f64>,
    /// Distance between the two dominant peaks.
    pub splitting: Option<f64>,
}

/// Peak floor below which local maxima are ignored.
const PEAK_FLOOR: f64 = 1e-6;

/// Find strict local maxima of one channel on the sampled grid.
///
/// No interpolation is attempted; positions and the reported splitting are
/// resolved to one grid step.
pub fn peak_analysis(spectrum: &Spectrum, channel: Channel) -> PeakAnalysis {
    assert!(spectrum.points.len() >= 5, "peak analysis needs at least 5 points");
    let values: Vec<f64> =
        spectrum.points.iter().map(|p| channel.extract(&p.probs)).collect();
    let omegas: Vec<f64> = spectrum.points.iter().map(|p| p.omega).collect();
    let mut peak_positions = Vec::new();
    let mut peak_values = Vec::new();
    for i in 1..values.len() - 1 {
        if values[i] > values[i - 1] && values[i] > values[i + 1] && values[i] > PEAK_FLOOR {
            peak_positions.push(omegas[i]);
            peak_values.push(values[i]);
        }
    }
    let grid_step = omegas
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let (symmetric_about, splitting) = if peak_positions.len() >= 2 {
        // The two largest peaks define the splitting.
        let mut order: Vec<usize> = (0..peak_values.len()).collect();
        order.sort_by(|&i, &j| peak_values[j].partial_cmp(&peak_values[i]).unwrap());
        let (a, b) = (peak_positions[order[0]], peak_positions[order[1]]);
        let mid = 0.5 * (a + b);
        let split = (a - b).abs();
        let sym = if (mid - spectrum.params_snapshot.delta_m).abs() <= grid_step {
            Some(mid)
        } else {
            None
        };
        (sym, Some(split))
    } else {
        (None, None)
    };
    PeakAnalysis {
        peak_count: peak_positions.len(),
        peak_positions,
        peak_values,
        symmetric_about,
        splitting,
    }
}

/// Convenience: a grid of `count` points centred on `center`, spanning
/// `center - half_span ..= center + half_span`, with the centre landing on
/// an exact grid point when `count` is odd.
pub fn centered_grid(center: f64, half_span: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let half = (count - 1) as f64 / 2.0;
    (0..count)
        .map(|i| center + (i as f64 - half) * (half_span / half))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    fn symmetric_params(g: f64) -> SweepParams {
        SweepParams { delta_c2: 158.0, delta_m: 158.0, kappa_a: 1.0, gamma_b: 1.0, g_eff: g }
    }

    #[test]
    fn decoupled_cavity_reflects_at_resonance() {
        let params = symmetric_params(0.0);
        let o = scatter_full(params.delta_c2, &params.full_model()).unwrap();
        // O_a^a = kappa/(i(delta-omega) + kappa/2) - 1 = 1 at resonance.
        assert!((o[0][0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(o[0][1].norm() < 1e-14);
        let x = scatter_rwa(params.delta_c2, &params.rwa_model()).unwrap();
        assert!((x[0][0].norm() - 1.0).abs() < 1e-12);
        assert!((x[1][1].norm() - 1.0).abs() < 1e-12);
        assert!(x[0][1].norm() < 1e-14);
    }

    #[test]
    fn full_matrix_swap_symmetry() {
        let params = symmetric_params(0.8);
        let o = scatter_full(params.delta_m, &params.full_model()).unwrap();
        let swap = [1usize, 0, 3, 2];
        for i in 0..4 {
            for j in 0..4 {
                let s = o[swap[i]][swap[j]];
                assert!((o[i][j] - s).norm() < 1e-12, "asymmetry at ({i},{j})");
            }
        }
    }

    #[test]
    fn critical_coupling_gives_unit_transfer() {
        let params = symmetric_params(0.5);
        let x = scatter_rwa(params.delta_m, &params.rwa_model()).unwrap();
        assert!(x[0][0].norm() < 1e-12);
        assert!((x[0][1].norm() - 1.0).abs() < 1e-12);
        assert!((x[1][0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_coupling_off_diagonal_value() {
        // G = 0.1 xi: |X_ab| = 0.1/0.26.
        let params = symmetric_params(0.1);
        let x = scatter_rwa(params.delta_m, &params.rwa_model()).unwrap();
        assert!(rel_close(x[0][1].norm(), 0.1 / 0.26, 1e-12));
    }

    #[test]
    fn analytic_x_limit_cases() {
        let x = analytic_x_symmetric(0.5, 1.0);
        assert!(x[0][0].norm() < 1e-15);
        assert!((x[0][1].norm() - 1.0).abs() < 1e-15);
        let x = analytic_x_symmetric(0.0, 1.0);
        assert!((x[0][0].norm() - 1.0).abs() < 1e-15);
        assert_eq!(x[0][1].norm(), 0.0);
        // Photon blocking at G = 3 xi.
        let x = analytic_x_symmetric(3.0, 1.0);
        assert!(rel_close(x[0][1].norm_sqr(), 0.105186267348, 1e-9));
    }

    #[test]
    fn numeric_matches_analytic_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let xi = 10f64.powf(rng.gen_range(-2.0..2.0));
            let ratio = 10f64.powf(rng.gen_range(-2.0..2.0));
            let g = ratio * xi;
            let delta = xi * 10f64.powf(rng.gen_range(0.0..3.0));
            let params = SweepParams {
                delta_c2: delta,
                delta_m: delta,
                kappa_a: xi,
                gamma_b: xi,
                g_eff: g,
            };
            let numeric = scatter_rwa(delta, &params.rwa_model()).unwrap();
            let analytic = analytic_x_symmetric(g, xi);
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (numeric[i][j] - analytic[i][j]).norm() <= 1e-10,
                        "xi={xi} g={g}: ({i},{j}) {} vs {}",
                        numeric[i][j],
                        analytic[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn no_coupling_means_no_transfer() {
        let params = symmetric_params(0.0);
        let probs = probabilities(params.delta_m, &params.full_model(), &params.rwa_model()).unwrap();
        assert_eq!(probs.p_ab, 0.0);
        assert_eq!(probs.t_ab, 0.0);
        assert_eq!(probs.sigma_ab, 0.0);
    }

    #[test]
    fn legacy_probability_exceeds_unity_in_ultrastrong_dissipative_regime() {
        // G = 0.5 delta_m with rates near delta_m: the legacy sigma breaks
        // the energy bound while the corrected P does not.
        let delta = 1.0;
        let xi = 0.99;
        let params = SweepParams {
            delta_c2: delta,
            delta_m: delta,
            kappa_a: xi,
            gamma_b: xi,
            g_eff: 0.5 * delta,
        };
        let probs = probabilities(delta, &params.full_model(), &params.rwa_model()).unwrap();
        assert!(probs.sigma_ab - probs.theta_vac_a > 1.0, "sigma excess missing");
        assert!(probs.p_ab - probs.theta_vac_a <= 1.0 + 1e-9);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let params = symmetric_params(0.5);
        assert!(matches!(
            sweep_spectrum(&params, &[1.0], Which::Rwa, false),
            Err(ScatterError::GridTooSmall)
        ));
        assert!(matches!(
            sweep_spectrum(&params, &[1.0, 1.0], Which::Rwa, false),
            Err(ScatterError::GridNotIncreasing)
        ));
    }

    #[test]
    fn sweep_gates_on_stability() {
        // Deep in the unstable non-RWA regime the full gate trips...
        let params = SweepParams {
            delta_c2: 158.0,
            delta_m: 158.0,
            kappa_a: 1.0,
            gamma_b: 1.0,
            g_eff: 120.0,
        };
        let grid = centered_grid(158.0, 5.0, 11);
        assert!(matches!(
            sweep_spectrum(&params, &grid, Which::Full, false),
            Err(ScatterError::UnstableModel)
        ));
        // ...while the RWA model stays stable there,
        assert!(sweep_spectrum(&params, &grid, Which::Rwa, false).is_ok());
        // and the override lets the full sweep through.
        assert!(sweep_spectrum(&params, &grid, Which::Full, true).is_ok());
    }

    #[test]
    fn sweep_is_symmetric_about_resonance() {
        let params = symmetric_params(0.5);
        let grid = centered_grid(params.delta_m, 5.0, 501);
        let spec = sweep_spectrum(&params, &grid, Which::Both, false).unwrap();
        let n = spec.points.len();
        for i in 0..n {
            let a = spec.points[i].probs.t_ab;
            let b = spec.points[n - 1 - i].probs.t_ab;
            assert!((a - b).abs() <= 1e-12 * a.max(b).max(1e-300), "i = {i}");
        }
        // Reciprocity at every point.
        for p in &spec.points {
            assert!((p.probs.t_ab - p.probs.t_ba).abs() <= 1e-12);
            assert!((p.probs.p_ab - p.probs.p_ba).abs() <= 1e-12);
        }
    }

    #[test]
    fn peak_structure_follows_coupling() {
        let grid = centered_grid(158.0, 5.0, 2001);
        // Below the critical coupling: one peak at resonance.
        let spec = sweep_spectrum(&symmetric_params(0.3), &grid, Which::Rwa, false).unwrap();
        let peaks = peak_analysis(&spec, Channel::TAb);
        assert_eq!(peaks.peak_count, 1);
        assert!((peaks.peak_positions[0] - 158.0).abs() < 5.0 / 1000.0 + 1e-12);

        // Above it: two symmetric peaks, splitting 2 sqrt(G^2 - xi^2/4).
        let spec = sweep_spectrum(&symmetric_params(2.0), &grid, Which::Rwa, false).unwrap();
        let peaks = peak_analysis(&spec, Channel::TAb);
        assert_eq!(peaks.peak_count, 2);
        let expected_split = 2.0 * (4.0f64 - 0.25).sqrt();
        assert!((peaks.splitting.unwrap() - expected_split).abs() < 2.0 * 5.0 / 1000.0);
        assert!(peaks.symmetric_about.is_some());

        // A flat zero channel has no peaks.
        let spec = sweep_spectrum(&symmetric_params(0.0), &grid, Which::Rwa, false).unwrap();
        let peaks = peak_analysis(&spec, Channel::TAb);
        assert_eq!(peaks.peak_count, 0);
    }

    #[test]
    fn transmission_peaks_at_critical_coupling_only() {
        // T(resonance) maximized uniquely at G = 0.5 xi.
        let probe = |g: f64| {
            let params = symmetric_params(g);
            scatter_rwa(params.delta_m, &params.rwa_model()).unwrap()[0][1].norm_sqr()
        };
        assert!((probe(0.5) - 1.0).abs() <= 1e-9);
        for g in [0.1, 0.3, 0.49, 0.51, 0.8, 2.0, 5.0] {
            assert!(probe(g) < 1.0, "T exceeded 1 at G = {g}");
        }
        // Strictly decreasing beyond the critical point.
        let mut last = probe(0.5);
        for k in 1..=40 {
            let g = 0.5 + k as f64 * 0.1;
            let t = probe(g);
            assert!(t < last, "not decreasing at G = {g}");
            last = t;
        }
    }
}
