//! Canonical parameter model, unit conventions, and validation.
//!
//! Every frequency-like quantity held by these types is angular (rad/s).
//! Configuration layers that accept `f / 2pi` values in Hz convert through
//! [`from_hz_over_2pi`] at ingestion; nothing downstream ever re-converts.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use thiserror::Error;

/// Reduced Planck constant in SI units (J·s).
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Convert a frequency quoted as `f / 2pi` (Hz) to angular units (rad/s).
pub fn from_hz_over_2pi(value: f64) -> f64 {
    TAU * value
}

/// Static parameters of the driven optomechanical system.
///
/// `delta_c` and `delta_m` are the optical and mechanical detunings of the
/// rotating frame, `kappa_a` and `gamma_b` the decay/damping rates, `chi`
/// the cross-Kerr strength and `g0` the bare radiation-pressure coupling.
/// `hbar` is carried as a parameter so that normalized desk-scale runs
/// (`hbar = 1`) work alongside SI ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub delta_c: f64,
    pub delta_m: f64,
    pub kappa_a: f64,
    pub gamma_b: f64,
    pub chi: f64,
    #[serde(default)]
    pub g0: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_hbar() -> f64 {
    HBAR_SI
}

impl SystemParams {
    /// Check every invariant, returning the value unchanged when all hold.
    ///
    /// Violations are collected rather than short-circuited so a bad config
    /// file reports everything wrong with it at once.
    pub fn validate(self) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        let fields = [
            ("delta_c", self.delta_c),
            ("delta_m", self.delta_m),
            ("kappa_a", self.kappa_a),
            ("gamma_b", self.gamma_b),
            ("chi", self.chi),
            ("g0", self.g0),
            ("hbar", self.hbar),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                violations.push(Violation::NonFinite { field: name });
            }
        }
        for (name, value) in [("kappa_a", self.kappa_a), ("gamma_b", self.gamma_b)] {
            if value.is_finite() && value <= 0.0 {
                violations.push(Violation::NonPositiveRate { field: name, value });
            }
        }
        if self.chi.is_finite() && self.chi < 0.0 {
            violations.push(Violation::NegativeChi { value: self.chi });
        }
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(ValidationReport { violations })
        }
    }
}

/// A monochromatic drive: laser power, phase, and frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    /// Laser power (W).
    pub power: f64,
    /// Phase, normalized into `[0, 2pi)`.
    pub phase: f64,
    /// Laser frequency (rad/s).
    pub frequency: f64,
}

impl Drive {
    pub fn new(power: f64, phase: f64, frequency: f64) -> Result<Self, ValidationReport> {
        Drive { power, phase: normalize_phase(phase), frequency }.validate()
    }

    pub fn validate(self) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        for (name, value) in [
            ("power", self.power),
            ("phase", self.phase),
            ("frequency", self.frequency),
        ] {
            if !value.is_finite() {
                violations.push(Violation::NonFinite { field: name });
            }
        }
        if self.power.is_finite() && self.power < 0.0 {
            violations.push(Violation::NegativePower { value: self.power });
        }
        if self.frequency.is_finite() && self.frequency <= 0.0 {
            violations.push(Violation::NonPositiveRate { field: "frequency", value: self.frequency });
        }
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(ValidationReport { violations })
        }
    }
}

/// Map an arbitrary finite phase into `[0, 2pi)`.
pub fn normalize_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    // rem_euclid can return TAU itself for inputs one ulp below a multiple.
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Taylor-expansion data for the cavity frequency versus mirror displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoupling {
    /// Mechanical zero-point amplitude (m).
    pub x_zpf: f64,
    /// First derivative of the cavity frequency (rad/(s·m)).
    pub domega_dx: f64,
    /// Second derivative (rad/(s·m^2)).
    pub d2omega_dx2: f64,
}

/// Couplings implied by the expansion: `g0 = -x_zpf * domega_dx` and
/// `chi = x_zpf^2 * d2omega_dx2`.
pub fn derive_couplings(t: &TaylorCoupling) -> (f64, f64) {
    let g0 = -t.x_zpf * t.domega_dx;
    let chi = t.x_zpf * t.x_zpf * t.d2omega_dx2;
    (g0, chi)
}

/// A single named invariant violation.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum Violation {
    #[error("{field} must be positive, got {value}")]
    NonPositiveRate { field: &'static str, value: f64 },
    #[error("{field} must be finite")]
    NonFinite { field: &'static str },
    #[error("chi must be nonnegative, got {value}")]
    NegativeChi { value: f64 },
    #[error("power must be nonnegative, got {value}")]
    NegativePower { value: f64 },
}

/// All invariant violations found by a `validate` call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}
