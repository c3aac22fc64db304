//! Parameter-file ingestion.
//!
//! The file is flat TOML. Frequency-like keys (`delta_c`, `delta_m`,
//! `kappa_a`, `gamma_b`, `chi`, `g0`, `delta_c2`, `g_eff`, drive
//! `frequency`, and frequency grids) are interpreted per the `units` tag:
//! `"angular"` (rad/s, default) or `"hz_over_2pi"` (Hz, converted once at
//! ingestion). Phases are always radians and powers always watts.

use anyhow::{bail, Context, Result};
use optomech::params::{from_hz_over_2pi, normalize_phase, Drive, SystemParams, HBAR_SI};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Units {
    #[serde(rename = "angular")]
    Angular,
    #[serde(rename = "hz_over_2pi")]
    HzOver2pi,
}

impl Units {
    fn to_angular(self, value: f64) -> f64 {
        match self {
            Units::Angular => value,
            Units::HzOver2pi => from_hz_over_2pi(value),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    power_w: f64,
    phase_rad: f64,
    frequency: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrives {
    a: RawDrive,
    b: RawDrive,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    count: usize,
    #[serde(default = "default_scale")]
    scale: GridScale,
}

fn default_scale() -> GridScale {
    GridScale::Linear
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    units: Option<Units>,
    delta_c: f64,
    delta_m: f64,
    kappa_a: f64,
    gamma_b: f64,
    chi: f64,
    g0: Option<f64>,
    hbar: Option<f64>,
    /// Modified optical detuning for spectrum/stability runs; defaults to
    /// `delta_c` (caption-style configs set the modified value directly).
    delta_c2: Option<f64>,
    /// Effective coupling override; when absent it is derived from the
    /// steady state.
    g_eff: Option<f64>,
    drive: RawDrives,
    #[serde(default)]
    grid: BTreeMap<String, RawGrid>,
}

/// One named axis: materialized grid points.
#[derive(Debug, Clone)]
pub struct Axis {
    pub points: Vec<f64>,
    pub scale: GridScale,
}

/// Fully ingested run configuration, all values angular.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub drive_a: Drive,
    pub drive_b: Drive,
    pub delta_c2: Option<f64>,
    pub g_eff: Option<f64>,
    pub grids: BTreeMap<String, Axis>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("parsing parameter file")?;
        let units = raw.units.unwrap_or(Units::Angular);
        let params = SystemParams {
            delta_c: units.to_angular(raw.delta_c),
            delta_m: units.to_angular(raw.delta_m),
            kappa_a: units.to_angular(raw.kappa_a),
            gamma_b: units.to_angular(raw.gamma_b),
            chi: units.to_angular(raw.chi),
            g0: units.to_angular(raw.g0.unwrap_or(0.0)),
            hbar: raw.hbar.unwrap_or(HBAR_SI),
        };
        let params = params.validate().map_err(anyhow::Error::new)?;
        let drive = |d: &RawDrive| -> Result<Drive> {
            Drive::new(d.power_w, normalize_phase(d.phase_rad), units.to_angular(d.frequency))
                .map_err(anyhow::Error::new)
        };
        let drive_a = drive(&raw.drive.a).context("drive.a")?;
        let drive_b = drive(&raw.drive.b).context("drive.b")?;
        let mut grids = BTreeMap::new();
        for (name, g) in &raw.grid {
            if g.count < 2 {
                bail!("grid.{name}: count must be at least 2");
            }
            if g.start >= g.stop {
                bail!("grid.{name}: start must be below stop");
            }
            let frequency_like = name != "power";
            let (start, stop) = if frequency_like {
                (units.to_angular(g.start), units.to_angular(g.stop))
            } else {
                (g.start, g.stop)
            };
            grids.insert(name.clone(), materialize(start, stop, g.count, g.scale)?);
        }
        Ok(RunConfig {
            params,
            drive_a,
            drive_b,
            delta_c2: raw.delta_c2.map(|v| units.to_angular(v)),
            g_eff: raw.g_eff.map(|v| units.to_angular(v)),
            grids,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// The modified optical detuning used for drift matrices when no
    /// steady-state derivation is requested.
    pub fn delta_c2_or_default(&self) -> f64 {
        self.delta_c2.unwrap_or(self.params.delta_c)
    }

    pub fn grid(&self, name: &str) -> Result<&Axis> {
        self.grids
            .get(name)
            .with_context(|| format!("parameter file defines no [grid.{name}] table"))
    }
}

fn materialize(start: f64, stop: f64, count: usize, scale: GridScale) -> Result<Axis> {
    let points = match scale {
        GridScale::Linear => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
        GridScale::Log => {
            if start <= 0.0 {
                bail!("log grids need a positive start");
            }
            let ratio = (stop / start).ln() / (count - 1) as f64;
            (0..count).map(|i| start * (ratio * i as f64).exp()).collect()
        }
    };
    Ok(Axis { points, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const SAMPLE: &str = r#"
units = "hz_over_2pi"
delta_c = 5.2e9
delta_m = 5.2e9
kappa_a = 3.3e7
gamma_b = 3.3e7
chi = 2.5e6

[drive.a]
power_w = 8.93e-17
phase_rad = 0.0
frequency = 5.2e9

[drive.b]
power_w = 3.87e-15
phase_rad = 3.141592653589793
frequency = 5.2e9

[grid.omega]
start = 5.167e9
stop = 5.233e9
count = 5
"#;

    #[test]
    fn units_tag_converts_everything_frequency_like() {
        let cfg = RunConfig::from_toml(SAMPLE).unwrap();
        assert!((cfg.params.delta_m - TAU * 5.2e9).abs() < 1.0);
        assert!((cfg.params.chi - TAU * 2.5e6).abs() < 1e-3);
        assert!((cfg.drive_b.frequency - TAU * 5.2e9).abs() < 1.0);
        // Phase is not unit-converted.
        assert!((cfg.drive_b.phase - std::f64::consts::PI).abs() < 1e-12);
        let axis = cfg.grid("omega").unwrap();
        assert_eq!(axis.points.len(), 5);
        assert!((axis.points[0] - TAU * 5.167e9).abs() < 1.0);
        assert!(axis.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn angular_is_the_default() {
        let text = SAMPLE.replace("units = \"hz_over_2pi\"\n", "");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.params.delta_m, 5.2e9);
    }

    #[test]
    fn invalid_params_are_rejected_with_all_violations() {
        let text = SAMPLE.replace("kappa_a = 3.3e7", "kappa_a = 0.0").replace(
            "chi = 2.5e6",
            "chi = -1.0",
        );
        let err = RunConfig::from_toml(&text).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("kappa_a"), "{msg}");
        assert!(msg.contains("chi"), "{msg}");
    }

    #[test]
    fn tiny_grid_is_rejected() {
        let text = SAMPLE.replace("count = 5", "count = 1");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{SAMPLE}\nbogus_key = 1.0\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
