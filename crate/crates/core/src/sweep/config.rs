//! JSON run configuration. Frequencies in GHz, temperatures in mK, flux in
//! units of Φ₀.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveSpec, DEFAULT_RESONANCE_GUARD};
use crate::error::{Error, Result};
use crate::pair_breaking::{CpAmplitude, MatrixElementMode};
use crate::rates::Process;
use crate::spectral::{QPDistribution, QpSpectrum, C_NORM};
use crate::units::{ghz, millikelvin};

pub const DEFAULT_MAX_AXIS_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub drive: DriveConfig,
    pub distribution: DistributionConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory against which relative paths are resolved.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Either both junction energies or ω_q(0) with the asymmetry E_J1/E_J2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ej1_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ej2_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_q0_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ej_ratio: Option<f64>,
    pub ec_ghz: f64,
    pub delta_l_ghz: f64,
    pub delta_r_ghz: f64,
}

/// Exactly one amplitude key: the bare phase amplitude `a`, a fixed ac-Stark
/// shift `omega_ac_ghz` (≤ 0), or `stark_ratio` = |ω_ac|/ω_q(Φ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_ac_ghz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stark_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionConfig {
    Thermal {
        temperature_mk: f64,
        x_qp: f64,
    },
    ColdStrip {
        width_ghz: f64,
        x_qp: f64,
    },
    /// Two-column file: energy above Δ_L in GHz, occupation.
    Tabulated {
        path: String,
        x_qp: f64,
    },
    ColdAsymptotic {
        x_qp: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range(AxisRange),
    Values(AxisValues),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisValues {
    pub values: Vec<f64>,
}

impl Axis {
    pub fn range(start: f64, stop: f64, points: usize) -> Axis {
        Axis::Range(AxisRange { start, stop, points })
    }

    pub fn values(values: Vec<f64>) -> Axis {
        Axis::Values(AxisValues { values })
    }

    /// Grid points; ranges include both ends.
    pub fn points(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.values.clone(),
            Axis::Range(r) if r.points == 1 => vec![r.start],
            Axis::Range(r) => {
                let last = (r.points - 1) as f64;
                (0..r.points)
                    .map(|i| {
                        let t = i as f64 / last;
                        r.start * (1.0 - t) + r.stop * t
                    })
                    .collect()
            }
        }
    }

    fn validate(&self, key: &str, max_points: usize) -> Result<()> {
        if let Axis::Range(r) = self {
            if r.points == 0 {
                return Err(Error::Config(format!("{key}.points must be at least 1")));
            }
            if r.points == 1 && r.start != r.stop {
                return Err(Error::Config(format!("{key}: a single point needs start == stop")));
            }
        }
        let pts = self.points();
        if pts.is_empty() {
            return Err(Error::Config(format!("{key} has no points")));
        }
        if pts.len() > max_points {
            return Err(Error::Config(format!("{key} has {} points, above the budget of {max_points}", pts.len())));
        }
        if let Some(i) = pts.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("{key}[{i}] is not finite")));
        }
        let increasing = pts.windows(2).all(|w| w[1] > w[0]);
        let decreasing = pts.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Config(format!("{key} must be strictly monotone")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub flux: Axis,
    pub omega_d_ghz: Axis,
    pub processes: Vec<Process>,
    /// Photon number for pair-breaking columns; the lowest allowed order
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cp_photons: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_c_norm")]
    pub c_norm: f64,
    #[serde(default = "default_guard")]
    pub resonance_guard: f64,
    #[serde(default)]
    pub cp_amplitude: CpAmplitude,
    #[serde(default)]
    pub cp_elements: MatrixElementMode,
    #[serde(default = "default_max_axis")]
    pub max_axis_points: usize,
}

fn default_c_norm() -> f64 {
    C_NORM
}
fn default_guard() -> f64 {
    DEFAULT_RESONANCE_GUARD
}
fn default_max_axis() -> usize {
    DEFAULT_MAX_AXIS_POINTS
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            c_norm: C_NORM,
            resonance_guard: DEFAULT_RESONANCE_GUARD,
            cp_amplitude: CpAmplitude::default(),
            cp_elements: MatrixElementMode::default(),
            max_axis_points: DEFAULT_MAX_AXIS_POINTS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg =
            Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(&e))))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.device;
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{key} must be positive, got {v}")))
            }
        };
        positive("device.ec_ghz", d.ec_ghz)?;
        positive("device.delta_l_ghz", d.delta_l_ghz)?;
        positive("device.delta_r_ghz", d.delta_r_ghz)?;
        match (d.ej1_ghz, d.ej2_ghz, d.omega_q0_ghz, d.ej_ratio) {
            (Some(e1), Some(e2), None, None) => {
                positive("device.ej1_ghz", e1)?;
                positive("device.ej2_ghz", e2)?;
            }
            (None, None, Some(w), Some(r)) => {
                positive("device.omega_q0_ghz", w)?;
                positive("device.ej_ratio", r)?;
            }
            _ => {
                return Err(Error::Config(
                    "device: give either ej1_ghz and ej2_ghz, or omega_q0_ghz and ej_ratio".into(),
                ))
            }
        }

        let dr = &self.drive;
        match (dr.a, dr.omega_ac_ghz, dr.stark_ratio) {
            (Some(a), None, None) if a.is_finite() && a >= 0.0 => {}
            (None, Some(w), None) if w.is_finite() && w <= 0.0 => {}
            (None, None, Some(r)) if r.is_finite() && r >= 0.0 => {}
            (None, Some(w), None) => return Err(Error::Config(format!("drive.omega_ac_ghz must be ≤ 0, got {w}"))),
            (Some(_), None, None) | (None, None, Some(_)) => {
                return Err(Error::Config("drive amplitude must be finite and non-negative".into()))
            }
            _ => return Err(Error::Config("drive: give exactly one of a, omega_ac_ghz, stark_ratio".into())),
        }

        let x_qp = self.distribution.x_qp();
        if !(x_qp.is_finite() && x_qp >= 0.0) {
            return Err(Error::Config(format!("distribution.x_qp must be non-negative, got {x_qp}")));
        }
        match &self.distribution {
            DistributionConfig::Thermal { temperature_mk, .. } => {
                positive("distribution.temperature_mk", *temperature_mk)?
            }
            DistributionConfig::ColdStrip { width_ghz, .. } => positive("distribution.width_ghz", *width_ghz)?,
            DistributionConfig::Tabulated { path, .. } if path.is_empty() => {
                return Err(Error::Config("distribution.path is empty".into()))
            }
            _ => {}
        }

        let n = &self.numerics;
        positive("numerics.c_norm", n.c_norm)?;
        positive("numerics.resonance_guard", n.resonance_guard)?;
        if n.max_axis_points == 0 {
            return Err(Error::Config("numerics.max_axis_points must be at least 1".into()));
        }

        let s = &self.sweep;
        if s.processes.is_empty() {
            return Err(Error::Config("sweep.processes is empty".into()));
        }
        if let Some(i) = s.processes.iter().enumerate().position(|(i, p)| s.processes[..i].contains(p)) {
            return Err(Error::Config(format!("sweep.processes[{i}] is a duplicate")));
        }
        if s.cp_photons == Some(0) {
            return Err(Error::Config("sweep.cp_photons must be at least 1".into()));
        }
        s.flux.validate("sweep.flux", n.max_axis_points)?;
        s.omega_d_ghz.validate("sweep.omega_d_ghz", n.max_axis_points)?;
        if let Some(w) = s.omega_d_ghz.points().iter().find(|&&w| !(w > 0.0)) {
            return Err(Error::Config(format!("sweep.omega_d_ghz values must be positive, got {w}")));
        }
        Ok(())
    }

    /// Device at the given flux.
    pub fn device(&self, flux: f64) -> Result<DeviceParams> {
        let d = &self.device;
        let (ec, dl, dr) = (ghz(d.ec_ghz), ghz(d.delta_l_ghz), ghz(d.delta_r_ghz));
        let dev = match (d.ej1_ghz, d.ej2_ghz, d.omega_q0_ghz, d.ej_ratio) {
            (Some(e1), Some(e2), _, _) => DeviceParams::new(ghz(e1), ghz(e2), ec, dl, dr, flux)?,
            (_, _, Some(w), Some(r)) => DeviceParams::from_qubit_frequency(ghz(w), r, ec, dl, dr, flux)?,
            _ => return Err(Error::Config("device block is incomplete".into())),
        };
        Ok(dev.with_resonance_guard(self.numerics.resonance_guard))
    }

    /// Drive at ω_d (rad/s) for a device already set to the cell's flux.
    pub fn drive(&self, dev: &DeviceParams, omega_d: f64) -> Result<DriveSpec> {
        let dr = &self.drive;
        match (dr.a, dr.omega_ac_ghz, dr.stark_ratio) {
            (Some(a), _, _) => DriveSpec::direct(omega_d, a),
            (_, Some(w), _) => DriveSpec::ac_stark(omega_d, ghz(w)),
            (_, _, Some(r)) => DriveSpec::ac_stark(omega_d, -r * dev.omega_q()?),
            _ => Err(Error::Config("drive block is incomplete".into())),
        }
    }

    /// The QP spectrum; flux independent.
    pub fn spectrum(&self) -> Result<QpSpectrum> {
        let dl = ghz(self.device.delta_l_ghz);
        let c_norm = self.numerics.c_norm;
        let dist = match &self.distribution {
            DistributionConfig::Thermal { temperature_mk, x_qp } => {
                QPDistribution::thermal(dl, millikelvin(*temperature_mk), *x_qp)?
            }
            DistributionConfig::ColdStrip { width_ghz, x_qp } => {
                QPDistribution::cold_strip(dl, ghz(*width_ghz), *x_qp)?
            }
            DistributionConfig::Tabulated { path, x_qp } => {
                let p = self.resolve(path);
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| Error::Config(format!("distribution.path {}: {e}", p.display())))?;
                QPDistribution::tabulated_from_text(&text, dl, *x_qp)
                    .map_err(|e| Error::Config(format!("distribution.path {}: {}", p.display(), strip_prefix(&e))))?
            }
            DistributionConfig::ColdAsymptotic { x_qp } => return Ok(QpSpectrum::ColdAsymptotic { x_qp: *x_qp }),
        };
        Ok(QpSpectrum::Numeric(dist.with_c_norm(c_norm)?))
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = PathBuf::from(path);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p,
        }
    }
}

impl DistributionConfig {
    pub fn x_qp(&self) -> f64 {
        match self {
            DistributionConfig::Thermal { x_qp, .. }
            | DistributionConfig::ColdStrip { x_qp, .. }
            | DistributionConfig::Tabulated { x_qp, .. }
            | DistributionConfig::ColdAsymptotic { x_qp } => *x_qp,
        }
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}
