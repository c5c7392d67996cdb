//! Quasiparticle-tunneling transition rates of the driven transmon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveSpec, STRONG_DRIVE_ADVISORY};
use crate::error::{Error, Result};
use crate::spectral::{QpSpectrum, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    #[serde(rename = "tun_relax_1ph")]
    TunRelax1ph,
    #[serde(rename = "tun_excite_1ph")]
    TunExcite1ph,
    #[serde(rename = "tun_leak_1to2")]
    TunLeak1to2,
    #[serde(rename = "tun_relax_2ph")]
    TunRelax2ph,
    #[serde(rename = "tun_excite_2ph")]
    TunExcite2ph,
    CpRelax,
    CpExcite,
}

impl Process {
    pub const ALL: [Process; 7] = [
        Process::TunRelax1ph,
        Process::TunExcite1ph,
        Process::TunLeak1to2,
        Process::TunRelax2ph,
        Process::TunExcite2ph,
        Process::CpRelax,
        Process::CpExcite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Process::TunRelax1ph => "tun_relax_1ph",
            Process::TunExcite1ph => "tun_excite_1ph",
            Process::TunLeak1to2 => "tun_leak_1to2",
            Process::TunRelax2ph => "tun_relax_2ph",
            Process::TunExcite2ph => "tun_excite_2ph",
            Process::CpRelax => "cp_relax",
            Process::CpExcite => "cp_excite",
        }
    }

    pub fn from_name(name: &str) -> Option<Process> {
        Process::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn is_pair_breaking(self) -> bool {
        matches!(self, Process::CpRelax | Process::CpExcite)
    }
}

impl std::fmt::Display for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub process: Process,
    /// Rate in 1/s.
    pub value: f64,
    /// Rate in the normalization of the corresponding figure.
    pub normalized_value: f64,
    pub photon_count: u32,
    pub below_threshold: bool,
    pub warnings: Vec<String>,
}

/// Coefficients (of S₊, of S₋) in the one-photon rates:
/// (E_J(0)/E_J(Φ) − 1, E_J(0)/E_J(Φ) + 1). The first is exactly 0 at Φ = 0.
pub fn one_photon_coefficients(dev: &DeviceParams) -> Result<(f64, f64)> {
    let r = dev.flux_ratio()?;
    Ok((r - 1.0, r + 1.0))
}

/// Coefficients (of S₊, of S₋) in the two-photon rates; the S₋ one vanishes
/// exactly at Φ = 0.
pub fn two_photon_coefficients(dev: &DeviceParams) -> Result<(f64, f64)> {
    let r = dev.flux_ratio()?;
    Ok((r + 1.0, r - 1.0))
}

pub(crate) fn drive_warnings(dev: &DeviceParams, drive: &DriveSpec) -> Vec<String> {
    let mut w = Vec::new();
    if dev.outside_transmon_regime() {
        w.push("(E_J1+E_J2)/E_C below 20: harmonic treatment questionable".to_string());
    }
    if let Ok(a) = drive.amplitude(dev) {
        if a > STRONG_DRIVE_ADVISORY {
            w.push(format!("drive amplitude a = {a:.3} exceeds {STRONG_DRIVE_ADVISORY}: leading order in a"));
        }
    }
    w
}

/// Σ coefficient·S[ω] over the two channels; zero coefficients skip the
/// structure factor entirely.
fn braces(dev: &DeviceParams, spec: &QpSpectrum, omega: f64, (c_plus, c_minus): (f64, f64)) -> Result<(f64, bool)> {
    let mut total = 0.0;
    let mut below = true;
    for (sign, c) in [(Sign::Plus, c_plus), (Sign::Minus, c_minus)] {
        if c == 0.0 {
            continue;
        }
        let s = spec.s_pm(dev, sign, omega)?;
        below &= s.below_threshold;
        total += c * s.value;
    }
    Ok((total, below))
}

fn one_photon(
    process: Process,
    dev: &DeviceParams,
    drive: &DriveSpec,
    spec: &QpSpectrum,
    qubit_sign: f64,
) -> Result<RateResult> {
    drive.validate()?;
    let wac = drive.omega_ac(dev)?.abs();
    let x = spec.x_qp();
    let omega = drive.omega_d + qubit_sign * dev.omega_q()?;
    let (b, below) = braces(dev, spec, omega, one_photon_coefficients(dev)?)?;
    let normalized = b / (4.0 * PI);
    Ok(RateResult {
        process,
        value: normalized * wac * x,
        normalized_value: normalized,
        photon_count: 1,
        below_threshold: below,
        warnings: drive_warnings(dev, drive),
    })
}

/// Γ⁽¹⁾_{1→0} = (|ω_ac|x_QP/4π){S₊[ω_d+ω_q](r−1) + S₋[ω_d+ω_q](r+1)},
/// r = ω_q²(0)/ω_q²(Φ). Normalized by |ω_ac|x_QP.
pub fn gamma1_relax(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RateResult> {
    one_photon(Process::TunRelax1ph, dev, drive, spec, 1.0)
}

/// Γ⁽¹⁾_{0→1}: the relaxation formula with ω_q → −ω_q in the S± argument.
pub fn gamma1_excite(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RateResult> {
    one_photon(Process::TunExcite1ph, dev, drive, spec, -1.0)
}

/// Γ⁽¹⁾_{1→2} ≈ 2Γ⁽¹⁾_{0→1} from harmonic matrix-element scaling.
pub fn gamma1_leak_1to2(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RateResult> {
    let mut r = gamma1_excite(dev, drive, spec)?;
    r.process = Process::TunLeak1to2;
    r.value *= 2.0;
    r.normalized_value *= 2.0;
    r.warnings.push("harmonic estimate: ω_12 taken equal to ω_q".to_string());
    Ok(r)
}

fn two_photon(
    process: Process,
    dev: &DeviceParams,
    drive: &DriveSpec,
    spec: &QpSpectrum,
    qubit_sign: f64,
) -> Result<RateResult> {
    drive.validate()?;
    let wq = dev.omega_q()?;
    let wac = drive.omega_ac(dev)?;
    let x = spec.x_qp();
    let omega = 2.0 * drive.omega_d + qubit_sign * wq;
    let vertex = 1.0 + 4.0 * dev.response_d0(omega)?;
    let (b, below) = braces(dev, spec, omega, two_photon_coefficients(dev)?)?;
    let normalized = vertex * vertex * b / (32.0 * PI);
    let mut warnings = drive_warnings(dev, drive);
    let detuning = (omega.abs() - wq).abs();
    if detuning <= 10.0 * dev.resonance_guard * wq {
        warnings.push("within 10× of the resonance guard: rate diverges as (ω_d−ω_q)⁻²".to_string());
    }
    Ok(RateResult {
        process,
        value: normalized * wac * wac * x / wq,
        normalized_value: normalized,
        photon_count: 2,
        below_threshold: below,
        warnings,
    })
}

/// Γ⁽²⁾_{1→0} = (1/32π)(ω_ac²x_QP/ω_q){1 + 4D₀[2ω_d+ω_q]}²
/// {S₊[2ω_d+ω_q](r+1) + S₋[2ω_d+ω_q](r−1)}. Normalized by ω_ac²x_QP/ω_q(Φ).
pub fn gamma2_relax(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RateResult> {
    two_photon(Process::TunRelax2ph, dev, drive, spec, 1.0)
}

/// Γ⁽²⁾_{0→1}: argument 2ω_d − ω_q; diverges as ω_d → ω_q.
pub fn gamma2_excite(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RateResult> {
    two_photon(Process::TunExcite2ph, dev, drive, spec, -1.0)
}

pub fn tunneling_rate(
    process: Process,
    dev: &DeviceParams,
    drive: &DriveSpec,
    spec: &QpSpectrum,
) -> Result<RateResult> {
    match process {
        Process::TunRelax1ph => gamma1_relax(dev, drive, spec),
        Process::TunExcite1ph => gamma1_excite(dev, drive, spec),
        Process::TunLeak1to2 => gamma1_leak_1to2(dev, drive, spec),
        Process::TunRelax2ph => gamma2_relax(dev, drive, spec),
        Process::TunExcite2ph => gamma2_excite(dev, drive, spec),
        Process::CpRelax | Process::CpExcite => {
            Err(Error::InvalidParams(format!("{process} is a pair-breaking process")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub closed_form: f64,
    pub rate_quotient: f64,
}

/// Γ⁽²⁾_{1→0}/Γ⁽¹⁾_{1→0} at Φ = 0 in closed form for cold quasiparticles,
/// alongside the quotient of the two rates evaluated with `spec`.
pub fn ratio_2ph_to_1ph(dev: &DeviceParams, drive: &DriveSpec, spec: &QpSpectrum) -> Result<RatioResult> {
    let wq = dev.omega_q0();
    let wd = drive.omega_d;
    let dd = dev.delta_diff();
    let x1 = wd + wq - dd;
    let x2 = 2.0 * wd + wq - dd;
    if !(x1 > 0.0) {
        return Err(Error::BelowThreshold(format!("one-photon relaxation needs ω_d + ω_q > δΔ (offset {x1:e} rad/s)")));
    }
    let wac = drive.omega_ac(dev)?.abs();
    let arg = 2.0 * wd + wq;
    let bracket = 1.0 + 4.0 * wq * wq / (arg * arg - wq * wq);
    let closed_form = 0.125 * (wac / wq) * 2.0 * dev.delta_mean() / (x1.sqrt() * x2.sqrt()) * bracket * bracket;
    let g1 = gamma1_relax(dev, drive, spec)?;
    let g2 = gamma2_relax(dev, drive, spec)?;
    Ok(RatioResult { closed_form, rate_quotient: g2.value / g1.value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub process: Process,
    pub photon_count: u32,
    /// Lowest drive frequency (rad/s) at which the process is allowed for
    /// cold quasiparticles, clipped at 0.
    pub omega_th: f64,
}

/// Cold-quasiparticle thresholds of the tunneling processes.
pub fn thresholds(dev: &DeviceParams) -> Result<Vec<Threshold>> {
    let wq = dev.omega_q()?;
    let dd = dev.delta_diff();
    let t = |process, photon_count, w: f64| Threshold { process, photon_count, omega_th: w.max(0.0) };
    Ok(vec![
        t(Process::TunRelax1ph, 1, dd - wq),
        t(Process::TunExcite1ph, 1, dd + wq),
        t(Process::TunLeak1to2, 1, dd + wq),
        t(Process::TunRelax2ph, 2, 0.5 * (dd - wq)),
        t(Process::TunExcite2ph, 2, 0.5 * (dd + wq)),
    ])
}
