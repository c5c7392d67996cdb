//! Fidelity bounds from the quasiparticle-induced rates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveSpec};
use crate::error::{Error, Result};
use crate::pair_breaking::{gamma_cp_main, min_photon_number, Direction};
use crate::rates::{gamma1_relax, one_photon_coefficients};
use crate::spectral::{QpSpectrum, Sign};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityBound {
    /// Lower bound on 1 − F.
    pub bound: f64,
    /// α for readout, β for gates; NaN where not defined.
    pub coefficient: f64,
    pub below_threshold: bool,
    pub warnings: Vec<String>,
}

/// 1 − F ≳ Γ⁽¹⁾_{1→0} t_RO = α|ω_ac| t_RO x_QP, with α = Γ⁽¹⁾_{1→0}/(|ω_ac|x_QP).
pub fn fidelity_readout_bound(
    dev: &DeviceParams,
    drive: &DriveSpec,
    spec: &QpSpectrum,
    t_ro: f64,
) -> Result<FidelityBound> {
    if !(t_ro > 0.0) {
        return Err(Error::InvalidParams("readout time must be positive".into()));
    }
    let rate = gamma1_relax(dev, drive, spec)?;
    let alpha = rate.normalized_value;
    let wac = drive.omega_ac(dev)?.abs();
    Ok(FidelityBound {
        bound: alpha * wac * t_ro * spec.x_qp(),
        coefficient: alpha,
        below_threshold: rate.below_threshold,
        warnings: rate.warnings,
    })
}

/// Drive amplitude of a resonant π pulse of duration `t_gate`: the Rabi
/// frequency E_J a φ_ZPF equals π/t_gate.
pub fn pi_pulse_amplitude(dev: &DeviceParams, t_gate: f64) -> Result<f64> {
    Ok(PI / (dev.ej_total() * dev.phi_zpf()? * t_gate))
}

/// 1 − F ≳ β x_QP/(E_C t_gate).
///
/// Convention: Γ⁽¹⁾_{1→0} is evaluated for a π pulse of amplitude
/// [`pi_pulse_amplitude`] detuned by the nonlinearity, ω_d = ω_q + E_C, and
/// β = Γ⁽¹⁾ t_gate · E_C t_gate/x_QP. Since Γ⁽¹⁾ ∝ a² ∝ t_gate⁻², β does not
/// depend on t_gate.
pub fn fidelity_gate_bound(dev: &DeviceParams, spec: &QpSpectrum, t_gate: f64) -> Result<FidelityBound> {
    if !(t_gate > 0.0) {
        return Err(Error::InvalidParams("gate time must be positive".into()));
    }
    let a = pi_pulse_amplitude(dev, t_gate)?;
    let drive = DriveSpec::direct(dev.omega_q()? + dev.ec, a)?;
    let rate = gamma1_relax(dev, &drive, spec)?;
    let bound = rate.value * t_gate;
    let x = spec.x_qp();
    let beta = if x > 0.0 { bound * dev.ec * t_gate / x } else { f64::NAN };
    let mut warnings = rate.warnings;
    warnings.push("β uses the resonant π-pulse convention at detuning E_C".to_string());
    Ok(FidelityBound { bound, coefficient: beta, below_threshold: rate.below_threshold, warnings })
}

/// Leading order of β in E_C/ω_q: ã ≈ aω_q/(2E_C) gives |ω_ac| = π²/(2E_C t²)
/// and β ≈ (π/8){S₊[2ω_q+E_C](r−1) + S₋[2ω_q+E_C](r+1)}.
pub fn gate_beta_leading_order(dev: &DeviceParams, spec: &QpSpectrum) -> Result<f64> {
    let omega = 2.0 * dev.omega_q()? + dev.ec;
    let (cp, cm) = one_photon_coefficients(dev)?;
    let sp = spec.s_pm(dev, Sign::Plus, omega)?.value;
    let sm = spec.s_pm(dev, Sign::Minus, omega)?.value;
    Ok(PI / 8.0 * (sp * cp + sm * cm))
}

/// 1 − F ≳ Γ̃⁽²⁾_{1→0} t_RO for a drive far above the qubit frequency where
/// two photons are needed to break a Cooper pair.
pub fn fidelity_highfreq_readout(dev: &DeviceParams, drive: &DriveSpec, t_ro: f64) -> Result<FidelityBound> {
    if !(t_ro > 0.0) {
        return Err(Error::InvalidParams("readout time must be positive".into()));
    }
    let n = min_photon_number(dev, drive.omega_d, -dev.omega_q()?)?;
    if n < 2 {
        return Err(Error::InvalidParams(
            "a single photon already breaks a Cooper pair at this drive frequency".into(),
        ));
    }
    if n > 2 {
        return Ok(FidelityBound {
            bound: 0.0,
            coefficient: f64::NAN,
            below_threshold: true,
            warnings: vec![format!("below the two-photon threshold: {n} photons needed")],
        });
    }
    let rate = gamma_cp_main(dev, drive, 2, Direction::Relax)?;
    Ok(FidelityBound {
        bound: rate.value * t_ro,
        coefficient: rate.normalized_value,
        below_threshold: rate.below_threshold,
        warnings: rate.warnings,
    })
}
