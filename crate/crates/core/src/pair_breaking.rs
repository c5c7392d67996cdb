//! n-photon Cooper-pair-breaking rates and the harmonic transmon matrix
//! elements of cos(φ_j/2) and sin(φ_j/2).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveSpec, Junction};
use crate::error::{Error, Result};
use crate::rates::{drive_warnings, Process, RateResult};
use crate::special::{factorial, laguerre};
use crate::spectral::{s_tilde_pm, Sign};

/// Largest level index for which the closed-form elements are trusted.
pub const MAX_LEVEL: usize = 12;

/// Harmonic level ladder E_i = i·ω_q(Φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonLevels {
    pub omega_q: f64,
    pub n_max: usize,
}

impl TransmonLevels {
    pub fn new(dev: &DeviceParams, n_max: usize) -> Result<Self> {
        Ok(TransmonLevels { omega_q: dev.omega_q()?, n_max })
    }

    pub fn energy(&self, i: usize) -> f64 {
        i as f64 * self.omega_q
    }

    /// ω_if = (E_i − E_f)/ħ.
    pub fn omega_if(&self, i: usize, f: usize) -> f64 {
        self.energy(i) - self.energy(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixElementMode {
    /// Lowest order in λ for each element: no Debye-Waller factor, L_n^{(k)}(0).
    #[default]
    LeadingOrder,
    /// Full displacement-operator elements.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpAmplitude {
    /// ã = sqrt(8|ω_ac|/ω_q).
    #[default]
    Renormalized,
    /// The bare drive amplitude a.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CpOptions {
    pub amplitude: CpAmplitude,
    pub elements: MatrixElementMode,
}

/// ⟨m|e^{iλ(a+a†)}|n⟩.
pub fn displacement_element(m: usize, n: usize, lambda: f64, mode: MatrixElementMode) -> Complex64 {
    let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
    let k = (hi - lo) as u32;
    let l2 = lambda * lambda;
    let (dw, lag) = match mode {
        MatrixElementMode::Exact => ((-0.5 * l2).exp(), laguerre(lo as u32, k, l2)),
        MatrixElementMode::LeadingOrder => (1.0, laguerre(lo as u32, k, 0.0)),
    };
    let mag = dw * lambda.powi(k as i32) * (factorial(lo as u32) / factorial(hi as u32)).sqrt() * lag;
    // i^k
    let phase = match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    phase * mag
}

/// Matrices C[f][i] = ⟨f|cos(φ_j/2)|i⟩ and S[f][i] = ⟨f|sin(φ_j/2)|i⟩ for
/// φ_j = c_j + φ_ZPF(a + a†), c_j = φ_m − (−1)^j πΦ/Φ₀. Both are real and
/// symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPhaseMatrixElements {
    pub junction: Junction,
    pub n_max: usize,
    pub offset: f64,
    pub cos: Vec<Vec<f64>>,
    pub sin: Vec<Vec<f64>>,
}

impl HalfPhaseMatrixElements {
    pub fn completeness(&self, i: usize) -> f64 {
        (0..=self.n_max).map(|f| self.cos[f][i].powi(2) + self.sin[f][i].powi(2)).sum()
    }
}

/// Static phase c_j of junction j.
pub fn junction_offset(dev: &DeviceParams, j: Junction) -> f64 {
    dev.phi_min() - j.sign() * PI * dev.flux
}

pub fn half_phase_matrix_elements(
    dev: &DeviceParams,
    j: Junction,
    n_max: usize,
    mode: MatrixElementMode,
) -> Result<HalfPhaseMatrixElements> {
    if n_max > MAX_LEVEL {
        return Err(Error::TruncationUnstable(format!(
            "n_max = {n_max} exceeds {MAX_LEVEL}; factorial and Laguerre terms lose precision"
        )));
    }
    let lambda = 0.5 * dev.phi_zpf()?;
    let offset = junction_offset(dev, j);
    let (s, c) = (0.5 * offset).sin_cos();
    let mut cos = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut sin = vec![vec![0.0; n_max + 1]; n_max + 1];
    for f in 0..=n_max {
        for i in 0..=n_max {
            let e = displacement_element(f, i, lambda, mode);
            cos[f][i] = c * e.re - s * e.im;
            sin[f][i] = s * e.re + c * e.im;
        }
    }
    Ok(HalfPhaseMatrixElements { junction: j, n_max, offset, cos, sin })
}

/// Smallest n with n·ω_d ≥ 2Δ̄ + ω_fi, at least 1. A relative slack of 1e-12
/// keeps exact multiples from rounding up.
pub fn min_photon_number(dev: &DeviceParams, omega_d: f64, omega_fi: f64) -> Result<u32> {
    if !(omega_d > 0.0) {
        return Err(Error::InvalidParams("drive frequency must be positive".into()));
    }
    let q = (2.0 * dev.delta_mean() + omega_fi) / omega_d;
    Ok((q - 1e-12 * q.abs().max(1.0)).ceil().max(1.0) as u32)
}

fn cp_process(i: usize, f: usize) -> Process {
    if i >= f {
        Process::CpRelax
    } else {
        Process::CpExcite
    }
}

fn cp_amplitude(dev: &DeviceParams, drive: &DriveSpec, mode: CpAmplitude) -> Result<f64> {
    match mode {
        CpAmplitude::Renormalized => drive.renormalized_amplitude_abs(dev),
        CpAmplitude::Bare => drive.amplitude(dev),
    }
}

/// Γ̃⁽ⁿ⁾_{i→f} = (8/π)Σ_j E_Jj(aⁿ/(4ⁿn!))²{S̃_{p(n)}|⟨f|cos(φ_j/2)|i⟩|² +
/// S̃_{−p(n)}|⟨f|sin(φ_j/2)|i⟩|²} at ω_if + nω_d. Normalized by ω_q(Φ).
pub fn gamma_cp_general(
    dev: &DeviceParams,
    drive: &DriveSpec,
    n: u32,
    i: usize,
    f: usize,
    opts: CpOptions,
) -> Result<RateResult> {
    if n == 0 {
        return Err(Error::InvalidParams("photon number must be at least 1".into()));
    }
    drive.validate()?;
    let levels = TransmonLevels::new(dev, i.max(f))?;
    let omega = levels.omega_if(i, f) + n as f64 * drive.omega_d;
    let p = Sign::parity(n);
    let s_p = s_tilde_pm(dev, p, omega)?;
    let s_m = s_tilde_pm(dev, p.flip(), omega)?;
    let a = cp_amplitude(dev, drive, opts.amplitude)?;
    let pref = (a.powi(n as i32) / (4f64.powi(n as i32) * factorial(n))).powi(2);
    let mut total = 0.0;
    for (j, ej) in [(Junction::One, dev.ej1), (Junction::Two, dev.ej2)] {
        let m = half_phase_matrix_elements(dev, j, levels.n_max, opts.elements)?;
        total += ej * (s_p.value * m.cos[f][i].powi(2) + s_m.value * m.sin[f][i].powi(2));
    }
    let value = 8.0 / PI * pref * total;
    Ok(RateResult {
        process: cp_process(i, f),
        value,
        normalized_value: value / levels.omega_q,
        photon_count: n,
        below_threshold: s_p.below_threshold,
        warnings: drive_warnings(dev, drive),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Relax,
    Excite,
}

impl Direction {
    fn qubit_sign(self) -> f64 {
        match self {
            Direction::Relax => 1.0,
            Direction::Excite => -1.0,
        }
    }

    pub fn process(self) -> Process {
        match self {
            Direction::Relax => Process::CpRelax,
            Direction::Excite => Process::CpExcite,
        }
    }
}

/// Coefficients (of S̃_{p(n)}, of S̃_{−p(n)}) in the 1↔0 rate.
pub fn cp_coefficients(dev: &DeviceParams) -> Result<(f64, f64)> {
    let r = dev.flux_ratio()?;
    Ok((r - 1.0, r + 1.0))
}

/// Γ̃⁽ⁿ⁾_{1→0} = (ω_q/(π2^{n+1}n!²))(|ω_ac|/ω_q)ⁿ{S̃_{p(n)}(r−1) + S̃_{−p(n)}(r+1)}
/// at ±ω_q + nω_d. Normalized by ω_q(Φ).
pub fn gamma_cp_main(dev: &DeviceParams, drive: &DriveSpec, n: u32, direction: Direction) -> Result<RateResult> {
    if n == 0 {
        return Err(Error::InvalidParams("photon number must be at least 1".into()));
    }
    drive.validate()?;
    let wq = dev.omega_q()?;
    let wac = drive.omega_ac(dev)?.abs();
    let omega = direction.qubit_sign() * wq + n as f64 * drive.omega_d;
    let p = Sign::parity(n);
    let (c_p, c_m) = cp_coefficients(dev)?;
    let s_p = s_tilde_pm(dev, p, omega)?;
    let s_m = s_tilde_pm(dev, p.flip(), omega)?;
    let pref = wq / (PI * 2f64.powi(n as i32 + 1) * factorial(n).powi(2)) * (wac / wq).powi(n as i32);
    let value = pref * (s_p.value * c_p + s_m.value * c_m);
    Ok(RateResult {
        process: direction.process(),
        value,
        normalized_value: value / wq,
        photon_count: n,
        below_threshold: s_p.below_threshold,
        warnings: drive_warnings(dev, drive),
    })
}

/// Lowest-order pair-breaking rate: n chosen by [`min_photon_number`].
pub fn gamma_cp_auto(dev: &DeviceParams, drive: &DriveSpec, direction: Direction) -> Result<RateResult> {
    let omega_fi = -direction.qubit_sign() * dev.omega_q()?;
    let n = min_photon_number(dev, drive.omega_d, omega_fi)?;
    gamma_cp_main(dev, drive, n, direction)
}

/// Thresholds ω_d = (2Δ̄ ∓ ω_q)/n for n = 1..=n_max.
pub fn cp_thresholds(dev: &DeviceParams, n_max: u32) -> Result<Vec<(Direction, u32, f64)>> {
    let wq = dev.omega_q()?;
    let two_gap = 2.0 * dev.delta_mean();
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.push((Direction::Relax, n, (two_gap - wq) / n as f64));
        out.push((Direction::Excite, n, (two_gap + wq) / n as f64));
    }
    Ok(out)
}
