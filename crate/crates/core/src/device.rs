//! Device and drive parameterization of the flux-tunable transmon and the
//! single-qubit quantities derived from them.
//!
//! Flux is measured in units of Φ₀. All energies are angular frequencies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative half-width of the band around ω_q treated as on-resonance.
pub const DEFAULT_RESONANCE_GUARD: f64 = 1e-9;

/// (E_J1 + E_J2)/E_C below which the harmonic treatment is flagged.
pub const TRANSMON_RATIO_ADVISORY: f64 = 20.0;

/// Drive amplitude above which leading-order-in-a results carry a warning.
pub const STRONG_DRIVE_ADVISORY: f64 = 0.5;

/// One of the two SQUID junctions. The phase of junction j is shifted by
/// −(−1)^j πΦ/Φ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Junction {
    One,
    Two,
}

impl Junction {
    pub const BOTH: [Junction; 2] = [Junction::One, Junction::Two];

    /// (−1)^j
    pub fn sign(self) -> f64 {
        match self {
            Junction::One => -1.0,
            Junction::Two => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub ej1: f64,
    pub ej2: f64,
    pub ec: f64,
    pub delta_l: f64,
    pub delta_r: f64,
    /// Φ/Φ₀
    pub flux: f64,
    /// Relative guard around qubit resonances.
    #[serde(default = "default_guard")]
    pub resonance_guard: f64,
}

fn default_guard() -> f64 {
    DEFAULT_RESONANCE_GUARD
}

impl DeviceParams {
    pub fn new(ej1: f64, ej2: f64, ec: f64, delta_l: f64, delta_r: f64, flux: f64) -> Result<Self> {
        let dev = DeviceParams { ej1, ej2, ec, delta_l, delta_r, flux, resonance_guard: DEFAULT_RESONANCE_GUARD };
        dev.validate()?;
        Ok(dev)
    }

    /// Build a device from its zero-flux qubit frequency ω_q(0), the junction
    /// asymmetry E_J1/E_J2 and the charging energy.
    pub fn from_qubit_frequency(
        omega_q0: f64,
        ej_ratio: f64,
        ec: f64,
        delta_l: f64,
        delta_r: f64,
        flux: f64,
    ) -> Result<Self> {
        if !(omega_q0 > 0.0 && ej_ratio > 0.0 && ec > 0.0) {
            return Err(Error::InvalidParams("omega_q0, ej_ratio and ec must be positive".into()));
        }
        let ej_sum = omega_q0 * omega_q0 / (8.0 * ec);
        let ej2 = ej_sum / (1.0 + ej_ratio);
        Self::new(ej_ratio * ej2, ej2, ec, delta_l, delta_r, flux)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("ej1", self.ej1),
            ("ej2", self.ej2),
            ("ec", self.ec),
            ("delta_l", self.delta_l),
            ("delta_r", self.delta_r),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.flux.is_finite() {
            return Err(Error::InvalidParams("flux must be finite".into()));
        }
        if self.delta_r < self.delta_l {
            return Err(Error::InvalidParams(format!(
                "the low-gap lead is L by convention: need delta_r ≥ delta_l, got {} < {}",
                self.delta_r, self.delta_l
            )));
        }
        if !(self.resonance_guard >= 0.0) {
            return Err(Error::InvalidParams("resonance_guard must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_flux(mut self, flux: f64) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_resonance_guard(mut self, guard: f64) -> Self {
        self.resonance_guard = guard;
        self
    }

    /// Advisory: true when E_J ≫ E_C is questionable.
    pub fn outside_transmon_regime(&self) -> bool {
        (self.ej1 + self.ej2) / self.ec < TRANSMON_RATIO_ADVISORY
    }

    /// Δ̄ = (Δ_L + Δ_R)/2
    pub fn delta_mean(&self) -> f64 {
        0.5 * (self.delta_l + self.delta_r)
    }

    /// δΔ = Δ_R − Δ_L
    pub fn delta_diff(&self) -> f64 {
        self.delta_r - self.delta_l
    }

    /// E_J(Φ) = sqrt(E_J1² + E_J2² + 2 E_J1 E_J2 cos(πΦ/Φ₀)).
    pub fn ej_total(&self) -> f64 {
        let (e1, e2) = (self.ej1, self.ej2);
        let s = e1 * e1 + e2 * e2 + 2.0 * e1 * e2 * (PI * self.flux).cos();
        s.max(0.0).sqrt()
    }

    /// E_J1 + E_J2, the zero-flux Josephson energy.
    pub fn ej_zero_flux(&self) -> f64 {
        self.with_flux(0.0).ej_total()
    }

    /// Minimum of the Josephson potential, continuous in Φ with φ_m(0) = 0.
    pub fn phi_min(&self) -> f64 {
        let x = PI * self.flux;
        let k = self.ej2 - self.ej1;
        if k == 0.0 {
            return 0.0;
        }
        // arctan(k' tan x) on the branch that winds with x.
        let theta = (k * x.sin()).atan2((self.ej1 + self.ej2) * x.cos());
        let s = k.signum();
        let turns = ((s * x - theta) / (2.0 * PI)).round();
        theta + 2.0 * PI * turns
    }

    fn nonzero_ej(&self) -> Result<f64> {
        let ej = self.ej_total();
        if ej <= 0.0 {
            return Err(Error::FluxSweetSpotDegenerate { flux: self.flux });
        }
        Ok(ej)
    }

    /// ω_q(Φ) = sqrt(8 E_J(Φ) E_C).
    pub fn omega_q(&self) -> Result<f64> {
        Ok((8.0 * self.nonzero_ej()? * self.ec).sqrt())
    }

    pub fn omega_q0(&self) -> f64 {
        (8.0 * self.ej_zero_flux() * self.ec).sqrt()
    }

    /// ω_q²(0)/ω_q²(Φ) = E_J(0)/E_J(Φ). Exactly 1 at Φ = 0.
    pub fn flux_ratio(&self) -> Result<f64> {
        Ok(self.ej_zero_flux() / self.nonzero_ej()?)
    }

    /// φ_ZPF = (2E_C/E_J(Φ))^{1/4}.
    pub fn phi_zpf(&self) -> Result<f64> {
        Ok((2.0 * self.ec / self.nonzero_ej()?).powf(0.25))
    }

    fn check_resonance(&self, omega: f64, omega_q: f64) -> Result<()> {
        if (omega.abs() - omega_q).abs() <= self.resonance_guard * omega_q {
            return Err(Error::OnResonance { omega, omega_q });
        }
        Ok(())
    }

    /// Dimensionless response D₀(ω) = ω_q²/(ω² − ω_q²).
    pub fn response_d0(&self, omega: f64) -> Result<f64> {
        let wq = self.omega_q()?;
        self.check_resonance(omega, wq)?;
        Ok(wq * wq / ((omega - wq) * (omega + wq)))
    }

    /// Full propagator D(ω) = φ_ZPF² 2ω_q/(ω² − ω_q²) = D₀(ω)/E_J.
    pub fn propagator(&self, omega: f64) -> Result<f64> {
        Ok(self.response_d0(omega)? / self.ej_total())
    }

    /// ã/a = ω_d²/(ω_d² − ω_q²) = 1 + D₀(ω_d).
    pub fn screening_factor(&self, omega_d: f64) -> Result<f64> {
        let wq = self.omega_q()?;
        self.check_resonance(omega_d, wq)?;
        Ok(omega_d * omega_d / ((omega_d - wq) * (omega_d + wq)))
    }

    pub fn renormalized_amplitude(&self, drive: &DriveSpec) -> Result<f64> {
        Ok(drive.amplitude(self)? * self.screening_factor(drive.omega_d)?)
    }

    /// ω_ac = −(1/8) ω_q a² ω_d⁴/(ω_d² − ω_q²)².
    pub fn ac_stark_from_a(&self, omega_d: f64, a: f64) -> Result<f64> {
        let s = self.screening_factor(omega_d)?;
        Ok(-0.125 * self.omega_q()? * a * a * s * s)
    }

    /// Inverse of [`DeviceParams::ac_stark_from_a`], returning a ≥ 0.
    pub fn a_from_ac_stark(&self, omega_d: f64, omega_ac: f64) -> Result<f64> {
        if omega_ac > 0.0 {
            return Err(Error::NonNegativeStark(omega_ac));
        }
        let s = self.screening_factor(omega_d)?;
        Ok((8.0 * (-omega_ac) / self.omega_q()?).sqrt() / s.abs())
    }

    /// Normal-state conductance in units of e²/ħ from the Ambegaokar–Baratoff
    /// relation with f = πΔ̄/4: G_T ħ/e² = 4E_J/(πΔ̄).
    pub fn ab_conductance(&self) -> f64 {
        4.0 * self.ej_total() / (PI * self.delta_mean())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplitude {
    /// Phase amplitude a of φ_d(t) = a cos(ω_d t).
    DirectA(f64),
    /// ac-Stark shift ω_ac (rad/s, ≤ 0).
    AcStark(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega_d: f64,
    pub amplitude: Amplitude,
}

impl DriveSpec {
    pub fn direct(omega_d: f64, a: f64) -> Result<Self> {
        let d = DriveSpec { omega_d, amplitude: Amplitude::DirectA(a) };
        d.validate()?;
        Ok(d)
    }

    pub fn ac_stark(omega_d: f64, omega_ac: f64) -> Result<Self> {
        let d = DriveSpec { omega_d, amplitude: Amplitude::AcStark(omega_ac) };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_d.is_finite() && self.omega_d > 0.0) {
            return Err(Error::InvalidParams(format!("drive frequency must be positive, got {}", self.omega_d)));
        }
        match self.amplitude {
            Amplitude::DirectA(a) if !(a.is_finite() && a >= 0.0) => {
                Err(Error::InvalidParams(format!("drive amplitude must be ≥ 0, got {a}")))
            }
            Amplitude::AcStark(w) if w > 0.0 => Err(Error::NonNegativeStark(w)),
            Amplitude::AcStark(w) if !w.is_finite() => {
                Err(Error::InvalidParams("ac-Stark shift must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn with_omega_d(mut self, omega_d: f64) -> Self {
        self.omega_d = omega_d;
        self
    }

    /// ω_ac, resolved from a if needed.
    pub fn omega_ac(&self, dev: &DeviceParams) -> Result<f64> {
        match self.amplitude {
            Amplitude::AcStark(w) => Ok(w),
            Amplitude::DirectA(a) => dev.ac_stark_from_a(self.omega_d, a),
        }
    }

    /// Bare amplitude a, resolved from ω_ac if needed.
    pub fn amplitude(&self, dev: &DeviceParams) -> Result<f64> {
        match self.amplitude {
            Amplitude::DirectA(a) => Ok(a),
            Amplitude::AcStark(w) => dev.a_from_ac_stark(self.omega_d, w),
        }
    }

    /// |ã| = sqrt(8|ω_ac|/ω_q(Φ)); needs no resonance guard in ac-Stark mode.
    pub fn renormalized_amplitude_abs(&self, dev: &DeviceParams) -> Result<f64> {
        let w = self.omega_ac(dev)?;
        Ok((8.0 * w.abs() / dev.omega_q()?).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev(ej1: f64, ej2: f64, ec: f64, flux: f64) -> DeviceParams {
        DeviceParams::new(ej1, ej2, ec, 1.0, 1.2, flux).unwrap()
    }

    #[test]
    fn ej_total_examples() {
        assert!((dev(1.0, 1.0, 0.01, 0.0).ej_total() - 2.0).abs() < 1e-15);
        assert!(dev(1.0, 1.0, 0.01, 1.0).ej_total() < 1e-7);
        assert!((dev(0.9, 1.0, 0.01, 1.0).ej_total() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ej_total_bounded_below() {
        for i in 0..50 {
            let d = dev(0.7, 1.3, 0.01, i as f64 * 0.04);
            assert!(d.ej_total() >= 0.6 - 1e-12);
        }
    }

    #[test]
    fn phi_min_vanishes_at_zero_flux_and_for_symmetric_squid() {
        assert_eq!(dev(0.9, 1.0, 0.01, 0.0).phi_min(), 0.0);
        assert_eq!(dev(1.0, 1.0, 0.01, 0.37).phi_min(), 0.0);
    }

    #[test]
    fn phi_min_matches_grid_minimization() {
        let d = dev(0.9, 1.0, 0.01, 0.3);
        let x = PI * d.flux;
        let potential = |p: f64| -(d.ej1 * (p + x).cos() + d.ej2 * (p - x).cos());
        let n = 2_000_000;
        let best = (0..n)
            .map(|i| -PI + 2.0 * PI * i as f64 / n as f64)
            .min_by(|a, b| potential(*a).total_cmp(&potential(*b)))
            .unwrap();
        assert!((d.phi_min() - best).abs() < 1e-5, "{} vs {best}", d.phi_min());
    }

    #[test]
    fn phi_min_continuous_across_half_flux() {
        let base = dev(0.9, 1.0, 0.01, 0.0);
        let mut prev = base.phi_min();
        // Steepest slope is π(E1+E2)/|E2−E1| ≈ 60 per unit flux.
        for i in 1..=20_000 {
            let cur = base.with_flux(i as f64 * 1e-4).phi_min();
            assert!((cur - prev).abs() < 0.02, "jump at flux {}", i as f64 * 1e-4);
            prev = cur;
        }
    }

    #[test]
    fn omega_q_formula_and_degeneracy() {
        let d = DeviceParams::new(4.0, 4.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert!((d.omega_q().unwrap() - 128f64.sqrt()).abs() < 1e-12);
        let frustrated = DeviceParams::new(1.0, 1.0, 0.1, 1.0, 1.0, 1.0).unwrap();
        // cos(π) is not exactly −1 in floating point; force the degenerate case.
        let degenerate = DeviceParams { ej1: 1.0, ej2: 1.0, ..frustrated };
        let ej = degenerate.ej_total();
        assert!(ej < 1e-7);
        if ej == 0.0 {
            assert!(matches!(degenerate.omega_q(), Err(Error::FluxSweetSpotDegenerate { .. })));
        }
    }

    #[test]
    fn omega_q_decreasing_towards_half_flux() {
        let base = dev(0.9, 1.0, 0.01, 0.0);
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let w = base.with_flux(i as f64 * 0.01).omega_q().unwrap();
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn phi_zpf_examples() {
        let d = DeviceParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((d.phi_zpf().unwrap() - 1.0).abs() < 1e-15);
        let d = DeviceParams::new(16.0, 16.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((d.phi_zpf().unwrap() - 0.5).abs() < 1e-15);
        let z = d.phi_zpf().unwrap();
        let rel = (z * z * 2.0 * d.ej_total() - d.omega_q().unwrap()) / d.omega_q().unwrap();
        assert!(rel.abs() < 1e-12);
    }

    #[test]
    fn response_function_limits() {
        let d = dev(1.0, 1.0, 0.01, 0.0);
        let wq = d.omega_q().unwrap();
        assert_eq!(d.response_d0(0.0).unwrap(), -1.0);
        assert!((d.response_d0(wq * 2f64.sqrt()).unwrap() - 1.0).abs() < 1e-12);
        let far = d.response_d0(1e6 * wq).unwrap();
        assert!(far > 0.0 && far < 1e-11);
        assert!(matches!(d.response_d0(wq), Err(Error::OnResonance { .. })));
        assert!(d.response_d0(0.999 * wq).unwrap() < 0.0);
        assert!(d.response_d0(1.001 * wq).unwrap() > 0.0);
    }

    #[test]
    fn screening_limits() {
        let d = dev(1.0, 1.0, 0.01, 0.0);
        let wq = d.omega_q().unwrap();
        assert!((d.screening_factor(1e7 * wq).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(d.screening_factor(0.0).unwrap(), 0.0);
        for &w in &[0.3, 0.8, 1.7, 5.0] {
            let s = d.screening_factor(w * wq).unwrap();
            assert!((s - (1.0 + d.response_d0(w * wq).unwrap())).abs() < 1e-12 * s.abs().max(1.0));
        }
    }

    #[test]
    fn ac_stark_limits_and_identity() {
        let d = dev(1.0, 1.0, 0.01, 0.0);
        let wq = d.omega_q().unwrap();
        assert_eq!(d.ac_stark_from_a(1.3 * wq, 0.0).unwrap(), 0.0);
        let far = d.ac_stark_from_a(1e6 * wq, 0.2).unwrap();
        assert!((far / (-wq * 0.04 / 8.0) - 1.0).abs() < 1e-10);
        let drive = DriveSpec::direct(1.4 * wq, 0.3).unwrap();
        let at = d.renormalized_amplitude(&drive).unwrap();
        let w = d.ac_stark_from_a(drive.omega_d, 0.3).unwrap();
        assert!((w - (-wq * at * at / 8.0)).abs() < 1e-12 * w.abs());
        assert!(matches!(d.a_from_ac_stark(1.4 * wq, 1.0), Err(Error::NonNegativeStark(_))));
    }

    #[test]
    fn conductance() {
        let d = DeviceParams::new(PI / 8.0, PI / 8.0, 0.01, 1.0, 1.0, 0.0).unwrap();
        assert!((d.ab_conductance() - 1.0).abs() < 1e-15);
        let d2 = DeviceParams::new(PI / 4.0, PI / 4.0, 0.01, 1.0, 1.0, 0.0).unwrap();
        assert!((d2.ab_conductance() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_inverted_gaps() {
        assert!(DeviceParams::new(1.0, 1.0, 0.01, 1.2, 1.0, 0.0).is_err());
        assert!(DeviceParams::new(-1.0, 1.0, 0.01, 1.0, 1.2, 0.0).is_err());
    }

    #[test]
    fn transmon_advisory() {
        assert!(dev(0.1, 0.1, 0.05, 0.0).outside_transmon_regime());
        assert!(!dev(1.0, 1.0, 0.01, 0.0).outside_transmon_regime());
    }
}
