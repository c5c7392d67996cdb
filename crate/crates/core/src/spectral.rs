//! Quasiparticle distributions and the structure factors S±[ω] (tunneling)
//! and S̃±[ω] (pair breaking).
//!
//! Energies are measured in rad/s. The distribution lives on the low-gap lead
//! and is stored through an unnormalized shape g(ε); the occupation is
//! n_L(ε) = x_QP·g(ε)/(c_norm·N[g]) with
//! N[g] = (1/Δ_L)∫ ε/sqrt(ε²−Δ_L²) g(ε) dε.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions, QuadResult};
use crate::units;

/// Calibrated normalization constant c_norm; see [`calibrate_c_norm`].
pub const C_NORM: f64 = 2.0;

/// ln(1e18): the thermal tail is dropped beyond this many temperatures.
const THERMAL_TAIL: f64 = 41.446_531_673_892_82;

/// Channel label of a structure factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// p(n): `Plus` for even n, `Minus` for odd n.
    pub fn parity(n: u32) -> Sign {
        if n % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DistributionKind {
    /// g(ε) = exp(−(ε−Δ_L)/T), T in rad/s.
    Thermal { temperature: f64 },
    /// g(ε) = 1 on [Δ_L, Δ_L + width].
    ColdStrip { width: f64 },
    /// Piecewise-linear g on absolute energies (rad/s), zero outside.
    Tabulated { energies: Vec<f64>, occupation: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QPDistribution {
    kind: DistributionKind,
    x_qp: f64,
    delta_l: f64,
    c_norm: f64,
    /// N[g], cached at construction.
    shape_norm: f64,
}

impl QPDistribution {
    pub fn thermal(delta_l: f64, temperature: f64, x_qp: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidParams(format!("temperature must be positive, got {temperature}")));
        }
        Self::build(DistributionKind::Thermal { temperature }, delta_l, x_qp, C_NORM)
    }

    pub fn cold_strip(delta_l: f64, width: f64, x_qp: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParams(format!("strip width must be positive, got {width}")));
        }
        Self::build(DistributionKind::ColdStrip { width }, delta_l, x_qp, C_NORM)
    }

    pub fn tabulated(delta_l: f64, energies: Vec<f64>, occupation: Vec<f64>, x_qp: f64) -> Result<Self> {
        if energies.len() != occupation.len() || energies.len() < 2 {
            return Err(Error::InvalidParams(
                "tabulated distribution needs at least two (energy, occupation) rows".into(),
            ));
        }
        if energies[0] < delta_l {
            return Err(Error::InvalidParams("tabulated energies must start at or above the gap".into()));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("tabulated energies must be strictly increasing".into()));
        }
        if occupation.iter().any(|&n| !(n.is_finite() && n >= 0.0)) {
            return Err(Error::InvalidParams("occupation values must be finite and non-negative".into()));
        }
        Self::build(DistributionKind::Tabulated { energies, occupation }, delta_l, x_qp, C_NORM)
    }

    /// Parse a two-column table: energy above Δ_L in GHz, occupation.
    /// Lines starting with '#' and blank lines are skipped.
    pub fn tabulated_from_text(text: &str, delta_l: f64, x_qp: f64) -> Result<Self> {
        let mut energies = Vec::new();
        let mut occupation = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Config(format!("line {}: cannot parse '{s}'", lineno + 1)))
            };
            if cols.len() != 2 {
                return Err(Error::Config(format!("line {}: expected two columns", lineno + 1)));
            }
            energies.push(delta_l + units::ghz(parse(cols[0])?));
            occupation.push(parse(cols[1])?);
        }
        Self::tabulated(delta_l, energies, occupation, x_qp)
    }

    fn build(kind: DistributionKind, delta_l: f64, x_qp: f64, c_norm: f64) -> Result<Self> {
        if !(delta_l.is_finite() && delta_l > 0.0) {
            return Err(Error::InvalidParams("distribution gap must be positive".into()));
        }
        if !(x_qp.is_finite() && x_qp >= 0.0) {
            return Err(Error::InvalidParams(format!("x_qp must be non-negative, got {x_qp}")));
        }
        if !(c_norm.is_finite() && c_norm > 0.0) {
            return Err(Error::InvalidParams("c_norm must be positive".into()));
        }
        let mut dist = QPDistribution { kind, x_qp, delta_l, c_norm, shape_norm: 1.0 };
        dist.shape_norm = dist.compute_shape_norm()?;
        if !(dist.shape_norm > 0.0) {
            return Err(Error::InvalidParams("distribution has zero weight".into()));
        }
        Ok(dist)
    }

    pub fn with_c_norm(self, c_norm: f64) -> Result<Self> {
        Self::build(self.kind, self.delta_l, self.x_qp, c_norm)
    }

    /// Same shape with a different density; S± are unchanged.
    pub fn with_x_qp(mut self, x_qp: f64) -> Result<Self> {
        if !(x_qp.is_finite() && x_qp >= 0.0) {
            return Err(Error::InvalidParams(format!("x_qp must be non-negative, got {x_qp}")));
        }
        self.x_qp = x_qp;
        Ok(self)
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn x_qp(&self) -> f64 {
        self.x_qp
    }

    pub fn delta_l(&self) -> f64 {
        self.delta_l
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    /// Unnormalized shape g(ε).
    pub fn shape(&self, eps: f64) -> f64 {
        let d = eps - self.delta_l;
        if d < 0.0 {
            return 0.0;
        }
        match &self.kind {
            DistributionKind::Thermal { temperature } => (-d / temperature).exp(),
            DistributionKind::ColdStrip { width } => {
                if d <= *width {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionKind::Tabulated { energies, occupation } => {
                let last = energies.len() - 1;
                if eps < energies[0] || eps > energies[last] {
                    return 0.0;
                }
                let k = energies.partition_point(|&e| e <= eps).clamp(1, last);
                let (e0, e1) = (energies[k - 1], energies[k]);
                let t = (eps - e0) / (e1 - e0);
                occupation[k - 1] + t * (occupation[k] - occupation[k - 1])
            }
        }
    }

    /// n_L(ε)/x_QP.
    pub fn weight(&self, eps: f64) -> f64 {
        self.shape(eps) / (self.c_norm * self.shape_norm)
    }

    /// n_L(ε).
    pub fn occupation(&self, eps: f64) -> f64 {
        self.x_qp * self.weight(eps)
    }

    /// Upper end of the support (rad/s); beyond it g is zero or below 1e-18.
    pub fn support_end(&self) -> f64 {
        match &self.kind {
            DistributionKind::Thermal { temperature } => self.delta_l + THERMAL_TAIL * temperature,
            DistributionKind::ColdStrip { width } => self.delta_l + width,
            DistributionKind::Tabulated { energies, .. } => *energies.last().unwrap(),
        }
    }

    /// Energies where g has kinks.
    fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            DistributionKind::Tabulated { energies, .. } => energies.clone(),
            _ => Vec::new(),
        }
    }

    fn compute_shape_norm(&self) -> Result<f64> {
        // ε = Δ_L + s²: the 1/sqrt(ε−Δ_L) edge becomes regular.
        let dl = self.delta_l;
        let s_max = (self.support_end() - dl).sqrt();
        let bps: Vec<f64> = self.kinks().iter().map(|&e| (e - dl).max(0.0).sqrt()).collect();
        let f = |s: f64| {
            let eps = dl + s * s;
            2.0 * eps * self.shape(eps) / ((eps + dl).sqrt() * dl)
        };
        Ok(integrate(f, 0.0, s_max, &bps, &QuadOptions::default())?.value)
    }
}

/// What the rate formulas use for S±: numerical quadrature over a
/// distribution, or the cold-strip closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum QpSpectrum {
    Numeric(QPDistribution),
    ColdAsymptotic { x_qp: f64 },
}

impl QpSpectrum {
    pub fn x_qp(&self) -> f64 {
        match self {
            QpSpectrum::Numeric(d) => d.x_qp(),
            QpSpectrum::ColdAsymptotic { x_qp } => *x_qp,
        }
    }

    pub fn is_cold(&self) -> bool {
        match self {
            QpSpectrum::Numeric(d) => matches!(d.kind(), DistributionKind::ColdStrip { .. }),
            QpSpectrum::ColdAsymptotic { .. } => true,
        }
    }

    pub fn s_pm(&self, dev: &DeviceParams, sign: Sign, omega: f64) -> Result<StructureFactorResult> {
        match self {
            QpSpectrum::Numeric(d) => s_pm(dev, d, sign, omega),
            QpSpectrum::ColdAsymptotic { .. } => {
                let value = s_pm_cold_asymptotic(dev, sign, omega);
                Ok(StructureFactorResult {
                    value,
                    sign,
                    omega,
                    below_threshold: omega <= dev.delta_diff(),
                    est_abs_error: 0.0,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureFactorResult {
    pub value: f64,
    pub sign: Sign,
    pub omega: f64,
    pub below_threshold: bool,
    pub est_abs_error: f64,
}

impl StructureFactorResult {
    fn zero(sign: Sign, omega: f64) -> Self {
        StructureFactorResult { value: 0.0, sign, omega, below_threshold: true, est_abs_error: 0.0 }
    }
}

fn spectral_quad_options() -> QuadOptions {
    QuadOptions { abs_tol: f64::MIN_POSITIVE, rel_tol: 1e-11, max_intervals: 4000 }
}

fn checked(res: QuadResult) -> Result<QuadResult> {
    if res.abs_error > 1e-8 * res.value.abs().max(1.0) {
        return Err(Error::QuadratureNonConvergent {
            estimate: res.value,
            abs_error: res.abs_error,
            evaluations: res.evaluations,
        });
    }
    Ok(res)
}

/// Coherence numerator (Δ_L+p)(Δ_R+q) ± Δ_LΔ_R with the cancelling part
/// expanded.
fn coherence(sign: Sign, dl: f64, dr: f64, p: f64, q: f64) -> f64 {
    let core = dl * q + dr * p + p * q;
    match sign {
        Sign::Plus => 2.0 * dl * dr + core,
        Sign::Minus => core,
    }
}

/// S±[ω] of a distribution on the low-gap lead.
pub fn s_pm(dev: &DeviceParams, dist: &QPDistribution, sign: Sign, omega: f64) -> Result<StructureFactorResult> {
    let (dl, dr) = (dev.delta_l, dev.delta_r);
    let dbar = dev.delta_mean();
    let gap_offset = omega - dev.delta_diff();
    let eps_end = dist.support_end();
    // Case A: ε starts at Δ_L and q = x + p. Case B: ε starts at Δ_R − ω and p = y + q.
    let (eps_min, offset) = if gap_offset >= 0.0 { (dl, gap_offset) } else { (dr - omega, -gap_offset) };
    if eps_min >= eps_end {
        return Ok(StructureFactorResult::zero(sign, omega));
    }
    let upper = ((eps_end - eps_min) / dbar).sqrt();
    let case_a = gap_offset >= 0.0;
    let f = |u: f64| {
        let t = u * u * dbar;
        let eps = eps_min + t;
        let (p, q) = if case_a { (t, offset + t) } else { (offset + t, t) };
        let num = coherence(sign, dl, dr, p, q);
        // sqrt of the singular factor has been cancelled against dε = 2uΔ̄ du.
        let den = if case_a {
            (p + 2.0 * dl).sqrt() * (q * (q + 2.0 * dr)).sqrt()
        } else {
            (p * (p + 2.0 * dl)).sqrt() * (q + 2.0 * dr).sqrt()
        };
        2.0 * num * dist.weight(eps) / (dbar.sqrt() * den)
    };
    let mut bps = vec![(offset / dbar).sqrt()];
    bps.extend(dist.kinks().iter().filter(|&&e| e > eps_min).map(|&e| ((e - eps_min) / dbar).sqrt()));
    let res = checked(integrate(f, 0.0, upper, &bps, &spectral_quad_options())?)?;
    Ok(StructureFactorResult { value: res.value, sign, omega, below_threshold: false, est_abs_error: res.abs_error })
}

/// Cold-strip limit S±[ω] = (1/2)(2Δ̄/(ω−δΔ))^{±1/2}Θ(ω−δΔ).
pub fn s_pm_cold_asymptotic(dev: &DeviceParams, sign: Sign, omega: f64) -> f64 {
    let x = omega - dev.delta_diff();
    if x <= 0.0 {
        return 0.0;
    }
    let r = (2.0 * dev.delta_mean() / x).sqrt();
    match sign {
        Sign::Plus => 0.5 * r,
        Sign::Minus => 0.5 / r,
    }
}

/// Pair-breaking structure factor S̃±[ω].
pub fn s_tilde_pm(dev: &DeviceParams, sign: Sign, omega: f64) -> Result<StructureFactorResult> {
    let (dl, dr) = (dev.delta_l, dev.delta_r);
    let w = omega - dl - dr;
    if !(w > 0.0) {
        return Ok(StructureFactorResult::zero(sign, omega));
    }
    let dbar = dev.delta_mean();
    // ε = Δ_L + W sin²(θ/2): both inverse-square-root endpoints cancel.
    let f = |theta: f64| {
        let (s, c) = (0.5 * theta).sin_cos();
        let (p, q) = (w * s * s, w * c * c);
        coherence(sign, dl, dr, p, q) / ((p + 2.0 * dl).sqrt() * (q + 2.0 * dr).sqrt())
    };
    let res = checked(integrate(f, 0.0, PI, &[], &spectral_quad_options())?)?;
    Ok(StructureFactorResult {
        value: res.value / dbar,
        sign,
        omega,
        below_threshold: false,
        est_abs_error: res.abs_error / dbar,
    })
}

/// Threshold asymptotes S̃₊ ≈ π + (π/4)δω/Δ̄, S̃₋ ≈ (π/2)δω/Δ̄ with δω = ω − 2Δ̄.
pub fn s_tilde_asymptotic(dev: &DeviceParams, sign: Sign, omega: f64) -> f64 {
    let dbar = dev.delta_mean();
    let dw = omega - 2.0 * dbar;
    if dw <= 0.0 {
        return 0.0;
    }
    match sign {
        Sign::Plus => PI + 0.25 * PI * dw / dbar,
        Sign::Minus => 0.5 * PI * dw / dbar,
    }
}

/// Recompute c_norm from scratch: the value for which the cold-strip
/// quadrature reproduces S₊·S₋ = 1/4 on equal gaps.
pub fn calibrate_c_norm(delta: f64) -> Result<f64> {
    let dev = DeviceParams::new(1.0, 1.0, 0.01, delta, delta, 0.0)?;
    // The strip width enters S₊·S₋ at relative order width/(3ω).
    let dist = QPDistribution::cold_strip(delta, 1e-7 * delta, 1.0)?.with_c_norm(1.0)?;
    let omega = 1e-2 * delta;
    let sp = s_pm(&dev, &dist, Sign::Plus, omega)?.value;
    let sm = s_pm(&dev, &dist, Sign::Minus, omega)?.value;
    Ok((4.0 * sp * sm).sqrt())
}
