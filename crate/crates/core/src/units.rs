//! Unit conversions. Internally ħ = 1 and every energy is an angular
//! frequency in rad/s.

use std::f64::consts::PI;

/// Boltzmann constant over reduced Planck constant, rad/(s·K).
pub const KB_OVER_HBAR: f64 = 1.380649e-23 / 1.054571817e-34;

/// rad/s per GHz of ordinary frequency.
pub const GHZ: f64 = 2.0 * PI * 1e9;

pub fn ghz(f: f64) -> f64 {
    f * GHZ
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / GHZ
}

/// Temperature in millikelvin to its angular-frequency equivalent k_B T/ħ.
pub fn millikelvin(t_mk: f64) -> f64 {
    t_mk * 1e-3 * KB_OVER_HBAR
}

pub fn nanoseconds(t_ns: f64) -> f64 {
    t_ns * 1e-9
}
