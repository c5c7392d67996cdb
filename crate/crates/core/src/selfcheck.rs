//! Built-in consistency checks: c_norm calibration and comparisons of the
//! production routines against the independent references in [`oracle`].

use num_complex::Complex64;
use serde::Serialize;

use crate::device::{DeviceParams, DriveSpec, Junction};
use crate::diagrams::{closed_form_1ph, closed_form_2ph, enumerate_diagrams, evaluate_amplitude, EvalOptions};
use crate::error::Result;
use crate::oracle;
use crate::pair_breaking::{
    gamma_cp_general, gamma_cp_main, half_phase_matrix_elements, CpOptions, Direction, MatrixElementMode,
};
use crate::rates::{one_photon_coefficients, two_photon_coefficients};
use crate::special::bessel_j;
use crate::spectral::{calibrate_c_norm, s_pm, s_tilde_pm, QPDistribution, Sign, C_NORM};
use crate::units::{ghz, millikelvin};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn run(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match body() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(a.norm()).max(f64::MIN_POSITIVE)
}

fn figure_device(flux: f64) -> Result<DeviceParams> {
    DeviceParams::from_qubit_frequency(ghz(6.0), 0.9, ghz(0.2), ghz(45.0), ghz(55.0), flux)
}

pub fn check_c_norm() -> Check {
    run("c_norm_calibration", || {
        let c = calibrate_c_norm(ghz(50.0))?;
        let r = rel(c, C_NORM);
        Ok((r < 1e-4, format!("calibrated {c:.8}, built-in {C_NORM}, rel {r:.2e}")))
    })
}

pub fn check_bessel() -> Check {
    run("bessel_series_vs_integral", || {
        let mut worst = 0.0f64;
        for n in 0..6 {
            for &x in &[0.01, 0.3, 1.0, 2.5] {
                worst = worst.max((bessel_j(n, x) - oracle::bessel_j_integral(n, x)).abs());
            }
        }
        Ok((worst < 1e-13, format!("max abs diff {worst:.2e}")))
    })
}

pub fn check_s_pm() -> Check {
    run("s_pm_vs_riemann", || {
        let dev = figure_device(0.0)?;
        let warm = QPDistribution::thermal(dev.delta_l, millikelvin(100.0), 1e-6)?;
        let mut worst = 0.0f64;
        for w in [ghz(-3.0), ghz(16.0)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let got = s_pm(&dev, &warm, sign, w)?.value;
                let want = oracle::s_pm_riemann(&dev, &|e| warm.weight(e), sign, w, warm.support_end(), 400_000);
                worst = worst.max(rel(got, want));
            }
        }
        Ok((worst < 1e-5, format!("max rel diff {worst:.2e}")))
    })
}

pub fn check_s_tilde() -> Check {
    run("s_tilde_vs_midpoint", || {
        let dev = figure_device(0.0)?;
        let w = 2.5 * dev.delta_mean();
        let mut worst = 0.0f64;
        for sign in [Sign::Plus, Sign::Minus] {
            let got = s_tilde_pm(&dev, sign, w)?.value;
            worst = worst.max(rel(got, oracle::s_tilde_midpoint(&dev, sign, w, 200_000)));
        }
        Ok((worst < 1e-5, format!("max rel diff {worst:.2e}")))
    })
}

pub fn check_matrix_elements() -> Check {
    run("half_phase_elements_vs_grid", || {
        let dev = figure_device(0.17)?;
        let n_max = 6;
        let mut worst = 0.0f64;
        let mut completeness = 0.0f64;
        for j in Junction::BOTH {
            let m = half_phase_matrix_elements(&dev, j, n_max, MatrixElementMode::Exact)?;
            let (c, s) = oracle::half_phase_grid(dev.ej_total() / dev.ec, m.offset, n_max, 15);
            for f in 0..=n_max {
                for i in 0..=n_max {
                    worst = worst.max((m.cos[f][i] - c[f][i]).abs()).max((m.sin[f][i] - s[f][i]).abs());
                }
            }
            for i in 0..=2 {
                completeness = completeness.max((m.completeness(i) - 1.0).abs());
            }
        }
        Ok((
            worst < 1e-8 && completeness < 1e-8,
            format!("max abs diff {worst:.2e}, completeness defect {completeness:.2e}"),
        ))
    })
}

pub fn check_diagrams() -> Check {
    run("diagram_engine_vs_closed_forms", || {
        let dev = figure_device(0.2)?;
        let drive = DriveSpec::direct(ghz(7.3), 0.1)?;
        let one = evaluate_amplitude(
            &enumerate_diagrams(1, Direction::Relax, 6, true)?,
            &dev,
            &drive,
            EvalOptions::leading_order(),
        )?;
        let want1 = closed_form_1ph(&dev, &drive)?;
        let two = evaluate_amplitude(
            &enumerate_diagrams(2, Direction::Relax, 6, true)?,
            &dev,
            &drive,
            EvalOptions::leading_order(),
        )?;
        let want2 = closed_form_2ph(&dev, &drive)?;
        // The engine's n = 2 amplitude carries the opposite global phase.
        let worst = crel(one.uu, want1.uu)
            .max(crel(one.vv, want1.vv))
            .max(crel(two.uu, -want2.uu))
            .max(crel(two.vv, -want2.vv));
        Ok((worst < 1e-12, format!("max rel diff {worst:.2e}")))
    })
}

pub fn check_cp_formulas() -> Check {
    run("cp_general_vs_main", || {
        let dev = figure_device(0.0)?;
        let wq = dev.omega_q()?;
        let mut worst = 0.0f64;
        for n in 1..=4u32 {
            let wd = (2.0 * dev.delta_mean() - wq) / n as f64 * 1.05;
            let drive = DriveSpec::ac_stark(wd, -7e-3 * wq)?;
            let main = gamma_cp_main(&dev, &drive, n, Direction::Relax)?.value;
            let general = gamma_cp_general(&dev, &drive, n, 1, 0, CpOptions::default())?.value;
            worst = worst.max(rel(general, main));
        }
        Ok((worst < 1e-10, format!("max rel diff {worst:.2e}")))
    })
}

pub fn check_flux_zeros() -> Check {
    run("zero_flux_coefficients", || {
        let dev = figure_device(0.0)?;
        let (c1, _) = one_photon_coefficients(&dev)?;
        let (_, c2) = two_photon_coefficients(&dev)?;
        Ok((c1 == 0.0 && c2 == 0.0, format!("one-photon S+ {c1:e}, two-photon S- {c2:e}")))
    })
}

/// Every check, in a fixed order.
pub fn run_all() -> Vec<Check> {
    vec![
        check_c_norm(),
        check_bessel(),
        check_s_pm(),
        check_s_tilde(),
        check_matrix_elements(),
        check_diagrams(),
        check_cp_formulas(),
        check_flux_zeros(),
    ]
}
