//! Figure configurations, golden files and structural checks shared by the
//! figure tests and the acceptance runner.

#![allow(dead_code)]

use std::path::PathBuf;

use qpdec_core::sweep::{run_sweep, DistributionConfig, RunConfig, SweepTable};
use qpdec_core::units::to_ghz;

pub const FIGURES: [&str; 4] = ["fig1b", "fig1c", "figS1a", "figS1b"];

/// Strip width in GHz; thresholds are sharp up to this energy.
pub const STRIP_GHZ: f64 = 5e-3;

/// k_B·5 mK/h in GHz: the thermal smearing of the threshold peaks.
pub const THERMAL_GHZ: f64 = 0.104;

/// δΔ/h of the figure device in GHz.
pub const DELTA_DIFF_GHZ: f64 = 10.0;

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn config(name: &str) -> RunConfig {
    RunConfig::from_path(&workspace().join("configs").join(format!("{name}.json"))).unwrap()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.csv"))
}

/// Compares a fresh sweep with its golden file; `QPDEC_BLESS` rewrites it.
pub fn check_golden(name: &str) -> Result<(), String> {
    let csv = run_sweep(&config(name)).map_err(|e| e.to_string())?.to_csv();
    let path = golden_path(name);
    if std::env::var_os("QPDEC_BLESS").is_some() {
        std::fs::write(&path, &csv).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if csv == golden {
        return Ok(());
    }
    let line = csv.lines().zip(golden.lines()).position(|(a, b)| a != b);
    Err(format!("{name}: output differs from golden file at data line {line:?}"))
}

pub fn cold(mut cfg: RunConfig) -> RunConfig {
    cfg.distribution = DistributionConfig::ColdStrip { width_ghz: STRIP_GHZ, x_qp: 1e-4 };
    cfg
}

fn omega_q_ghz(cfg: &RunConfig, flux: f64) -> f64 {
    to_ghz(cfg.device(flux).unwrap().omega_q().unwrap())
}

/// Exact zeros below `threshold(ω_q)` and at least one nonzero value above
/// it in every flux row.
pub fn cold_threshold(table: &SweepTable, cfg: &RunConfig, threshold: impl Fn(f64) -> f64) -> Result<(), String> {
    for (i, &flux) in table.grid.flux.iter().enumerate() {
        let th = threshold(omega_q_ghz(cfg, flux));
        let mut above = 0;
        for (j, &w) in table.grid.omega_d_ghz.iter().enumerate() {
            let c = &table.cell(i, j)[0];
            if w < th - STRIP_GHZ && c.status != "on_resonance" {
                if c.rate != 0.0 || !c.below_threshold {
                    return Err(format!("flux {flux}, omega_d {w}: {c:?}"));
                }
            } else if w > th + STRIP_GHZ && c.rate > 0.0 {
                above += 1;
            }
        }
        if above == 0 {
            return Err(format!("flux {flux}: no active cells above {th}"));
        }
    }
    Ok(())
}

/// Fig. 1(b) inset: at ω_d = δΔ/2 the normalized rate has a symmetric
/// minimum at Φ = 0.
pub fn zero_flux_dip(table: &SweepTable) -> Result<(), String> {
    let j = table.grid.omega_d_ghz.iter().position(|&w| w == 0.5 * DELTA_DIFF_GHZ).ok_or("no ω_d = 5 column")?;
    let i0 = table.grid.flux.iter().position(|&f| f == 0.0).ok_or("no Φ = 0 row")?;
    let v = |i: usize| table.cell(i, j)[0].normalized;
    if !(v(i0) > 0.0) {
        return Err(format!("rate at Φ = 0 is {}", v(i0)));
    }
    for k in 1..=8 {
        if !(v(i0 - k) > v(i0 - k + 1) && v(i0 + k) > v(i0 + k - 1)) {
            return Err(format!("not increasing away from Φ = 0 at step {k}"));
        }
        if (v(i0 - k) / v(i0 + k) - 1.0).abs() >= 1e-12 {
            return Err(format!("asymmetric at step {k}"));
        }
    }
    Ok(())
}

/// Along every flux row the maximum sits above (δΔ − ω_q)/2 − margin.
pub fn ridge_above_red_line(cfg: &RunConfig, margin: f64) -> Result<(), String> {
    let table = run_sweep(cfg).map_err(|e| e.to_string())?;
    for (i, &flux) in table.grid.flux.iter().enumerate() {
        let wq = omega_q_ghz(cfg, flux);
        let (j, _) = (0..table.grid.omega_d_ghz.len())
            .map(|j| (j, table.cell(i, j)[0].normalized))
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or("empty row")?;
        let w = table.grid.omega_d_ghz[j];
        if w <= 0.5 * (DELTA_DIFF_GHZ - wq) - margin {
            return Err(format!("flux {flux}: maximum at {w} GHz"));
        }
    }
    Ok(())
}

/// Fig. S1(b): below the thermally smeared threshold peak, the tail carries
/// a single local maximum within 0.1 GHz of ω_q(Φ). Returns the number of
/// flux rows where the tail straddles the resonance and the ridge shows.
pub fn extra_ridge_rows(cfg: &RunConfig) -> Result<usize, String> {
    let table = run_sweep(cfg).map_err(|e| e.to_string())?;
    let w = &table.grid.omega_d_ghz;
    let mut rows = 0;
    for (i, &flux) in table.grid.flux.iter().enumerate() {
        let wq = omega_q_ghz(cfg, flux);
        let v = |j: usize| table.cell(i, j)[0].normalized;
        let peaks: Vec<f64> = (1..w.len() - 1)
            .filter(|&j| w[j] < 0.5 * (DELTA_DIFF_GHZ + wq) - THERMAL_GHZ && v(j) > 0.0)
            .filter(|&j| {
                let (l, r) = (v(j - 1), v(j + 1));
                (l.is_nan() || v(j) > l) && v(j) > r
            })
            .map(|j| w[j])
            .collect();
        match peaks.as_slice() {
            [] => {}
            [p] if (p - wq).abs() < 0.1 => rows += 1,
            _ => return Err(format!("flux {flux}: peaks {peaks:?}, omega_q {wq}")),
        }
    }
    Ok(rows)
}
