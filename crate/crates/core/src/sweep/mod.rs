//! Grid sweeps over (flux, drive frequency) with CSV output.
//!
//! Rows are flux-major. Each selected process contributes five columns:
//! rate in 1/s, normalized rate, below-threshold flag, photon number and a
//! status tag. A cell that fails numerically gets NaN values and the error
//! tag in its status column; the rest of the sweep is unaffected.

pub mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::device::{DeviceParams, DriveSpec};
use crate::error::{Error, Result};
use crate::pair_breaking::{
    gamma_cp_general, gamma_cp_main, min_photon_number, CpAmplitude, CpOptions, Direction, MatrixElementMode,
};
use crate::rates::{tunneling_rate, Process, RateResult};
use crate::spectral::QpSpectrum;
use crate::units::ghz;

pub use config::{Axis, DistributionConfig, RunConfig};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub flux: Vec<f64>,
    /// Drive frequencies in GHz.
    pub omega_d_ghz: Vec<f64>,
    pub processes: Vec<Process>,
}

impl SweepGrid {
    pub fn from_config(cfg: &RunConfig) -> SweepGrid {
        SweepGrid {
            flux: cfg.sweep.flux.points(),
            omega_d_ghz: cfg.sweep.omega_d_ghz.points(),
            processes: cfg.sweep.processes.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.flux.len() * self.omega_d_ghz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellValue {
    pub rate: f64,
    pub normalized: f64,
    pub below_threshold: bool,
    pub photons: u32,
    pub status: &'static str,
}

impl CellValue {
    fn from_result(r: Result<RateResult>) -> CellValue {
        match r {
            Ok(r) => CellValue {
                rate: r.value,
                normalized: r.normalized_value,
                below_threshold: r.below_threshold,
                photons: r.photon_count,
                status: "ok",
            },
            Err(e) => {
                CellValue { rate: f64::NAN, normalized: f64::NAN, below_threshold: false, photons: 0, status: e.tag() }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub grid: SweepGrid,
    /// Flux-major: index = i_flux · n_omega + i_omega; one entry per process.
    pub cells: Vec<Vec<CellValue>>,
}

impl SweepTable {
    pub fn cell(&self, i_flux: usize, i_omega: usize) -> &[CellValue] {
        &self.cells[i_flux * self.grid.omega_d_ghz.len() + i_omega]
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut cols = vec!["flux".to_string(), "omega_d_ghz".to_string()];
        for p in &self.grid.processes {
            for suffix in ["rate", "normalized", "below_threshold", "photons", "status"] {
                cols.push(format!("{p}_{suffix}"));
            }
        }
        cols
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.column_names().join(",");
        out.push('\n');
        for (i, &flux) in self.grid.flux.iter().enumerate() {
            for (j, &w) in self.grid.omega_d_ghz.iter().enumerate() {
                write!(out, "{},{}", fmt_num(flux), fmt_num(w)).unwrap();
                for c in self.cell(i, j) {
                    write!(
                        out,
                        ",{},{},{},{},{}",
                        fmt_num(c.rate),
                        fmt_num(c.normalized),
                        u8::from(c.below_threshold),
                        c.photons,
                        c.status
                    )
                    .unwrap();
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// One process at one grid point.
pub fn evaluate_process(
    cfg: &RunConfig,
    spec: &QpSpectrum,
    dev: &DeviceParams,
    drive: &DriveSpec,
    process: Process,
) -> Result<RateResult> {
    let direction = match process {
        Process::CpRelax => Direction::Relax,
        Process::CpExcite => Direction::Excite,
        _ => return tunneling_rate(process, dev, drive, spec),
    };
    let wq = dev.omega_q()?;
    let n = match cfg.sweep.cp_photons {
        Some(n) => n,
        None => {
            let omega_fi = if direction == Direction::Relax { -wq } else { wq };
            min_photon_number(dev, drive.omega_d, omega_fi)?
        }
    };
    let num = &cfg.numerics;
    if num.cp_amplitude == CpAmplitude::Renormalized && num.cp_elements == MatrixElementMode::LeadingOrder {
        gamma_cp_main(dev, drive, n, direction)
    } else {
        let (i, f) = if direction == Direction::Relax { (1, 0) } else { (0, 1) };
        let opts = CpOptions { amplitude: num.cp_amplitude, elements: num.cp_elements };
        gamma_cp_general(dev, drive, n, i, f, opts)
    }
}

fn evaluate_cell(cfg: &RunConfig, spec: &QpSpectrum, flux: f64, omega_d_ghz: f64) -> Vec<CellValue> {
    let setup = cfg.device(flux).and_then(|dev| {
        let drive = cfg.drive(&dev, ghz(omega_d_ghz))?;
        Ok((dev, drive))
    });
    cfg.sweep
        .processes
        .iter()
        .map(|&p| {
            let r = match &setup {
                Ok((dev, drive)) => evaluate_process(cfg, spec, dev, drive, p),
                Err(e) => Err(e.clone()),
            };
            CellValue::from_result(r)
        })
        .collect()
}

/// Evaluate the whole grid on the current rayon pool.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let spec = cfg.spectrum()?;
    let grid = SweepGrid::from_config(cfg);
    let n_omega = grid.omega_d_ghz.len();
    let cells = (0..grid.len())
        .into_par_iter()
        .map(|k| evaluate_cell(cfg, &spec, grid.flux[k / n_omega], grid.omega_d_ghz[k % n_omega]))
        .collect();
    Ok(SweepTable { grid, cells })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_sweep_with_threads(cfg: &RunConfig, threads: usize) -> Result<SweepTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    code_version: &'a str,
    rows: usize,
    columns: Vec<String>,
    config: &'a RunConfig,
}

pub fn metadata_json(cfg: &RunConfig, table: &SweepTable) -> String {
    let meta =
        Metadata { code_version: CODE_VERSION, rows: table.grid.len(), columns: table.column_names(), config: cfg };
    let mut s = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    s.push('\n');
    s
}

pub fn metadata_path(csv: &Path) -> std::path::PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}

/// Write the CSV and its `.meta.json` sidecar.
pub fn write_outputs(cfg: &RunConfig, table: &SweepTable, csv: &Path) -> Result<()> {
    let mut f = std::fs::File::create(csv)?;
    f.write_all(table.to_csv().as_bytes())?;
    std::fs::write(metadata_path(csv), metadata_json(cfg, table))?;
    Ok(())
}
