//! Quasiparticle tunneling and Cooper-pair-breaking rates of a driven,
//! flux-tunable transmon.
//!
//! Internally ħ = 1 and every energy is an angular frequency in rad/s; the
//! helpers in [`units`] convert from GHz, mK and ns.

pub mod device;
pub mod diagrams;
pub mod error;
pub mod fidelity;
pub mod oracle;
pub mod pair_breaking;
pub mod quad;
pub mod rates;
pub mod selfcheck;
pub mod special;
pub mod spectral;
pub mod sweep;
pub mod units;

pub use device::{Amplitude, DeviceParams, DriveSpec, Junction};
pub use diagrams::{ChannelAmplitude, Diagram, DiagramSet, EvalOptions};
pub use error::{Error, ErrorKind, Result};
pub use fidelity::FidelityBound;
pub use pair_breaking::{CpAmplitude, CpOptions, Direction, MatrixElementMode};
pub use rates::{Process, RateResult, Threshold};
pub use spectral::{QPDistribution, QpSpectrum, Sign, StructureFactorResult};
pub use sweep::{RunConfig, SweepGrid, SweepTable};
