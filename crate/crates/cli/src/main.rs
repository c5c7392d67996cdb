use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qpdec_core::diagrams::{enumerate_diagrams, evaluate_each, EvalOptions, MAX_VERTICES};
use qpdec_core::fidelity::{fidelity_gate_bound, fidelity_highfreq_readout, fidelity_readout_bound};
use qpdec_core::pair_breaking::cp_thresholds;
use qpdec_core::rates::thresholds;
use qpdec_core::sweep::{self, fmt_num, RunConfig};
use qpdec_core::units::{ghz, nanoseconds, to_ghz};
use qpdec_core::{selfcheck, Direction, Error, ErrorKind, FidelityBound};

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).expect("writing to a String")
    };
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_SELFCHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "qpdec", version, about = "Quasiparticle decoherence rates of a driven transmon")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every configured process at one (flux, drive frequency) point.
    Rate(PointArgs),
    /// Run the configured grid and write CSV plus a metadata sidecar.
    Sweep(SweepArgs),
    /// Tabulate cold-quasiparticle threshold frequencies.
    Thresholds(ThresholdArgs),
    /// Enumerate amplitude diagrams for an n-photon transition.
    Diagram(DiagramArgs),
    /// Readout, gate and high-frequency fidelity bounds.
    Fidelity(FidelityArgs),
    /// Calibrate c_norm and compare against the reference oracles.
    Selfcheck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    config: PathBuf,
    /// Flux in units of Φ₀; defaults to the first point of the flux axis.
    #[arg(long, allow_hyphen_values = true)]
    flux: Option<f64>,
    /// Drive frequency in GHz; defaults to the first point of the drive axis.
    #[arg(long = "omega-d")]
    omega_d: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; falls back to output.path, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "QPDEC_NUM_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated flux values; defaults to the flux axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    flux: Vec<f64>,
    /// Highest pair-breaking photon number listed.
    #[arg(long, default_value_t = 4)]
    cp_max: u32,
}

#[derive(Args)]
struct DiagramArgs {
    #[arg(long)]
    photons: u32,
    #[arg(long, value_enum, default_value = "relax")]
    transition: Transition,
    #[arg(long, default_value_t = MAX_VERTICES)]
    max_vertices: usize,
    /// List screening insertions explicitly instead of resumming them.
    #[arg(long)]
    explicit: bool,
    /// Evaluate each diagram for this configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    flux: Option<f64>,
    #[arg(long = "omega-d")]
    omega_d: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transition {
    Relax,
    Excite,
}

#[derive(Args)]
struct FidelityArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long = "t-ro-ns", default_value_t = 1000.0)]
    t_ro_ns: f64,
    #[arg(long = "t-gate-ns", default_value_t = 20.0)]
    t_gate_ns: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match cli.command {
        Command::Rate(a) => cmd_rate(&a, &mut out),
        Command::Sweep(a) => cmd_sweep(&a, &mut out),
        Command::Thresholds(a) => cmd_thresholds(&a, &mut out),
        Command::Diagram(a) => cmd_diagram(&a, &mut out),
        Command::Fidelity(a) => cmd_fidelity(&a, &mut out),
        Command::Selfcheck => {
            let code = cmd_selfcheck(&mut out);
            flush(&out);
            return code;
        }
    };
    flush(&out);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpdec: {e}");
            match e.kind() {
                ErrorKind::Config => ExitCode::from(EXIT_CONFIG),
                ErrorKind::Numeric => ExitCode::from(EXIT_NUMERIC),
            }
        }
    }
}

/// Write buffered output; a closed pipe downstream is not an error.
fn flush(out: &str) {
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    RunConfig::from_path(path)
}

/// Flux and drive frequency (rad/s) of a single-point command.
fn point(cfg: &RunConfig, flux: Option<f64>, omega_d: Option<f64>) -> (f64, f64) {
    let flux = flux.unwrap_or_else(|| cfg.sweep.flux.points()[0]);
    let w = omega_d.unwrap_or_else(|| cfg.sweep.omega_d_ghz.points()[0]);
    (flux, ghz(w))
}

fn cmd_rate(args: &PointArgs, out: &mut String) -> Result<(), Error> {
    let cfg = load(&args.config)?;
    let (flux, omega_d) = point(&cfg, args.flux, args.omega_d);
    let dev = cfg.device(flux)?;
    let drive = cfg.drive(&dev, omega_d)?;
    let spec = cfg.spectrum()?;
    let mut results = Vec::new();
    for &p in &cfg.sweep.processes {
        results.push(sweep::evaluate_process(&cfg, &spec, &dev, &drive, p)?);
    }
    match args.format {
        Format::Json => outln!(out, "{}", serde_json::to_string_pretty(&results).expect("serializable")),
        Format::Csv => {
            outln!(out, "process,rate,normalized,below_threshold,photons");
            for r in &results {
                outln!(
                    out,
                    "{},{},{},{},{}",
                    r.process,
                    fmt_num(r.value),
                    fmt_num(r.normalized_value),
                    u8::from(r.below_threshold),
                    r.photon_count
                );
            }
        }
        Format::Text => {
            outln!(out, "flux {flux}, omega_d {:.6} GHz, omega_q {:.6} GHz", to_ghz(omega_d), to_ghz(dev.omega_q()?));
            outln!(out, "{:<16} {:>20} {:>20} {:>7} {:>5}", "process", "rate [1/s]", "normalized", "photons", "below");
            for r in &results {
                outln!(
                    out,
                    "{:<16} {:>20} {:>20} {:>7} {:>5}",
                    r.process.name(),
                    fmt_num(r.value),
                    fmt_num(r.normalized_value),
                    r.photon_count,
                    if r.below_threshold { "yes" } else { "no" }
                );
                for w in &r.warnings {
                    outln!(out, "  warning: {w}");
                }
            }
        }
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut String) -> Result<(), Error> {
    if args.format != Format::Csv {
        return Err(Error::Config("sweep output supports --format csv only".into()));
    }
    let cfg = load(&args.config)?;
    let table = sweep::run_sweep_with_threads(&cfg, args.threads)?;
    let dest = args.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    match dest {
        Some(path) => {
            sweep::write_outputs(&cfg, &table, &path)?;
            let failed = table.cells.iter().flatten().filter(|c| c.status != "ok").count();
            eprintln!("wrote {} rows to {}", table.grid.len(), path.display());
            if failed > 0 {
                eprintln!("{failed} cell values failed; see the status columns");
            }
        }
        None => out.push_str(&table.to_csv()),
    }
    Ok(())
}

fn cmd_thresholds(args: &ThresholdArgs, out: &mut String) -> Result<(), Error> {
    let cfg = load(&args.config)?;
    let fluxes = if args.flux.is_empty() { cfg.sweep.flux.points() } else { args.flux.clone() };
    outln!(out, "flux,omega_q_ghz,process,photons,omega_th_ghz");
    for flux in fluxes {
        let dev = cfg.device(flux)?;
        let wq = to_ghz(dev.omega_q()?);
        for t in thresholds(&dev)? {
            outln!(
                out,
                "{},{},{},{},{}",
                fmt_num(flux),
                fmt_num(wq),
                t.process,
                t.photon_count,
                fmt_num(to_ghz(t.omega_th))
            );
        }
        for (dir, n, w) in cp_thresholds(&dev, args.cp_max)? {
            outln!(out, "{},{},{},{},{}", fmt_num(flux), fmt_num(wq), dir.process(), n, fmt_num(to_ghz(w)));
        }
    }
    Ok(())
}

fn cmd_diagram(args: &DiagramArgs, out: &mut String) -> Result<(), Error> {
    let transition = match args.transition {
        Transition::Relax => Direction::Relax,
        Transition::Excite => Direction::Excite,
    };
    let set = enumerate_diagrams(args.photons, transition, args.max_vertices, !args.explicit)?;
    let values = match &args.config {
        Some(path) => {
            let cfg = load(path)?;
            let (flux, omega_d) = point(&cfg, args.flux, args.omega_d);
            let dev = cfg.device(flux)?;
            let drive = cfg.drive(&dev, omega_d)?;
            let opts = if args.explicit { EvalOptions::raw() } else { EvalOptions::leading_order() };
            Some(evaluate_each(&set, &dev, &drive, opts)?)
        }
        None => None,
    };
    outln!(
        out,
        "# photons {} transition {:?} bold {} diagrams {}",
        set.photons,
        set.transition,
        set.bold,
        set.diagrams.len()
    );
    for (i, d) in set.diagrams.iter().enumerate() {
        match &values {
            Some(v) => {
                let (uu, vv) = v[i];
                outln!(
                    out,
                    "{i:>3} {d} vertices={} uu=({},{}) vv=({},{})",
                    d.vertex_count(),
                    fmt_num(uu.re),
                    fmt_num(uu.im),
                    fmt_num(vv.re),
                    fmt_num(vv.im)
                );
            }
            None => outln!(out, "{i:>3} {d} vertices={}", d.vertex_count()),
        }
    }
    Ok(())
}

fn print_bound(out: &mut String, name: &str, b: &FidelityBound) {
    outln!(
        out,
        "{name:<18} bound={} coefficient={} below_threshold={}",
        fmt_num(b.bound),
        fmt_num(b.coefficient),
        b.below_threshold
    );
    for w in &b.warnings {
        outln!(out, "  note: {w}");
    }
}

fn cmd_fidelity(args: &FidelityArgs, out: &mut String) -> Result<(), Error> {
    let cfg = load(&args.point.config)?;
    let (flux, omega_d) = point(&cfg, args.point.flux, args.point.omega_d);
    let dev = cfg.device(flux)?;
    let drive = cfg.drive(&dev, omega_d)?;
    let spec = cfg.spectrum()?;
    let t_ro = nanoseconds(args.t_ro_ns);
    let readout = fidelity_readout_bound(&dev, &drive, &spec, t_ro)?;
    let gate = fidelity_gate_bound(&dev, &spec, nanoseconds(args.t_gate_ns))?;
    let highfreq = fidelity_highfreq_readout(&dev, &drive, t_ro);
    if args.point.format == Format::Json {
        let v = serde_json::json!({
            "readout": readout,
            "gate": gate,
            "highfreq_readout": highfreq.as_ref().ok(),
        });
        outln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
        return Ok(());
    }
    print_bound(out, "readout (alpha)", &readout);
    print_bound(out, "gate (beta)", &gate);
    match highfreq {
        Ok(b) => print_bound(out, "highfreq_readout", &b),
        Err(e) => outln!(out, "{:<18} not applicable: {e}", "highfreq_readout"),
    }
    Ok(())
}

fn cmd_selfcheck(out: &mut String) -> ExitCode {
    let checks = selfcheck::run_all();
    let mut ok = true;
    for c in &checks {
        outln!(out, "{} {:<32} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFCHECK)
    }
}
