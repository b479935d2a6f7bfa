//! `crw-scatter`: scattering matrices, sweeps and figure data for CRW junctions.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crw_core::sweep::presets::{figure_preset, FIGURE_NAMES};
use crw_core::sweep::report::report_conditions;
use crw_core::sweep::table::{save, write_csv, write_json};
use crw_core::sweep::{run_sweep, Config, Format};
use crw_core::verify::run_verification;
use crw_core::waveguide::DEFAULT_TOL;
use crw_core::{smatrix_three_port, smatrix_two_port, Junction, ScatterError, ScatteringResult};

#[derive(Parser)]
#[command(
    name = "crw-scatter",
    version,
    about = "Single-photon scattering at coupled-resonator waveguide junctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering matrix and flows at the config's `point`.
    Smatrix {
        #[arg(long)]
        config: PathBuf,
        /// JSON output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the config's sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.path`; stdout when neither is given.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV data for a named figure panel, or `all` of them.
    Figure {
        name: String,
        /// File for one panel (default `<name>.csv`), directory for `all` (default `figures`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report whether the configured junction reaches perfect nonreciprocity or circulation.
    Conditions {
        #[arg(long)]
        config: PathBuf,
        /// Also write the machine-readable report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Compare closed forms against the lattice oracle on random systems.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Systems of each kind.
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// JSON report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<ScatterError> for Failure {
    fn from(err: ScatterError) -> Self {
        match err {
            ScatterError::Pole { .. }
            | ScatterError::Singular { .. }
            | ScatterError::NoRealPhase { .. }
            | ScatterError::Convergence { .. } => Failure::Numerical(err.to_string()),
            _ => Failure::Config(err.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Config(err.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn matrix<T>(r: &ScatteringResult, f: impl Fn(usize, usize) -> T) -> Vec<Vec<T>> {
    let n = r.ports();
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

fn smatrix_json(r: &ScatteringResult) -> Value {
    let amps = r.amplitude_matrix();
    let flows = r.flow_matrix();
    json!({
        "energy": r.energy,
        "channels": r.channels,
        "k": r.waves.iter().map(|w| [w.k.re, w.k.im]).collect::<Vec<_>>(),
        "propagating": r.waves.iter().map(|w| w.propagating).collect::<Vec<_>>(),
        "amplitudes": matrix(r, |i, j| [amps[i][j].re, amps[i][j].im]),
        "flows": flows,
        "absorption": r.channels.iter().map(|&c| r.absorption(c)).collect::<Vec<_>>(),
        "conditioning": r.conditioning,
    })
}

fn smatrix(config: &Path, out: Option<&Path>) -> Outcome {
    let cfg = Config::load(config)?;
    let system = cfg.junction()?;
    let energy = cfg.point_energy()?;
    let r = match &system {
        Junction::TwoPort(s) => smatrix_two_port(s, energy)?,
        Junction::ThreePort(s) => smatrix_three_port(s, energy)?,
    };
    let mut w = output(out)?;
    write_json(&smatrix_json(&r), &mut w)?;
    w.flush()?;
    Ok(())
}

fn sweep(config: &Path, out: Option<&Path>) -> Outcome {
    let spec = Config::load(config)?.sweep_spec()?;
    let table = run_sweep(&spec);
    let format = spec.output.as_ref().map(|o| o.format).unwrap_or_default();
    match out.or(spec.output.as_ref().map(|o| o.path.as_path())) {
        Some(path) => save(&table, path, format)?,
        None => {
            let mut w = output(None)?;
            match format {
                Format::Csv => write_csv(&table, &mut w)?,
                Format::Json => write_json(&table, &mut w)?,
            }
            w.flush()?;
        }
    }
    if table.all_failed() {
        return Err(Failure::Numerical("every sample is singular or on a band edge".into()));
    }
    Ok(())
}

fn write_figure(name: &str, path: &Path) -> Outcome {
    let fig = figure_preset(name)?;
    let mut w = BufWriter::new(File::create(path)?);
    fig.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn figure(name: &str, out: Option<&Path>) -> Outcome {
    if name == "all" {
        let dir = out.unwrap_or(Path::new("figures"));
        fs::create_dir_all(dir)?;
        for name in FIGURE_NAMES {
            write_figure(name, &dir.join(format!("{name}.csv")))?;
        }
        return Ok(());
    }
    let default = PathBuf::from(format!("{name}.csv"));
    write_figure(name, out.unwrap_or(&default))
}

fn conditions(config: &Path, out: Option<&Path>, tol: f64) -> Outcome {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Config(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let report = report_conditions(&Config::load(config)?.junction()?, tol);
    println!("{}", report.summary());
    if let Some(path) = out {
        let mut w = output(Some(path))?;
        write_json(&report, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn verify(seed: u64, tol: f64, count: usize, out: Option<&Path>) -> Outcome {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Config(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let report = run_verification(seed, count, tol);
    println!(
        "seed {seed}, {count} systems per kind: two-port {:.2e}, three-port {:.2e}, closed form {:.2e} (tol {tol:e})",
        report.two_port_max, report.three_port_max, report.closed_form_max
    );
    if let Some(path) = out {
        let mut w = output(Some(path))?;
        write_json(&report, &mut w)?;
        w.flush()?;
    }
    if report.passed() {
        return Ok(());
    }
    for failure in report.failures.iter().take(10) {
        eprintln!("  {failure}");
    }
    Err(Failure::Numerical(format!(
        "{} checks exceeded the tolerance",
        report.failures.len()
    )))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Smatrix { config, out } => smatrix(config, out.as_deref()),
        Command::Sweep { config, out } => sweep(config, out.as_deref()),
        Command::Figure { name, out } => figure(name, out.as_deref()),
        Command::Conditions { config, out, tol } => conditions(config, out.as_deref(), *tol),
        Command::Verify { seed, tol, count, out } => verify(*seed, *tol, *count, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
