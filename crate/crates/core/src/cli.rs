//! Command-line surface. [`run`] takes explicit output streams so the
//! binary and the tests drive exactly the same code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    absorption_sup_deviation, detect_windows, max_relative_deviation, sweep, Backend,
};
use crate::error::{Error, Result};
use crate::io::{emit, parse_config, preset, render_config, CrossingScan, Emit, RateTable, RunConfig, PRESETS};
use crate::model::{DetuningGrid, SystemParams};
use crate::spectral::{
    cavity_rate_crossing_scan, cavity_single_excitation_eigensystem, cavity_transition_rates,
    cavity_transition_rates_closed, rate_crossing_scan, single_excitation_eigensystem, transition_rates_closed,
    transition_rates_numeric, RatePath,
};

#[derive(Debug, Parser)]
#[command(name = "ddit", version, about = "Transparency windows of a driven two-level system coupled to a dipole-dipole chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the detuning grid and write the complex response.
    Spectrum(Common),
    /// Sweep, then report peaks and transparency windows.
    Windows(Common),
    /// One-excitation eigenstates.
    Eigen {
        #[command(flatten)]
        common: Common,
        /// Probe detuning added to every excitation energy.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        detuning: f64,
    },
    /// Golden-rule decay rates, or a scan for rate crossings.
    Rates {
        #[command(flatten)]
        common: Common,
        /// Scan the uniform coupling d from LO to HI with SAMPLES points.
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "SAMPLES"])]
        scan_d: Option<Vec<String>>,
        /// closed or numeric.
        #[arg(long, default_value = "numeric")]
        path: String,
        /// Prefactor of the cavity rates (default γ0).
        #[arg(long)]
        prefactor: Option<f64>,
    },
    /// Compare backends on the configured grid.
    Validate(Common),
    /// List presets, or print one as a config file.
    Preset {
        #[arg(long)]
        list: bool,
        name: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// closed, general or oracle.
    #[arg(long)]
    backend: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, num_args = 3, value_names = ["START", "STOP", "COUNT"], allow_negative_numbers = true)]
    grid: Option<Vec<String>>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            (None, Some(name)) => preset(name)?,
            (None, None) => return Err(Error::invalid("input", "missing; pass --config PATH or --preset NAME")),
        };
        if let Some(b) = &self.backend {
            c.backend = b.parse()?;
        }
        if let Some(f) = &self.format {
            c.format = f.parse()?;
        }
        if let Some(out) = &self.out {
            c.out = Some(out.clone());
        }
        if let Some(g) = &self.grid {
            let bad = |what: &str| Error::invalid("grid", format!("cannot parse {what}"));
            c.grid = DetuningGrid::new(
                g[0].parse().map_err(|_| bad("START"))?,
                g[1].parse().map_err(|_| bad("STOP"))?,
                g[2].parse().map_err(|_| bad("COUNT"))?,
            )?;
        }
        Ok(c)
    }
}

/// Cross-backend agreement on one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub grid_points: usize,
    /// Max pointwise relative deviation, closed form vs general solver.
    pub closed_vs_general: Option<f64>,
    /// Sup-norm deviation of normalized absorption, oracle vs general.
    pub oracle_vs_general: Option<f64>,
    pub oracle_points: usize,
    pub notes: Vec<String>,
}

impl Emit for ValidationReport {
    fn csv_header(&self) -> Vec<String> {
        vec!["metric".into(), "value".into()]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let opt = |x: Option<f64>| x.map_or_else(|| "skipped".to_string(), |v| format!("{v:.6e}"));
        let mut rows = vec![
            vec!["grid_points".into(), self.grid_points.to_string()],
            vec!["closed_vs_general".into(), opt(self.closed_vs_general)],
            vec!["oracle_vs_general".into(), opt(self.oracle_vs_general)],
            vec!["oracle_points".into(), self.oracle_points.to_string()],
        ];
        rows.extend(self.notes.iter().map(|n| vec!["note".into(), n.clone()]));
        rows
    }
}

/// The oracle runs on at most this many evenly spaced points.
const ORACLE_POINTS: usize = 101;

pub fn validate(config: &RunConfig) -> Result<ValidationReport> {
    let grid = config.grid;
    let general = sweep(&config.system, &grid, Backend::General)?;
    let mut notes = Vec::new();
    let closed_vs_general = match sweep(&config.system, &grid, Backend::Closed) {
        Ok(closed) => Some(max_relative_deviation(&closed, &general, 1e-300)),
        Err(e) => {
            notes.push(format!("closed: {e}"));
            None
        }
    };
    let sub = DetuningGrid { count: grid.count.min(ORACLE_POINTS), ..grid };
    let (oracle_vs_general, oracle_points) = match sweep(&config.system, &sub, Backend::Oracle) {
        Ok(oracle) => {
            let reference = sweep(&config.system, &sub, Backend::General)?;
            (Some(absorption_sup_deviation(&oracle, &reference)), sub.count)
        }
        Err(e) => {
            notes.push(format!("oracle: {e}"));
            (None, 0)
        }
    };
    Ok(ValidationReport { grid_points: grid.count, closed_vs_general, oracle_vs_general, oracle_points, notes })
}

fn parse_path(s: &str) -> Result<RatePath> {
    match s {
        "closed" => Ok(RatePath::Closed),
        "numeric" => Ok(RatePath::Numeric),
        other => Err(Error::invalid("path", format!("must be closed or numeric, got `{other}`"))),
    }
}

fn write_output(config: &RunConfig, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => match out.write_all(bytes) {
            // a closed pipe (`| head`) is not a failure of the run
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn finish<T: Emit>(config: &RunConfig, value: &T, out: &mut dyn Write) -> Result<()> {
    write_output(config, &emit(value, config.format)?, out)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Spectrum(common) => {
            let c = common.resolve()?;
            finish(&c, &sweep(&c.system, &c.grid, c.backend)?, out)
        }
        Command::Windows(common) => {
            let c = common.resolve()?;
            finish(&c, &detect_windows(&sweep(&c.system, &c.grid, c.backend)?)?, out)
        }
        Command::Eigen { common, detuning } => {
            let c = common.resolve()?;
            let eig = match &c.system {
                SystemParams::FreeSpace(p) => single_excitation_eigensystem(p, detuning),
                SystemParams::Cavity(p) => cavity_single_excitation_eigensystem(p, detuning),
            };
            finish(&c, &eig, out)
        }
        Command::Rates { common, scan_d, path, prefactor } => {
            let c = common.resolve()?;
            let path = parse_path(&path)?;
            let prefactor = prefactor.or(c.rate_prefactor).unwrap_or(c.system.chain().gamma0);
            if let Some(scan) = scan_d {
                let bad = |what: &str| Error::invalid("scan-d", format!("cannot parse {what}"));
                let lo: f64 = scan[0].parse().map_err(|_| bad("LO"))?;
                let hi: f64 = scan[1].parse().map_err(|_| bad("HI"))?;
                let samples: usize = scan[2].parse().map_err(|_| bad("SAMPLES"))?;
                let crossings = match &c.system {
                    SystemParams::FreeSpace(p) => rate_crossing_scan(p, path, lo, hi, samples)?,
                    SystemParams::Cavity(p) => cavity_rate_crossing_scan(p, path, prefactor, lo, hi, samples)?,
                };
                return finish(&c, &CrossingScan { crossings }, out);
            }
            let table = match &c.system {
                SystemParams::FreeSpace(p) => {
                    let eig = single_excitation_eigensystem(p, 0.0);
                    let rates = match path {
                        RatePath::Closed => transition_rates_closed(p)?,
                        RatePath::Numeric => transition_rates_numeric(p, &eig),
                    };
                    RateTable::new(&eig, &rates)
                }
                SystemParams::Cavity(p) => {
                    let eig = cavity_single_excitation_eigensystem(p, 0.0);
                    let rates = match path {
                        RatePath::Closed => cavity_transition_rates_closed(p, prefactor)?,
                        RatePath::Numeric => cavity_transition_rates(p, prefactor),
                    };
                    RateTable::new(&eig, &rates)
                }
            };
            finish(&c, &table, out)
        }
        Command::Validate(common) => {
            let c = common.resolve()?;
            finish(&c, &validate(&c)?, out)
        }
        Command::Preset { list, name } => match (list, name) {
            (true, _) => {
                let mut text = String::new();
                for p in PRESETS {
                    text.push_str(&format!("{:<14}{}\n", p.name, p.summary));
                }
                out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
            }
            (false, Some(name)) => {
                out.write_all(render_config(&preset(&name)?).as_bytes()).map_err(|e| Error::Io(e.to_string()))
            }
            (false, None) => Err(Error::invalid("preset", "pass --list or a preset name")),
        },
    }
}

/// Parses `args` (program name first) and runs the command.
///
/// Exit codes: 0 on success, 1 for bad input, 2 when a solver fails.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{e}");
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_solver_error() {
                2
            } else {
                1
            }
        }
    }
}
