//! Command-line front end of the `qbm` binary.
//!
//! Exit codes: 0 success, 2 bad parameters, 3 numerical failure, 4 a
//! physical constraint or oracle comparison failed.

pub mod commands;
pub mod output;
pub mod spec;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use output::Table;
use spec::Settings;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CONSTRAINT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qbm", version, about = "Equilibrium properties of a damped quantum oscillator in a Drude bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermodynamic and von Neumann entropy over a temperature grid.
    EntropySweep(RunArgs),
    /// Reduced density matrix in the number basis.
    DensityMatrix(RunArgs),
    /// Random states checked against the uncertainty and occupation bounds.
    StateBounds(RunArgs),
    /// Heat per bit of von Neumann entropy against T ln 2.
    Landauer(RunArgs),
    /// Finite-bath normal-mode calculation against the continuum formulas.
    Oracle(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EntropySweep(_) => "entropy-sweep",
            Command::DensityMatrix(_) => "density-matrix",
            Command::StateBounds(_) => "state-bounds",
            Command::Landauer(_) => "landauer",
            Command::Oracle(_) => "oracle",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::EntropySweep(a)
            | Command::DensityMatrix(a)
            | Command::StateBounds(a)
            | Command::Landauer(a)
            | Command::Oracle(a) => a,
        }
    }
}

/// Flags shared by all subcommands. Every flag can also be given as a
/// `key = value` line in a spec file; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Spec file with `key = value` lines.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Coupling gamma: value, comma list or start:stop:count[:log].
    #[arg(long)]
    pub gamma: Option<String>,
    /// Drude cutoff: value, list or range.
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long)]
    pub omega0: Option<String>,
    #[arg(long)]
    pub mass: Option<String>,
    /// Temperature: value or comma list.
    #[arg(long)]
    pub temp: Option<String>,
    /// Temperatures as start:stop:count[:log].
    #[arg(long = "temp-range")]
    pub temp_range: Option<String>,
    /// Number-basis truncation (automatic when absent).
    #[arg(long = "n-max")]
    pub n_max: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Relative quadrature tolerance.
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<String>,
    /// density-matrix: qbm, thermal or squeezed.
    #[arg(long)]
    pub state: Option<String>,
    /// Mean occupation for thermal and squeezed states.
    #[arg(long = "n-bar")]
    pub n_bar: Option<String>,
    /// Tune gamma so that the ground-state energy equals this value.
    #[arg(long = "tune-energy")]
    pub tune_energy: Option<String>,
    /// Tune gamma so that the mean occupation equals this value.
    #[arg(long = "tune-occupation")]
    pub tune_occupation: Option<String>,
    /// Relative step in omega0 for the Landauer differences.
    #[arg(long)]
    pub delta: Option<String>,
    /// Number of bath oscillators for the oracle.
    #[arg(long = "bath-size")]
    pub bath_size: Option<String>,
    /// density-matrix: emit the diagonal with comparison columns only.
    #[arg(long)]
    pub diagonal: bool,
}

impl RunArgs {
    fn flag_map(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("gamma", &self.gamma),
            ("cutoff", &self.cutoff),
            ("omega0", &self.omega0),
            ("mass", &self.mass),
            ("temp", &self.temp),
            ("temp-range", &self.temp_range),
            ("n-max", &self.n_max),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("rel-tol", &self.rel_tol),
            ("format", &self.format),
            ("out", &self.out),
            ("state", &self.state),
            ("n-bar", &self.n_bar),
            ("tune-energy", &self.tune_energy),
            ("tune-occupation", &self.tune_occupation),
            ("delta", &self.delta),
            ("bath-size", &self.bath_size),
        ];
        let mut map: BTreeMap<String, String> =
            pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if self.diagonal {
            map.insert("diagonal".into(), "true".into());
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parameter(message: impl Into<String>) -> Self {
        CliError { code: EXIT_PARAMETER, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: message.into() }
    }

    pub fn constraint(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONSTRAINT, message: message.into() }
    }

    /// Library error at the grid point described by `at`.
    pub fn from_model(at: &str, e: Error) -> Self {
        let message = if at.is_empty() { e.to_string() } else { format!("{at}: {e}") };
        match e {
            Error::InvalidParameter(_) => CliError::parameter(message),
            _ => CliError::numerical(message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// What a command produced: the table, warnings for standard error, and
/// an error to report after the table has been written.
pub struct Outcome {
    pub table: Table,
    pub warnings: Vec<String>,
    pub deferred: Option<CliError>,
}

impl Outcome {
    pub fn ok(table: Table) -> Self {
        Outcome { table, warnings: Vec::new(), deferred: None }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Tables go to `--out` or `stdout`; diagnostics to
/// `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMETER } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let env = std::env::var(spec::RTOL_ENV).ok();
    match execute(&cli.command, env.as_deref(), stdout) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            match outcome.deferred {
                Some(e) => {
                    let _ = writeln!(stderr, "error: {}", e.message);
                    e.code
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: &Command, env_rtol: Option<&str>, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let args = command.args();
    let settings = Settings::load(args.spec.as_deref(), args.flag_map())?;
    let format = settings.format()?;
    let quad = settings.quadrature(env_rtol)?;
    let outcome = match command {
        Command::EntropySweep(_) => commands::entropy_sweep(&settings, &quad)?,
        Command::DensityMatrix(_) => commands::density_matrix(&settings, &quad)?,
        Command::StateBounds(_) => commands::state_bounds(&settings, &quad)?,
        Command::Landauer(_) => commands::landauer(&settings, &quad)?,
        Command::Oracle(_) => commands::oracle(&settings, &quad)?,
    };
    debug_assert_eq!(outcome.table.command, command.name());
    let written = match settings.raw("out") {
        Some(path) => {
            let mut buf = Vec::new();
            outcome.table.write(format, &mut buf).and_then(|_| std::fs::write(path, buf))
        }
        None => outcome.table.write(format, stdout),
    };
    written.map_err(|e| CliError::numerical(format!("cannot write output: {e}")))?;
    Ok(outcome)
}
