//! `qopt`: validate, run, scan and CHSH-test `.qopt` circuits.
//!
//! Exit codes: 0 success, 1 invalid circuit or failed computation,
//! 2 bad usage or I/O failure. CSV goes to stdout (or `--out`), everything
//! else to stderr.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qopt_core::circuit::{compile, parse_circuit, validate, ElementProgram};
use qopt_core::experiments::{
    chsh, run_exact, sample_counts, scan, write_chsh_csv, write_scan_csv, write_table_csv,
    ChshAngles, ChshMode, Grid, Sampling, ScanKind,
};
use qopt_core::Error;

#[derive(Parser)]
#[command(name = "qopt", version, about = "Two-photon linear-optics simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a circuit and print its diagnostics
    Validate { file: PathBuf },
    /// Outcome distribution of a single configuration
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one element parameter
    Scan {
        file: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long, default_value = "tau_fs")]
        field: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Kind::Hom)]
        kind: Kind,
        #[command(flatten)]
        common: Common,
    },
    /// CHSH parameter at four analysis angles (degrees)
    Chsh {
        file: PathBuf,
        /// A,A',B,B'
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0,45,22.5,67.5"
        )]
        angles: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Required in sampled mode
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Photon pairs per second
    #[arg(long, default_value_t = 12_000.0)]
    rate: f64,
    /// Acquisition time per configuration, seconds
    #[arg(long, default_value_t = 3.0)]
    duration: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hom,
    Fringe,
}

enum Failure {
    Usage(String),
    Io(String),
    Domain(String),
    /// Diagnostics already printed.
    Invalid,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidCircuit(diags) => {
                for d in diags {
                    eprintln!("{d}");
                }
                Failure::Invalid
            }
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl Common {
    fn sampling(&self) -> Result<Option<Sampling>, Failure> {
        match self.mode {
            Mode::Exact => Ok(None),
            Mode::Sampled => {
                let seed = self.seed.ok_or_else(|| {
                    Failure::Usage("--seed is required with --mode sampled".into())
                })?;
                let s = Sampling {
                    pair_rate: self.rate,
                    duration_s: self.duration,
                    seed,
                };
                s.check().map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(Some(s))
            }
        }
    }

    fn emit(&self, bytes: &[u8]) -> Result<(), Failure> {
        match &self.out {
            Some(path) => {
                fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
            }
            None => io::stdout()
                .lock()
                .write_all(bytes)
                .map_err(|e| Failure::Io(format!("stdout: {e}"))),
        }
    }
}

/// Parses and validates `path`, printing every diagnostic.
fn load(path: &Path) -> Result<ElementProgram, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let circuit = parse_circuit(&text).map_err(|diags| {
        for d in diags {
            eprintln!("{d}");
        }
        Failure::Invalid
    })?;
    let diags = validate(&circuit);
    for d in &diags {
        eprintln!("{d}");
    }
    if diags.iter().any(|d| d.is_error()) {
        return Err(Failure::Invalid);
    }
    Ok(compile(&circuit)?)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => load(&file).map(|_| ()),
        Command::Run { file, common } => {
            let sampling = common.sampling()?;
            let program = load(&file)?;
            let mut table = run_exact(&program)?;
            if let Some(s) = &sampling {
                table = sample_counts(&table, s)?;
            }
            let mut buf = Vec::new();
            write_table_csv(&table, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            common.emit(&buf)
        }
        Command::Scan {
            file,
            element,
            field,
            from,
            to,
            step,
            kind,
            common,
        } => {
            let grid = Grid::new(from, to, step).map_err(|e| Failure::Usage(e.to_string()))?;
            let sampling = common.sampling()?;
            let program = load(&file)?;
            let kind = match kind {
                Kind::Hom => ScanKind::Hom,
                Kind::Fringe => ScanKind::Fringe,
            };
            let curve = scan(
                &program,
                &element,
                &field,
                &grid.values(),
                kind,
                sampling.as_ref(),
            )?;
            let visibility = match curve.visibility() {
                Ok(v) => Some(v),
                Err(e) => {
                    eprintln!("warning: no visibility: {e}");
                    None
                }
            };
            let mut buf = Vec::new();
            write_scan_csv(&curve, visibility, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            common.emit(&buf)
        }
        Command::Chsh {
            file,
            angles,
            common,
        } => {
            let angles =
                ChshAngles::from_slice(&angles).map_err(|e| Failure::Usage(e.to_string()))?;
            let mode = match common.sampling()? {
                Some(s) => ChshMode::Sampled(s),
                None => ChshMode::Exact,
            };
            let program = load(&file)?;
            let result = chsh(&program, &angles, mode)?;
            let mut buf = Vec::new();
            write_chsh_csv(&result, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            common.emit(&buf)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(1),
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
