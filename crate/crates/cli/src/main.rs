//! `dynalg`: verification suites, word normalization and single propagations.
//!
//! Exit status: 0 when every check passes, 1 when a verification fails,
//! 2 for usage or configuration errors.

mod config;
mod report;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dynalg::lab::{coherent_state, evolve, scattering, Scheme, REFERENCE_WIDTH};
use dynalg::schema::{parse_functional, parse_word};
use dynalg::weyl::normalize;
use dynalg::DynError;

use config::{HChoice, Scenario, SignChoice, Suite, DEFAULT_DT, SPACING};
use report::{Report, Timings};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(DynError),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(name = "dynalg", version, about = "Dynamical algebra calculus and Schrödinger lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        opts: SuiteOpts,
    },
    /// Run the suite described by a JSON scenario file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Reduce a linear-sector word to Weyl canonical form.
    Normalize {
        word: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        h_convention: HChoice,
    },
    /// Evolve a coherent state under a functional and write it as CSV.
    Propagate(PropagateOpts),
}

#[derive(Args)]
struct SuiteOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance for the closed-form checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Grid points (power of two) at the fixed spacing 40/2048.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    h_convention: HChoice,
    #[arg(long, value_enum, default_value_t)]
    sign_convention: SignChoice,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeChoice {
    Strang,
    Trotter1,
}

#[derive(Args)]
struct PropagateOpts {
    functional: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 2048)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p0: f64,
    #[arg(long, default_value_t = REFERENCE_WIDTH)]
    width: f64,
    #[arg(long, value_enum, default_value_t = SchemeChoice::Strang)]
    scheme: SchemeChoice,
    #[arg(long, value_enum, default_value_t)]
    h_convention: HChoice,
    #[arg(long, value_enum, default_value_t)]
    sign_convention: SignChoice,
    /// Write `S(F)ψ` instead of `U_F(t_f, t_i)ψ`.
    #[arg(long)]
    scattering: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run_suite(scenario: Scenario, out: Option<&Path>, timings: bool) -> Result<bool, CliError> {
    scenario.validate()?;
    let start = Instant::now();
    let (records, slopes) = suites::run(&scenario)?;
    let mut report = Report::new(scenario, records, slopes);
    if timings {
        report.timings = Some(Timings {
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    let json = serde_json::to_string_pretty(&report).map_err(DynError::from)?;
    match out {
        Some(path) => {
            std::fs::write(path, json + "\n")?;
            print!("{}", report.summary());
        }
        None => println!("{json}"),
    }
    Ok(report.overall)
}

fn normalize_word(path: &Path, h: HChoice) -> Result<bool, CliError> {
    let word = parse_word(&read(path)?, h.into()).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let element = normalize(&word).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    println!("{}", serde_json::to_string(&element).map_err(DynError::from)?);
    Ok(true)
}

fn propagate(opts: &PropagateOpts) -> Result<bool, CliError> {
    let functional = parse_functional(&read(&opts.functional)?, opts.h_convention.into())
        .map_err(|e| CliError::Config(format!("{}: {e}", opts.functional.display())))?;
    if functional.dim() != 1 {
        return Err(CliError::Config("the propagator is one-dimensional".into()));
    }
    if !opts.n.is_power_of_two() || opts.n < 2 {
        return Err(CliError::Config(format!("n must be a power of two >= 2, got {}", opts.n)));
    }
    let length = opts.n as f64 * SPACING;
    let grid = dynalg::lab::Grid::new(opts.n, -0.5 * length, length)?;
    let psi = coherent_state(&grid, opts.x0, opts.p0, opts.width)?;
    let (lo, hi) = functional.support().unwrap_or((0.0, 0.0));
    let steps = ((hi - lo) / opts.dt - 1e-9).ceil().max(0.0);
    let scheme = match opts.scheme {
        SchemeChoice::Strang => Scheme::Strang,
        SchemeChoice::Trotter1 => Scheme::Trotter1,
    };
    let cfg = dynalg::lab::PropagatorConfig::new(opts.dt, lo, lo + steps * opts.dt)?
        .with_scheme(scheme)
        .with_sign(opts.sign_convention.into());
    let out = if opts.scattering {
        scattering(&psi, &functional, &cfg)?
    } else {
        evolve(&psi, &functional, &cfg)?
    };
    let mut w = sink(opts.out.as_deref())?;
    out.write_csv(&mut w)?;
    w.flush()?;
    Ok(true)
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var("DYNALG_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| CliError::Config(format!("DYNALG_THREADS must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    match cli.command {
        Command::Verify { suite, opts } => {
            let scenario = Scenario {
                suite,
                seed: opts.seed,
                dt: opts.dt,
                n: opts.n,
                tol: opts.tol,
                h_convention: opts.h_convention,
                sign_convention: opts.sign_convention,
            };
            run_suite(scenario, opts.out.as_deref(), opts.timings)
        }
        Command::Run { config, out, timings } => run_suite(Scenario::load(&config)?, out.as_deref(), timings),
        Command::Normalize { word, h_convention } => normalize_word(&word, h_convention),
        Command::Propagate(opts) => propagate(&opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dynalg: {e}");
            ExitCode::from(2)
        }
    }
}
