//! `clonefid`: optimal cloning fidelities from the command line.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clonefid::oracle::OracleOutcome;
use clonefid::{
    build_family, format_number, optimize_family, oracle_optimize, run_suite, sweep,
    symmetry_report, to_csv, Error, Mutation, NStates, PointReport, SweepSpec,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_ORACLE_DISAGREES: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;
const EXIT_IO: u8 = 74;

/// Largest oracle/reduced fidelity gap accepted by `oracle`.
const ORACLE_AGREEMENT: f64 = 1e-4;

#[derive(Parser)]
#[command(
    name = "clonefid",
    version,
    about = "Optimal state-dependent cloning of coplanar qubit families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal machine for one family size and spread
    Optimize(OptimizeArgs),
    /// Fidelity against spread for several family sizes, as CSV
    Sweep(SweepArgs),
    /// Unrestricted multi-start search compared with the reduced optimum
    Oracle(OracleArgs),
    /// Invariant suite over the standard grid
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    /// Number of candidate inputs
    #[arg(
        long,
        required_unless_present = "continuum",
        conflicts_with = "continuum"
    )]
    n_states: Option<usize>,
    /// Use the continuum of states on the arc instead of a finite family
    #[arg(long)]
    continuum: bool,
    /// Angular spread of the family
    #[arg(long, allow_negative_numbers = true)]
    phi: f64,
    /// Read angles in degrees
    #[arg(long)]
    degrees: bool,
    /// Print a single JSON object
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// First spread of the sweep
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_start: f64,
    /// Last spread of the sweep [default: pi/2 rad]
    #[arg(long, allow_negative_numbers = true)]
    phi_end: Option<f64>,
    /// Number of spreads, both ends included
    #[arg(long, default_value_t = 64)]
    steps: usize,
    /// Comma-separated family sizes
    #[arg(long, value_delimiter = ',')]
    n_states: Vec<usize>,
    /// Add the continuum of states
    #[arg(long)]
    continuum: bool,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Read angles in degrees
    #[arg(long)]
    degrees: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of candidate inputs
    #[arg(long)]
    n_states: usize,
    /// Angular spread of the family
    #[arg(long, allow_negative_numbers = true)]
    phi: f64,
    /// Local searches; the first starts from the symmetric optimum
    #[arg(long, default_value_t = 32)]
    starts: usize,
    /// Seed for the random starting points
    #[arg(long)]
    seed: u64,
    /// Read angles in degrees
    #[arg(long)]
    degrees: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = MutateArg::None, hide = true)]
    mutate: MutateArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutateArg {
    None,
    FlipCSign,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Usage(_) | Error::DegenerateFamily => EXIT_USAGE,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            Error::Inconsistent(_) => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn angle(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<u8, Failure> {
    let n = match args.n_states {
        Some(n) => NStates::Discrete(n),
        None => NStates::Continuum,
    };
    let report = PointReport::new(n, angle(args.phi, args.degrees))?;
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(0)
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, Failure> {
    let spec = SweepSpec {
        phi_start: angle(args.phi_start, args.degrees),
        phi_end: args.phi_end.map_or(FRAC_PI_2, |v| angle(v, args.degrees)),
        steps: args.steps,
        n_states: args.n_states,
        continuum: args.continuum,
    };
    let csv = to_csv(&sweep(&spec)?);
    match args.out {
        Some(path) => fs::write(&path, csv).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot write {}: {e}", path.display()),
        })?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn print_oracle(outcome: &OracleOutcome<f64>, reduced: f64) {
    let diff = outcome.fidelity - reduced;
    println!("oracle_fidelity {}", format_number(outcome.fidelity));
    println!("reduced_fidelity {}", format_number(reduced));
    println!("difference {}", format_number(diff));
    if let Some(r) = outcome.best_random_fidelity {
        println!("best_random_start_fidelity {}", format_number(r));
    }
    println!("constraint_residual {}", format_number(outcome.residual));
    println!("winning_start {}", outcome.start_index);
    println!("feasible_starts {}", outcome.feasible_starts);
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let phi = angle(args.phi, args.degrees);
    let family = build_family(args.n_states, phi)?;
    let reduced = optimize_family(args.n_states, phi)?.fidelity;
    let outcome = oracle_optimize(&family, args.starts, args.seed)?;
    print_oracle(&outcome, reduced);
    let report = symmetry_report(&outcome.params, &family)?;
    for (name, value) in report.entries() {
        println!("symmetry {name} {}", format_number(value));
    }
    if (outcome.fidelity - reduced).abs() < ORACLE_AGREEMENT {
        Ok(0)
    } else {
        eprintln!("error: oracle and reduced optimum differ by more than {ORACLE_AGREEMENT:e}");
        Ok(EXIT_ORACLE_DISAGREES)
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let mutation = match args.mutate {
        MutateArg::None => Mutation::None,
        MutateArg::FlipCSign => Mutation::FlipCSign,
    };
    let report = run_suite(mutation)?;
    print!("{}", report.render());
    Ok(if report.passed() {
        0
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
