//! `scpi`: compute π with the self-correcting ladder, verify digit files,
//! iterate `a ↦ a + sin a`, time the ladder, and run the built-in self-test.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success |
//! | 1    | a check failed: verify rejected or was inconclusive, files disagree, self-test mismatch, orbit did not converge |
//! | 2    | I/O failure |
//! | 3    | internal invariant violation |
//! | 4    | invalid input data (malformed digit file or checkpoint, out-of-range argument) |
//! | 64   | command-line usage error |

use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scpi_core::corrector::{
    compute_digits, decimal_ladder, resume_digits, Checkpoint, TruncationPolicy,
};
use scpi_core::dynamics::{iterate_orbit, parse_start, DEFAULT_MAX_ITER, DEFAULT_TOL_BITS};
use scpi_core::verifier::{cross_agree, verify_digits, Verdict, VerifyReport};
use scpi_core::{bench, selftest, Precision};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_USAGE: u8 = 64;

/// Extra bits carried by `dynamics` beyond the stopping tolerance.
const DYNAMICS_EXTRA_BITS: u64 = 32;

#[derive(Parser, Debug)]
#[command(name = "scpi", version, about = "Self-correcting computation of pi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute decimals of pi.
    Compute(ComputeArgs),
    /// Check a digit file by one correcting step, or compare two files.
    Verify(VerifyArgs),
    /// Iterate a -> a + sin a and report the limit.
    Dynamics(DynamicsArgs),
    /// Time the ladder over a geometric grid of targets.
    Bench(BenchArgs),
    /// Reproduce the worked example and the oracle agreement.
    Selftest,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["digits", "bits"]))]
struct ComputeArgs {
    /// Number of decimals to print.
    #[arg(long)]
    digits: Option<usize>,
    /// Target precision in bits; prints every decimal this certifies.
    #[arg(long)]
    bits: Option<u64>,
    #[arg(long, default_value = "third")]
    policy: TruncationPolicy,
    /// Digit file to write; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to save the final state.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from a saved state.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write a CSV trace of the run.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Step schedule shown in the trace.
    #[arg(long, value_enum, default_value = "binary")]
    schedule: Schedule,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Schedule {
    /// The ladder steps actually run: min(3^k, n) bits per step.
    Binary,
    /// The hand-calculation table: keep only the decimals each step proves.
    Decimal,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Digit file to check.
    #[arg(long = "in")]
    input: PathBuf,
    /// Decimals kept before the correcting step; must satisfy 3m >= n.
    #[arg(long)]
    split: Option<usize>,
    /// Compare against a second digit file instead.
    #[arg(long)]
    against: Option<PathBuf>,
    /// Append the report as a CSV row (header written for new files).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    /// Starting point: a decimal, optionally followed by `pi` (`7`, `-1.5`, `2pi`).
    #[arg(long, allow_hyphen_values = true)]
    a0: String,
    #[arg(long, default_value_t = DEFAULT_TOL_BITS)]
    tol_bits: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 1 << 20)]
    max_bits: u64,
    #[arg(long, default_value_t = 6)]
    points: usize,
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] scpi_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use scpi_core::Error as E;
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
            CliError::Core(e) => match e {
                E::Parse(_)
                | E::InvalidCheckpoint(_)
                | E::ArgumentOutOfRange(_)
                | E::SplitOutOfRange { .. } => EXIT_INPUT,
                E::NonConvergence { .. } => EXIT_CHECK_FAILED,
                E::DivisionByZero
                | E::InsufficientAccuracy { .. }
                | E::ClassificationMismatch { .. } => EXIT_INTERNAL,
            },
        }
    }
}

type CliResult = Result<(), CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn cmd_compute(args: ComputeArgs) -> CliResult {
    let digits = match (args.digits, args.bits) {
        (Some(d), _) => d,
        // Decimals that fit in bits − 4 so the slack matches --digits.
        (None, Some(b)) => {
            (b.saturating_sub(4) as f64 / std::f64::consts::LOG2_10).floor() as usize
        }
        (None, None) => unreachable!("clap requires one target"),
    };
    let (text, ladder) = match &args.resume {
        Some(path) => {
            let cp = Checkpoint::parse(&read(path)?)?;
            resume_digits(&cp, digits, args.policy)?
        }
        None => compute_digits(digits, args.policy),
    };
    match &args.out {
        Some(path) => write(path, &format!("{text}\n"))?,
        None => println!("{text}"),
    }
    if let Some(path) = &args.checkpoint {
        write(path, &ladder.checkpoint().to_text())?;
    }
    if let Some(path) = &args.trace {
        let csv = match args.schedule {
            Schedule::Binary => ladder.trace_csv(),
            Schedule::Decimal => decimal_trace(digits)?,
        };
        write(path, &csv)?;
    }
    Ok(())
}

/// `k,alpha,sin_alpha,eps,next_decimals` rows of the decimal schedule, up
/// to the first row whose α keeps at least `digits` decimals.
fn decimal_trace(digits: usize) -> Result<String, CliError> {
    // The last row's bound is about the cube of a 3·digits-decimal error.
    let p = Precision::new(scpi_core::corrector::digits_to_bits(9 * digits + 40));
    let mut rows = 1;
    let table = loop {
        let table = decimal_ladder(rows, p)?;
        if table.last().unwrap().alpha_decimals >= digits {
            break table;
        }
        rows += 1;
    };
    let mut out = String::from("k,alpha,sin_alpha,eps,next_decimals\n");
    for row in &table {
        out.push_str(&format!(
            "{},{},{},{:.3e},{}\n",
            row.k,
            row.alpha.to_decimal(row.alpha_decimals),
            row.sin_alpha.to_decimal(row.next_decimals + 3),
            row.eps.to_f64(),
            row.next_decimals
        ));
    }
    Ok(out)
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let claim = read(&args.input)?;
    if let Some(other) = &args.against {
        let agreement = cross_agree(&claim, &read(other)?)?;
        print!("{}", agreement.to_text());
        return if agreement.is_full() {
            Ok(())
        } else {
            Err(CliError::Failed("files disagree".into()))
        };
    }
    let report = verify_digits(&claim, args.split)?;
    print!("{}", report.to_text());
    if let Some(path) = &args.csv {
        let mut csv = match fs::read_to_string(path) {
            Ok(existing) => existing,
            Err(_) => format!("{}\n", VerifyReport::CSV_HEADER),
        };
        csv.push_str(&report.csv_row());
        csv.push('\n');
        write(path, &csv)?;
    }
    match report.verdict {
        Verdict::Accept => Ok(()),
        v => Err(CliError::Failed(format!("verdict {v}"))),
    }
}

fn cmd_dynamics(args: DynamicsArgs) -> CliResult {
    let p = Precision::new(args.tol_bits + DYNAMICS_EXTRA_BITS);
    let a0 = parse_start(&args.a0, p)?;
    let orbit = iterate_orbit(&a0, p, args.max_iter, args.tol_bits)?;
    if let Some(path) = &args.csv {
        write(path, &orbit.to_csv())?;
    }
    let last = orbit.last();
    println!("iterations={}", orbit.records.len());
    println!("n={}", orbit.class.n);
    println!("odd_multiple={}", orbit.class.odd_multiple);
    println!("degenerate={}", orbit.class.degenerate);
    println!("near_degenerate={}", orbit.near_degenerate);
    println!("final={}", last.a_k.to_decimal(30));
    println!("log2_residual={:.3}", last.residual.log2_abs());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let report = bench::run(args.max_bits, args.points)?;
    write(&args.csv, &report.to_csv())?;
    for policy in [TruncationPolicy::Third, TruncationPolicy::Full] {
        let slope = report
            .top_decade_slope(policy)
            .map_or("n/a".to_owned(), |s| format!("{s:.3}"));
        println!(
            "policy={policy} total_ms={:.1} monotone={} top_decade_slope={slope}",
            report.total(policy).as_secs_f64() * 1e3,
            report.is_monotone(policy)
        );
    }
    Ok(())
}

fn cmd_selftest() -> CliResult {
    let checks = selftest::run();
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{failed} self-test checks failed"
        )))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Dynamics(a) => cmd_dynamics(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("scpi: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
