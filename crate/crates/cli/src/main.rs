//! `csrpoly`: expand Matrix Market files, inspect the index maps, verify
//! the build, and run scaling benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 overflow/capacity error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use csrpoly::bench::{
    fit_loglog_slope, mode_token, run_bench, write_csv, Algorithm, BenchConfig, BenchError, Sweep,
    SweepAxis,
};
use csrpoly::mm::{self, MmError};
use csrpoly::verify::run_verify;
use csrpoly_core::{
    expand, forward_map, invert_map, Degree, Error as CoreError, ExpansionSpec, FeatureTuple,
    MappingKind, Mode,
};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "csrpoly",
    version,
    about = "Polynomial and interaction feature expansion for sparse matrices",
    long_about = "Expands CSR matrices to degree-2 or degree-3 polynomial or interaction \
                  features without densifying. Map inspection prints 0-based indices; \
                  Matrix Market files use the format's 1-based indices."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a Matrix Market file into its feature expansion
    Expand(ExpandArgs),
    /// Map a column tuple to its expanded column, or invert a column
    Map(MapArgs),
    /// Run the self-verification suites
    Verify(VerifyArgs),
    /// Run a scaling benchmark sweep and write a CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct ExpandArgs {
    /// Input Matrix Market file (matrix coordinate real general)
    #[arg(long)]
    input: PathBuf,
    /// Output Matrix Market file
    #[arg(long)]
    output: PathBuf,
    /// Expansion degree
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    degree: u8,
    /// poly admits repeated indices (x_i*x_j, i <= j); inter does not (i < j)
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Also emit the lower-degree blocks (original columns; pairs too for degree 3)
    #[arg(long)]
    include_lower: bool,
    /// Prepend an all-ones bias column (requires --include-lower)
    #[arg(long)]
    include_bias: bool,
}

#[derive(Args)]
struct MapArgs {
    /// Expansion degree
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    degree: u8,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Input column count D
    #[arg(long)]
    dim: usize,
    /// 0-based input columns, comma-separated, e.g. 1,2 (degree 2) or 0,2,4
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "invert",
        required_unless_present = "invert"
    )]
    tuple: Option<Vec<usize>>,
    /// 0-based expanded column to invert back to its tuple
    #[arg(long)]
    invert: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest input width for the exhaustive mapping checks
    #[arg(long, default_value_t = 16)]
    max_dim: usize,
    /// Number of randomized sparse-vs-dense equivalence trials
    #[arg(long, default_value_t = 25)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Parameter to sweep; the other two stay at --rows/--cols/--density
    #[arg(long, value_enum)]
    vary: VaryArg,
    /// Comma-separated grid values for the varied parameter, increasing
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    /// Fixed row count
    #[arg(long, default_value_t = 100)]
    rows: usize,
    /// Fixed column count
    #[arg(long, default_value_t = 100)]
    cols: usize,
    /// Fixed density
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    /// Expansion kind(s), comma-separated
    #[arg(long = "kind", value_enum, value_delimiter = ',', default_values_t = vec![KindArg::Poly2])]
    kinds: Vec<KindArg>,
    /// Algorithm(s) to time, comma-separated
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![AlgArg::Sparse, AlgArg::Dense])]
    algorithms: Vec<AlgArg>,
    /// Repetitions per grid point (fresh matrix each)
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Untimed warm-up expansions before each timed one
    #[arg(long, default_value_t = 0)]
    warmup: usize,
    /// Dense grid points needing more bytes than this are skipped
    #[arg(long, default_value_t = 2 * 1024 * 1024 * 1024)]
    dense_cap_bytes: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Poly,
    Inter,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Poly => Mode::Polynomial,
            ModeArg::Inter => Mode::Interaction,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VaryArg {
    Density,
    Dimension,
    Rows,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Poly2,
    Poly3,
    Inter2,
    Inter3,
}

impl From<KindArg> for MappingKind {
    fn from(k: KindArg) -> MappingKind {
        match k {
            KindArg::Poly2 => MappingKind::POLY2,
            KindArg::Poly3 => MappingKind::POLY3,
            KindArg::Inter2 => MappingKind::INTER2,
            KindArg::Inter3 => MappingKind::INTER3,
        }
    }
}

impl fmt::Display for KindArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            KindArg::Poly2 => "poly2",
            KindArg::Poly3 => "poly3",
            KindArg::Inter2 => "inter2",
            KindArg::Inter3 => "inter3",
        };
        f.write_str(token)
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AlgArg {
    Sparse,
    Dense,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Algorithm {
        match a {
            AlgArg::Sparse => Algorithm::Sparse,
            AlgArg::Dense => Algorithm::Dense,
        }
    }
}

impl fmt::Display for AlgArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgArg::Sparse => "sparse",
            AlgArg::Dense => "dense",
        })
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(CoreError),
    Mm(MmError),
    Bench(BenchError),
    VerificationFailed { mapping: u64, oracle: u64 },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Mm(e) => write!(f, "{e}"),
            CliError::Bench(e) => write!(f, "{e}"),
            CliError::VerificationFailed { mapping, oracle } => write!(
                f,
                "verification failed: {mapping} mapping check(s) and {oracle} oracle trial(s) failed"
            ),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<MmError> for CliError {
    fn from(e: MmError) -> Self {
        CliError::Mm(e)
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        CliError::Bench(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        fn core_code(e: &CoreError) -> u8 {
            if matches!(e, CoreError::Overflow(_)) {
                3
            } else {
                2
            }
        }
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => core_code(e),
            CliError::Mm(MmError::Matrix(e)) => core_code(e),
            CliError::Mm(_) => 2,
            CliError::Bench(BenchError::Core(e)) => core_code(e),
            CliError::Bench(_) => 2,
            CliError::VerificationFailed { .. } => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Expand(args) => cmd_expand(args),
        Command::Map(args) => cmd_map(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn kind_of(degree: u8, mode: ModeArg) -> MappingKind {
    let degree = match degree {
        2 => Degree::Two,
        _ => Degree::Three,
    };
    MappingKind::new(degree, mode.into())
}

fn cmd_expand(args: ExpandArgs) -> Result<(), CliError> {
    if args.include_bias && !args.include_lower {
        return Err(CliError::Usage(
            "--include-bias requires --include-lower".into(),
        ));
    }
    let spec = ExpansionSpec::new(
        kind_of(args.degree, args.mode),
        args.include_lower,
        args.include_bias,
    )?;
    let input = mm::read_matrix_market(&args.input)?;
    let output = expand(&input, spec)?;
    mm::write_matrix_market(&output, &args.output)?;
    Ok(())
}

fn cmd_map(args: MapArgs) -> Result<(), CliError> {
    let kind = kind_of(args.degree, args.mode);
    if let Some(indices) = args.tuple {
        let tuple = match (args.degree, indices.as_slice()) {
            (2, &[i, j]) => FeatureTuple::pair(i, j),
            (3, &[i, j, k]) => FeatureTuple::triple(i, j, k),
            _ => {
                return Err(CliError::Usage(format!(
                    "--tuple needs exactly {} comma-separated indices for degree {}",
                    args.degree, args.degree
                )))
            }
        };
        let col = forward_map(tuple, args.dim, kind)?;
        println!("{col}");
    } else {
        // Clap guarantees --invert is present when --tuple is absent.
        let col = args.invert.expect("clap enforces tuple/invert presence");
        let tuple = invert_map(col, args.dim, kind)?;
        println!("{tuple}");
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let report = run_verify(args.max_dim, args.trials, args.seed)?;
    let mapping_passed = report.mapping_checks - report.mapping_failures;
    let oracle_passed = report.oracle_checks - report.oracle_failures;
    println!(
        "mapping checks: {mapping_passed} passed, {} failed",
        report.mapping_failures
    );
    println!(
        "oracle trials: {oracle_passed} passed, {} failed",
        report.oracle_failures
    );
    for detail in &report.failures {
        eprintln!("failure: {detail}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed {
            mapping: report.mapping_failures,
            oracle: report.oracle_failures,
        })
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let sweep = match args.vary {
        VaryArg::Density => Sweep::Density(parse_values(&args.values, "density")?),
        VaryArg::Dimension => Sweep::Dimension(parse_values(&args.values, "dimension")?),
        VaryArg::Rows => Sweep::Rows(parse_values(&args.values, "row count")?),
    };
    let axis = sweep.axis();
    let mut config = BenchConfig::new(sweep);
    config.fixed_n_rows = args.rows;
    config.fixed_n_cols = args.cols;
    config.fixed_density = args.density;
    config.kinds = args.kinds.iter().map(|&k| k.into()).collect();
    config.algorithms = args.algorithms.iter().map(|&a| a.into()).collect();
    config.repetitions = args.reps;
    config.seed = args.seed;
    config.warmup = args.warmup;
    config.dense_cap_bytes = args.dense_cap_bytes;

    let run = run_bench(&config)?;
    write_csv(&run.records, &args.out)?;
    for skip in &run.skipped {
        eprintln!(
            "skipped: {} {} at n_rows={} n_cols={} density={}: {}",
            skip.algorithm, skip.kind, skip.n_rows, skip.n_cols, skip.density, skip.reason
        );
    }
    println!(
        "{} records -> {}",
        run.records.len(),
        args.out.display()
    );
    let axis_name = match axis {
        SweepAxis::Density => "density",
        SweepAxis::Dimension => "n_cols",
        SweepAxis::Rows => "n_rows",
    };
    for &kind in &config.kinds {
        for &algorithm in &config.algorithms {
            let group: Vec<_> = run
                .records
                .iter()
                .filter(|r| r.kind == kind && r.algorithm == algorithm)
                .cloned()
                .collect();
            if let Ok(slope) = fit_loglog_slope(&group, axis) {
                println!(
                    "slope {algorithm} {}{} vs {axis_name}: {slope:.4}",
                    mode_token(kind.mode),
                    kind.degree.as_usize()
                );
            }
        }
    }
    Ok(())
}

fn parse_values<T: std::str::FromStr>(values: &[String], what: &str) -> Result<Vec<T>, CliError> {
    values
        .iter()
        .map(|v| {
            v.parse().map_err(|_| {
                CliError::Usage(format!("malformed {what} value \"{v}\" in --values"))
            })
        })
        .collect()
}
