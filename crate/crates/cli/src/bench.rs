//! Scaling benchmark harness: vary one of density, column count, or row
//! count while holding the others fixed, time the sparse and dense
//! expansions on freshly generated matrices, and fit log-log slopes.
//!
//! All randomness derives from the config seed: the matrix for (grid point,
//! repetition) has a deterministically derived seed, so two runs of one
//! config expand identical matrices and differ only in timings. Runs are
//! strictly sequential so timings are never confounded. Dense runs are
//! timed on a pre-densified input (densification is excluded from the
//! measured time) and dense grid points whose buffers would exceed the
//! configured memory cap are skipped with a marker instead of failing the
//! sweep.

use csrpoly_core::{
    expand_dense, expand_with_stats, expanded_dim, CsrMatrix, Degree, DenseMatrix,
    Error as CoreError, ExpansionSpec, MappingKind, Mode,
};
use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Sparse,
    Dense,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Sparse => f.write_str("sparse"),
            Algorithm::Dense => f.write_str("dense"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sparse" => Ok(Algorithm::Sparse),
            "dense" => Ok(Algorithm::Dense),
            other => Err(format!("unknown algorithm \"{other}\"")),
        }
    }
}

/// Which parameter a sweep varies; the other two stay at their fixed
/// config values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Density,
    Dimension,
    Rows,
}

/// The varied parameter together with its grid values.
#[derive(Debug, Clone)]
pub enum Sweep {
    Density(Vec<f64>),
    Dimension(Vec<usize>),
    Rows(Vec<usize>),
}

impl Sweep {
    pub fn axis(&self) -> SweepAxis {
        match self {
            Sweep::Density(_) => SweepAxis::Density,
            Sweep::Dimension(_) => SweepAxis::Dimension,
            Sweep::Rows(_) => SweepAxis::Rows,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Sweep::Density(v) => v.len(),
            Sweep::Dimension(v) => v.len(),
            Sweep::Rows(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<(), BenchError> {
        let strictly_increasing = match self {
            Sweep::Density(v) => {
                if v.iter().any(|d| !d.is_finite()) {
                    return Err(BenchError::Argument("density values must be finite".into()));
                }
                !v.is_empty() && v.windows(2).all(|w| w[0] < w[1])
            }
            Sweep::Dimension(v) | Sweep::Rows(v) => {
                !v.is_empty() && v.windows(2).all(|w| w[0] < w[1])
            }
        };
        if !strictly_increasing {
            return Err(BenchError::Argument(
                "sweep values must be non-empty and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Full description of one benchmark sweep.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sweep: Sweep,
    pub fixed_n_rows: usize,
    pub fixed_n_cols: usize,
    pub fixed_density: f64,
    pub kinds: Vec<MappingKind>,
    pub algorithms: Vec<Algorithm>,
    /// Repetitions per grid point; each gets a fresh matrix.
    pub repetitions: usize,
    pub seed: u64,
    /// Untimed expansions per (point, kind, algorithm) before the timed
    /// repetition. Zero by default.
    pub warmup: usize,
    /// Dense input + output buffers above this many bytes skip the point.
    pub dense_cap_bytes: u64,
}

impl BenchConfig {
    /// A config with spec defaults: 20 repetitions, no warm-up, 2 GiB
    /// dense cap, degree-2 polynomial, both algorithms.
    pub fn new(sweep: Sweep) -> Self {
        BenchConfig {
            sweep,
            fixed_n_rows: 100,
            fixed_n_cols: 100,
            fixed_density: 0.1,
            kinds: vec![MappingKind::POLY2],
            algorithms: vec![Algorithm::Sparse, Algorithm::Dense],
            repetitions: 20,
            seed: 0,
            warmup: 0,
            dense_cap_bytes: 2 * 1024 * 1024 * 1024,
        }
    }
}

/// One timed expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub kind: MappingKind,
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub rep: usize,
    pub wall_seconds: f64,
    pub nnz_in: usize,
    pub nnz_out: usize,
    pub product_count: u64,
}

/// A grid point a dense run skipped instead of timing.
#[derive(Debug, Clone)]
pub struct SkippedPoint {
    pub algorithm: Algorithm,
    pub kind: MappingKind,
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedPoint>,
}

#[derive(Debug)]
pub enum BenchError {
    Argument(String),
    Core(CoreError),
    Io(io::Error),
    Parse { line: usize, message: String },
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Argument(msg) => write!(f, "invalid benchmark config: {msg}"),
            BenchError::Core(e) => write!(f, "{e}"),
            BenchError::Io(e) => write!(f, "io error: {e}"),
            BenchError::Parse { line, message } => write!(f, "csv line {line}: {message}"),
        }
    }
}

impl std::error::Error for BenchError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            BenchError::Core(e) => Some(e),
            BenchError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<CoreError> for BenchError {
    fn from(e: CoreError) -> Self {
        BenchError::Core(e)
    }
}

impl From<io::Error> for BenchError {
    fn from(e: io::Error) -> Self {
        BenchError::Io(e)
    }
}

/// Runs the sweep. Record order is grid point, then repetition, then kind,
/// then algorithm.
pub fn run_bench(config: &BenchConfig) -> Result<BenchRun, BenchError> {
    config.sweep.validate()?;
    if config.repetitions < 1 {
        return Err(BenchError::Argument("repetitions must be at least 1".into()));
    }
    let mut run = BenchRun::default();
    for point in 0..config.sweep.len() {
        let (n_rows, n_cols, density) = resolve_point(config, point);
        for rep in 0..config.repetitions {
            let matrix_seed = derive_seed(config.seed, point as u64, rep as u64);
            let m = CsrMatrix::random(n_rows, n_cols, density, matrix_seed)?;
            // Shared across kinds and algorithms; densified lazily so
            // sparse-only sweeps never materialize it.
            let mut dense_input: Option<DenseMatrix> = None;
            for &kind in &config.kinds {
                let spec = ExpansionSpec::degree_only(kind);
                for &algorithm in &config.algorithms {
                    match algorithm {
                        Algorithm::Sparse => {
                            for _ in 0..config.warmup {
                                expand_with_stats(&m, spec)?;
                            }
                            let start = Instant::now();
                            let (out, stats) = expand_with_stats(&m, spec)?;
                            let wall_seconds = start.elapsed().as_secs_f64();
                            run.records.push(BenchRecord {
                                algorithm,
                                kind,
                                n_rows,
                                n_cols,
                                density,
                                rep,
                                wall_seconds,
                                nnz_in: m.nnz(),
                                nnz_out: out.nnz(),
                                product_count: stats.products,
                            });
                        }
                        Algorithm::Dense => {
                            let out_cols = expanded_dim(n_cols, kind)?;
                            if let Some(need) = dense_bytes_needed(n_rows, n_cols, out_cols) {
                                if need > u128::from(config.dense_cap_bytes) {
                                    if rep == 0 {
                                        run.skipped.push(SkippedPoint {
                                            algorithm,
                                            kind,
                                            n_rows,
                                            n_cols,
                                            density,
                                            reason: format!(
                                                "dense buffers need {need} bytes, cap is {}",
                                                config.dense_cap_bytes
                                            ),
                                        });
                                    }
                                    continue;
                                }
                            }
                            let input = match &dense_input {
                                Some(d) => d,
                                None => {
                                    dense_input = Some(m.to_dense()?);
                                    dense_input.as_ref().unwrap()
                                }
                            };
                            for _ in 0..config.warmup {
                                expand_dense(input, spec)?;
                            }
                            let start = Instant::now();
                            let out = expand_dense(input, spec)?;
                            let wall_seconds = start.elapsed().as_secs_f64();
                            let nnz_out = out.entries().iter().filter(|&&v| v != 0.0).count();
                            run.records.push(BenchRecord {
                                algorithm,
                                kind,
                                n_rows,
                                n_cols,
                                density,
                                rep,
                                wall_seconds,
                                nnz_in: m.nnz(),
                                nnz_out,
                                // One entry-production per output cell.
                                product_count: (n_rows as u64) * (out_cols as u64),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(run)
}

fn resolve_point(config: &BenchConfig, point: usize) -> (usize, usize, f64) {
    match &config.sweep {
        Sweep::Density(v) => (config.fixed_n_rows, config.fixed_n_cols, v[point]),
        Sweep::Dimension(v) => (config.fixed_n_rows, v[point], config.fixed_density),
        Sweep::Rows(v) => (v[point], config.fixed_n_cols, config.fixed_density),
    }
}

/// Bytes the dense path must allocate: the densified input plus the output
/// buffer. `None` means the count itself overflows (treated as over any
/// cap by the caller).
fn dense_bytes_needed(n_rows: usize, n_cols: usize, out_cols: usize) -> Option<u128> {
    let cells = (n_rows as u128) * ((n_cols as u128) + (out_cols as u128));
    cells.checked_mul(8)
}

/// Mixes (seed, point, rep) into an independent matrix seed.
fn derive_seed(seed: u64, point: u64, rep: u64) -> u64 {
    let mut state = seed
        ^ point.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ rep.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    // SplitMix64 finalizer for avalanche.
    state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ordinary least-squares slope of `ln(mean wall_seconds)` against
/// `ln(x)`, where `x` is the record's value on `axis`. Records sharing an
/// x value (repetitions) are averaged first. Requires at least 3 distinct
/// positive x values and positive times; filter the records to one
/// (algorithm, kind) before calling.
pub fn fit_loglog_slope(records: &[BenchRecord], axis: SweepAxis) -> Result<f64, BenchError> {
    let mut groups: BTreeMap<u64, (f64, u32)> = BTreeMap::new();
    for r in records {
        let x = match axis {
            SweepAxis::Density => r.density,
            SweepAxis::Dimension => r.n_cols as f64,
            SweepAxis::Rows => r.n_rows as f64,
        };
        if !(x.is_finite() && x > 0.0) {
            return Err(BenchError::Argument(format!(
                "x values must be positive and finite, got {x}"
            )));
        }
        if !(r.wall_seconds.is_finite() && r.wall_seconds > 0.0) {
            return Err(BenchError::Argument(format!(
                "wall_seconds must be positive and finite, got {}",
                r.wall_seconds
            )));
        }
        let slot = groups.entry(x.to_bits()).or_insert((0.0, 0));
        slot.0 += r.wall_seconds;
        slot.1 += 1;
    }
    if groups.len() < 3 {
        return Err(BenchError::Argument(format!(
            "need at least 3 distinct x values, got {}",
            groups.len()
        )));
    }
    let points: Vec<(f64, f64)> = groups
        .iter()
        .map(|(&bits, &(sum, n))| (f64::from_bits(bits).ln(), (sum / n as f64).ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    Ok(sxy / sxx)
}

pub const CSV_HEADER: &str =
    "algorithm,degree,mode,n_rows,n_cols,density,rep,wall_seconds,nnz_in,nnz_out,product_count";

/// Writes records as CSV, one line per record plus the header.
pub fn write_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv_to(records, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writer-generic form of [`write_csv`].
pub fn write_csv_to<W: Write>(records: &[BenchRecord], w: &mut W) -> Result<(), BenchError> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.kind.degree.as_usize(),
            mode_token(r.kind.mode),
            r.n_rows,
            r.n_cols,
            r.density,
            r.rep,
            r.wall_seconds,
            r.nnz_in,
            r.nnz_out,
            r.product_count
        )?;
    }
    Ok(())
}

/// Reads back a CSV produced by [`write_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>, BenchError> {
    read_csv_from(BufReader::new(File::open(path)?))
}

/// Reader-generic form of [`read_csv`].
pub fn read_csv_from<R: BufRead>(reader: R) -> Result<Vec<BenchRecord>, BenchError> {
    let parse_err = |line: usize, message: String| BenchError::Parse { line, message };
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header == CSV_HEADER => {}
        Some((_, Ok(other))) => {
            return Err(parse_err(1, format!("unexpected header \"{other}\"")))
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(parse_err(
                line_no,
                format!("expected 11 fields, got {}", fields.len()),
            ));
        }
        fn field<T: FromStr>(
            text: &str,
            name: &str,
            line_no: usize,
        ) -> Result<T, BenchError> {
            text.parse().map_err(|_| BenchError::Parse {
                line: line_no,
                message: format!("malformed {name} \"{text}\""),
            })
        }
        let algorithm = Algorithm::from_str(fields[0])
            .map_err(|message| parse_err(line_no, message))?;
        let degree = match fields[1] {
            "2" => Degree::Two,
            "3" => Degree::Three,
            other => return Err(parse_err(line_no, format!("unknown degree \"{other}\""))),
        };
        let mode = parse_mode(fields[2]).map_err(|message| parse_err(line_no, message))?;
        records.push(BenchRecord {
            algorithm,
            kind: MappingKind::new(degree, mode),
            n_rows: field(fields[3], "n_rows", line_no)?,
            n_cols: field(fields[4], "n_cols", line_no)?,
            density: field(fields[5], "density", line_no)?,
            rep: field(fields[6], "rep", line_no)?,
            wall_seconds: field(fields[7], "wall_seconds", line_no)?,
            nnz_in: field(fields[8], "nnz_in", line_no)?,
            nnz_out: field(fields[9], "nnz_out", line_no)?,
            product_count: field(fields[10], "product_count", line_no)?,
        });
    }
    Ok(records)
}

pub fn mode_token(mode: Mode) -> &'static str {
    match mode {
        Mode::Polynomial => "poly",
        Mode::Interaction => "inter",
    }
}

pub fn parse_mode(token: &str) -> Result<Mode, String> {
    match token {
        "poly" => Ok(Mode::Polynomial),
        "inter" => Ok(Mode::Interaction),
        other => Err(format!("unknown mode \"{other}\"")),
    }
}
