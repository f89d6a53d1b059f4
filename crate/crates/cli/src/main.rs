use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use poscomm_core::band::band_decomposition;
use poscomm_core::certificate::CommutatorCertificate;
use poscomm_core::io::{matrix_to_json, parse_matrix};
use poscomm_core::matrix::nilpotency_index;
use poscomm_core::nilpotent::{construct_central_nilpotent, construct_jordan};
use poscomm_core::norms::Exponent;
use poscomm_core::pelczynski::{
    block_operator_from_json, end_to_end_value, lp_embedding, EmbeddingPair, EmbeddingValue, EpsilonSchedule,
};
use poscomm_core::quasi::{construct_diagonal_quasi, shift_growth_table, Weights};
use poscomm_core::random;
use poscomm_core::verify::verify_certificate;
use poscomm_core::{Error, MatrixValue, Rational};

const DEFAULT_MAX_DIM: usize = 512;

#[derive(Parser)]
#[command(name = "poscomm", version, about = "Write positive matrices as commutators of positive matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band decomposition of a positive nilpotent matrix.
    Decompose(DecomposeArgs),
    /// Build and self-check a commutator certificate.
    Construct(ConstructArgs),
    /// Re-check a stored certificate from its matrices alone.
    Verify(VerifyArgs),
    #[command(subcommand)]
    Demo(Demo),
    /// Discretized embedding pair for l^p_n inside L^p[0, 1].
    Embed(EmbedArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    CentralNilpotent,
    Jordan,
    DiagonalQuasi,
    Pelczynski,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Super-diagonal index for the Jordan method.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// JSON weights file `{"d": [...], "order": [...]}`.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// `auto` for the coordinate pair, or a JSON file `{"S": .., "T": ..}`.
    #[arg(long, default_value = "auto")]
    embedding: String,
    #[arg(long, default_value = "pow2")]
    eps: String,
    /// Overrides the float tolerance used by the self-check.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Demo {
    /// Growth table of factorizations of a truncated weighted shift (CSV).
    WeightedShift {
        /// `harmonic` or a JSON weights file `{"d": [...]}`.
        #[arg(long, default_value = "harmonic")]
        weights: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// A seeded random positive nilpotent matrix.
    RandomNilpotent {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: String,
    #[arg(long)]
    grid: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 1,
            Error::Verification(_) | Error::Internal(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Outcome = Result<(), Failure>;

fn max_dim() -> Result<usize, Failure> {
    match std::env::var("POSCOMM_MAX_DIM") {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(v) => v.trim().parse().map_err(|_| parse_failure(format!("POSCOMM_MAX_DIM must be an integer, got {v:?}"))),
    }
}

fn check_dim(what: &str, n: usize) -> Outcome {
    let cap = max_dim()?;
    if n > cap {
        return Err(Failure { code: 2, message: format!("{what} {n} exceeds POSCOMM_MAX_DIM = {cap}") });
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| parse_failure(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<MatrixValue, Failure> {
    let m = parse_matrix(&read(path)?)?;
    let (r, c) = m.shape();
    check_dim("matrix dimension", r.max(c))?;
    Ok(m)
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure { code: 2, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure { code: 2, message: e.to_string() })
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn decompose(args: DecomposeArgs) -> Outcome {
    let c = read_matrix(&args.input)?;
    let (d, index) = match &c {
        MatrixValue::Exact(m) => (band_decomposition(m)?, nilpotency_index(m)?),
        MatrixValue::Float(m) => (band_decomposition(m)?, nilpotency_index(m)?),
    };
    let v = json!({
        "parts": d.parts,
        "permutation": d.permutation,
        "block_sizes": d.block_sizes(),
        "nilpotency_index": index,
    });
    emit(args.output.as_deref(), &pretty(&v))
}

fn build(args: &ConstructArgs) -> Result<CommutatorCertificate, Failure> {
    match args.method {
        MethodArg::CentralNilpotent => Ok(match read_matrix(&args.input)? {
            MatrixValue::Exact(m) => construct_central_nilpotent(&m)?,
            MatrixValue::Float(m) => construct_central_nilpotent(&m)?,
        }),
        MethodArg::Jordan => Ok(match read_matrix(&args.input)? {
            MatrixValue::Exact(m) => construct_jordan(&m, args.k)?,
            MatrixValue::Float(m) => construct_jordan(&m, args.k)?,
        }),
        MethodArg::DiagonalQuasi => {
            let weights = match &args.weights {
                Some(path) => Weights::from_json(&read_json(path)?)?,
                None => Weights::RowRootSums,
            };
            Ok(match read_matrix(&args.input)? {
                MatrixValue::Exact(m) => construct_diagonal_quasi(&m, &weights)?.0,
                MatrixValue::Float(m) => construct_diagonal_quasi(&m, &weights)?.0,
            })
        }
        MethodArg::Pelczynski => {
            let c = block_operator_from_json(&read_json(&args.input)?)?;
            let part = c.partition();
            check_dim("block operator dimension", part.dim())?;
            let pair = if args.embedding == "auto" {
                EmbeddingValue::Exact(EmbeddingPair::coordinate(part.y_dim, part.x_dim)?)
            } else {
                EmbeddingValue::from_json(&read_json(Path::new(&args.embedding))?)?
            };
            let schedule: EpsilonSchedule = args.eps.parse()?;
            Ok(end_to_end_value(&c, &pair, &schedule)?)
        }
    }
}

fn construct(args: ConstructArgs) -> Outcome {
    let cert = build(&args)?;
    emit(args.output.as_deref(), &cert.to_json())?;
    let report = verify_certificate(&cert, args.tolerance)?;
    if !report.ok {
        return Err(rejection(&report));
    }
    Ok(())
}

fn rejection(report: &poscomm_core::verify::VerifyReport) -> Failure {
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let mut message = format!("certificate rejected: failed {}", failed.join(", "));
    if let Some((i, j)) = report.offending {
        message.push_str(&format!("; offending entry ({i}, {j})"));
    }
    Failure { code: 3, message }
}

fn verify(args: VerifyArgs) -> Outcome {
    let text = read(&args.input)?;
    let cert: CommutatorCertificate =
        serde_json::from_str(&text).map_err(|e| parse_failure(format!("{}: {e}", args.input.display())))?;
    check_dim("certificate dimension", cert.a.shape().0)?;
    let report = verify_certificate(&cert, args.tolerance)?;
    let v = serde_json::to_value(&report).expect("reports serialize");
    emit(args.output.as_deref(), &pretty(&v))?;
    if !report.ok {
        return Err(rejection(&report));
    }
    Ok(())
}

/// `2, 4, 8, …` below `n`, then `n` itself.
fn doubling_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut s = 2;
    while s < n {
        sizes.push(s);
        s *= 2;
    }
    sizes.push(n);
    sizes
}

fn demo(d: Demo) -> Outcome {
    match d {
        Demo::WeightedShift { weights, n, output } => {
            check_dim("shift size", n)?;
            if n < 2 {
                return Err(Error::InvalidParameter(format!("a weighted shift needs N >= 2, got {n}")).into());
            }
            let w: Vec<Rational> = if weights == "harmonic" {
                (1..n).map(|i| Rational::new(1.into(), (i as u64).into())).collect()
            } else {
                match Weights::from_json(&read_json(Path::new(&weights))?)? {
                    Weights::Custom { d, .. } => d,
                    Weights::RowRootSums => unreachable!("from_json always yields custom weights"),
                }
            };
            let rows = shift_growth_table(&w, &doubling_sizes(n))?;
            let mut csv = String::from("n,sum_w,norm_product,norm_c_inf\n");
            for r in rows {
                csv.push_str(&format!("{},{:.12},{:.12},{:.12}\n", r.n, r.sum_w, r.norm_product, r.norm_c_inf));
            }
            emit(output.as_deref(), &csv)
        }
        Demo::RandomNilpotent { n, seed, density, output } => {
            check_dim("matrix dimension", n)?;
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidParameter(format!("density must lie in [0, 1], got {density}")).into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random::nilpotent(&mut rng, n, density);
            emit(output.as_deref(), &pretty(&matrix_to_json(&MatrixValue::Exact(m))))
        }
    }
}

fn embed(args: EmbedArgs) -> Outcome {
    check_dim("grid size", args.grid)?;
    let p: Exponent = args.p.parse()?;
    let e = lp_embedding(args.n, p, args.grid)?;
    let v = json!({
        "n": args.n,
        "p": p,
        "grid": args.grid,
        "exact": e.exact,
        "ts_deviation": e.ts_deviation,
        "column_norms": e.column_norms,
        "pair": e.pair.to_json(),
    });
    emit(args.output.as_deref(), &pretty(&v))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Demo(d) => demo(d),
        Command::Embed(a) => embed(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("poscomm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
