//! `entropy`: batch front end to entropy-core.
//!
//! Every invocation prints one record (JSON by default, `--format tsv` for
//! key/value lines). Exit status is 0 on success, 2 for usage and validation
//! errors and 3 when a numerical method fails to converge.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "entropy",
    version,
    about = "Entropy estimators, exact oracles and independence tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every randomized step; derived streams are labeled per component.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for internal parallelism. Results do not depend on it.
    #[arg(long, global = true, value_parser = positive_usize)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of a probability vector or joint table.
    Dist(DistArgs),
    /// Estimators on a real-valued series.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Transfer entropy between symbol sequences.
    #[command(subcommand)]
    Transfer(TransferCommand),
    /// Maximum-entropy distributions.
    #[command(subcommand)]
    Maxent(MaxentCommand),
    /// Ordinal tests of the i.i.d. hypothesis.
    #[command(subcommand)]
    Test(TestCommand),
    /// Exact entropies of model systems.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Sample paths of model systems.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Shannon,
    Renyi,
    Tsallis,
    Mutual,
    Huffman,
    Axioms,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Inline probabilities, comma-separated; for `mutual`, an inline table `a,b;c,d`.
    #[arg(long, conflicts_with = "input")]
    pub probs: Option<String>,
    /// File with one probability per line (a whitespace matrix for `mutual`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Measure::Shannon)]
    pub measure: Measure,
    /// Rényi order (≥ 0, `inf` allowed) or Tsallis index (> 0).
    #[arg(long, value_parser = non_negative_f64)]
    pub q: Option<f64>,
    /// Logarithm base: `e`, `2`, `10` or any real > 0 other than 1.
    #[arg(long, default_value = "e", value_parser = log_base)]
    pub base: f64,
    /// Code alphabet size for `huffman`.
    #[arg(long, default_value_t = 2, value_parser = arity)]
    pub arity: usize,
    /// Orders checked by `axioms`, comma-separated.
    #[arg(long, default_value = "0.5,2", value_delimiter = ',', value_parser = positive_f64)]
    pub orders: Vec<f64>,
    /// Random instances generated by `axioms`.
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
}

#[derive(Debug, Args)]
pub struct SeriesInput {
    /// Series file: one value per line, or CSV with `--column`.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV column, by 0-based index or header name.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Naive,
    Sorted,
}

#[derive(Debug, Args)]
pub struct CorrelationArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    /// Embedding length.
    #[arg(long, default_value_t = 2, value_parser = positive_usize)]
    pub k: usize,
    /// Similarity tolerance; defaults to 0.2 × the sample standard deviation.
    #[arg(long, alias = "r", value_parser = positive_f64)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Sorted)]
    pub strategy: StrategyArg,
}

#[derive(Debug, Args)]
pub struct OrdinalArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    /// Pattern order.
    #[arg(long = "L", alias = "order", value_name = "L", default_value_t = 3, value_parser = census_order)]
    pub order: usize,
}

#[derive(Debug, Subcommand)]
pub enum SeriesCommand {
    /// Approximate entropy.
    Apen(CorrelationArgs),
    /// Sample entropy (equivalently the correlation-entropy estimate).
    Sampen(CorrelationArgs),
    /// Permutation entropy.
    Pe(OrdinalArgs),
    /// Conditional entropy of successive ordinal patterns.
    Ce(OrdinalArgs),
    /// Pattern counts and missing patterns.
    Census {
        #[command(flatten)]
        ordinal: OrdinalArgs,
        /// Distance between window starts.
        #[arg(long, default_value_t = 1, value_parser = positive_usize)]
        stride: usize,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Target sequence `X`, one symbol per line.
    #[arg(long)]
    pub x: PathBuf,
    /// Source sequence `Y`, one symbol per line.
    #[arg(long)]
    pub y: PathBuf,
    /// Prediction horizon Λ.
    #[arg(long, default_value_t = 1, value_parser = positive_usize)]
    pub lambda: usize,
    /// Target history length.
    #[arg(long, default_value_t = 1, value_parser = positive_usize)]
    pub n: usize,
    /// Source history length.
    #[arg(long, default_value_t = 1, value_parser = positive_usize)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum TransferCommand {
    /// `T_{Y→X}`.
    Te(PairArgs),
    /// `ΔT_{Y→X} = T_{Y→X} − T_{X→Y}`.
    Delta(PairArgs),
    /// Algebraic transfer entropy of group-valued sequences and its transcript form.
    Algebraic {
        /// `sL:<L>` (symmetric group, elements are Lehmer codes) or `zm:<m>`.
        #[arg(long)]
        group: String,
        /// Target `ξ`, one element per line.
        #[arg(long)]
        xi: PathBuf,
        /// Source `η`, one element per line.
        #[arg(long)]
        eta: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = positive_usize)]
        lambda: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Uniform,
    Exponential,
    Gaussian,
    /// Multivariate Gaussian with covariance `--matrix`.
    GaussianMv,
}

#[derive(Debug, Subcommand)]
pub enum MaxentCommand {
    /// Discrete maxent under moment constraints.
    Solve {
        /// Moment file: support row, feature rows, target row.
        #[arg(long, conflicts_with_all = ["support", "mean"])]
        spec: Option<PathBuf>,
        /// Inline support points, with `--mean` as the only constraint.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            requires = "mean"
        )]
        support: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        mean: Option<f64>,
        #[arg(long, default_value_t = 1e-10, value_parser = positive_f64)]
        tol: f64,
        #[arg(long, default_value_t = 500, value_parser = positive_usize)]
        max_iter: usize,
    },
    /// Gibbs distribution `∝ e^{−βε}`.
    Gibbs {
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        energies: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        beta: f64,
    },
    /// Tsallis maxent distribution.
    Tsallis {
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        energies: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        beta: f64,
        #[arg(long, value_parser = positive_f64)]
        q: f64,
    },
    /// Closed-form continuous maxent densities.
    ClosedForm {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        b: Option<f64>,
        /// Exponential mean.
        #[arg(long, value_parser = positive_f64)]
        mean: Option<f64>,
        #[arg(long, allow_negative_numbers = true, value_parser = finite_f64)]
        m1: Option<f64>,
        #[arg(long, value_parser = non_negative_f64)]
        m2: Option<f64>,
        /// Covariance matrix, inline `a,b;c,d`.
        #[arg(long)]
        matrix: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(long = "L", alias = "order", value_name = "L", default_value_t = 3, value_parser = census_order)]
    pub order: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05, value_parser = open_unit)]
    pub alpha: f64,
}

#[derive(Debug, Subcommand)]
pub enum TestCommand {
    /// `G(L)` permutation-entropy test.
    G(ChiArgs),
    /// Chi-square test on disjoint windows.
    Chi2(ChiArgs),
    /// Missing-pattern test against shuffled surrogates.
    Surrogate {
        #[command(flatten)]
        series: SeriesInput,
        #[arg(long = "L", alias = "order", value_name = "L", default_value_t = 4, value_parser = census_order)]
        order: usize,
        #[arg(long, default_value_t = 99, value_parser = positive_usize)]
        surrogates: usize,
    },
}

#[derive(Debug, Args)]
pub struct MatrixArg {
    /// Inline matrix `r1c1,r1c2;r2c1,…`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub matrix: Option<String>,
    /// Matrix file with whitespace-separated rows.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Logistic,
    Tent,
    Doubling,
    Piecewise,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long, value_enum, default_value_t = MapKind::Logistic)]
    pub map: MapKind,
    /// Logistic parameter.
    #[arg(long, default_value_t = 4.0, value_parser = positive_f64)]
    pub a: f64,
    /// Piecewise-linear knots `x0,y0;x1,y1;…`.
    #[arg(long)]
    pub knots: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Entropy of a Bernoulli shift.
    Bernoulli {
        #[arg(long)]
        probs: String,
    },
    /// Entropy rate of a Markov shift given its transition matrix.
    Markov(MatrixArg),
    /// Topological entropy of a subshift of finite type.
    Sft(MatrixArg),
    /// Parry measure of an irreducible 0/1 matrix.
    Parry(MatrixArg),
    /// Entropy of a toral automorphism given its integer matrix.
    Toral(MatrixArg),
    /// Lap-number growth of an interval map.
    Lap {
        #[command(flatten)]
        map: MapArgs,
        /// Largest iterate.
        #[arg(long, default_value_t = 12, value_parser = positive_usize)]
        n: usize,
    },
    /// Lyapunov exponent of an interval map along an orbit.
    Lyapunov {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0.2718, value_parser = unit_interval)]
        x0: f64,
        #[arg(long, default_value_t = 100_000, value_parser = positive_usize)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// A stationary Markov chain.
    Markov {
        #[command(flatten)]
        matrix: MatrixArg,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
    },
    /// An orbit of an interval map.
    Map {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0.2718, value_parser = unit_interval)]
        x0: f64,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
    },
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| e.to_string()),
    }
}

fn finite_f64(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if !v.is_finite() {
        return Err(format!("must be finite, got {v}"));
    }
    Ok(v)
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v <= 0.0 {
        return Err(format!("must be > 0, got {v}"));
    }
    Ok(v)
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if !(v >= 0.0) {
        return Err(format!("must be ≥ 0, got {v}"));
    }
    Ok(v)
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(format!("must lie in (0, 1), got {v}"));
    }
    Ok(v)
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn log_base(s: &str) -> Result<f64, String> {
    let v = match s.trim() {
        "e" | "nat" | "nats" => std::f64::consts::E,
        "bits" => 2.0,
        t => positive_f64(t)?,
    };
    if v == 1.0 {
        return Err("base 1 is not a logarithm base".into());
    }
    Ok(v)
}

fn positive_usize(s: &str) -> Result<usize, String> {
    let v: usize = s
        .trim()
        .parse()
        .map_err(|e: std::num::ParseIntError| e.to_string())?;
    if v == 0 {
        return Err("must be ≥ 1".into());
    }
    Ok(v)
}

fn arity(s: &str) -> Result<usize, String> {
    let v = positive_usize(s)?;
    if v < 2 {
        return Err("code alphabet needs at least 2 letters".into());
    }
    Ok(v)
}

fn census_order(s: &str) -> Result<usize, String> {
    let v = positive_usize(s)?;
    if !(2..=entropy_core::ordinal::MAX_CENSUS_ORDER).contains(&v) {
        return Err(format!(
            "pattern order must lie in 2..={}, got {v}",
            entropy_core::ordinal::MAX_CENSUS_ORDER
        ));
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(record) => {
            print!("{}", record.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
