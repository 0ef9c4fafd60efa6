use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Locality-sensitive hashing for polygonal curves.
#[derive(Debug, Parser)]
#[command(name = "curvehash", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact distance between two curves of a dataset.
    Dist {
        file: PathBuf,
        id1: String,
        id2: String,
        #[arg(long, value_enum, default_value_t = KindArg::Frechet)]
        kind: KindArg,
        /// Width for the anchored and speed constraints.
        #[arg(long)]
        w: Option<usize>,
    },
    /// Builds an index file from a dataset.
    Build {
        file: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Dimension to record when the dataset is empty.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, env = "CURVEHASH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answers every curve of a dataset as a query: `query-id<TAB>match-id|none`.
    Query { index: PathBuf, queries: PathBuf },
    /// Monte-Carlo check of a collision-probability claim; prints a JSON report.
    Probe {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum)]
        bound: BoundArg,
        /// First curve as a JSON array of points, hashed as the input.
        #[arg(long, requires = "q", conflicts_with = "generate")]
        p: Option<String>,
        /// Second curve, hashed as the query.
        #[arg(long, requires = "p")]
        q: Option<String>,
        /// Draw a random pair satisfying the claim's hypothesis instead.
        #[arg(long)]
        generate: bool,
        /// Length of generated curves.
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Dimension of generated curves.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = "CURVEHASH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Writes a planted near-neighbor dataset.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        planted_r: f64,
        #[arg(long)]
        far_cr: f64,
        /// Side of the box vertices are drawn from (default `8 * far-cr`).
        #[arg(long)]
        spread: Option<f64>,
        #[arg(long, env = "CURVEHASH_SEED", default_value_t = 0)]
        seed: u64,
        /// Dataset path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the query curve.
        #[arg(long)]
        query_out: Option<PathBuf>,
    },
    /// Times index construction and queries on a planted instance.
    Bench {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        queries: u64,
        #[arg(long, env = "CURVEHASH_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Frechet,
    Dtw,
    Anchored,
    AnchoredDtw,
    Speed,
    SpeedDtw,
    Continuous1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Basic,
    Constant,
    Tradeoff,
    Anchored,
    Speed,
    Continuous1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Frechet,
    Dtw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Near,
    Far,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Frechet)]
    pub metric: MetricArg,
    /// Query radius.
    #[arg(long)]
    pub r: f64,
    /// Number of blocks of the trade-off scheme.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Constraint width of the anchored and speed schemes.
    #[arg(long, default_value_t = 2)]
    pub w: usize,
    /// Block length of the anchored and speed schemes.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Curve-length bound; defaults to the longest input curve.
    #[arg(long)]
    pub max_len: Option<usize>,
}
