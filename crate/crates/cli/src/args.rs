use std::path::PathBuf;

use bayestree::{Compactify, ReferenceDistribution, DEFAULT_DIM_MAX, DEFAULT_SKELETON_DEPTH};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bayestree", version, about = "Exact Bayesian density estimation on infinite dyadic trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evidence, split probability, tree heights and model dimension.
    Evidence {
        /// Also report the expected height of the leaf containing this point.
        #[arg(long)]
        x: Option<f64>,
    },
    /// Predictive density, its posterior variance and the expected leaf
    /// height on a midpoint grid.
    Density,
    /// Posterior means of the power moments E[X^k].
    Moments {
        #[arg(long = "k", value_delimiter = ',', default_value = "1")]
        powers: Vec<u32>,
    },
    /// Posterior mean of the cdf at the given points.
    Cdf {
        #[arg(long = "a", value_delimiter = ',', required = true)]
        points: Vec<f64>,
    },
    /// Most probable partition tree.
    Skeleton {
        #[arg(long, default_value_t = DEFAULT_SKELETON_DEPTH)]
        max_depth: u32,
    },
    /// Draw a sample from a reference density in the dataset text format.
    Sample,
    /// Time full evaluation over a range of sample sizes.
    Bench {
        #[arg(long = "n-list", value_delimiter = ',', default_value = "10000,20000,40000,80000")]
        sizes: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Indented tree; skeleton only.
    Text,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Prior split probability.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub s: f64,

    /// Beta concentration of the branching probabilities.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,

    /// Number of dimension probabilities reported.
    #[arg(long, global = true, default_value_t = DEFAULT_DIM_MAX)]
    pub dim_max: usize,

    /// Number of midpoint grid cells for `density`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub grid: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Reference density to sample the data from.
    #[arg(long, global = true, value_parser = parse_dist, conflicts_with = "data")]
    pub dist: Option<ReferenceDistribution>,

    /// Sample size when sampling.
    #[arg(long, global = true, conflicts_with = "data")]
    pub n: Option<usize>,

    /// Dataset file, one value per line; `-` reads standard input.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Force recursion to at least this depth (results are unaffected).
    #[arg(long, global = true, default_value_t = 0)]
    pub min_depth: u32,

    /// Map unbounded input values into [0, 1).
    #[arg(long, global = true, value_parser = parse_compactify)]
    pub compactify: Option<Compactify>,
}

fn parse_dist(s: &str) -> Result<ReferenceDistribution, String> {
    s.parse().map_err(|e: bayestree::Error| e.to_string())
}

fn parse_compactify(s: &str) -> Result<Compactify, String> {
    s.parse()
}
