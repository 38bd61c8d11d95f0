use std::fs::File;
use std::io::{self, BufReader};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bayestree::{BayesTree, Dataset, Error, ModelParams, MomentSpec, ReferenceDistribution, TreeSkeleton};
use rayon::prelude::*;

use crate::args::{Command, Format, Options};
use crate::report::*;

pub const DEPTH_CAP_VAR: &str = "BAYESTREE_DEPTH_CAP";

/// Rendered output and whether it contains a divergent value.
pub struct Outcome {
    pub text: String,
    pub divergent: bool,
}

fn engine(opts: &Options) -> Result<BayesTree> {
    let params = ModelParams::new(opts.s, opts.alpha)?;
    let mut engine = BayesTree::new(params).dim_max(opts.dim_max)?.min_depth(opts.min_depth);
    if let Ok(raw) = std::env::var(DEPTH_CAP_VAR) {
        let cap: u32 = raw.trim().parse().with_context(|| format!("{DEPTH_CAP_VAR}={raw:?} is not a depth"))?;
        engine = engine.depth_cap(cap);
    }
    Ok(engine)
}

fn load_data(opts: &Options) -> Result<Dataset> {
    match (&opts.data, opts.dist, opts.n) {
        (Some(path), _, _) => {
            let data = if path.as_os_str() == "-" {
                Dataset::load(io::stdin().lock(), opts.compactify)
            } else {
                let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                Dataset::load(BufReader::new(file), opts.compactify)
            };
            data.with_context(|| format!("reading {}", path.display()))
        }
        (None, Some(dist), Some(n)) => Ok(Dataset::new(dist.sample(n, opts.seed))?),
        (None, Some(_), None) => bail!("--dist needs a sample size --n"),
        (None, None, Some(_)) => bail!("--n needs a distribution --dist"),
        (None, None, None) => bail!("no input: give --data FILE or --dist NAME --n N"),
    }
}

fn table<R: Row>(rows: &[R], format: Format) -> Result<Outcome> {
    let divergent = rows.iter().any(Row::is_divergent);
    let text = match format {
        Format::Json => json(rows),
        Format::Csv => csv_table(rows),
        Format::Text => bail!("--format text is only available for skeleton"),
    };
    Ok(Outcome { text, divergent })
}

pub fn run(command: &Command, opts: &Options) -> Result<Outcome> {
    match command {
        Command::Evidence { x } => evidence(opts, *x),
        Command::Density => density(opts),
        Command::Moments { powers } => {
            let index = engine(opts)?.build_index(&load_data(opts)?)?;
            let rows = powers
                .iter()
                .map(|&k| Ok(MomentRow { k, moment: index.moment(MomentSpec::Power(k))? }))
                .collect::<Result<Vec<_>>>()?;
            table(&rows, opts.format)
        }
        Command::Cdf { points } => {
            let index = engine(opts)?.build_index(&load_data(opts)?)?;
            let rows = points.iter().map(|&a| Ok(CdfRow { a, cdf: index.cdf(a)? })).collect::<Result<Vec<_>>>()?;
            table(&rows, opts.format)
        }
        Command::Skeleton { max_depth } => {
            let index = engine(opts)?.build_index(&load_data(opts)?)?;
            let tree = index.map_skeleton(*max_depth);
            let divergent = index.log_evidence().is_divergent();
            match opts.format {
                Format::Text => Ok(Outcome { text: tree.render(), divergent }),
                Format::Json => Ok(Outcome { text: json(&tree), divergent }),
                Format::Csv => {
                    let mut rows = Vec::new();
                    flatten(&tree, &mut rows);
                    Ok(Outcome { text: csv_table(&rows), divergent })
                }
            }
        }
        Command::Sample => {
            let (Some(dist), Some(n)) = (opts.dist, opts.n) else {
                bail!("sample needs --dist NAME and --n N");
            };
            let mut text = String::new();
            for x in dist.sample(n, opts.seed) {
                text.push_str(&format!("{x}\n"));
            }
            Ok(Outcome { text, divergent: false })
        }
        Command::Bench { sizes } => bench(opts, sizes),
    }
}

fn flatten(tree: &TreeSkeleton, rows: &mut Vec<SkeletonRow>) {
    let node = tree.node();
    let kind = match tree {
        TreeSkeleton::Leaf(_) => "leaf",
        TreeSkeleton::Split { .. } => "split",
        TreeSkeleton::Truncated(_) => "truncated",
    };
    rows.push(SkeletonRow { address: node.address.to_string(), kind, count: node.count, split_prob: node.split_prob });
    if let TreeSkeleton::Split { left, right, .. } = tree {
        flatten(left, rows);
        flatten(right, rows);
    }
}

fn evidence(opts: &Options, x: Option<f64>) -> Result<Outcome> {
    let r = engine(opts)?.evaluate(&load_data(opts)?, x)?;
    let report = EvidenceReport {
        divergent: r.log_evidence.is_divergent(),
        log_evidence: r.log_evidence,
        split_prob_root: r.split_prob_root,
        height_at_x: r.height_at_x,
        avg_height: r.avg_height,
        dim_dist: r.dim_dist,
        dim_tail: r.dim_tail,
        recursion_count: r.recursion_count,
        divergence_class: r.divergence_class.heavy_points,
    };
    let text = match opts.format {
        Format::Json => json(&report),
        Format::Csv => csv_table(std::slice::from_ref(&report)),
        Format::Text => bail!("--format text is only available for skeleton"),
    };
    Ok(Outcome { text, divergent: report.divergent })
}

fn density(opts: &Options) -> Result<Outcome> {
    let grid = bayestree::midpoint_grid(opts.grid)?;
    let index = engine(opts)?.build_index(&load_data(opts)?)?;
    let rows = grid
        .par_iter()
        .map(|&x| {
            let density = index.density(x)?;
            if density.is_divergent() {
                return Err(Error::DivergentGridPoint(x));
            }
            Ok(DensityRow { x, density, variance: index.variance(x)?, height: index.height_at(x)? })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    table(&rows, opts.format)
}

fn bench(opts: &Options, sizes: &[usize]) -> Result<Outcome> {
    let dist = opts.dist.unwrap_or(ReferenceDistribution::Linear);
    let engine = engine(opts)?;
    let mut rows: Vec<BenchRow> = Vec::new();
    for &n in sizes {
        let data = Dataset::new(dist.sample(n, opts.seed))?;
        let start = Instant::now();
        let r = engine.evaluate(&data, None)?;
        let seconds = start.elapsed().as_secs_f64();
        let count_ratio = rows.last().map(|prev| r.recursion_count as f64 / prev.recursion_count as f64);
        rows.push(BenchRow { n, seconds, recursion_count: r.recursion_count, count_ratio });
    }
    table(&rows, opts.format)
}
