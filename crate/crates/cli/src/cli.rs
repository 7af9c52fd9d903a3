//! Argument definitions and the four subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use twoknn_core::datagen::{read_points, write_points, GenSpec};
use twoknn_core::{Coord, GridIndex, JoinFirst, Rect, RelationId};

use crate::experiments::{run_sweep, write_csv, Settings, Sweep};
use crate::instance::{Fixed, Instance};
use crate::plans::{run_plan, Params, QueryClass};
use crate::timing::median_time;

/// Exit status of a completed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Mismatch,
}

#[derive(Debug, Parser)]
#[command(name = "twoknn", version, about = "Evaluate, compare and time plans for queries with two kNN predicates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic point file.
    Gen(GenArgs),
    /// Run one plan and write its result set.
    Run(RunArgs),
    /// Check that several plans agree on random instances.
    Verify(VerifyArgs),
    /// Time plans over a sweep and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Uniform,
    Clustered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Number of points (uniform).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub per_cluster: Option<usize>,
    /// Cluster radius; defaults to 1/40 of the extent's width.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Extent as `x_min,y_min,x_max,y_max`.
    #[arg(long, value_parser = parse_extent, default_value = "0,0,10000,10000")]
    pub extent: Rect,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Query parameters shared by `run` and `verify`.
#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long, value_enum)]
    pub query: QueryClass,
    #[arg(long)]
    pub kjoin: Option<usize>,
    #[arg(long)]
    pub kselect: Option<usize>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub kab: Option<usize>,
    #[arg(long)]
    pub kcb: Option<usize>,
    #[arg(long)]
    pub kbc: Option<usize>,
    #[arg(long, value_parser = parse_first)]
    pub first: Option<JoinFirst>,
    /// Grid resolution; by default sized for the largest relation.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub plan: String,
    #[arg(long, value_parser = parse_coord)]
    pub focal: Option<Coord>,
    #[arg(long, value_parser = parse_coord)]
    pub focal2: Option<Coord>,
    #[arg(long, value_enum, default_value = "on")]
    pub cache: Toggle,
    #[arg(long)]
    pub rel_a: Option<PathBuf>,
    #[arg(long)]
    pub rel_b: Option<PathBuf>,
    #[arg(long)]
    pub rel_c: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Result file; the summary line goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    /// Comma-separated plan names, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub plans: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub instances: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest relation drawn for an instance.
    #[arg(long, default_value_t = 400)]
    pub max_points: usize,
    /// Directory receiving the shrunk instance on a mismatch.
    #[arg(long, default_value = "mismatch")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Multiplies every relation size of the sweep.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub grid: Option<usize>,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_coord(s: &str) -> Result<Coord, String> {
    match parse_floats(s)?[..] {
        [x, y] => Ok(Coord::new(x, y)),
        _ => Err(format!("expected `X,Y`, got `{s}`")),
    }
}

fn parse_extent(s: &str) -> Result<Rect, String> {
    match parse_floats(s)?[..] {
        [x0, y0, x1, y1] if x0 <= x1 && y0 <= y1 => Ok(Rect::new(x0, y0, x1, y1)),
        _ => Err(format!("expected `x_min,y_min,x_max,y_max` with min <= max, got `{s}`")),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(format!("`{v}` is not a finite number")),
            }
        })
        .collect()
}

fn parse_first(s: &str) -> Result<JoinFirst, String> {
    s.parse()
}

pub fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Verify(args) => verify(args),
        Command::Bench(args) => bench(args),
    }
}

fn gen(args: GenArgs) -> Result<Outcome> {
    let spec = match args.kind {
        Kind::Uniform => {
            let Some(n) = args.n else {
                bail!("--kind uniform needs --n");
            };
            GenSpec::uniform(n, args.extent, args.seed)
        }
        Kind::Clustered => {
            let (Some(clusters), Some(per_cluster)) = (args.clusters, args.per_cluster) else {
                bail!("--kind clustered needs --clusters and --per-cluster");
            };
            let radius = args.radius.unwrap_or(args.extent.width() / 40.0);
            GenSpec::clustered(clusters, per_cluster, radius, args.extent, args.seed)
        }
    };
    let points = spec.generate()?;
    write_points(&args.out, &points).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(Outcome::Success)
}

fn params(q: &QueryArgs, focal: Option<Coord>, focal2: Option<Coord>, cache: bool) -> Result<Params> {
    let d = Params::default();
    let p = Params {
        k_join: q.kjoin.unwrap_or(d.k_join),
        k_select: q.kselect.unwrap_or(d.k_select),
        k1: q.k1.unwrap_or(d.k1),
        k2: q.k2.unwrap_or(d.k2),
        k_ab: q.kab.unwrap_or(d.k_ab),
        k_cb: q.kcb.unwrap_or(d.k_cb),
        k_bc: q.kbc.unwrap_or(d.k_bc),
        focal: focal.unwrap_or(d.focal),
        focal2: focal2.or(focal).unwrap_or(d.focal2),
        first: q.first.unwrap_or(d.first),
        cache,
    };
    for (name, k) in [
        ("--kjoin", p.k_join),
        ("--kselect", p.k_select),
        ("--k1", p.k1),
        ("--k2", p.k2),
        ("--kab", p.k_ab),
        ("--kcb", p.k_cb),
        ("--kbc", p.k_bc),
    ] {
        if k == 0 {
            bail!("{name} must be at least 1");
        }
    }
    if q.grid == Some(0) {
        bail!("--grid must be at least 1");
    }
    Ok(p)
}

fn fixed(q: &QueryArgs, max_points: usize) -> Fixed {
    Fixed {
        k_join: q.kjoin,
        k_select: q.kselect,
        k1: q.k1,
        k2: q.k2,
        k_ab: q.kab,
        k_cb: q.kcb,
        k_bc: q.kbc,
        first: q.first,
        grid: q.grid,
        max_points: Some(max_points),
    }
}

fn load_index(args: &RunArgs) -> Result<GridIndex> {
    let class = args.query.query;
    let paths = [&args.rel_a, &args.rel_b, &args.rel_c];
    let mut relations = Vec::new();
    for (name, path) in class.relations().iter().zip(paths) {
        let Some(path) = path else {
            bail!("{class} needs --rel-{}", name.to_lowercase());
        };
        let points = read_points(path)?;
        relations.push((RelationId::from(*name), points));
    }
    Ok(GridIndex::build_fitted(relations, args.query.grid)?)
}

fn run(args: RunArgs) -> Result<Outcome> {
    let class = args.query.query;
    class.check_plan(&args.plan)?;
    let p = params(&args.query, args.focal, args.focal2, args.cache == Toggle::On)?;
    let index = load_index(&args)?;
    let (median, run) = median_time(args.reps, || run_plan(&index, class, &args.plan, &p));
    let run = run?;

    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::sink()),
    };
    for line in run.result.lines() {
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;

    let s = run.stats;
    println!(
        "plan={} query={} time_s={:.6} cardinality={} neighborhoods={} center_neighborhoods={} points_skipped={} noncontributing_blocks={} chain_neighborhoods={} cache_hits={} locality_blocks={}",
        args.plan,
        class,
        median.as_secs_f64(),
        run.result.len(),
        s.neighborhoods,
        s.center_neighborhoods,
        s.points_skipped,
        s.noncontributing_blocks,
        s.chain_neighborhoods,
        s.cache_hits,
        s.locality_blocks
    );
    Ok(Outcome::Success)
}

fn verify(args: VerifyArgs) -> Result<Outcome> {
    let class = args.query.query;
    if args.plans.len() < 2 {
        bail!("--plans needs at least two plan names");
    }
    for plan in &args.plans {
        class.check_plan(plan)?;
    }
    params(&args.query, None, None, true)?;
    let fixed = fixed(&args.query, args.max_points);
    for i in 0..args.instances {
        let seed = args.seed.wrapping_add(i);
        let instance = Instance::random(class, seed, &fixed);
        if !instance.plans_agree(&args.plans)? {
            let small = instance.shrink(&args.plans)?;
            small.write(&args.out, &args.plans)?;
            println!(
                "mismatch on instance seed {seed}; shrunk instance written to {}",
                args.out.display()
            );
            print_results(&small, &args.plans)?;
            return Ok(Outcome::Mismatch);
        }
    }
    println!(
        "{} plans agree on {} instances of {class}",
        args.plans.len(),
        args.instances
    );
    Ok(Outcome::Success)
}

fn print_results(instance: &Instance, plans: &[String]) -> Result<()> {
    for (plan, result) in plans.iter().zip(instance.evaluate(plans)?) {
        println!("  {plan}: {} tuples [{}]", result.len(), result.lines().join(" "));
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<Outcome> {
    if !(args.scale > 0.0 && args.scale.is_finite()) {
        bail!("--scale must be positive");
    }
    if args.grid == Some(0) {
        bail!("--grid must be at least 1");
    }
    let settings = Settings {
        reps: args.reps.max(3),
        scale: args.scale,
        seed: args.seed,
        grid: args.grid,
    };
    let rows = run_sweep(args.sweep, &settings)?;
    match &args.out {
        Some(path) => write_csv(BufWriter::new(create(path)?), &rows)?,
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(Outcome::Success)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_and_extent_parsing() {
        assert_eq!(parse_coord("1.5, -2").unwrap(), Coord::new(1.5, -2.0));
        assert!(parse_coord("1").is_err());
        assert!(parse_coord("1,nan").is_err());
        assert_eq!(parse_extent("0,0,10,5").unwrap(), Rect::new(0.0, 0.0, 10.0, 5.0));
        assert!(parse_extent("10,0,0,5").is_err());
    }

    #[test]
    fn arguments_parse() {
        Cli::try_parse_from(["twoknn", "gen", "--kind", "uniform", "--n", "5", "--out", "x.csv"]).unwrap();
        let cli = Cli::try_parse_from([
            "twoknn", "verify", "--query", "chained", "--plans", "right-deep,nested-cached",
        ])
        .unwrap();
        let Command::Verify(v) = cli.command else { panic!() };
        assert_eq!(v.plans, vec!["right-deep", "nested-cached"]);
        assert!(Cli::try_parse_from(["twoknn", "run", "--query", "nope", "--plan", "x"]).is_err());
    }
}
