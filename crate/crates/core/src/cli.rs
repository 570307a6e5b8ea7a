//! Command-line interface: `gen`, `census`, `run` and `sweep`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::error::{Error, Result};
use crate::experiment::{
    landscape_census, prepare_landscapes, run_on_landscapes, summarize, sweep, EnsembleSpec,
    SweepAxis, SweepSpec, DEFAULT_LANDSCAPES, DEFAULT_RUNS,
};
use crate::landscape::{NkLandscape, NkParams};
use crate::landscape_file;
use crate::output::{write_census_csv, write_csv, write_json, OutputRow};
use crate::search::DEFAULT_MAX_COST;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "nk-monitor",
    version,
    about = "Monitor-supervised search on NK landscapes"
)]
pub struct Cli {
    /// Worker threads for ensembles (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a landscape file and report its optimum and local maxima.
    Gen(GenArgs),
    /// Count local maxima over a sample of landscapes.
    Census(CensusArgs),
    /// Run one ensemble of searches.
    Run(RunArgs),
    /// Run one ensemble per value of p or l.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    P,
    L,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 100)]
    pub landscapes: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long, default_value_t = 20)]
    pub l: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = DEFAULT_LANDSCAPES)]
    pub landscapes: usize,
    /// Runs per landscape.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,
    /// Master seed for landscapes and runs.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_COST)]
    pub max_cost: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Search a single landscape read from this file instead of generating
    /// `--landscapes` of them.
    #[arg(long, conflicts_with_all = ["n", "k"])]
    pub landscape: Option<PathBuf>,
    #[arg(long, required_unless_present = "landscape")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "landscape")]
    pub k: Option<usize>,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values, e.g. `0,0.1,0.2`.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

/// Parses a comma-separated list of finite numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(Error::InvalidParams("empty value list".into()));
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::InvalidParams(format!("invalid value {tok:?}"))),
            }
        })
        .collect()
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_)
        | Error::LengthMismatch { .. }
        | Error::SiteOutOfRange { .. }
        | Error::TooFewAgents(_)
        | Error::Parse { .. } => EXIT_VALIDATION,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        Error::DegenerateLandscape { .. } | Error::TooManyRegenerations { .. } => EXIT_DEGENERATE,
        Error::ZeroVariance | Error::MissingOptimum | Error::NoCompletedRuns { .. } => EXIT_FAILURE,
    }
}

fn resolve_seed(seed: Option<u64>, err: &mut (dyn Write + Send)) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None => {
            let s: u64 = rand::rng().random();
            writeln!(err, "using --seed {s}")?;
            Ok(s)
        }
    }
}

/// Runs a parsed command line, writing results to `out` and notes to `err`.
pub fn execute(cli: Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::InvalidParams("--threads must be >= 1".into()));
        }
        builder = builder.num_threads(threads);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Io(io::Error::other(e)))?;
    pool.install(|| match cli.command {
        Command::Gen(args) => cmd_gen(args, out, err),
        Command::Census(args) => cmd_census(args, out, err),
        Command::Run(args) => cmd_run(args, out, err),
        Command::Sweep(args) => cmd_sweep(args, out, err),
    })
}

fn cmd_gen(
    args: GenArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let seed = resolve_seed(args.seed, err)?;
    let mut landscape = NkLandscape::generate(NkParams::new(args.n, args.k, seed)?)?;
    let optimum = landscape.find_global_maximum()?;
    let maxima = landscape.count_local_maxima();
    landscape_file::save(&landscape, &args.out)?;
    writeln!(out, "global_maximum {}", optimum.genotype)?;
    writeln!(out, "global_maximum_fitness {:?}", optimum.fitness)?;
    writeln!(out, "local_maxima {maxima}")?;
    Ok(())
}

fn cmd_census(
    args: CensusArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let seed = resolve_seed(args.seed, err)?;
    let census = landscape_census(args.n, args.k, args.landscapes, seed)?;
    write_census_csv(args.n, args.k, &census, out)
}

fn emit(rows: &[OutputRow], args: &EnsembleArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    match &args.out {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            write_rows(rows, args.format, file)
        }
        None => write_rows(rows, args.format, out),
    }
}

fn write_rows<W: Write>(rows: &[OutputRow], format: Format, w: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => write_json(rows, w),
    }
}

fn warn_censored(row: &OutputRow, err: &mut (dyn Write + Send)) -> Result<()> {
    if row.censored > 0 {
        writeln!(
            err,
            "warning: {} of {} runs censored at max_cost (l = {}, p = {}); means cover completed runs only",
            row.censored, row.total_runs, row.l, row.p
        )?;
    }
    Ok(())
}

fn cmd_run(
    args: RunArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let e = &args.ensemble;
    let seed = resolve_seed(e.seed, err)?;
    let (landscapes, n, k) = match &args.landscape {
        Some(path) => {
            let mut landscape = landscape_file::load(path)?;
            landscape.find_global_maximum()?;
            let (n, k) = (landscape.n(), landscape.k());
            (vec![landscape], n, k)
        }
        None => {
            let (n, k) = (args.n.unwrap_or_default(), args.k.unwrap_or_default());
            let spec = EnsembleSpec {
                landscapes: e.landscapes,
                ..EnsembleSpec::new(n, k, e.l, e.p, seed)
            };
            spec.validate()?;
            (prepare_landscapes(n, k, e.landscapes, seed)?, n, k)
        }
    };
    let spec = EnsembleSpec {
        n,
        k,
        landscapes: landscapes.len(),
        runs_per_landscape: e.runs,
        l: e.l,
        p: e.p,
        max_cost: e.max_cost,
        master_seed: seed,
    };
    let outcomes = run_on_landscapes(&landscapes, &spec)?;
    let result = summarize(&outcomes);
    let row = OutputRow::new(&spec, &result);
    warn_censored(&row, err)?;
    emit(&[row], e, out)
}

fn cmd_sweep(
    args: SweepArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let values = parse_values(&args.values)?;
    let e = &args.ensemble;
    let seed = resolve_seed(e.seed, err)?;
    let base = EnsembleSpec {
        n: args.n,
        k: args.k,
        landscapes: e.landscapes,
        runs_per_landscape: e.runs,
        l: e.l,
        p: e.p,
        max_cost: e.max_cost,
        master_seed: seed,
    };
    let spec = SweepSpec {
        axis: match args.axis {
            Axis::P => SweepAxis::P,
            Axis::L => SweepAxis::L,
        },
        values,
        base,
    };
    let rows = sweep(&spec)?
        .iter()
        .map(|(v, result)| OutputRow::new(&spec.point(*v), result))
        .collect::<Vec<_>>();
    for row in &rows {
        warn_censored(row, err)?;
    }
    emit(&rows, e, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0, 0.1,1").unwrap(), vec![0.0, 0.1, 1.0]);
        assert!(parse_values("").is_err());
        assert!(parse_values(" ").is_err());
        assert!(parse_values("0,,1").is_err());
        assert!(parse_values("0,nan").is_err());
        assert!(parse_values("inf").is_err());
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::InvalidParams(String::new())),
            exit_code(&Error::Io(io::Error::other("x"))),
            exit_code(&Error::DegenerateLandscape {
                first: String::new(),
                second: String::new(),
                fitness: 0.5,
            }),
        ];
        assert_eq!(codes, [EXIT_VALIDATION, EXIT_IO, EXIT_DEGENERATE]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
