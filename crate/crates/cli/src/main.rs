use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mrga_cli::bench::{run_suite, Budget, Suite, SuiteOverrides};
use mrga_cli::config::{ConfigFile, ParamFlags};
use mrga_cli::run::{exact, solve, summary_line, RegistryCheck, SolveArgs, Solver};
use mrga_core::tsplib::{geometric_asymmetric_instance, random_instance};
use mrga_core::{Algorithm, Instance};

/// Genetic algorithms for the asymmetric TSP: a sequential GA and an island
/// model run as map/reduce jobs.
#[derive(Parser)]
#[command(name = "mrga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and append the report to <out-dir>/reports.jsonl.
    Solve(SolveCmd),
    /// Run every (instance, algorithm, seed) cell of a suite.
    Bench(BenchCmd),
    /// Solve an instance exactly (Held-Karp up to 18 cities).
    Exact(ExactCmd),
    /// Write a synthetic asymmetric instance in TSPLIB format.
    Generate(GenerateCmd),
}

#[derive(Parser)]
struct SolveCmd {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Option<Algorithm>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,
    /// Key-value file supplying defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optima registry; defaults to optima.txt next to the instance.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Keep the PGA's record sets in this (new or empty) directory.
    #[arg(long)]
    store_dir: Option<PathBuf>,
    /// Also write the best tour to <out-dir>/<instance>-<algo>-s<seed>.tour.
    #[arg(long)]
    dump_tour: bool,
    #[command(flatten)]
    params: ParamFlags,
}

#[derive(Parser)]
struct BenchCmd {
    /// Suite file: key = value lines plus one `instance = path` per instance.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instances to add when no suite file lists them.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algo: Option<Vec<Algorithm>>,
    /// Runs per cell, seeded 1..=repeats.
    #[arg(long)]
    repeats: Option<usize>,
    /// Explicit comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    budget: Option<Budget>,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Run cells concurrently; timings become unreliable.
    #[arg(long)]
    parallel_cells: bool,
    #[command(flatten)]
    params: ParamFlags,
}

#[derive(Parser)]
struct ExactCmd {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "held-karp")]
    solver: Solver,
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Record the optimum in the registry.
    #[arg(long)]
    write_registry: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Points in a plane with a random per-direction surcharge.
    Geometric,
    /// Independent uniform weights in 1..=100.
    Uniform,
}

#[derive(Parser)]
struct GenerateCmd {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "geometric")]
    kind: Kind,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Solve(cmd) => cmd_solve(cmd),
        Command::Bench(cmd) => cmd_bench(cmd),
        Command::Exact(cmd) => cmd_exact(cmd),
        Command::Generate(cmd) => cmd_generate(cmd),
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ConfigFile> {
    path.map_or_else(|| Ok(ConfigFile::default()), |p| ConfigFile::load(p))
}

fn cmd_solve(cmd: SolveCmd) -> Result<()> {
    let config = load_config(cmd.config.as_ref())?;
    let algorithm = match cmd.algo {
        Some(a) => a,
        None => config
            .raw("algo")
            .context("--algo is required")?
            .parse()
            .map_err(anyhow::Error::msg)?,
    };
    let instance = match cmd.instance {
        Some(i) => i,
        None => match config.instances.as_slice() {
            [one] => one.clone(),
            [] => bail!("--instance is required"),
            _ => bail!("solve takes one instance but the config lists several"),
        },
    };
    let registry = cmd
        .registry
        .or_else(|| config.raw("registry").map(|r| config.resolve(r)));
    let flags = cmd.params.merged(&config)?;
    let seed = cmd.seed.or(config.get("seed")?).unwrap_or(0);
    let report = solve(&SolveArgs {
        instance: &instance,
        registry: registry.as_deref(),
        algorithm,
        flags: &flags,
        seed,
        out_dir: &cmd.out_dir,
        store_dir: cmd.store_dir.as_deref(),
        dump_tour: cmd.dump_tour,
    })?;
    println!("{}", summary_line(&report));
    Ok(())
}

fn cmd_bench(cmd: BenchCmd) -> Result<()> {
    let config = load_config(cmd.config.as_ref())?;
    let suite = Suite::from_config(
        &config,
        SuiteOverrides {
            algorithms: cmd.algo,
            repeats: cmd.repeats,
            seeds: cmd.seeds,
            budget: cmd.budget,
            registry: cmd.registry,
            instances: cmd.instances,
            flags: cmd.params,
        },
    )?;
    let outcome = run_suite(&suite, &cmd.out_dir, cmd.parallel_cells)?;
    for s in &outcome.summary {
        println!(
            "{:<12} {:>4} {} runs={} failures={} mean_best={} min_best={} mean_accuracy={} mean_seconds={}",
            s.instance,
            s.n.map_or_else(|| "?".into(), |n| n.to_string()),
            s.algo,
            s.runs,
            s.failures,
            fmt_opt(s.mean_best),
            s.min_best.map_or_else(|| "-".into(), |b| b.to_string()),
            fmt_opt(s.mean_accuracy),
            fmt_opt(s.mean_seconds),
        );
    }
    println!("wrote {}", cmd.out_dir.display());
    let failures = outcome.failures();
    if failures > 0 {
        bail!("{failures} of {} runs failed; see results.csv", outcome.rows.len());
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.2}"))
}

fn cmd_exact(cmd: ExactCmd) -> Result<()> {
    let (instance, result, check) = exact(&cmd.instance, cmd.solver, cmd.registry.as_deref(), cmd.write_registry)?;
    let tour: Vec<String> = result.optimum_tour.iter().map(usize::to_string).collect();
    println!("instance {} ({} cities)", instance.name(), instance.dimension());
    println!("optimum {}", result.optimum_length);
    println!("tour {}", tour.join(" "));
    match check {
        RegistryCheck::Missing => println!("registry: no entry"),
        RegistryCheck::Matches => println!("registry: matches"),
        RegistryCheck::Written => println!("registry: updated"),
        RegistryCheck::Differs(v) => bail!(
            "registry lists {} for {} but the exact optimum is {}",
            v,
            instance.name(),
            result.optimum_length
        ),
    }
    Ok(())
}

fn cmd_generate(cmd: GenerateCmd) -> Result<()> {
    let mut instance = match cmd.kind {
        Kind::Geometric => geometric_asymmetric_instance(format!("geo{}", cmd.n), cmd.n, cmd.seed)?,
        Kind::Uniform => random_instance(cmd.n, 1..=100, cmd.seed)?,
    };
    if let Some(name) = cmd.name {
        let rows = instance.rows().map(<[_]>::to_vec).collect();
        instance = Instance::from_rows(name, rows)?;
    }
    std::fs::write(&cmd.out, instance.to_full_matrix())
        .with_context(|| format!("writing {}", cmd.out.display()))?;
    println!("wrote {} ({} cities)", cmd.out.display(), instance.dimension());
    Ok(())
}
