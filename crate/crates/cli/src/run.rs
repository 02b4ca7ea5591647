use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use mrga_core::engine::{Engine, RecordStore};
use mrga_core::island::run_pga_on;
use mrga_core::oracle::{brute_force, held_karp};
use mrga_core::tsplib::load_instance;
use mrga_core::{ga, Algorithm, ExactResult, Instance, OptimaRegistry, RunReport};

use crate::config::ParamFlags;

pub const REPORTS_FILE: &str = "reports.jsonl";
pub const REGISTRY_FILE: &str = "optima.txt";

/// `optima.txt` next to the instance, used when no registry is given.
pub fn default_registry(instance: &Path) -> PathBuf {
    instance
        .parent()
        .map(|dir| dir.join(REGISTRY_FILE))
        .unwrap_or_else(|| PathBuf::from(REGISTRY_FILE))
}

/// Loads an instance and attaches its optimum from the registry, if listed.
pub fn load_annotated(path: &Path, registry: Option<&Path>) -> Result<Instance> {
    let mut instance =
        load_instance(path).with_context(|| format!("loading instance {}", path.display()))?;
    let registry_path = registry.map(Path::to_path_buf).unwrap_or_else(|| default_registry(path));
    if registry_path.is_file() {
        OptimaRegistry::load(&registry_path)
            .with_context(|| format!("reading registry {}", registry_path.display()))?
            .annotate(&mut instance);
    } else if registry.is_some() {
        bail!("registry {} not found", registry_path.display());
    }
    Ok(instance)
}

/// Runs one algorithm. With `store_dir` the PGA keeps its record sets on disk.
pub fn run_algorithm(
    instance: &Instance,
    algorithm: Algorithm,
    flags: &ParamFlags,
    seed: u64,
    store_dir: Option<&Path>,
) -> Result<RunReport> {
    match algorithm {
        Algorithm::Sga => Ok(ga::run_sga(instance, &flags.sga_config()?, seed)?),
        Algorithm::Pga => {
            let params = flags.island_params()?;
            let store = match store_dir {
                Some(dir) => {
                    if dir.exists() && fs::read_dir(dir)?.next().is_some() {
                        bail!("store directory {} is not empty", dir.display());
                    }
                    RecordStore::directory(dir)?
                }
                None => RecordStore::in_memory(),
            };
            let engine = Engine::new(Arc::new(store), flags.workers)?;
            Ok(run_pga_on(&engine, instance, &params, seed)?.report)
        }
    }
}

pub fn append_report(path: &Path, report: &RunReport) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    writeln!(file, "{}", serde_json::to_string(report)?)?;
    Ok(())
}

pub fn read_reports(path: &Path) -> Result<Vec<RunReport>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}: record {}", path.display(), i + 1)))
        .collect()
}

pub fn summary_line(report: &RunReport) -> String {
    let accuracy = report
        .accuracy
        .map_or_else(|| "n/a".to_string(), |a| format!("{a:.2}%"));
    format!(
        "{} {} seed={} best={} accuracy={} generations={} stop={} seconds={:.3}",
        report.instance,
        report.algorithm,
        report.seed,
        report.best_length,
        accuracy,
        report.generations,
        report.stop_reason,
        report.wall_seconds
    )
}

pub struct SolveArgs<'a> {
    pub instance: &'a Path,
    pub registry: Option<&'a Path>,
    pub algorithm: Algorithm,
    pub flags: &'a ParamFlags,
    pub seed: u64,
    pub out_dir: &'a Path,
    pub store_dir: Option<&'a Path>,
    pub dump_tour: bool,
}

pub fn solve(args: &SolveArgs) -> Result<RunReport> {
    let instance = load_annotated(args.instance, args.registry)?;
    let report = run_algorithm(&instance, args.algorithm, args.flags, args.seed, args.store_dir)?;
    fs::create_dir_all(args.out_dir)?;
    append_report(&args.out_dir.join(REPORTS_FILE), &report)?;
    if args.dump_tour {
        let name = format!("{}-{}-s{}.tour", report.instance, report.algorithm, report.seed);
        let tour: Vec<String> = report.best_tour.iter().map(usize::to_string).collect();
        fs::write(
            args.out_dir.join(name),
            format!("{}\n{}\n", report.best_length, tour.join(" ")),
        )?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Solver {
    HeldKarp,
    BruteForce,
}

#[derive(Debug)]
pub enum RegistryCheck {
    Missing,
    Matches,
    Differs(mrga_core::Cost),
    Written,
}

pub fn exact(
    instance_path: &Path,
    solver: Solver,
    registry: Option<&Path>,
    write_registry: bool,
) -> Result<(Instance, ExactResult, RegistryCheck)> {
    let instance = load_instance(instance_path)
        .with_context(|| format!("loading instance {}", instance_path.display()))?;
    let result = match solver {
        Solver::HeldKarp => held_karp(&instance)?,
        Solver::BruteForce => brute_force(&instance)?,
    };
    let registry_path = registry
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_registry(instance_path));
    let known = if registry_path.is_file() {
        OptimaRegistry::load(&registry_path)?.get(instance.name())
    } else {
        None
    };
    let check = if write_registry {
        OptimaRegistry::upsert_file(&registry_path, instance.name(), result.optimum_length)?;
        RegistryCheck::Written
    } else {
        match known {
            None => RegistryCheck::Missing,
            Some(v) if v == result.optimum_length => RegistryCheck::Matches,
            Some(v) => RegistryCheck::Differs(v),
        }
    };
    Ok((instance, result, check))
}
