//! Benchmark suites: every (instance, algorithm, seed) cell is one run.
//!
//! `results.csv` columns: instance, n, algo, seed, best, accuracy, seconds,
//! generations, evaluations, stop_reason, error. Failed cells keep their
//! identifying columns and carry the message in `error`.
//!
//! `summary.csv` columns, one row per (instance, algorithm): instance, n,
//! algo, runs, failures, mean_best, min_best, mean_accuracy, mean_seconds.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use mrga_core::{Algorithm, Instance, RunReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigFile, ParamFlags};
use crate::run::{append_report, load_annotated, run_algorithm, summary_line, REPORTS_FILE};

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_FILE: &str = "plot_results.py";
pub const DEFAULT_REPEATS: usize = 10;

/// How the SGA's generation budget relates to the PGA's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    /// Both get `max_generations`; the PGA counts per island.
    Generations,
    /// The SGA gets enough generations to evaluate at least as many tours as
    /// the whole island model.
    Evaluations,
}

impl std::str::FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Budget as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    pub flags: ParamFlags,
    pub registry: Option<PathBuf>,
}

/// Command-line values that take precedence over the suite file.
#[derive(Debug, Clone, Default)]
pub struct SuiteOverrides {
    pub algorithms: Option<Vec<Algorithm>>,
    pub repeats: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub budget: Option<Budget>,
    pub registry: Option<PathBuf>,
    pub instances: Vec<PathBuf>,
    pub flags: ParamFlags,
}

impl Suite {
    pub fn from_config(config: &ConfigFile, over: SuiteOverrides) -> Result<Self> {
        let algorithms = match over.algorithms {
            Some(a) => a,
            None => config
                .get_list("algorithms")?
                .or(config.get_list("algo")?)
                .unwrap_or_else(|| vec![Algorithm::Sga, Algorithm::Pga]),
        };
        let seeds = match over.seeds {
            Some(s) => s,
            None => match (over.repeats, config.get_list("seeds")?) {
                (None, Some(s)) => s,
                (repeats, _) => {
                    let repeats = repeats.or(config.get("repeats")?).unwrap_or(DEFAULT_REPEATS);
                    (1..=repeats as u64).collect()
                }
            },
        };
        let instances = if over.instances.is_empty() {
            config.instances.clone()
        } else {
            over.instances
        };
        let suite = Suite {
            instances,
            algorithms,
            seeds,
            budget: match over.budget {
                Some(b) => b,
                None => config.get("budget")?.unwrap_or(Budget::Generations),
            },
            flags: over.flags.merged(config)?,
            registry: over.registry.or_else(|| config.raw("registry").map(|r| config.resolve(r))),
        };
        if suite.instances.is_empty() {
            bail!("the suite lists no instances");
        }
        if suite.algorithms.is_empty() || suite.seeds.is_empty() {
            bail!("the suite needs at least one algorithm and one seed");
        }
        // Fail on bad parameters before any cell runs.
        if suite.algorithms.contains(&Algorithm::Sga) {
            suite.flags.sga_config()?;
        }
        if suite.algorithms.contains(&Algorithm::Pga) || suite.budget == Budget::Evaluations {
            suite.flags.island_params()?;
        }
        Ok(suite)
    }

    /// Flags for one algorithm, with the SGA budget rescaled when needed.
    pub fn flags_for(&self, algorithm: Algorithm) -> Result<ParamFlags> {
        let mut flags = self.flags.clone();
        if algorithm == Algorithm::Sga && self.budget == Budget::Evaluations {
            flags.max_generations = Some(matching_sga_generations(&self.flags)?);
        }
        Ok(flags)
    }
}

/// Smallest SGA generation count whose evaluations reach the island model's
/// full budget with the same population size.
pub fn matching_sga_generations(flags: &ParamFlags) -> Result<u64> {
    let params = flags.island_params()?;
    let pop = params.ga.population_size as u64;
    let offspring = (params.ga.population_size - params.ga.elite_count) as u64;
    let pga = params.num_islands as u64 * (pop + params.max_total_generations * offspring);
    Ok((pga - pop).div_ceil(offspring.max(1)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance: String,
    pub n: Option<usize>,
    pub algo: Algorithm,
    pub seed: u64,
    pub best: Option<u64>,
    pub accuracy: Option<f64>,
    pub seconds: Option<f64>,
    pub generations: Option<u64>,
    pub evaluations: Option<u64>,
    pub stop_reason: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    pub n: Option<usize>,
    pub algo: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub mean_best: Option<f64>,
    pub min_best: Option<u64>,
    pub mean_accuracy: Option<f64>,
    pub mean_seconds: Option<f64>,
}

pub struct BenchOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub reports: Vec<RunReport>,
}

impl BenchOutcome {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

struct Cell<'a> {
    label: String,
    instance: Result<&'a Instance, String>,
    algorithm: Algorithm,
    seed: u64,
}

/// Runs the suite and writes results, summary, reports and the plot script
/// into `out_dir`.
pub fn run_suite(suite: &Suite, out_dir: &Path, parallel_cells: bool) -> Result<BenchOutcome> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let loaded: Vec<(String, Result<Instance, String>)> = suite
        .instances
        .iter()
        .map(|path| {
            let label = path
                .file_stem()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
            let instance = load_annotated(path, suite.registry.as_deref()).map_err(|e| format!("{e:#}"));
            (label, instance)
        })
        .collect();

    let mut cells = Vec::new();
    for (label, instance) in &loaded {
        for &algorithm in &suite.algorithms {
            for &seed in &suite.seeds {
                cells.push(Cell {
                    label: label.clone(),
                    instance: instance.as_ref().map_err(Clone::clone),
                    algorithm,
                    seed,
                });
            }
        }
    }

    let total = cells.len();
    let run_cell = |(i, cell): (usize, &Cell)| -> (ResultRow, Option<RunReport>) {
        let outcome = cell.instance.clone().and_then(|inst| {
            suite
                .flags_for(cell.algorithm)
                .and_then(|flags| run_algorithm(inst, cell.algorithm, &flags, cell.seed, None))
                .map_err(|e| format!("{e:#}"))
        });
        match &outcome {
            Ok(report) => eprintln!("[{}/{total}] {}", i + 1, summary_line(report)),
            Err(e) => eprintln!("[{}/{total}] {} {} seed={} FAILED: {e}", i + 1, cell.label, cell.algorithm, cell.seed),
        }
        let n = cell.instance.as_ref().ok().map(|inst| inst.dimension());
        match outcome {
            Ok(report) => (
                ResultRow {
                    instance: report.instance.clone(),
                    n,
                    algo: cell.algorithm,
                    seed: cell.seed,
                    best: Some(report.best_length),
                    accuracy: report.accuracy.map(|a| round_to(a, 4)),
                    seconds: Some(round_to(report.wall_seconds, 3)),
                    generations: Some(report.generations),
                    evaluations: Some(report.evaluations),
                    stop_reason: Some(report.stop_reason.to_string()),
                    error: None,
                },
                Some(report),
            ),
            Err(message) => (
                ResultRow {
                    instance: cell
                        .instance
                        .as_ref()
                        .map_or_else(|_| cell.label.clone(), |inst| inst.name().to_string()),
                    n,
                    algo: cell.algorithm,
                    seed: cell.seed,
                    best: None,
                    accuracy: None,
                    seconds: None,
                    generations: None,
                    evaluations: None,
                    stop_reason: None,
                    error: Some(message),
                },
                None,
            ),
        }
    };
    let outcomes: Vec<(ResultRow, Option<RunReport>)> = if parallel_cells {
        cells.par_iter().enumerate().map(run_cell).collect()
    } else {
        cells.iter().enumerate().map(run_cell).collect()
    };

    let (rows, reports): (Vec<ResultRow>, Vec<Option<RunReport>>) = outcomes.into_iter().unzip();
    let reports: Vec<RunReport> = reports.into_iter().flatten().collect();
    let summary = summarize(&rows);

    write_csv(&out_dir.join(RESULTS_FILE), &rows)?;
    write_csv(&out_dir.join(SUMMARY_FILE), &summary)?;
    let reports_path = out_dir.join(REPORTS_FILE);
    if reports_path.exists() {
        fs::remove_file(&reports_path)?;
    }
    for report in &reports {
        append_report(&reports_path, report)?;
    }
    fs::write(out_dir.join(PLOT_FILE), PLOT_SCRIPT)?;
    Ok(BenchOutcome { rows, summary, reports })
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<((String, Algorithm), Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        let key = (row.instance.clone(), row.algo);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|((instance, algo), members)| {
            let ok: Vec<&ResultRow> = members.iter().copied().filter(|r| r.error.is_none()).collect();
            let mean = |values: Vec<f64>| {
                (!values.is_empty()).then(|| round_to(values.iter().sum::<f64>() / values.len() as f64, 4))
            };
            let accuracies: Vec<f64> = ok.iter().filter_map(|r| r.accuracy).collect();
            SummaryRow {
                instance,
                n: members[0].n,
                algo,
                runs: members.len(),
                failures: members.len() - ok.len(),
                mean_best: mean(ok.iter().filter_map(|r| r.best).map(|b| b as f64).collect()),
                min_best: ok.iter().filter_map(|r| r.best).min(),
                mean_accuracy: if accuracies.len() == ok.len() { mean(accuracies) } else { None },
                mean_seconds: mean(ok.iter().filter_map(|r| r.seconds).collect()),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Accuracy and run time per instance from summary.csv (needs matplotlib)."""
import csv
import os
import sys

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "summary.csv")
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))

sizes = {r["instance"]: int(r["n"] or 0) for r in rows}
instances = sorted(sizes, key=lambda name: (sizes[name], name))
algos = sorted({r["algo"] for r in rows})
width = 0.8 / max(len(algos), 1)


def chart(column, ylabel, filename):
    fig, ax = plt.subplots(figsize=(max(6, len(instances) * 1.2), 4))
    for k, algo in enumerate(algos):
        values = []
        for name in instances:
            match = [r for r in rows if r["instance"] == name and r["algo"] == algo and r[column]]
            values.append(float(match[0][column]) if match else 0.0)
        ax.bar([i + k * width for i in range(len(instances))], values, width, label=algo.upper())
    ax.set_xticks([i + width * (len(algos) - 1) / 2 for i in range(len(instances))])
    ax.set_xticklabels(instances, rotation=30, ha="right")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(path), filename), dpi=120)


chart("mean_accuracy", "mean accuracy (%)", "accuracy.png")
chart("mean_seconds", "mean time (s)", "time.png")
"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn row(instance: &str, algo: Algorithm, best: Option<u64>, accuracy: Option<f64>) -> ResultRow {
        ResultRow {
            instance: instance.into(),
            n: Some(5),
            algo,
            seed: 1,
            best,
            accuracy,
            seconds: best.map(|_| 1.0),
            generations: best.map(|_| 10),
            evaluations: best.map(|_| 100),
            stop_reason: best.map(|_| "budget".into()),
            error: best.is_none().then(|| "boom".into()),
        }
    }

    #[test]
    fn summary_statistics() {
        let rows = vec![
            row("a", Algorithm::Sga, Some(10), Some(100.0)),
            row("a", Algorithm::Sga, Some(20), Some(50.0)),
            row("a", Algorithm::Sga, None, None),
            row("a", Algorithm::Pga, Some(12), None),
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algo, Algorithm::Sga);
        assert_eq!((s[0].runs, s[0].failures), (3, 1));
        assert_eq!(s[0].mean_best, Some(15.0));
        assert_eq!(s[0].min_best, Some(10));
        assert_eq!(s[0].mean_accuracy, Some(75.0));
        assert_eq!(s[1].mean_accuracy, None);
        for cell in &s {
            assert!(cell.mean_best.unwrap() >= cell.min_best.unwrap() as f64);
        }
    }

    #[test]
    fn evaluation_budget_covers_the_islands() {
        let flags = ParamFlags {
            max_generations: Some(1000),
            ..ParamFlags::default()
        };
        let g = matching_sga_generations(&flags).unwrap();
        let pga = 10 * (100 + 1000 * 99);
        assert!(100 + g * 99 >= pga);
        assert!(100 + (g - 1) * 99 < pga);
    }
}
