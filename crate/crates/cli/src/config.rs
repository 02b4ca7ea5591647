//! Key-value config files and the parameter flags they provide defaults for.
//!
//! ```text
//! # comment
//! algorithms = sga, pga
//! repeats = 10
//! max_generations = 2000
//! instance = br17.atsp
//! instance = geo53.atsp
//! ```
//!
//! Keys may use `-` or `_`. `instance` may repeat; relative paths are taken
//! relative to the config file. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use mrga_core::{Cost, GaParams, IslandParams, SgaConfig};

pub const SGA_DEFAULT_GENERATIONS: u64 = 10_000;

const KNOWN_KEYS: &[&str] = &[
    "algo",
    "algorithms",
    "instance",
    "islands",
    "pop_size",
    "migration_interval",
    "max_generations",
    "crossover_prob",
    "mutation_prob",
    "similarity_threshold",
    "patience",
    "seed",
    "seeds",
    "repeats",
    "budget",
    "workers",
    "target",
    "registry",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    pub instances: Vec<PathBuf>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, base: PathBuf) -> Result<Self> {
        let mut config = ConfigFile {
            base,
            ..Self::default()
        };
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got {raw:?}", number + 1);
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", number + 1);
            }
            if key == "instance" {
                config.instances.push(config.resolve(&value));
            } else if config.values.insert(key.clone(), value).is_some() {
                bail!("line {}: key {key:?} given twice", number + 1);
            }
        }
        Ok(config)
    }

    pub fn resolve(&self, value: &str) -> PathBuf {
        let path = PathBuf::from(value);
        if path.is_absolute() {
            path
        } else {
            self.base.join(path)
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: invalid value {v:?}: {e}")),
        }
    }

    pub fn get_list<T>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| anyhow::anyhow!("config key {key}: invalid item {s:?}: {e}"))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }
}

/// GA and island parameters shared by `solve` and `bench`.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamFlags {
    /// Number of islands (PGA only, at least 2).
    #[arg(long)]
    pub islands: Option<usize>,
    /// Population size per island (PGA) or of the single population (SGA).
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Generations between migrations (PGA only).
    #[arg(long)]
    pub migration_interval: Option<u64>,
    /// Generation budget; per island for the PGA.
    #[arg(long)]
    pub max_generations: Option<u64>,
    #[arg(long)]
    pub crossover_prob: Option<f64>,
    #[arg(long)]
    pub mutation_prob: Option<f64>,
    /// Parent pairs more similar than this are redrawn.
    #[arg(long)]
    pub similarity_threshold: Option<f64>,
    /// Stop after this many rounds (PGA) or 50-generation checkpoints (SGA)
    /// without improvement; 0 disables.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Stop as soon as a tour this short is found.
    #[arg(long)]
    pub target: Option<Cost>,
    /// Worker threads for the PGA engine; defaults to all cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ParamFlags {
    /// Fills every flag left unset from the config file.
    pub fn merged(&self, config: &ConfigFile) -> Result<Self> {
        Ok(Self {
            islands: self.islands.or(config.get("islands")?),
            pop_size: self.pop_size.or(config.get("pop_size")?),
            migration_interval: self.migration_interval.or(config.get("migration_interval")?),
            max_generations: self.max_generations.or(config.get("max_generations")?),
            crossover_prob: self.crossover_prob.or(config.get("crossover_prob")?),
            mutation_prob: self.mutation_prob.or(config.get("mutation_prob")?),
            similarity_threshold: self.similarity_threshold.or(config.get("similarity_threshold")?),
            patience: self.patience.or(config.get("patience")?),
            target: self.target.or(config.get("target")?),
            workers: self.workers.or(config.get("workers")?),
        })
    }

    fn ga(&self) -> GaParams {
        let d = GaParams::default();
        GaParams {
            population_size: self.pop_size.unwrap_or(d.population_size),
            crossover_prob: self.crossover_prob.unwrap_or(d.crossover_prob),
            mutation_prob: self.mutation_prob.unwrap_or(d.mutation_prob),
            similarity_threshold: self.similarity_threshold.unwrap_or(d.similarity_threshold),
            ..d
        }
    }

    fn patience_or(&self, default: Option<usize>) -> Option<usize> {
        match self.patience {
            Some(0) => None,
            Some(p) => Some(p),
            None => default,
        }
    }

    pub fn sga_config(&self) -> Result<SgaConfig> {
        let d = SgaConfig::default();
        let config = SgaConfig {
            ga: self.ga(),
            max_generations: self.max_generations.unwrap_or(SGA_DEFAULT_GENERATIONS),
            patience: self.patience_or(d.patience),
            target_length: self.target,
            ..d
        };
        config.validate()?;
        Ok(config)
    }

    pub fn island_params(&self) -> Result<IslandParams> {
        let d = IslandParams::default();
        let params = IslandParams {
            num_islands: self.islands.unwrap_or(d.num_islands),
            migration_interval: self.migration_interval.unwrap_or(d.migration_interval),
            ga: self.ga(),
            max_total_generations: self.max_generations.unwrap_or(d.max_total_generations),
            convergence_patience: self.patience_or(d.convergence_patience),
            target_length: self.target,
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_instances() {
        let text = "# suite\nalgorithms = sga, pga\nmax-generations = 200 # short\ninstance = a.atsp\ninstance = /abs/b.atsp\n";
        let c = ConfigFile::parse(text, PathBuf::from("suites")).unwrap();
        assert_eq!(c.get::<u64>("max_generations").unwrap(), Some(200));
        assert_eq!(c.get_list::<String>("algorithms").unwrap().unwrap(), vec!["sga", "pga"]);
        assert_eq!(
            c.instances,
            vec![PathBuf::from("suites/a.atsp"), PathBuf::from("/abs/b.atsp")]
        );
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        assert!(ConfigFile::parse("colour = red\n", PathBuf::new()).is_err());
        assert!(ConfigFile::parse("seed = 1\nseed = 2\n", PathBuf::new()).is_err());
        assert!(ConfigFile::parse("just words\n", PathBuf::new()).is_err());
        let c = ConfigFile::parse("islands = many\n", PathBuf::new()).unwrap();
        assert!(ParamFlags::default().merged(&c).is_err());
    }

    #[test]
    fn flags_override_config() {
        let c = ConfigFile::parse("islands = 4\npop_size = 30\n", PathBuf::new()).unwrap();
        let flags = ParamFlags {
            islands: Some(6),
            ..ParamFlags::default()
        };
        let merged = flags.merged(&c).unwrap();
        assert_eq!(merged.islands, Some(6));
        assert_eq!(merged.pop_size, Some(30));
        let params = merged.island_params().unwrap();
        assert_eq!(params.num_islands, 6);
        assert_eq!(params.ga.population_size, 30);
        assert_eq!(params.max_total_generations, 50_000);
    }

    #[test]
    fn defaults_and_patience() {
        let flags = ParamFlags::default();
        assert_eq!(flags.sga_config().unwrap().max_generations, 10_000);
        assert_eq!(flags.island_params().unwrap().convergence_patience, Some(20));
        let off = ParamFlags {
            patience: Some(0),
            ..ParamFlags::default()
        };
        assert_eq!(off.island_params().unwrap().convergence_patience, None);
        let one_island = ParamFlags {
            islands: Some(1),
            ..ParamFlags::default()
        };
        assert!(one_island.island_params().is_err());
    }
}
