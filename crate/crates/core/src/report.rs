use serde::{Deserialize, Serialize};

use crate::convergence::StopReason;
use crate::ga::SgaConfig;
use crate::island::{IslandParams, RoundSummary};
use crate::tsplib::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sga,
    Pga,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Sga => "sga",
            Algorithm::Pga => "pga",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sga" => Ok(Algorithm::Sga),
            "pga" => Ok(Algorithm::Pga),
            other => Err(format!("unknown algorithm {other:?} (expected sga or pga)")),
        }
    }
}

/// Parameters a run was started with, enough to reproduce it with its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParamsSnapshot {
    Sga(SgaConfig),
    Pga(IslandParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub instance: String,
    pub dimension: usize,
    pub seed: u64,
    pub params: ParamsSnapshot,
    pub best_length: Cost,
    pub best_tour: Vec<usize>,
    /// Best length at the start and after every generation (SGA) or every
    /// round (PGA).
    pub trajectory: Vec<Cost>,
    /// Generations consumed, per island for the PGA.
    pub generations: u64,
    /// Tours evaluated over the whole run, all islands included.
    pub evaluations: u64,
    pub wall_seconds: f64,
    pub stop_reason: StopReason,
    /// `100 * optimum / best_length` when a reference optimum is known.
    pub accuracy: Option<f64>,
    /// Per-round summaries; empty for the SGA.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<RoundSummary>,
}

impl RunReport {
    pub fn set_reference(&mut self, optimum: Option<Cost>) {
        self.accuracy = optimum.map(|opt| accuracy(opt, self.best_length));
    }

    /// True when no trajectory step increases.
    pub fn trajectory_is_monotone(&self) -> bool {
        self.trajectory.windows(2).all(|w| w[1] <= w[0])
    }

    /// Copy with every wall-clock field zeroed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_seconds = 0.0;
        for s in &mut r.rounds {
            s.wall_seconds = 0.0;
        }
        r
    }
}

pub fn accuracy(optimum: Cost, best: Cost) -> f64 {
    if best == 0 {
        return 100.0;
    }
    100.0 * optimum as f64 / best as f64
}
