//! Stop rules shared by the sequential GA and the island driver.

use serde::{Deserialize, Serialize};

use crate::tsplib::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopReason {
    /// The generation budget is spent.
    Budget,
    /// The best length did not move for `patience` checkpoints.
    Stagnation,
    /// The best length reached the requested target.
    Target,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Budget => "budget",
            StopReason::Stagnation => "stagnation",
            StopReason::Target => "target",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Stop(StopReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergencePolicy {
    pub max_generations: u64,
    /// Checkpoints without improvement before giving up; `None` disables.
    pub patience: Option<usize>,
    pub target_length: Option<Cost>,
}

impl ConvergencePolicy {
    /// Decides from the best length at each checkpoint so far (oldest first)
    /// and the generations consumed.
    pub fn evaluate(&self, checkpoints: &[Cost], generations: u64) -> Decision {
        let Some(&latest) = checkpoints.last() else {
            return Decision::Continue;
        };
        if self.target_length.is_some_and(|t| latest <= t) {
            return Decision::Stop(StopReason::Target);
        }
        if generations >= self.max_generations {
            return Decision::Stop(StopReason::Budget);
        }
        if let Some(patience) = self.patience {
            let unchanged = checkpoints.iter().rev().take_while(|&&b| b == latest).count();
            if patience > 0 && unchanged >= patience {
                return Decision::Stop(StopReason::Stagnation);
            }
        }
        Decision::Continue
    }
}
