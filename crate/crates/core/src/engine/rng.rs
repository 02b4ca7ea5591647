use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

pub(crate) const MAX_JOB_ID: u64 = 1 << 40;
pub(crate) const MAX_TASK_INDEX: u64 = 1 << 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Map = 0,
    Reduce = 1,
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskKind::Map => "map",
            TaskKind::Reduce => "reduce",
        })
    }
}

/// Generator for one task attempt.
///
/// The master seed picks the ChaCha key; `(job_id, kind, index)` is packed
/// into the 64-bit stream id (40 + 1 + 23 bits), so distinct tasks of one
/// run read disjoint keystreams.
pub fn task_rng(master_seed: u64, job_id: u64, kind: TaskKind, task_index: usize) -> TaskRng {
    debug_assert!(job_id < MAX_JOB_ID && (task_index as u64) < MAX_TASK_INDEX);
    let stream = (job_id << 24) | ((kind as u64) << 23) | task_index as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draws(mut rng: TaskRng) -> Vec<u64> {
        (0..100).map(|_| rng.random()).collect()
    }

    #[test]
    fn identical_tuples_identical_streams() {
        assert_eq!(
            draws(task_rng(7, 3, TaskKind::Reduce, 2)),
            draws(task_rng(7, 3, TaskKind::Reduce, 2))
        );
    }

    #[test]
    fn neighbouring_tuples_differ() {
        let base = draws(task_rng(11, 0, TaskKind::Reduce, 0));
        assert_ne!(base, draws(task_rng(11, 0, TaskKind::Reduce, 1)));
        assert_ne!(base, draws(task_rng(11, 0, TaskKind::Map, 0)));
        assert_ne!(base, draws(task_rng(11, 1, TaskKind::Reduce, 0)));
        assert_ne!(
            draws(task_rng(11, 1, TaskKind::Map, 0)),
            draws(task_rng(12, 1, TaskKind::Map, 0))
        );
    }
}
