//! A small iterative map/shuffle/reduce engine.
//!
//! A job reads a sealed record set, runs the mapper over contiguous chunks of
//! it, routes every intermediate record to a reduce task with the
//! partitioner, groups each reduce task's input by key and hands every group
//! to the reducer. Reducer output is sealed as a new record set, one
//! partition per reduce task.
//!
//! Grouping is stricter than classic MapReduce: keys arrive in ascending
//! order and the values of a key keep their input order (map task order,
//! then emission order). Combined with per-task seeded generators this makes
//! job output byte-identical for a given seed, whatever the worker count.

mod rng;
mod store;

pub use rng::{task_rng, TaskKind, TaskRng};
pub use store::{decode_partition, encode_partition, RecordSetId, RecordStore, StoreError};

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

/// Error type returned by user mappers, reducers and partitioners.
pub type TaskError = Box<dyn std::error::Error + Send + Sync>;

pub type Mapper = Arc<dyn Fn(&mut TaskContext, Record) -> Result<Vec<Record>, TaskError> + Send + Sync>;
pub type Reducer =
    Arc<dyn Fn(&mut TaskContext, i32, Vec<Vec<u8>>) -> Result<Vec<Record>, TaskError> + Send + Sync>;
pub type Partitioner = Arc<dyn Fn(i32, usize) -> Result<usize, TaskError> + Send + Sync>;

pub const DEFAULT_RETRY_LIMIT: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Record {
    pub key: i32,
    pub value: Vec<u8>,
}

impl Record {
    pub fn new(key: i32, value: Vec<u8>) -> Self {
        Self { key, value }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid job spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("job {job_id}: {kind} task {index} failed after {attempts} attempts: {message}")]
    TaskFailed {
        job_id: u64,
        kind: TaskKind,
        index: usize,
        attempts: usize,
        message: String,
    },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("negative key {0} cannot be partitioned")]
pub struct NegativeKey(pub i32);

/// `key mod num_reduce_tasks`; with one reduce task per population this
/// sends population `i` to task `i`.
pub fn default_partition(key: i32, num_reduce_tasks: usize) -> Result<usize, NegativeKey> {
    if key < 0 {
        return Err(NegativeKey(key));
    }
    Ok(key as usize % num_reduce_tasks.max(1))
}

pub fn default_partitioner() -> Partitioner {
    Arc::new(|key, tasks| default_partition(key, tasks).map_err(Into::into))
}

pub fn identity_mapper() -> Mapper {
    Arc::new(|_, record| Ok(vec![record]))
}

/// Per-attempt context handed to mappers and reducers.
pub struct TaskContext {
    pub job_id: u64,
    pub kind: TaskKind,
    pub index: usize,
    /// Zero on the first try.
    pub attempt: usize,
    pub rng: TaskRng,
}

#[derive(Clone)]
pub struct JobSpec {
    pub job_id: u64,
    pub input: RecordSetId,
    /// Output set name; defaults to `job<id>`.
    pub output: Option<String>,
    pub num_map_tasks: usize,
    pub num_reduce_tasks: usize,
    pub mapper: Mapper,
    pub partitioner: Partitioner,
    pub reducer: Reducer,
    pub master_seed: u64,
}

impl JobSpec {
    pub fn output_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("job{}", self.job_id))
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.num_map_tasks == 0 || self.num_reduce_tasks == 0 {
            return Err(EngineError::InvalidSpec(format!(
                "need at least one map and one reduce task (got {} and {})",
                self.num_map_tasks, self.num_reduce_tasks
            )));
        }
        if self.job_id >= rng::MAX_JOB_ID {
            return Err(EngineError::InvalidSpec(format!("job id {} too large", self.job_id)));
        }
        let tasks = self.num_map_tasks.max(self.num_reduce_tasks);
        if tasks as u64 >= rng::MAX_TASK_INDEX {
            return Err(EngineError::InvalidSpec(format!("{tasks} tasks is too many")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobResult {
    pub job_id: u64,
    pub output: RecordSetId,
    pub input_records: usize,
    pub intermediate_records: usize,
    pub output_records: usize,
    /// Records routed to each reduce task.
    pub reduce_input_sizes: Vec<usize>,
    /// Attempts that failed and were retried.
    pub failed_attempts: usize,
}

/// Runs jobs on a bounded worker pool against one record store.
pub struct Engine {
    store: Arc<RecordStore>,
    pool: rayon::ThreadPool,
    workers: usize,
    retry_limit: usize,
}

impl Engine {
    /// `workers = None` uses the available hardware parallelism.
    pub fn new(store: Arc<RecordStore>, workers: Option<usize>) -> Result<Self, EngineError> {
        let workers = workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("mr-worker-{i}"))
            .build()
            .map_err(|e| EngineError::Pool(e.to_string()))?;
        Ok(Self {
            store,
            pool,
            workers,
            retry_limit: DEFAULT_RETRY_LIMIT,
        })
    }

    pub fn with_retry_limit(mut self, retries: usize) -> Self {
        self.retry_limit = retries;
        self
    }

    pub fn store(&self) -> &Arc<RecordStore> {
        &self.store
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn run_job(&self, spec: &JobSpec) -> Result<JobResult, EngineError> {
        spec.validate()?;
        let input = self.store.read(&spec.input)?;
        let input_records = input.len();
        let reduce_tasks = spec.num_reduce_tasks;

        let chunk = input_records.div_ceil(spec.num_map_tasks).max(1);
        let chunks: Vec<&[Record]> = (0..spec.num_map_tasks)
            .map(|t| {
                let start = (t * chunk).min(input_records);
                let end = ((t + 1) * chunk).min(input_records);
                &input[start..end]
            })
            .collect();

        // Map phase. `collect` returns only once every map task is done, so
        // no reducer can start early.
        let map_outputs: Vec<Result<(Vec<Vec<Record>>, usize), EngineError>> = self.pool.install(|| {
            chunks
                .par_iter()
                .enumerate()
                .map(|(index, records)| {
                    self.attempt(spec, TaskKind::Map, index, |ctx| {
                        let mut buckets = vec![Vec::new(); reduce_tasks];
                        for record in records.iter() {
                            for out in (spec.mapper)(ctx, record.clone())? {
                                let p = (spec.partitioner)(out.key, reduce_tasks)?;
                                if p >= reduce_tasks {
                                    return Err(format!(
                                        "partitioner sent key {} to task {p} of {reduce_tasks}",
                                        out.key
                                    )
                                    .into());
                                }
                                buckets[p].push(out);
                            }
                        }
                        Ok(buckets)
                    })
                })
                .collect()
        });

        let mut failed_attempts = 0;
        let mut shuffled: Vec<BTreeMap<i32, Vec<Vec<u8>>>> = vec![BTreeMap::new(); reduce_tasks];
        let mut reduce_input_sizes = vec![0; reduce_tasks];
        let mut intermediate_records = 0;
        for result in map_outputs {
            let (buckets, failures) = result?;
            failed_attempts += failures;
            for (task, bucket) in buckets.into_iter().enumerate() {
                intermediate_records += bucket.len();
                reduce_input_sizes[task] += bucket.len();
                for record in bucket {
                    shuffled[task].entry(record.key).or_default().push(record.value);
                }
            }
        }

        let reduce_outputs: Vec<Result<(Vec<Record>, usize), EngineError>> = self.pool.install(|| {
            shuffled
                .par_iter()
                .enumerate()
                .map(|(index, groups)| {
                    self.attempt(spec, TaskKind::Reduce, index, |ctx| {
                        let mut out = Vec::new();
                        for (&key, values) in groups {
                            out.extend((spec.reducer)(ctx, key, values.clone())?);
                        }
                        Ok(out)
                    })
                })
                .collect()
        });

        let mut partitions = Vec::with_capacity(reduce_tasks);
        for result in reduce_outputs {
            let (records, failures) = result?;
            failed_attempts += failures;
            partitions.push(records);
        }
        let output_records = partitions.iter().map(Vec::len).sum();
        let output = self.store.seal(&spec.output_name(), &partitions)?;

        Ok(JobResult {
            job_id: spec.job_id,
            output,
            input_records,
            intermediate_records,
            output_records,
            reduce_input_sizes,
            failed_attempts,
        })
    }

    /// Runs one task, retrying failures and panics with identical inputs and
    /// a freshly seeded generator. Returns the output and the failure count.
    fn attempt<T>(
        &self,
        spec: &JobSpec,
        kind: TaskKind,
        index: usize,
        body: impl Fn(&mut TaskContext) -> Result<T, TaskError>,
    ) -> Result<(T, usize), EngineError> {
        let attempts = self.retry_limit + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            let mut ctx = TaskContext {
                job_id: spec.job_id,
                kind,
                index,
                attempt,
                rng: task_rng(spec.master_seed, spec.job_id, kind, index),
            };
            match catch_unwind(AssertUnwindSafe(|| body(&mut ctx))) {
                Ok(Ok(value)) => return Ok((value, attempt)),
                Ok(Err(e)) => last_error = e.to_string(),
                Err(panic) => {
                    last_error = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "task panicked".to_string());
                }
            }
        }
        Err(EngineError::TaskFailed {
            job_id: spec.job_id,
            kind,
            index,
            attempts,
            message: last_error,
        })
    }
}
