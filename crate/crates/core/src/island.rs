//! Island-model GA driven as a chain of map/reduce jobs.
//!
//! Job 0 creates one random population per island. Every later job is an
//! evolution round: reduce task `i` receives island `i`'s residents plus the
//! migrants addressed to it, drops the worst extras, evolves for
//! `migration_interval` generations and emits its population keyed `i` along
//! with one copy of its best tour keyed to every other island. The driver
//! inspects each round's output and decides whether to run another.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{self, CodecError};
use crate::convergence::{ConvergencePolicy, Decision};
#[cfg(test)]
use crate::convergence::StopReason;
use crate::engine::{
    default_partitioner, identity_mapper, Engine, EngineError, JobResult, JobSpec, Record,
    RecordSetId, RecordStore, Reducer, StoreError,
};
use crate::ga::{next_generation, tour_length, Chromosome, GaError, GaParams, Population};
use crate::report::{Algorithm, ParamsSnapshot, RunReport};
use crate::tsplib::{Cost, Instance};

/// Name of the sealed set holding one seed record per island.
pub const BOOTSTRAP_SET: &str = "bootstrap";
/// Text artifact written after the last round.
pub const FINAL_DUMP: &str = "final_population.txt";

#[derive(Debug, Error)]
pub enum PgaError {
    #[error("invalid island parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error("round {round}: {source}")]
    Engine { round: u64, source: EngineError },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("round {round}: corrupt chromosome record: {source}")]
    Codec { round: u64, source: CodecError },
    #[error("round {round}: island {island} has no records")]
    EmptyIsland { round: u64, island: usize },
    #[error("round {round}: record keyed {key} does not belong to any of {islands} islands")]
    UnknownIsland { round: u64, key: i32, islands: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IslandParams {
    pub num_islands: usize,
    /// Generations each island runs per job.
    pub migration_interval: u64,
    pub ga: GaParams,
    /// Budget in per-island generations.
    pub max_total_generations: u64,
    /// Rounds without improvement of the global best before stopping.
    pub convergence_patience: Option<usize>,
    pub target_length: Option<Cost>,
}

impl Default for IslandParams {
    fn default() -> Self {
        Self {
            num_islands: 10,
            migration_interval: 50,
            ga: GaParams::default(),
            max_total_generations: 50_000,
            convergence_patience: Some(20),
            target_length: None,
        }
    }
}

impl IslandParams {
    pub fn validate(&self) -> Result<(), PgaError> {
        self.ga.validate()?;
        if self.num_islands < 2 {
            return Err(PgaError::Params(format!(
                "num_islands = {} but at least 2 islands are needed",
                self.num_islands
            )));
        }
        if self.num_islands > i32::MAX as usize {
            return Err(PgaError::Params("too many islands".into()));
        }
        if self.migration_interval == 0 {
            return Err(PgaError::Params("migration_interval must be at least 1".into()));
        }
        if self.max_total_generations < self.migration_interval {
            return Err(PgaError::Params(format!(
                "max_total_generations = {} is below migration_interval = {}",
                self.max_total_generations, self.migration_interval
            )));
        }
        Ok(())
    }

    pub fn policy(&self) -> ConvergencePolicy {
        ConvergencePolicy {
            max_generations: self.max_total_generations,
            patience: self.convergence_patience,
            target_length: self.target_length,
        }
    }

    /// Records each evolution round emits.
    pub fn records_per_round(&self) -> usize {
        self.num_islands * (self.ga.population_size + self.num_islands - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    /// 0 for the initial populations.
    pub round: u64,
    pub island_bests: Vec<Cost>,
    pub best_length: Cost,
    pub best_island: u32,
    pub best_tour: Vec<usize>,
    /// Per-island generations consumed so far.
    pub generations: u64,
    pub emitted_records: usize,
    pub wall_seconds: f64,
}

/// Stop decision between rounds.
pub fn check_convergence(history: &[RoundSummary], params: &IslandParams) -> Decision {
    let Some(last) = history.last() else {
        return Decision::Continue;
    };
    let bests: Vec<Cost> = history.iter().map(|s| s.best_length).collect();
    params.policy().evaluate(&bests, last.generations)
}

fn island_key(key: i32, islands: usize, round: u64) -> Result<usize, PgaError> {
    usize::try_from(key)
        .ok()
        .filter(|&k| k < islands)
        .ok_or(PgaError::UnknownIsland { round, key, islands })
}

fn encode_record(key: usize, chromosome: &Chromosome) -> Result<Record, CodecError> {
    Ok(Record::new(key as i32, codec::encode(chromosome)?))
}

fn job_spec(job_id: u64, input: RecordSetId, islands: usize, reducer: Reducer, seed: u64) -> JobSpec {
    JobSpec {
        job_id,
        input,
        output: None,
        num_map_tasks: islands,
        num_reduce_tasks: islands,
        mapper: identity_mapper(),
        partitioner: default_partitioner(),
        reducer,
        master_seed: seed,
    }
}

/// Job 0: seeds the store with one record per island and lets each reduce
/// task build a random population for its island.
pub fn init_job(
    engine: &Engine,
    instance: Arc<Instance>,
    params: &IslandParams,
    master_seed: u64,
) -> Result<JobResult, PgaError> {
    params.validate()?;
    let islands = params.num_islands;
    let seeds: Vec<Record> = (0..islands).map(|i| Record::new(i as i32, Vec::new())).collect();
    let bootstrap = engine.store().seal(BOOTSTRAP_SET, &[seeds])?;

    let size = params.ga.population_size;
    let reducer: Reducer = Arc::new(move |ctx, key, _values| {
        let island = island_key(key, islands, 0)?;
        let mut out = Vec::with_capacity(size);
        for _ in 0..size {
            let c = Chromosome::random(&instance, island as u32, &mut ctx.rng);
            out.push(encode_record(island, &c)?);
        }
        Ok(out)
    });
    engine
        .run_job(&job_spec(0, bootstrap, islands, reducer, master_seed))
        .map_err(|source| PgaError::Engine { round: 0, source })
}

/// One evolution round: trim, evolve `generations` generations, emit
/// residents plus migrants.
pub fn evolve_job(
    engine: &Engine,
    input: &RecordSetId,
    instance: Arc<Instance>,
    params: &IslandParams,
    round: u64,
    generations: u64,
    master_seed: u64,
) -> Result<JobResult, PgaError> {
    let islands = params.num_islands;
    let mut per_island = vec![0usize; islands];
    for record in engine.store().read(input)? {
        per_island[island_key(record.key, islands, round)?] += 1;
    }
    if let Some(island) = per_island.iter().position(|&c| c == 0) {
        return Err(PgaError::EmptyIsland { round, island });
    }

    let ga = params.ga;
    let reducer: Reducer = Arc::new(move |ctx, key, values| {
        let island = island_key(key, islands, round)?;
        let n = instance.dimension();
        let mut members = Vec::with_capacity(values.len());
        for bytes in &values {
            let mut c = codec::decode(bytes)?;
            if c.genes.len() != n {
                return Err(format!("tour has {} cities, instance has {n}", c.genes.len()).into());
            }
            let length = tour_length(&c.genes, &instance);
            if length != c.length {
                return Err(format!("stored length {} but tour measures {length}", c.length).into());
            }
            c.pop_id = island as u32;
            members.push(c);
        }
        // Migrants replace the worst: keep the shortest `population_size`,
        // residents first among equals.
        members.sort_by_key(|c| c.length);
        members.truncate(ga.population_size);

        let mut population = Population::new(island as u32, members)?;
        for _ in 0..generations {
            population = next_generation(&population, &instance, &mut ctx.rng, &ga);
        }

        let best = population.best().clone();
        let mut out = Vec::with_capacity(population.len() + islands - 1);
        for c in &population.members {
            out.push(encode_record(island, c)?);
        }
        for other in (0..islands).filter(|&j| j != island) {
            let migrant = Chromosome {
                pop_id: other as u32,
                ..best.clone()
            };
            out.push(encode_record(other, &migrant)?);
        }
        Ok(out)
    });
    engine
        .run_job(&job_spec(round, input.clone(), islands, reducer, master_seed))
        .map_err(|source| PgaError::Engine { round, source })
}

/// Decodes the chromosomes each reduce task emitted, partition by partition.
pub fn read_islands(store: &RecordStore, set: &RecordSetId, round: u64) -> Result<Vec<Vec<(i32, Chromosome)>>, PgaError> {
    (0..set.partitions())
        .map(|i| {
            store
                .read_partition(set, i)?
                .into_iter()
                .map(|r| {
                    codec::decode(&r.value)
                        .map(|c| (r.key, c))
                        .map_err(|source| PgaError::Codec { round, source })
                })
                .collect()
        })
        .collect()
}

fn summarize(
    store: &RecordStore,
    job: &JobResult,
    round: u64,
    generations: u64,
    wall_seconds: f64,
) -> Result<RoundSummary, PgaError> {
    let islands = read_islands(store, &job.output, round)?;
    let mut island_bests = Vec::with_capacity(islands.len());
    let mut best: Option<(Cost, u32, Vec<usize>)> = None;
    for (i, records) in islands.iter().enumerate() {
        let top = records
            .iter()
            .map(|(_, c)| c)
            .min_by_key(|c| c.length)
            .ok_or(PgaError::EmptyIsland { round, island: i })?;
        island_bests.push(top.length);
        if best.as_ref().is_none_or(|(b, _, _)| top.length < *b) {
            best = Some((top.length, i as u32, top.genes.clone()));
        }
    }
    let (best_length, best_island, best_tour) = best.expect("at least two islands");
    Ok(RoundSummary {
        round,
        island_bests,
        best_length,
        best_island,
        best_tour,
        generations,
        emitted_records: job.output_records,
        wall_seconds,
    })
}

/// One line per resident tour: `pop_id length c0 c1 ... c{n-1}`.
pub fn readable_dump(islands: &[Vec<(i32, Chromosome)>]) -> String {
    let mut out = String::new();
    for (i, records) in islands.iter().enumerate() {
        for (_, c) in records.iter().filter(|(key, _)| *key as usize == i) {
            let _ = write!(out, "{} {}", c.pop_id, c.length);
            for city in &c.genes {
                let _ = write!(out, " {city}");
            }
            out.push('\n');
        }
    }
    out
}

/// Outcome of a driver run.
#[derive(Debug, Clone)]
pub struct PgaRun {
    pub report: RunReport,
    /// The last sealed record set.
    pub final_set: RecordSetId,
}

/// Runs the island GA on an existing engine. The engine's store must not
/// already hold sets from another run.
pub fn run_pga_on(
    engine: &Engine,
    instance: &Instance,
    params: &IslandParams,
    master_seed: u64,
) -> Result<PgaRun, PgaError> {
    params.validate()?;
    let started = Instant::now();
    let shared = Arc::new(instance.clone());
    let store = engine.store().clone();

    let tick = Instant::now();
    let init = init_job(engine, shared.clone(), params, master_seed)?;
    let mut history = vec![summarize(&store, &init, 0, 0, tick.elapsed().as_secs_f64())?];
    let mut current = init.output;
    let mut generations = 0u64;
    let mut round = 0u64;

    let stop_reason = loop {
        if let Decision::Stop(reason) = check_convergence(&history, params) {
            break reason;
        }
        round += 1;
        let step = params
            .migration_interval
            .min(params.max_total_generations - generations);
        let tick = Instant::now();
        let job = evolve_job(engine, &current, shared.clone(), params, round, step, master_seed)?;
        generations += step;
        history.push(summarize(&store, &job, round, generations, tick.elapsed().as_secs_f64())?);
        current = job.output;
    };

    let final_islands = read_islands(&store, &current, round)?;
    store.write_text(FINAL_DUMP, &readable_dump(&final_islands))?;

    let last = history.last().expect("initial summary");
    let pop = params.ga.population_size as u64;
    let offspring = (params.ga.population_size - params.ga.elite_count) as u64;
    let mut report = RunReport {
        algorithm: Algorithm::Pga,
        instance: instance.name().to_string(),
        dimension: instance.dimension(),
        seed: master_seed,
        params: ParamsSnapshot::Pga(*params),
        best_length: last.best_length,
        best_tour: last.best_tour.clone(),
        trajectory: history.iter().map(|s| s.best_length).collect(),
        generations,
        evaluations: params.num_islands as u64 * (pop + generations * offspring),
        wall_seconds: started.elapsed().as_secs_f64(),
        stop_reason,
        accuracy: None,
        rounds: history,
    };
    report.set_reference(instance.known_optimum);
    Ok(PgaRun {
        report,
        final_set: current,
    })
}

/// Runs the island GA on a fresh in-memory store.
pub fn run_pga(
    instance: &Instance,
    params: &IslandParams,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<RunReport, PgaError> {
    let engine = Engine::new(Arc::new(RecordStore::in_memory()), workers)
        .map_err(|source| PgaError::Engine { round: 0, source })?;
    Ok(run_pga_on(&engine, instance, params, master_seed)?.report)
}
