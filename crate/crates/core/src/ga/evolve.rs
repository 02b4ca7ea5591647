use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{greedy_crossover, mutate, select_parents, Chromosome, GaError, GaParams, Population, RankSelector};
use crate::convergence::{ConvergencePolicy, Decision, StopReason};
use crate::report::{Algorithm, ParamsSnapshot, RunReport};
use crate::tsplib::{Cost, Instance};

/// Produces the next generation.
///
/// The `elite_count` shortest tours are copied unchanged. Every other slot is
/// filled by rank-selecting two parents, crossing them with probability
/// `crossover_prob` (otherwise copying the shorter parent) and then applying
/// one swap mutation with probability `mutation_prob`.
pub fn next_generation<R: Rng + ?Sized>(
    population: &Population,
    instance: &Instance,
    rng: &mut R,
    params: &GaParams,
) -> Population {
    let members = &population.members;
    let size = members.len();
    let elite_count = params.elite_count.min(size);

    let mut by_length: Vec<usize> = (0..size).collect();
    by_length.sort_by_key(|&i| (members[i].length, i));

    let mut next: Vec<Chromosome> = Vec::with_capacity(size);
    next.extend(by_length[..elite_count].iter().map(|&i| members[i].clone()));

    let selector = RankSelector::new(members);
    while next.len() < size {
        let (a, b) = select_parents(population, &selector, rng, params);
        let (pa, pb) = (&members[a], &members[b]);
        let mut genes = if rng.random_bool(params.crossover_prob) {
            greedy_crossover(&pa.genes, &pb.genes, instance, rng)
        } else if pb.length < pa.length {
            pb.genes.clone()
        } else {
            pa.genes.clone()
        };
        mutate(&mut genes, rng, params.mutation_prob);
        next.push(Chromosome::new(genes, instance, population.id));
    }
    Population::new(population.id, next).expect("non-empty by construction")
}

/// Settings for one sequential GA run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaConfig {
    pub ga: GaParams,
    pub max_generations: u64,
    /// Stagnation patience, counted in checkpoints of `checkpoint_interval`
    /// generations so it lines up with island rounds.
    pub patience: Option<usize>,
    pub checkpoint_interval: u64,
    pub target_length: Option<Cost>,
}

impl Default for SgaConfig {
    fn default() -> Self {
        Self {
            ga: GaParams::default(),
            max_generations: 10_000,
            patience: None,
            checkpoint_interval: 50,
            target_length: None,
        }
    }
}

impl SgaConfig {
    pub fn policy(&self) -> ConvergencePolicy {
        ConvergencePolicy {
            max_generations: self.max_generations,
            patience: self.patience,
            target_length: self.target_length,
        }
    }

    pub fn validate(&self) -> Result<(), GaError> {
        self.ga.validate()?;
        if self.max_generations == 0 {
            return Err(GaError::InvalidParams("max_generations must be at least 1".into()));
        }
        if self.checkpoint_interval == 0 {
            return Err(GaError::InvalidParams("checkpoint_interval must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs the sequential GA on a single population.
pub fn run_sga(instance: &Instance, config: &SgaConfig, seed: u64) -> Result<RunReport, GaError> {
    config.validate()?;
    let started = Instant::now();
    let params = &config.ga;
    let policy = config.policy();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut population = Population::random(0, params.population_size, instance, &mut rng)?;
    let offspring_per_generation = (params.population_size - params.elite_count) as u64;
    let mut evaluations = params.population_size as u64;
    let mut trajectory = vec![population.best().length];
    let mut checkpoints = vec![population.best().length];
    let mut generations = 0u64;

    let stop_reason = loop {
        let best = population.best().length;
        if config.target_length.is_some_and(|t| best <= t) {
            break StopReason::Target;
        }
        if generations >= config.max_generations {
            break StopReason::Budget;
        }
        population = next_generation(&population, instance, &mut rng, params);
        generations += 1;
        evaluations += offspring_per_generation;
        trajectory.push(population.best().length);

        if generations % config.checkpoint_interval == 0 {
            checkpoints.push(population.best().length);
            if let Decision::Stop(StopReason::Stagnation) = policy.evaluate(&checkpoints, generations) {
                break StopReason::Stagnation;
            }
        }
    };

    let best = population.best();
    let mut report = RunReport {
        algorithm: Algorithm::Sga,
        instance: instance.name().to_string(),
        dimension: instance.dimension(),
        seed,
        params: ParamsSnapshot::Sga(*config),
        best_length: best.length,
        best_tour: best.genes.clone(),
        trajectory,
        generations,
        evaluations,
        wall_seconds: started.elapsed().as_secs_f64(),
        stop_reason,
        accuracy: None,
        rounds: Vec::new(),
    };
    report.set_reference(instance.known_optimum);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::is_permutation;
    use crate::tsplib::random_instance;

    #[test]
    fn elitism_never_loses_the_best() {
        let inst = random_instance(12, 1..=100, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = GaParams::default();
        let mut pop = Population::random(0, 30, &inst, &mut rng).unwrap();
        for _ in 0..50 {
            let before = pop.best().clone();
            pop = next_generation(&pop, &inst, &mut rng, &GaParams { population_size: 30, ..params });
            assert!(pop.best().length <= before.length);
            assert!(pop.members.contains(&before));
            assert_eq!(pop.len(), 30);
            assert!(pop.members.iter().all(|m| is_permutation(&m.genes, 12)));
        }
    }

    #[test]
    fn no_new_material_without_operators() {
        let inst = random_instance(9, 1..=50, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = GaParams {
            population_size: 20,
            crossover_prob: 0.0,
            mutation_prob: 0.0,
            ..GaParams::default()
        };
        let pop = Population::random(0, 20, &inst, &mut rng).unwrap();
        let next = next_generation(&pop, &inst, &mut rng, &params);
        for m in &next.members {
            assert!(pop.members.iter().any(|p| p.genes == m.genes));
        }
    }

    #[test]
    fn sga_budget_of_one() {
        let inst = random_instance(8, 1..=100, 1).unwrap();
        let cfg = SgaConfig {
            max_generations: 1,
            ..SgaConfig::default()
        };
        let r = run_sga(&inst, &cfg, 4).unwrap();
        assert_eq!(r.generations, 1);
        assert_eq!(r.trajectory.len(), 2);
        assert_eq!(r.stop_reason, StopReason::Budget);
    }

    #[test]
    fn sga_is_deterministic() {
        let inst = random_instance(15, 1..=100, 2).unwrap();
        let cfg = SgaConfig {
            max_generations: 200,
            ..SgaConfig::default()
        };
        let a = run_sga(&inst, &cfg, 9).unwrap();
        let b = run_sga(&inst, &cfg, 9).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert!(a.trajectory_is_monotone());
        assert_eq!(tour_len_check(&inst, &a.best_tour), a.best_length);
    }

    fn tour_len_check(inst: &Instance, tour: &[usize]) -> Cost {
        crate::ga::tour_length(tour, inst)
    }

    #[test]
    fn sga_stops_on_target_and_stagnation() {
        let inst = random_instance(6, 1..=20, 3).unwrap();
        let cfg = SgaConfig {
            max_generations: 100_000,
            patience: Some(3),
            checkpoint_interval: 10,
            ..SgaConfig::default()
        };
        let r = run_sga(&inst, &cfg, 1).unwrap();
        assert_eq!(r.stop_reason, StopReason::Stagnation);
        assert!(r.generations < 100_000);

        let cfg = SgaConfig {
            target_length: Some(u64::MAX),
            ..cfg
        };
        let r = run_sga(&inst, &cfg, 1).unwrap();
        assert_eq!(r.stop_reason, StopReason::Target);
        assert_eq!(r.generations, 0);
    }
}
