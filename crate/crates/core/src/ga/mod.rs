//! Genetic operators and the sequential GA.
//!
//! Tours are permutations of city indices. Lower tour length is better
//! everywhere: fitness is `length / total length` and rank 1 goes to the
//! longest tour.

mod evolve;
mod operators;
mod selection;

pub use evolve::{next_generation, run_sga, SgaConfig};
pub use operators::{
    greedy_crossover, is_permutation, mutate, random_tour, similarity, swap_genes, tour_length,
};
pub use selection::{assign_fitness, rank_probabilities, select_parents, RankSelector};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tsplib::{Cost, Instance};

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("invalid GA parameter: {0}")]
    InvalidParams(String),
}

/// One candidate tour.
///
/// `fitness` is relative to the population the tour currently lives in, so
/// it is excluded from equality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<usize>,
    pub length: Cost,
    pub fitness: f64,
    pub pop_id: u32,
}

impl PartialEq for Chromosome {
    fn eq(&self, other: &Self) -> bool {
        self.pop_id == other.pop_id && self.length == other.length && self.genes == other.genes
    }
}

impl Eq for Chromosome {}

impl Chromosome {
    pub fn new(genes: Vec<usize>, instance: &Instance, pop_id: u32) -> Self {
        let length = tour_length(&genes, instance);
        Self {
            genes,
            length,
            fitness: 0.0,
            pop_id,
        }
    }

    pub fn random(instance: &Instance, pop_id: u32, rng: &mut impl rand::Rng) -> Self {
        Self::new(random_tour(instance.dimension(), rng), instance, pop_id)
    }

    pub fn dimension(&self) -> usize {
        self.genes.len()
    }

    pub fn similarity(&self, other: &Chromosome) -> f64 {
        similarity(&self.genes, &other.genes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Chance that one offspring receives a single swap.
    pub mutation_prob: f64,
    /// Parents more similar than this are rejected.
    pub similarity_threshold: f64,
    pub elite_count: usize,
    pub max_parent_retries: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 100,
            crossover_prob: 0.99,
            mutation_prob: 0.021,
            similarity_threshold: 0.80,
            elite_count: 1,
            max_parent_retries: 32,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(GaError::InvalidParams(format!("{name} = {p} is not in [0, 1]")))
            }
        };
        prob("crossover_prob", self.crossover_prob)?;
        prob("mutation_prob", self.mutation_prob)?;
        prob("similarity_threshold", self.similarity_threshold)?;
        if self.population_size < 2 {
            return Err(GaError::InvalidParams(format!(
                "population_size = {} must be at least 2",
                self.population_size
            )));
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return Err(GaError::InvalidParams(format!(
                "elite_count = {} must satisfy 0 < elite_count < population_size = {}",
                self.elite_count, self.population_size
            )));
        }
        Ok(())
    }
}

/// A sub-population. Members all carry `pop_id == id`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub id: u32,
    pub members: Vec<Chromosome>,
    best: usize,
}

impl Population {
    /// Builds a population, re-tagging members with `id` and assigning
    /// fitness.
    pub fn new(id: u32, mut members: Vec<Chromosome>) -> Result<Self, GaError> {
        if members.is_empty() {
            return Err(GaError::EmptyPopulation);
        }
        for m in &mut members {
            m.pop_id = id;
        }
        let mut pop = Self {
            id,
            members,
            best: 0,
        };
        pop.refresh()?;
        Ok(pop)
    }

    pub fn random(
        id: u32,
        size: usize,
        instance: &Instance,
        rng: &mut impl rand::Rng,
    ) -> Result<Self, GaError> {
        let members = (0..size).map(|_| Chromosome::random(instance, id, rng)).collect();
        Self::new(id, members)
    }

    /// Recomputes the best index and fitness values.
    pub fn refresh(&mut self) -> Result<(), GaError> {
        assign_fitness(self)?;
        self.best = best_index(&self.members);
        Ok(())
    }

    pub fn best_index(&self) -> usize {
        self.best
    }

    pub fn best(&self) -> &Chromosome {
        &self.members[self.best]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn into_members(self) -> Vec<Chromosome> {
        self.members
    }
}

/// First member of minimal length.
pub(crate) fn best_index(members: &[Chromosome]) -> usize {
    members
        .iter()
        .enumerate()
        .min_by_key(|(i, c)| (c.length, *i))
        .map(|(i, _)| i)
        .unwrap_or(0)
}
