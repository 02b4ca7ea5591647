use rand::Rng;

use super::{Chromosome, GaError, GaParams, Population};

/// Sets every member's fitness to `length / total length`.
pub fn assign_fitness(population: &mut Population) -> Result<(), GaError> {
    let members = &mut population.members;
    if members.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    let total: f64 = members.iter().map(|m| m.length as f64).sum();
    let n = members.len() as f64;
    for m in members.iter_mut() {
        m.fitness = if total > 0.0 {
            m.length as f64 / total
        } else {
            1.0 / n
        };
    }
    Ok(())
}

/// Selection probability per rank: entry `r - 1` is `r / (n (n + 1) / 2)`.
pub fn rank_probabilities(population_size: usize) -> Vec<f64> {
    let total = triangular(population_size as u64) as f64;
    (1..=population_size).map(|r| r as f64 / total).collect()
}

fn triangular(k: u64) -> u64 {
    k * (k + 1) / 2
}

/// Rank-proportional sampler over one generation.
///
/// The longest tour gets rank 1 and the shortest rank `n`; equal lengths keep
/// member order.
#[derive(Debug, Clone)]
pub struct RankSelector {
    /// Member indices by ascending rank.
    by_rank: Vec<usize>,
    total: u64,
}

impl RankSelector {
    pub fn new(members: &[Chromosome]) -> Self {
        let mut by_rank: Vec<usize> = (0..members.len()).collect();
        by_rank.sort_by(|&a, &b| members[b].length.cmp(&members[a].length));
        let total = triangular(members.len() as u64);
        Self { by_rank, total }
    }

    /// Member index of rank `r` (1-based).
    pub fn member_of_rank(&self, rank: usize) -> usize {
        self.by_rank[rank - 1]
    }

    pub fn len(&self) -> usize {
        self.by_rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_rank.is_empty()
    }

    /// Draws one member index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let ticket = rng.random_range(0..self.total);
        self.by_rank[rank_index_of_ticket(ticket)]
    }
}

/// Zero-based rank owning `ticket` when rank `r` holds `r` consecutive
/// tickets: the largest `k` with `T(k) <= ticket`.
fn rank_index_of_ticket(ticket: u64) -> usize {
    let mut k = ((((8 * ticket + 1) as f64).sqrt() - 1.0) / 2.0) as u64;
    while triangular(k + 1) <= ticket {
        k += 1;
    }
    while triangular(k) > ticket {
        k -= 1;
    }
    k as usize
}

/// Draws two distinct members by rank, rejecting pairs more similar than
/// `params.similarity_threshold`. After `max_parent_retries` rejected draws
/// the last pair is returned anyway.
pub fn select_parents<R: Rng + ?Sized>(
    population: &Population,
    selector: &RankSelector,
    rng: &mut R,
    params: &GaParams,
) -> (usize, usize) {
    let members = &population.members;
    if members.len() < 2 {
        return (0, 0);
    }
    let attempts = params.max_parent_retries.max(1);
    let mut pair = (0, 0);
    for _ in 0..attempts {
        let a = selector.sample(rng);
        let mut b = selector.sample(rng);
        while b == a {
            b = selector.sample(rng);
        }
        pair = (a, b);
        if params.similarity_threshold >= 1.0
            || members[a].similarity(&members[b]) <= params.similarity_threshold
        {
            break;
        }
    }
    pair
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsplib::Instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn with_lengths(lengths: &[u64]) -> Population {
        let members = lengths
            .iter()
            .map(|&l| Chromosome {
                genes: vec![0, 1],
                length: l,
                fitness: 0.0,
                pop_id: 0,
            })
            .collect();
        Population::new(0, members).unwrap()
    }

    #[test]
    fn fitness_examples() {
        let f = |ls: &[u64]| -> Vec<f64> {
            with_lengths(ls).members.iter().map(|m| m.fitness).collect()
        };
        assert_eq!(f(&[10, 30]), vec![0.25, 0.75]);
        assert_eq!(f(&[8, 9, 15]), vec![0.25, 0.28125, 0.46875]);
        let eq = f(&[7; 5]);
        assert!(eq.iter().all(|&x| (x - 0.2).abs() < 1e-12));
        let sum: f64 = f(&[3, 99, 4, 1000, 17]).iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank_probability_examples() {
        let p3 = rank_probabilities(3);
        for (got, want) in p3.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let p2 = rank_probabilities(2);
        assert!((p2[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p2[1] - 2.0 / 3.0).abs() < 1e-12);
        for n in 2..200 {
            let s: f64 = rank_probabilities(n).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ranks_order_by_descending_length() {
        let pop = with_lengths(&[20, 10, 40, 10]);
        let sel = RankSelector::new(&pop.members);
        // worst first; the tie between members 1 and 3 keeps member order
        assert_eq!(sel.member_of_rank(1), 2);
        assert_eq!(sel.member_of_rank(2), 0);
        assert_eq!(sel.member_of_rank(3), 1);
        assert_eq!(sel.member_of_rank(4), 3);
    }

    #[test]
    fn tickets_map_to_ranks() {
        let mut expected = Vec::new();
        for rank in 1..=400usize {
            expected.extend(std::iter::repeat(rank - 1).take(rank));
        }
        for (ticket, want) in expected.iter().enumerate() {
            assert_eq!(rank_index_of_ticket(ticket as u64), *want, "ticket {ticket}");
        }
    }

    #[test]
    fn sampler_frequencies() {
        let pop = with_lengths(&[50, 40, 30, 20, 10, 5, 1]);
        let sel = RankSelector::new(&pop.members);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 7];
        for _ in 0..28_000 {
            counts[sel.sample(&mut rng)] += 1;
        }
        for (idx, c) in counts.iter().enumerate() {
            let rank = idx + 1;
            let expected = rank as f64 / 28.0;
            assert!((*c as f64 / 28_000.0 - expected).abs() < 0.015, "{counts:?}");
        }
    }

    #[test]
    fn identical_pair_is_waived() {
        let inst = Instance::from_rows("t", vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        let members = vec![
            Chromosome::new(vec![0, 1, 2], &inst, 0),
            Chromosome::new(vec![0, 1, 2], &inst, 0),
        ];
        let pop = Population::new(0, members).unwrap();
        let sel = RankSelector::new(&pop.members);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = select_parents(&pop, &sel, &mut rng, &GaParams::default());
        assert_ne!(a, b);
    }
}
