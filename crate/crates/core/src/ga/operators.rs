use rand::seq::SliceRandom;
use rand::Rng;

use crate::tsplib::{Cost, Instance};

/// Uniformly random permutation of `0..n`.
pub fn random_tour<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut tour: Vec<usize> = (0..n).collect();
    tour.shuffle(rng);
    tour
}

/// Length of the closed directed tour, including the edge back to the start.
pub fn tour_length(genes: &[usize], instance: &Instance) -> Cost {
    match genes {
        [] | [_] => 0,
        [first, .., last] => {
            let open: Cost = genes
                .windows(2)
                .map(|w| instance.distance(w[0], w[1]))
                .sum();
            open + instance.distance(*last, *first)
        }
    }
}

pub fn is_permutation(genes: &[usize], n: usize) -> bool {
    if genes.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    genes
        .iter()
        .all(|&c| c < n && !std::mem::replace(&mut seen[c], true))
}

/// Fraction of positions holding the same city once both tours are rotated
/// to start at city 0. Direction is not normalised: tours are directed.
pub fn similarity(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n == 0 {
        return 1.0;
    }
    let start_a = a.iter().position(|&c| c == 0).unwrap_or(0);
    let start_b = b.iter().position(|&c| c == 0).unwrap_or(0);
    let same = (0..n)
        .filter(|k| a[(start_a + k) % n] == b[(start_b + k) % n])
        .count();
    same as f64 / n as f64
}

fn successors(tour: &[usize]) -> Vec<usize> {
    let n = tour.len();
    let mut succ = vec![0; n];
    for (i, &city) in tour.iter().enumerate() {
        succ[city] = tour[(i + 1) % n];
    }
    succ
}

/// Greedy crossover.
///
/// Starts at `parent_a[0]`. From the current city the two parental successor
/// edges are compared: the shorter one wins if both lead to unvisited cities
/// (ties go to `parent_a`), the only open one is taken if the other closes a
/// cycle, and a uniformly random unvisited city is used when both do.
pub fn greedy_crossover<R: Rng + ?Sized>(
    parent_a: &[usize],
    parent_b: &[usize],
    instance: &Instance,
    rng: &mut R,
) -> Vec<usize> {
    let n = parent_a.len();
    debug_assert_eq!(n, parent_b.len());
    if n == 0 {
        return Vec::new();
    }
    let succ_a = successors(parent_a);
    let succ_b = successors(parent_b);

    // Unvisited cities, with each city's slot for O(1) removal.
    let mut open: Vec<usize> = (0..n).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    let mut visited = vec![false; n];
    let mut child = Vec::with_capacity(n);

    let mut visit = |city: usize, open: &mut Vec<usize>, visited: &mut Vec<bool>| {
        visited[city] = true;
        let at = slot[city];
        let last = *open.last().expect("city is unvisited");
        open.swap_remove(at);
        if last != city {
            slot[last] = at;
        }
    };

    let mut current = parent_a[0];
    visit(current, &mut open, &mut visited);
    child.push(current);

    while child.len() < n {
        let via_a = succ_a[current];
        let via_b = succ_b[current];
        let next = match (visited[via_a], visited[via_b]) {
            (false, false) => {
                if instance.distance(current, via_b) < instance.distance(current, via_a) {
                    via_b
                } else {
                    via_a
                }
            }
            (false, true) => via_a,
            (true, false) => via_b,
            (true, true) => open[rng.random_range(0..open.len())],
        };
        visit(next, &mut open, &mut visited);
        child.push(next);
        current = next;
    }
    child
}

/// Swaps the genes at `i` and `j`.
pub fn swap_genes(genes: &mut [usize], i: usize, j: usize) {
    genes.swap(i, j);
}

/// With probability `mutation_prob`, swaps two distinct random positions.
/// Returns whether the swap happened.
pub fn mutate<R: Rng + ?Sized>(genes: &mut [usize], rng: &mut R, mutation_prob: f64) -> bool {
    if !rng.random_bool(mutation_prob) || genes.len() < 2 {
        return false;
    }
    let n = genes.len();
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    swap_genes(genes, i, j);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn three_city() -> Instance {
        Instance::from_rows("t3", vec![vec![0, 1, 2], vec![2, 0, 3], vec![4, 5, 0]]).unwrap()
    }

    fn four_city() -> Instance {
        Instance::from_rows(
            "t4",
            vec![
                vec![0, 1, 4, 9],
                vec![1, 0, 2, 8],
                vec![4, 2, 0, 3],
                vec![9, 8, 3, 0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn tour_length_directed() {
        let inst = three_city();
        assert_eq!(tour_length(&[0, 1, 2], &inst), 8);
        assert_eq!(tour_length(&[0, 2, 1], &inst), 9);
        let two = Instance::from_rows("t2", vec![vec![0, 3], vec![7, 0]]).unwrap();
        assert_eq!(tour_length(&[0, 1], &two), 10);
    }

    #[test]
    fn random_tour_small_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_tour(2, &mut rng);
        assert!(t == vec![0, 1] || t == vec![1, 0]);
        let a = random_tour(5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_tour(5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert!(is_permutation(&a, 5));
    }

    #[test]
    fn random_tour_first_city_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[random_tour(5, &mut rng)[0]] += 1;
        }
        for c in counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 0.2).abs() <= 0.02, "{counts:?}");
        }
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity(&[0, 1, 2, 3], &[0, 1, 2, 3]), 1.0);
        assert_eq!(similarity(&[0, 1, 2, 3], &[2, 3, 0, 1]), 1.0);
        assert_eq!(similarity(&[0, 1, 2, 3], &[0, 2, 1, 3]), 0.5);
        // reversal is a different directed tour
        assert!(similarity(&[0, 1, 2, 3], &[0, 3, 2, 1]) < 1.0);
    }

    #[test]
    fn crossover_identical_parents() {
        let inst = four_city();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            greedy_crossover(&[0, 1, 2, 3], &[0, 1, 2, 3], &inst, &mut rng),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn crossover_hand_trace() {
        // 0 -> 1 (1) beats 0 -> 2 (4); from 1, B's successor 0 is visited so
        // A's 1 -> 2 is taken; from 2 both parents continue to 3.
        let inst = four_city();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            greedy_crossover(&[0, 1, 2, 3], &[0, 2, 3, 1], &inst, &mut rng),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn crossover_tie_prefers_first_parent() {
        let inst = Instance::from_rows(
            "tie",
            vec![vec![0, 5, 5], vec![5, 0, 5], vec![5, 5, 0]],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(greedy_crossover(&[0, 1, 2], &[0, 2, 1], &inst, &mut rng), vec![0, 1, 2]);
        assert_eq!(greedy_crossover(&[0, 2, 1], &[0, 1, 2], &inst, &mut rng), vec![0, 2, 1]);
    }

    #[test]
    fn forced_swap() {
        let mut genes = vec![0, 1, 2, 3];
        swap_genes(&mut genes, 1, 3);
        assert_eq!(genes, vec![0, 3, 2, 1]);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut g = vec![0, 1, 2, 3, 4];
            assert!(mutate(&mut g, &mut rng, 1.0));
            let moved = g.iter().enumerate().filter(|(i, &c)| *i != c).count();
            assert_eq!(moved, 2);
        }
    }

    #[test]
    fn zero_probability_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = vec![3, 1, 0, 2];
        for _ in 0..1000 {
            assert!(!mutate(&mut g, &mut rng, 0.0));
        }
        assert_eq!(g, vec![3, 1, 0, 2]);
    }

    #[test]
    fn mutation_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut g: Vec<usize> = (0..10).collect();
        let fired = (0..100_000).filter(|_| mutate(&mut g, &mut rng, 0.021)).count();
        assert!((1_800..=2_400).contains(&fired), "fired {fired}");
        assert!(is_permutation(&g, 10));
    }

    #[test]
    fn permutation_check() {
        assert!(is_permutation(&[2, 0, 1], 3));
        assert!(!is_permutation(&[2, 0, 0], 3));
        assert!(!is_permutation(&[2, 0, 3], 3));
        assert!(!is_permutation(&[0, 1], 3));
    }
}
