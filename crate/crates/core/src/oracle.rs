//! Exact solvers used as ground truth: exhaustive enumeration for tiny
//! instances and the Held-Karp subset DP up to 18 cities.
//!
//! Both treat tours as directed cycles anchored at city 0, so on asymmetric
//! instances a tour and its reversal are counted separately.

use serde::Serialize;
use thiserror::Error;

use crate::tsplib::{Cost, Instance};

pub const BRUTE_FORCE_MAX: usize = 11;
pub const HELD_KARP_MAX: usize = 18;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{solver} handles at most {cap} cities, instance has {n}")]
    TooLarge {
        solver: &'static str,
        n: usize,
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactResult {
    pub optimum_length: Cost,
    /// Starts at city 0.
    pub optimum_tour: Vec<usize>,
}

/// Tries all `(n - 1)!` tours starting at city 0 in lexicographic order and
/// returns the first shortest one.
pub fn brute_force(instance: &Instance) -> Result<ExactResult, OracleError> {
    let n = instance.dimension();
    if n > BRUTE_FORCE_MAX {
        return Err(OracleError::TooLarge {
            solver: "brute force",
            n,
            cap: BRUTE_FORCE_MAX,
        });
    }
    let mut search = Enumeration {
        instance,
        path: vec![0],
        used: vec![false; n],
        best: None,
    };
    search.used[0] = true;
    search.extend(0);
    let (optimum_length, optimum_tour) = search.best.expect("n >= 2 has at least one tour");
    Ok(ExactResult {
        optimum_length,
        optimum_tour,
    })
}

struct Enumeration<'a> {
    instance: &'a Instance,
    path: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Cost, Vec<usize>)>,
}

impl Enumeration<'_> {
    fn extend(&mut self, partial: Cost) {
        let n = self.instance.dimension();
        let last = *self.path.last().unwrap();
        if self.path.len() == n {
            let total = partial + self.instance.distance(last, 0);
            if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                self.best = Some((total, self.path.clone()));
            }
            return;
        }
        for next in 1..n {
            if self.used[next] {
                continue;
            }
            self.used[next] = true;
            self.path.push(next);
            self.extend(partial + self.instance.distance(last, next));
            self.path.pop();
            self.used[next] = false;
        }
    }
}

/// Held-Karp dynamic program over (visited subset, last city).
pub fn held_karp(instance: &Instance) -> Result<ExactResult, OracleError> {
    let n = instance.dimension();
    if n > HELD_KARP_MAX {
        return Err(OracleError::TooLarge {
            solver: "Held-Karp",
            n,
            cap: HELD_KARP_MAX,
        });
    }
    // Cities 1..n are bits 0..m of the mask; city 0 is the fixed start.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let city = |bit: usize| bit + 1;
    let mut cost = vec![Cost::MAX; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];

    for j in 0..m {
        cost[(1 << j) * m + j] = instance.distance(0, city(j));
    }
    for mask in 1..=full {
        for j in 0..m {
            let here = cost[mask * m + j];
            if mask & (1 << j) == 0 || here == Cost::MAX {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let candidate = here + instance.distance(city(j), city(k));
                let slot = next * m + k;
                if candidate < cost[slot] {
                    cost[slot] = candidate;
                    parent[slot] = j as u8;
                }
            }
        }
    }

    let (last, optimum_length) = (0..m)
        .map(|j| (j, cost[full * m + j] + instance.distance(city(j), 0)))
        .min_by_key(|&(j, c)| (c, j))
        .expect("at least one city besides the start");

    let mut reversed = Vec::with_capacity(n);
    let (mut mask, mut j) = (full, last);
    loop {
        reversed.push(city(j));
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if mask == 0 {
            break;
        }
        j = p as usize;
    }
    reversed.push(0);
    reversed.reverse();
    Ok(ExactResult {
        optimum_length,
        optimum_tour: reversed,
    })
}
