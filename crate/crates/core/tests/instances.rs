use std::path::PathBuf;

use mrga_core::oracle::{brute_force, held_karp};
use mrga_core::tsplib::{load_instance, parse_str, random_instance};
use mrga_core::{Cost, OptimaRegistry};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Minimal line-oriented reader: everything after EDGE_WEIGHT_SECTION up to
/// EOF is a number, read row-major.
fn reread_full_matrix(text: &str) -> (usize, Vec<Vec<Cost>>) {
    let mut dimension = 0;
    let mut numbers = Vec::new();
    let mut in_section = false;
    for line in text.lines() {
        let line = line.trim();
        if line == "EOF" {
            break;
        }
        if in_section {
            numbers.extend(line.split_whitespace().map(|t| t.parse::<Cost>().unwrap()));
        } else if line.starts_with("DIMENSION") {
            dimension = line.rsplit(':').next().unwrap().trim().parse().unwrap();
        } else if line.starts_with("EDGE_WEIGHT_SECTION") {
            in_section = true;
        }
    }
    assert_eq!(numbers.len(), dimension * dimension);
    (dimension, numbers.chunks(dimension).map(<[Cost]>::to_vec).collect())
}

#[test]
fn three_city_golden() {
    let inst = load_instance(data("fixtures/tiny3.atsp")).unwrap();
    assert_eq!(inst.name(), "tiny3");
    let rows: Vec<Vec<Cost>> = inst.rows().map(<[Cost]>::to_vec).collect();
    assert_eq!(rows, vec![vec![0, 1, 2], vec![2, 0, 3], vec![4, 5, 0]]);
}

#[test]
fn euclidean_golden() {
    let inst = load_instance(data("fixtures/euc4.tsp")).unwrap();
    let rows: Vec<Vec<Cost>> = inst.rows().map(<[Cost]>::to_vec).collect();
    assert_eq!(
        rows,
        vec![
            vec![0, 5, 3, 5],
            vec![5, 0, 4, 3],
            vec![3, 4, 0, 5],
            vec![5, 3, 5, 0],
        ]
    );
    assert!(!inst.is_asymmetric());

    let pair = "NAME: p\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 4\nEOF\n";
    assert_eq!(parse_str(pair).unwrap().distance(0, 1), 5);
}

#[test]
fn br17_matches_independent_reader() {
    let path = data("br17.atsp");
    let text = std::fs::read_to_string(&path).unwrap();
    let (n, expected) = reread_full_matrix(&text);
    let inst = load_instance(&path).unwrap();
    assert_eq!(n, 17);
    assert_eq!(inst.dimension(), 17);
    assert_eq!(inst.name(), "br17");
    assert!(inst.is_asymmetric());
    for (i, row) in expected.iter().enumerate() {
        assert_eq!(inst.row(i), &row[..], "row {i}");
    }
}

#[test]
fn full_matrix_writer_round_trips() {
    let inst = load_instance(data("br17.atsp")).unwrap();
    let again = parse_str(&inst.to_full_matrix()).unwrap();
    assert_eq!(again.rows().collect::<Vec<_>>(), inst.rows().collect::<Vec<_>>());
}

#[test]
fn registry_agrees_with_held_karp() {
    let registry = OptimaRegistry::load(data("optima.txt")).unwrap();
    let mut checked = 0;
    for (name, optimum) in registry.iter() {
        let path = data(&format!("{name}.atsp"));
        let mut inst = load_instance(&path).unwrap();
        if inst.dimension() > mrga_core::oracle::HELD_KARP_MAX {
            continue;
        }
        registry.annotate(&mut inst);
        assert_eq!(inst.known_optimum, Some(optimum));
        assert_eq!(held_karp(&inst).unwrap().optimum_length, optimum, "{name}");
        checked += 1;
    }
    assert!(checked >= 1);
}

#[test]
fn exact_solvers_agree_on_random_instances() {
    for seed in 0..25 {
        let n = 5 + (seed as usize % 6);
        let inst = random_instance(n, 1..=100, seed).unwrap();
        let bf = brute_force(&inst).unwrap();
        let hk = held_karp(&inst).unwrap();
        assert_eq!(bf.optimum_length, hk.optimum_length, "seed {seed}");
    }
}

#[test]
fn random_instance_examples() {
    let flat = random_instance(2, 5..=5, 99).unwrap();
    assert_eq!((flat.distance(0, 1), flat.distance(1, 0)), (5, 5));
    let a = random_instance(8, 1..=100, 42).unwrap();
    let b = random_instance(8, 1..=100, 42).unwrap();
    let c = random_instance(8, 1..=100, 43).unwrap();
    assert_eq!(a.rows().collect::<Vec<_>>(), b.rows().collect::<Vec<_>>());
    assert_ne!(a.rows().collect::<Vec<_>>(), c.rows().collect::<Vec<_>>());
}
