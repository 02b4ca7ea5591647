use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mrga_core::codec::{decode, encode};
use mrga_core::ga::{greedy_crossover, next_generation, random_tour, RankSelector};
use mrga_core::oracle::held_karp;
use mrga_core::tsplib::{geometric_asymmetric_instance, random_instance};
use mrga_core::{Chromosome, GaParams, Population};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn crossover(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_crossover");
    for n in [17, 53, 171] {
        let inst = geometric_asymmetric_instance("bench", n, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_tour(n, &mut rng);
        let b = random_tour(n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| greedy_crossover(black_box(&a), black_box(&b), &inst, &mut rng))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("next_generation");
    let params = GaParams::default();
    for n in [17, 53, 171] {
        let inst = geometric_asymmetric_instance("bench", n, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pop = Population::random(0, params.population_size, &inst, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| next_generation(black_box(&pop), &inst, &mut rng, &params))
        });
    }
    group.finish();
}

fn selection(c: &mut Criterion) {
    let inst = geometric_asymmetric_instance("bench", 53, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pop = Population::random(0, 100, &inst, &mut rng).unwrap();
    let selector = RankSelector::new(&pop.members);
    c.bench_function("rank_sample_100", |bench| bench.iter(|| selector.sample(&mut rng)));
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("held_karp");
    group.sample_size(10);
    for n in [10, 13, 15] {
        let inst = random_instance(n, 1..=100, n as u64).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| held_karp(black_box(&inst)).unwrap())
        });
    }
    group.finish();
}

fn codec(c: &mut Criterion) {
    let inst = geometric_asymmetric_instance("bench", 171, 4).unwrap();
    let chromosome = Chromosome::random(&inst, 3, &mut ChaCha8Rng::seed_from_u64(4));
    let bytes = encode(&chromosome).unwrap();
    c.bench_function("codec_encode_171", |bench| bench.iter(|| encode(black_box(&chromosome)).unwrap()));
    c.bench_function("codec_decode_171", |bench| bench.iter(|| decode(black_box(&bytes)).unwrap()));
}

criterion_group!(benches, crossover, generation, selection, exact, codec);
criterion_main!(benches);
