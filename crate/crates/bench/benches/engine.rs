use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mrga_core::engine::{
    default_partitioner, identity_mapper, Engine, JobSpec, Record, RecordStore, Reducer,
};
use mrga_core::island::{evolve_job, init_job};
use mrga_core::tsplib::geometric_asymmetric_instance;
use mrga_core::IslandParams;

fn shuffle_job(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine_identity_job");
    for workers in [1, 4] {
        let store = Arc::new(RecordStore::in_memory());
        let records: Vec<Record> = (0..10_000)
            .map(|i| Record::new(i % 10, vec![0u8; 700]))
            .collect();
        let input = store.seal("in", &[records]).unwrap();
        let engine = Engine::new(store, Some(workers)).unwrap();
        let reducer: Reducer =
            Arc::new(|_, key, values| Ok(values.into_iter().map(|v| Record::new(key, v)).collect()));
        let mut job_id = 0;
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |bench, _| {
            bench.iter(|| {
                job_id += 1;
                engine
                    .run_job(&JobSpec {
                        job_id,
                        input: input.clone(),
                        output: None,
                        num_map_tasks: 10,
                        num_reduce_tasks: 10,
                        mapper: identity_mapper(),
                        partitioner: default_partitioner(),
                        reducer: reducer.clone(),
                        master_seed: 0,
                    })
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn island_round(c: &mut Criterion) {
    let mut group = c.benchmark_group("island_round_10x100");
    group.sample_size(10);
    let instance = Arc::new(geometric_asymmetric_instance("bench", 53, 5).unwrap());
    let params = IslandParams::default();
    for workers in [1, 4] {
        let engine = Engine::new(Arc::new(RecordStore::in_memory()), Some(workers)).unwrap();
        let init = init_job(&engine, instance.clone(), &params, 1).unwrap();
        let mut round = 0;
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |bench, _| {
            bench.iter(|| {
                round += 1;
                evolve_job(&engine, &init.output, instance.clone(), &params, round, 10, 1).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, shuffle_job, island_round);
criterion_main!(benches);
