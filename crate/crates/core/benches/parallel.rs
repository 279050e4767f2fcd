//! Parallel against single-threaded execution of the hot loops. Build with
//! `--no-default-features` to time the sequential fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tsml::data::make_sine_vs_noise;
use tsml::distances::pairwise;
use tsml::supervised::{generate_kernels, rocket_transform, KNeighbors, KnnConfig, RocketConfig};
use tsml::{CollectionEstimator, DistanceKind};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    [1, threads]
        .into_iter()
        .map(|t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            (format!("{t}-threads"), pool)
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let (x, y) = make_sine_vs_noise(30, 128, 0).unwrap();
    let (test, _) = make_sine_vs_noise(10, 128, 1).unwrap();
    let kernels = generate_kernels(&RocketConfig::new(1000, 0), 1, 128).unwrap();
    let mut knn = KNeighbors::new(KnnConfig::new(1, DistanceKind::Dtw.into()));
    knn.fit(&x, &y).unwrap();

    let mut group = c.benchmark_group("parallel");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("pairwise_dtw", &name), &pool, |b, pool| {
            b.iter(|| pool.install(|| pairwise(&x, &DistanceKind::Dtw.into()).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("rocket_transform", &name), &pool, |b, pool| {
            b.iter(|| pool.install(|| rocket_transform(&x, &kernels).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("knn_predict", &name), &pool, |b, pool| {
            b.iter(|| pool.install(|| knn.predict(&test).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
