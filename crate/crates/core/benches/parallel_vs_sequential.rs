use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lesbar_core::exec::ExecMode;
use lesbar_core::features::{default_catalog, extract_matrix, Resources};
use lesbar_core::forest::{train, ForestConfig};
use lesbar_core::synthetic::synthetic_corpus;

fn forest_config() -> ForestConfig {
    ForestConfig {
        n_trees: 60,
        max_depth: Some(12),
        min_samples_leaf: 2,
        max_bins: 64,
        seed: 1,
        ..ForestConfig::default()
    }
}

fn bench_extraction(c: &mut Criterion) {
    let corpus = synthetic_corpus(400, 3);
    let catalog = default_catalog();
    let resources = Resources::bundled();
    let mut group = c.benchmark_group("feature_extraction");
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            b.iter(|| extract_matrix(&corpus, &catalog, &resources, mode));
        });
    }
    group.finish();
}

fn bench_forest_training(c: &mut Criterion) {
    let corpus = synthetic_corpus(400, 5);
    let catalog = default_catalog();
    let resources = Resources::bundled();
    let matrix = extract_matrix(&corpus, &catalog, &resources, ExecMode::Parallel);
    let (dense, _, _) =
        lesbar_core::features::selection::drop_missing(&matrix, 0.25).expect("synthetic matrix");
    let targets = corpus.mos_values();
    let config = forest_config();

    let mut group = c.benchmark_group("forest_training");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &mode| {
            b.iter(|| train(&dense.columns, &targets, &config, mode).expect("training succeeds"));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_extraction, bench_forest_training);
criterion_main!(benches);
