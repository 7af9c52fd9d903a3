use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use twoknn_bench::{center, clustered, index, uniform};
use twoknn_core::multi_join::{chained_nested_join, unchained_block_marking};
use twoknn_core::operators::baseline_select_join_inner;
use twoknn_core::select_join::{block_marking_select_join, counting_select_join};
use twoknn_core::two_select::{baseline_two_select, two_knn_select};
use twoknn_core::{ChainedQuery, Coord, JoinFirst, SelectJoinQuery, TwoSelectQuery, UnchainedQuery};

fn select_join(c: &mut Criterion) {
    let idx = index(vec![("A", clustered(10, 2_000, 1)), ("B", uniform(20_000, 2))]);
    let q = SelectJoinQuery {
        outer: "A".into(),
        inner: "B".into(),
        k_join: 8,
        k_select: 8,
        focal: center(),
    };
    let mut group = c.benchmark_group("select_join_inner");
    group.sample_size(10);
    group.bench_function("baseline", |b| b.iter(|| baseline_select_join_inner(&idx, black_box(&q)).unwrap()));
    group.bench_function("counting", |b| b.iter(|| counting_select_join(&idx, black_box(&q)).unwrap()));
    group.bench_function("block_marking", |b| b.iter(|| block_marking_select_join(&idx, black_box(&q)).unwrap()));
    group.finish();
}

fn two_select(c: &mut Criterion) {
    let idx = index(vec![("A", uniform(100_000, 3))]);
    let mut group = c.benchmark_group("two_select");
    for i in [0u32, 4, 8] {
        let q = TwoSelectQuery {
            relation: "A".into(),
            f1: center(),
            k1: 10,
            f2: Coord::new(center().x + 40.0, center().y - 30.0),
            k2: 10 << i,
        };
        group.bench_with_input(BenchmarkId::new("baseline", 10 << i), &q, |b, q| {
            b.iter(|| baseline_two_select(&idx, q).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("two_knn", 10 << i), &q, |b, q| {
            b.iter(|| two_knn_select(&idx, q).unwrap())
        });
    }
    group.finish();
}

fn chained(c: &mut Criterion) {
    let idx = index(vec![("A", uniform(10_000, 4)), ("B", uniform(500, 5)), ("C", uniform(20_000, 6))]);
    let q = ChainedQuery {
        a: "A".into(),
        b: "B".into(),
        c: "C".into(),
        k_ab: 4,
        k_bc: 8,
    };
    let mut group = c.benchmark_group("chained_nested");
    group.sample_size(10);
    group.bench_function("cached", |b| b.iter(|| chained_nested_join(&idx, &q, true).unwrap()));
    group.bench_function("uncached", |b| b.iter(|| chained_nested_join(&idx, &q, false).unwrap()));
    group.finish();
}

fn unchained(c: &mut Criterion) {
    let idx = index(vec![("A", clustered(8, 2_000, 7)), ("B", uniform(20_000, 8)), ("C", clustered(2, 2_000, 9))]);
    let q = UnchainedQuery {
        a: "A".into(),
        b: "B".into(),
        c: "C".into(),
        k_ab: 8,
        k_cb: 8,
    };
    let mut group = c.benchmark_group("unchained_block_marking");
    group.sample_size(10);
    for first in [JoinFirst::Ab, JoinFirst::Cb] {
        group.bench_function(first.to_string(), |b| b.iter(|| unchained_block_marking(&idx, &q, first).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, select_join, two_select, chained, unchained);
criterion_main!(benches);
