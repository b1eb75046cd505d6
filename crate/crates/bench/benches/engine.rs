use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use icevertex::counting::{count_nk, count_nk_hypersum};
use icevertex::detform::det_partition;
use icevertex::lattice::{enumerate_states, LatticeSize};
use icevertex::rng::labeled_rng;
use icevertex::weights::{partition_brute, sample_params};

fn enumeration(c: &mut Criterion) {
    let size = LatticeSize::new(4, 4).unwrap();
    c.bench_function("enumerate_4_4", |b| {
        b.iter(|| enumerate_states(black_box(size)).count())
    });
}

fn partition(c: &mut Criterion) {
    let p = sample_params(&mut labeled_rng(1, "bench"), 3, 3, 0.05);
    c.bench_function("partition_brute_3_3", |b| {
        b.iter(|| partition_brute(black_box(&p)).unwrap())
    });
    c.bench_function("det_partition_3_3", |b| {
        b.iter(|| det_partition(black_box(&p)).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    c.bench_function("count_nk_8_4", |b| {
        b.iter(|| count_nk(black_box(8), 4, 2).unwrap())
    });
    c.bench_function("hypersum_6_3", |b| {
        b.iter(|| count_nk_hypersum(black_box(6), 3, 1).unwrap())
    });
}

criterion_group!(benches, enumeration, partition, counting);
criterion_main!(benches);
