use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use voxline_bench::{gen_arbitrary_batch, gen_segment_of_length, workload_voxels};
use voxline_core::{
    batch_preprocess, batch_voxelize, voxelize_parametric, voxelize_walk, PartitionConfig,
};

fn single_segment(c: &mut Criterion) {
    let mut group = c.benchmark_group("single");
    for length in [1_000u64, 10_000, 100_000] {
        let seg = gen_segment_of_length(length, 42);
        group.throughput(Throughput::Elements(length));
        group.bench_with_input(BenchmarkId::new("parametric", length), &seg, |b, seg| {
            b.iter(|| voxelize_parametric(black_box(seg)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("walk", length), &seg, |b, seg| {
            b.iter(|| voxelize_walk(black_box(seg)).unwrap())
        });
    }
    group.finish();
}

fn fixed_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixed-batch");
    group.sample_size(20);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    for length in [20u64, 1_000] {
        let segs: Vec<_> = (0..1024)
            .map(|i| gen_segment_of_length(length, i))
            .collect();
        group.throughput(Throughput::Elements(workload_voxels(&segs)));
        group.bench_with_input(BenchmarkId::new("sequential", length), &segs, |b, segs| {
            b.iter(|| {
                segs.iter()
                    .map(|s| voxelize_parametric(s).unwrap())
                    .collect::<Vec<_>>()
            })
        });
        let cfg = PartitionConfig::new(64, threads).unwrap();
        group.bench_with_input(BenchmarkId::new("batch", length), &segs, |b, segs| {
            b.iter(|| batch_voxelize(&batch_preprocess(black_box(segs)).unwrap(), &cfg).unwrap())
        });
    }
    group.finish();
}

fn arbitrary_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("arbitrary");
    group.sample_size(10);
    let segs = gen_arbitrary_batch(1_000_000, 1024, 7).unwrap();
    let plan = batch_preprocess(&segs).unwrap();
    group.throughput(Throughput::Elements(workload_voxels(&segs)));
    for workers in [1usize, 2, 4] {
        let cfg = PartitionConfig::new(64, workers).unwrap();
        group.bench_with_input(BenchmarkId::new("batch-kernel", workers), &cfg, |b, cfg| {
            b.iter(|| batch_voxelize(&plan, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_segment, fixed_batch, arbitrary_batch);
criterion_main!(benches);
