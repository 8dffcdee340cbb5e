use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modlab::ortho::{dual_pair, ingest_files, rotated_grid_map, ArcMarkers};
use modlab::{dirichlet, ncms, tiling};
use std::hint::black_box;
use std::path::PathBuf;

fn solve_and_decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("rotated grid");
    for n in [4, 8, 16] {
        let net = dual_pair(&rotated_grid_map(2, n)).unwrap().primal;
        group.bench_with_input(BenchmarkId::new("solve", n), &net, |b, net| {
            b.iter(|| dirichlet::solve_unit(black_box(net)).unwrap())
        });
        let h = dirichlet::solve_unit(&net).unwrap().potentials;
        group.bench_with_input(BenchmarkId::new("decompose", n), &net, |b, net| {
            b.iter(|| ncms::decompose_with(black_box(net), &h).unwrap())
        });
        let dec = ncms::decompose_with(&net, &h).unwrap();
        group.bench_with_input(BenchmarkId::new("tile", n), &net, |b, net| {
            b.iter(|| tiling::build_tiling(black_box(net), &h, &dec).unwrap())
        });
    }
    group.finish();
}

fn ingest(c: &mut Criterion) {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data");
    let (node, ele) = (data.join("square_32.node"), data.join("square_32.ele"));
    c.bench_function("ingest square mesh 1/32", |b| {
        b.iter(|| ingest_files(black_box(&node), &ele, ArcMarkers::default()).unwrap())
    });
}

criterion_group!(benches, solve_and_decompose, ingest);
criterion_main!(benches);
