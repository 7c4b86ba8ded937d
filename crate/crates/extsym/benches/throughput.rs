//! Data-parallel vs sequential throughput on the two batch workloads: verifying
//! catalog entries and probing curvature on an embedded orbit. Build with
//! `--no-default-features` to also run the library internals sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use extsym::exactlin::int;
use extsym::geom::{curvature_probe, EmbeddingSampler, Item, Tolerances};
use extsym::liecore::{is_full, verify_algebra};
use extsym::par::{par_map, seq_map};
use extsym::quadext::{catalog_algebra, catalog_grid, CatalogDescriptor};

fn verify(d: &CatalogDescriptor) -> bool {
    let g = catalog_algebra(d).unwrap();
    verify_algebra(&g).all_pass() && is_full(&g).unwrap().0
}

fn catalog_verify(c: &mut Criterion) {
    let ds = catalog_grid(1, &[int(1), int(-1)], &[0, 1]);
    let mut group = c.benchmark_group("catalog_verify");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("parallel", ds.len()), &ds, |b, ds| b.iter(|| par_map(ds, verify)));
    group.bench_with_input(BenchmarkId::new("sequential", ds.len()), &ds, |b, ds| b.iter(|| seq_map(ds, verify)));
    group.finish();
}

fn curvature_probes(c: &mut Criterion) {
    let item: Item = "item-4:k=1,l=0,m=1:c=1".parse().unwrap();
    let s = EmbeddingSampler::closed_form(&item);
    let tol = Tolerances::default();
    let n = s.param_dim();
    let pts: Vec<Vec<f64>> = (0..64).map(|i| (0..n).map(|j| 0.4 * (((i * 7 + j * 3) % 11) as f64 / 10.0 - 0.5)).collect()).collect();
    let probe = |q: &Vec<f64>| curvature_probe(&s, q, &tol).unwrap().max_riemann;
    let mut group = c.benchmark_group("curvature_probes");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("parallel", pts.len()), &pts, |b, pts| b.iter(|| par_map(pts, probe)));
    group.bench_with_input(BenchmarkId::new("sequential", pts.len()), &pts, |b, pts| b.iter(|| seq_map(pts, probe)));
    group.finish();
}

criterion_group!(benches, catalog_verify, curvature_probes);
criterion_main!(benches);
