use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use wordlab_bench::{group_map, lie_map, ring, BUDGET};
use wordlab_core::counting::{centralizer_census, count_points, CountOptions};
use wordlab_core::{ChevalleyAlgebra, IdealSpec, Measure};

fn histograms(c: &mut Criterion) {
    let mut g = c.benchmark_group("histogram");
    g.sample_size(10);
    for (word, carrier, r) in [("[x1,x2]", "A:1", "fp:7"), ("[x1,x2]", "A:1", "zmod:3^2"), ("[x1,[x2,x3]]", "A:1", "fp:5")] {
        let map = lie_map(word, carrier, r);
        g.throughput(Throughput::Elements(map.input_count() as u64));
        g.bench_with_input(BenchmarkId::new(word, format!("{carrier}/{r}")), &map, |b, m| {
            b.iter(|| m.histogram(&CountOptions::enumerate()).unwrap())
        });
    }
    let sl2 = group_map("x1 x2 x1^-1 x2^-1", 2, "fp:7");
    g.throughput(Throughput::Elements(sl2.input_count() as u64));
    g.bench_function("commutator/sl:2/fp:7", |b| b.iter(|| sl2.histogram(&CountOptions::enumerate()).unwrap()));
    g.finish();
}

fn workers(c: &mut Criterion) {
    let map = lie_map("[x1,x2]", "A:1", "fp:11");
    let mut g = c.benchmark_group("workers");
    g.sample_size(10);
    for w in [1, 2, 4] {
        let opts = CountOptions { workers: w, ..CountOptions::enumerate() };
        g.bench_with_input(BenchmarkId::from_parameter(w), &opts, |b, o| b.iter(|| map.histogram(o).unwrap()));
    }
    g.finish();
}

fn convolution(c: &mut Criterion) {
    let map = group_map("x1 x2 x1^-1 x2^-1", 2, "fp:5");
    let mu = Measure::from_histogram(&map.histogram(&CountOptions::default()).unwrap());
    let carrier = map.carrier();
    c.bench_function("convolve/sl:2/fp:5", |b| b.iter(|| black_box(&mu).convolve(&mu, carrier).unwrap()));
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("centralizer_census");
    g.sample_size(10);
    for (lit, p) in [("A:1", 7u64), ("A:2", 3), ("B:2", 3)] {
        let alg = ChevalleyAlgebra::parse(lit).unwrap();
        g.bench_function(format!("{lit}/F{p}"), |b| b.iter(|| centralizer_census(&alg, p, BUDGET).unwrap()));
    }
    g.finish();
}

fn points(c: &mut Criterion) {
    let cusp = IdealSpec::parse("x1^2 + x2^3", None, 1).unwrap();
    let sl2 = IdealSpec::sl(2);
    let mut g = c.benchmark_group("count_points");
    g.sample_size(10);
    for r in ["zmod:3^3", "tpoly:3^3", "tpoly:3^2^2"] {
        let rr = ring(r);
        g.bench_with_input(BenchmarkId::new("cusp", r), &rr, |b, rr| b.iter(|| count_points(&cusp, rr, BUDGET).unwrap()));
    }
    let z9 = ring("zmod:3^2");
    g.bench_function("sl2/zmod:3^2", |b| b.iter(|| count_points(&sl2, &z9, BUDGET).unwrap()));
    g.finish();
}

criterion_group!(benches, histograms, workers, convolution, census, points);
criterion_main!(benches);
