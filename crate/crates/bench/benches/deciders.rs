use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unimeas::harness::{enumerate_instances, oracle_decide, InstanceParams, OracleOptions};
use unimeas::{decide, parse_instance, Instance, Property};

const METRIC: &str = "
[space]
kind = finite
points = [a, b, c, d, e, f]
generators = [[a, b], [c], [e, f]]
weights = [1, 0, 2, 1/2, 0, 3]

[codomain]
kind = metric
points = [p, q, r]
distances = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]

[function]
a = p
b = q
c = r
d = p
e = q
f = q
";

fn cases() -> Vec<(&'static str, Instance)> {
    let mut out: Vec<(&str, Instance)> = ["fix2", "fix4", "fix5", "fix6"]
        .into_iter()
        .zip([2, 4, 5, 6])
        .map(|(n, k)| (n, Instance::fixture(k).unwrap()))
        .collect();
    out.push(("metric6", parse_instance(METRIC).unwrap()));
    out
}

fn deciders(c: &mut Criterion) {
    for (name, inst) in cases() {
        let mut group = c.benchmark_group(format!("decide/{name}"));
        for p in Property::ALL {
            if decide(p, &inst).is_err() {
                continue;
            }
            group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
                b.iter(|| decide(p, black_box(&inst)))
            });
        }
        group.finish();
    }
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    for (name, inst) in cases() {
        group.bench_function(BenchmarkId::new("t2", name), |b| {
            b.iter(|| oracle_decide(Property::T2, black_box(&inst), OracleOptions::default()))
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for n in 1..=3 {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| enumerate_instances(&InstanceParams::with_max_points(n)).unwrap().len())
        });
    }
    group.finish();
}

criterion_group!(benches, deciders, oracle, enumeration);
criterion_main!(benches);
