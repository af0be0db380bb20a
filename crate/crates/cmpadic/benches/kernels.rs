//! Sequential vs parallel kernels.

use cmpadic::exec::Exec;
use cmpadic::fixture::{CmSetup, SetupParams};
use cmpadic::padic::family;
use cmpadic::petersson::{petersson_product, PeterssonParams};
use cmpadic::qexp::{builtin_or_load, cm_form_with};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const PATHS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernels(c: &mut Criterion) {
    let su = CmSetup::new(SetupParams { bound: 150, ..Default::default() }).unwrap();
    let psi = su.pp.psi_m(&su.ctx, 17);

    let mut g = c.benchmark_group("cm_form");
    for (name, ex) in PATHS {
        g.bench_with_input(BenchmarkId::new(name, 400), &ex, |b, &ex| b.iter(|| cm_form_with(&psi, 400, ex).unwrap()));
    }
    g.finish();

    let fam = family::bg_psi(&su.ctx, &su.pp.psi, 7, 150, 8, 8).unwrap();
    let f = family::qexp_to_padic(&su.ctx, &su.f).unwrap();
    let mut g = c.benchmark_group("lambda_shift_multiply");
    g.sample_size(10);
    for (name, ex) in PATHS {
        g.bench_with_input(BenchmarkId::new(name, 150), &ex, |b, &ex| {
            b.iter(|| family::lambda_shift_multiply_with(&f, su.f.level, &fam, su.k, ex))
        });
    }
    g.finish();

    let delta = builtin_or_load("delta", 60).unwrap();
    let mut g = c.benchmark_group("petersson");
    g.sample_size(10);
    for (name, ex) in PATHS {
        let prm = PeterssonParams { exec: ex, ..Default::default() };
        g.bench_with_input(BenchmarkId::new(name, "delta"), &prm, |b, prm| {
            b.iter(|| petersson_product(&delta, &delta, Some(2), prm).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
