use criterion::{black_box, criterion_group, criterion_main, Criterion};

use crowdobj_bench::simulated_instance;
use crowdobj_core::{
    full_objective, jensen_probe, reduced_eval, constructive_witness, ModelFamily, ModelHandle,
    ParamPoint,
};

fn bench_reduced_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_eval");
    for family in ModelFamily::ALL {
        let m = ModelHandle::new(family);
        group.bench_function(family.name(), |b| {
            b.iter(|| {
                let mut acc = 0.0;
                let mut x = 0.05;
                while x < 1.0 {
                    let e = reduced_eval(&m, black_box(x), black_box(0.5 * x), true).unwrap();
                    acc += e.value + e.grad_x + e.grad_w;
                    x += 0.01;
                }
                acc
            })
        });
    }
    group.finish();
}

fn bench_full_objective(c: &mut Criterion) {
    let (truth, y) = simulated_instance(50, 200, 5);
    let point = ParamPoint::new(
        truth.x_star.iter().map(|&v| v as f64).collect(),
        truth.w.iter().map(|&w| w.min(1.0 - 1e-9)).collect(),
    );
    let mut group = c.benchmark_group("full_objective_50x200");
    for family in ModelFamily::ALL {
        let m = ModelHandle::new(family);
        group.bench_function(family.name(), |b| {
            b.iter(|| full_objective(&m, black_box(&point), black_box(&y)).unwrap())
        });
    }
    group.finish();
}

fn bench_witness(c: &mut Criterion) {
    let m = ModelHandle::new(ModelFamily::DawidSkene);
    c.bench_function("constructive_witness", |b| {
        b.iter(|| constructive_witness(&m, black_box(0.1)).unwrap())
    });
}

fn bench_probe(c: &mut Criterion) {
    let m = ModelHandle::new(ModelFamily::ConvexPl);
    c.bench_function("jensen_probe_10k", |b| {
        b.iter(|| jensen_probe(&m, 10_000, black_box(7)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_reduced_eval,
    bench_full_objective,
    bench_witness,
    bench_probe
);
criterion_main!(benches);
