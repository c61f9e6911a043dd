use std::hint::black_box;

use compacton::dsl::{expand_alias, parse_equation};
use compacton::exec::Execution;
use compacton::frame::{expand_fn, ExpandOptions};
use compacton::similarity::{build_relation, sweep, Bindings, Branch, VelocitySpec};
use compacton::simulator::{ConservationLaw, InitialData, SimConfig, Stepper};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_sweep(c: &mut Criterion) {
    let rel = build_relation(&parse_equation(&expand_alias("NLS:4").unwrap()).unwrap()).unwrap();
    let amplitudes: Vec<f64> = (1..=85).map(|i| i as f64 * 0.01).collect();
    let velocities = VelocitySpec::Range { min: 0.0, max: 5.0, samples: 200 };
    let branches = Branch::canonical(rel.slots());
    let mut group = c.benchmark_group("sweep_nls4");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep(&rel, &Bindings::new(), &amplitudes, &velocities, &branches, black_box(exec)).unwrap())
        });
    }
    group.finish();
}

fn bench_rhs(c: &mut Criterion) {
    let ast = parse_equation(&expand_alias("K22").unwrap()).unwrap();
    let law = ConservationLaw::from_ast(&ast, &Bindings::new()).unwrap();
    let mut group = c.benchmark_group("k22_rhs");
    for (name, exec) in MODES {
        let cfg = SimConfig { points: 1 << 16, domain_length: 4096.0, exec, ..SimConfig::default() };
        let u = InitialData::Compacton { velocity: 0.75, center: 0.0 }.sample(&cfg).unwrap();
        let mut stepper = Stepper::new(&law, &cfg);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| stepper.rhs(black_box(&u))));
    }
    group.finish();
}

fn bench_expand(c: &mut Criterion) {
    let f = |x: f64| (-(x * x)).exp();
    let mut group = c.benchmark_group("frame_expand");
    group.sample_size(20);
    for (name, exec) in MODES {
        let opts = ExpandOptions { j_min: 0, j_max: 6, exec, edge_tolerance: 1e-10, ..Default::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| expand_fn(f, (-8.0, 8.0), 1.0 / 1024.0, black_box(&opts)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_rhs, bench_expand);
criterion_main!(benches);
