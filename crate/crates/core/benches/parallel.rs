use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circnet_core::cylinder::build_cylinder_rep;
use circnet_core::gen::{random_cylinder_net, random_cylinder_system, GenOptions};
use circnet_core::limits::injectivity_transfer_check;
use circnet_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn rep_validation(c: &mut Criterion) {
    let mut group = c.benchmark_group("rep_validate");
    group.sample_size(10);
    for n in [4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let net = Arc::new(random_cylinder_net(n, &GenOptions::default(), &mut rng).unwrap());
        let rep = build_cylinder_rep(net).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &rep, |b, rep| {
                b.iter(|| rep.validate_with(8, 1e-12, exec))
            });
        }
    }
    group.finish();
}

fn transfer_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer_check");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = random_cylinder_system(4, 3, &GenOptions::default(), &mut rng).unwrap();
    let witnesses: Vec<_> = sys
        .nets
        .iter()
        .map(|n| build_cylinder_rep(n.clone()).unwrap())
        .collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                injectivity_transfer_check(&sys, &witnesses, 200, 1e-12, &mut rng, exec)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, rep_validation, transfer_check);
criterion_main!(benches);
