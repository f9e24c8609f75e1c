use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ladderlab::local_times::{compute, compute_sparse};
use ladderlab::rng::{path_stream, Domain};
use ladderlab::rwrsb::{cost_direct, cost_via_local_times};
use ladderlab::spitzer::{order_for, phi_factor, sb_lhs, CostMap, JointLattice, Transform};
use ladderlab::tail::{fit_tail, FitOptions, TailSample};
use ladderlab::walk::first_ladder;
use ladderlab::{JumpLaw, SceneryLaw, SceneryRealization};
use ladderlab_bench::ladder_paths;
use std::hint::black_box;

fn walks(c: &mut Criterion) {
    let mut g = c.benchmark_group("first_ladder");
    for (name, law) in [
        ("simple", JumpLaw::simple_symmetric()),
        ("zipf-1.5", JumpLaw::zipf(1.5).unwrap()),
    ] {
        g.bench_function(name, |b| {
            let mut i = 0u64;
            b.iter(|| {
                i += 1;
                black_box(first_ladder(&law, path_stream(1, Domain::Walk, i), 1 << 16).unwrap())
            })
        });
    }
    g.finish();
}

fn local_times(c: &mut Criterion) {
    let paths = ladder_paths(&JumpLaw::zipf(1.5).unwrap(), 256, 2);
    let mut g = c.benchmark_group("local_times");
    g.bench_function("dense", |b| {
        b.iter(|| {
            paths
                .iter()
                .map(|p| compute(p, 0, p.len()).unwrap().runs().len())
                .sum::<usize>()
        })
    });
    g.bench_function("sparse", |b| {
        b.iter(|| {
            paths
                .iter()
                .map(|p| compute_sparse(p, 0, p.len()).unwrap().runs().len())
                .sum::<usize>()
        })
    });
    g.finish();
}

fn cost_routes(c: &mut Criterion) {
    let paths = ladder_paths(&JumpLaw::zipf(1.5).unwrap(), 256, 3);
    let law = SceneryLaw::pareto(1.5, 1.0).unwrap();
    let scenery = || SceneryRealization::realize(law.clone(), law.clone(), 4);
    let mut g = c.benchmark_group("cost");
    g.bench_function("direct", |b| {
        b.iter_batched(
            scenery,
            |mut sc| {
                paths
                    .iter()
                    .map(|p| cost_direct(p, &mut sc).unwrap().ladder_costs[0])
                    .sum::<f64>()
            },
            BatchSize::SmallInput,
        )
    });
    g.bench_function("via_local_times", |b| {
        b.iter_batched(
            scenery,
            |mut sc| {
                paths
                    .iter()
                    .map(|p| cost_via_local_times(p, &mut sc).unwrap().ladder_costs[0])
                    .sum::<f64>()
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn generating_functions(c: &mut Criterion) {
    let law = JumpLaw::simple_symmetric();
    let lat = JointLattice::new(&law, &CostMap::Abs).unwrap();
    let mut g = c.benchmark_group("generating");
    g.bench_function("sb_lhs z=0.9", |b| {
        b.iter(|| {
            sb_lhs(
                0.9,
                0.3,
                0.2,
                &lat,
                Transform::Fourier,
                order_for(0.9, 1e-10),
            )
            .unwrap()
        })
    });
    g.bench_function("phi_factor z=1 zipf", |b| {
        let zipf = JumpLaw::zipf(1.5).unwrap();
        b.iter(|| phi_factor(1.0, 0.0, &zipf, &CostMap::Zero, Transform::Fourier).unwrap())
    });
    g.finish();
}

fn hill(c: &mut Criterion) {
    let law = SceneryLaw::pareto(0.7, 1.0).unwrap();
    let mut rng = path_stream(5, Domain::Auxiliary(0), 0);
    let sample = TailSample::new((0..1_000_000).map(|_| law.sample(&mut rng)).collect());
    c.bench_function("hill 1e6", |b| {
        b.iter(|| fit_tail(&sample, &FitOptions::hill(10_000)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = walks, local_times, cost_routes, generating_functions, hill
}
criterion_main!(benches);
