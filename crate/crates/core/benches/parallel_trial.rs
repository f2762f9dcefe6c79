use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modqubo::anneal::{par::with_workers, trial_acceptances, CounterRng, SolverState};
use modqubo::qubo::{CommunityModel, VariableLayout};
use modqubo::{ConstraintMode, Graph, ModularityParams, PenaltyWeights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid_like(n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    for _ in 0..n / 4 {
        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(2..40)) % n;
        if u != v {
            edges.push((u.min(v), u.max(v), rng.gen_range(0.5..2.0)));
        }
    }
    edges.sort_by_key(|&(u, v, _)| (u, v));
    edges.dedup_by_key(|e| (e.0, e.1));
    Graph::from_edges(n, edges).unwrap()
}

fn bench_trial(c: &mut Criterion) {
    let p = ModularityParams::default();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut group = c.benchmark_group("trial_acceptances");
    for (nodes, groups) in [(300, 10), (1354, 45)] {
        let g = grid_like(nodes);
        let layout = VariableLayout::new(nodes, groups, ConstraintMode::Inequality);
        let model = CommunityModel::build(&g, layout, &p, PenaltyWeights::auto(&g, &p), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits = (0..nodes * groups).map(|_| rng.gen_bool(1.0 / groups as f64)).collect();
        let state = SolverState::from_bits(&model, bits);
        let draws = CounterRng::new(9);
        let mut counts = vec![1];
        if threads > 1 {
            counts.push(threads);
        }
        for workers in counts {
            group.bench_with_input(
                BenchmarkId::new(format!("workers={workers}"), nodes * groups),
                &workers,
                |b, &w| {
                    let mut out = Vec::new();
                    let mut step = 0;
                    with_workers(w, || {
                        b.iter(|| {
                            step += 1;
                            trial_acceptances(&model, &state, 0.01, &draws, step, &mut out)
                        })
                    });
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_trial);
criterion_main!(benches);
