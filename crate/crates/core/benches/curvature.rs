use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_core::emd::{edge_curvatures, edge_curvatures_seq};
use ricci_core::Graph;

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                pairs.push((i.to_string(), j.to_string()));
            }
        }
    }
    Graph::from_edge_list(pairs).unwrap()
}

fn all_edges(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_curvatures");
    group.sample_size(10);
    for n in [40, 80] {
        let g = random_graph(n, 0.15, n as u64);
        group.bench_with_input(BenchmarkId::new("par", n), &g, |b, g| {
            b.iter(|| edge_curvatures(g))
        });
        group.bench_with_input(BenchmarkId::new("seq", n), &g, |b, g| {
            b.iter(|| edge_curvatures_seq(g))
        });
    }
    group.finish();
}

criterion_group!(benches, all_edges);
criterion_main!(benches);
