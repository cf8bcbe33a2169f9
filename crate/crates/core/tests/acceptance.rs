//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use ricci_core::adversarial::{run_experiment, FamilyKind, FamilyMix, Strategy};
use ricci_core::bounds::curvature_bounds;
use ricci_core::emd::{
    brute_force_emd, curvature_avg, curvature_edge, curvature_node, edge_curvatures, emd_transport,
    min_weight_perfect_matching, reduced_instance, MpmctInstance,
};
use ricci_core::local::{approx_edge, make_padded_session, ApproxMode};
use ricci_core::matching::{LocalMatchingConfig, MatchingBackend};
use ricci_core::numeric::{int, one, ratio};
use ricci_core::oracle::{BipartiteOracle, QuerySession, Side, Vertex, WeightedBipartite};
use ricci_core::par;
use ricci_core::reduction::{pad_to_equal, padded_emd, realize_as_graph};
use ricci_core::sampling::{
    estimate_avg_curvature, estimate_node_curvature, sample_uniform_edge, EstimatorConfig,
};
use ricci_core::{Error, Graph, NodeId, Result};

type Verdict = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn graph_from(pairs: &[(usize, usize)]) -> Graph {
    Graph::from_edge_list(pairs.iter().map(|(a, b)| (a.to_string(), b.to_string()))).unwrap()
}

fn named(pairs: &[(&str, &str)]) -> Graph {
    Graph::from_edge_list(pairs.iter().map(|&(a, b)| (a.to_string(), b.to_string()))).unwrap()
}

/// Erdos-Renyi graph with maximum degree at most `max_deg`, by rejection.
fn bounded_er(rng: &mut ChaCha8Rng, max_deg: usize) -> Graph {
    loop {
        let n = rng.gen_range(4..=40);
        let p = rng.gen_range(1.0..3.0) / n as f64;
        let mut deg = vec![0; n];
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    pairs.push((i, j));
                    deg[i] += 1;
                    deg[j] += 1;
                }
            }
        }
        if !pairs.is_empty() && deg.iter().all(|&d| d <= max_deg) {
            return graph_from(&pairs);
        }
    }
}

fn er(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    loop {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    pairs.push((i, j));
                }
            }
        }
        if !pairs.is_empty() {
            return graph_from(&pairs);
        }
    }
}

fn chi_square_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    1.0 - ChiSquared::new((counts.len() - 1) as f64)
        .unwrap()
        .cdf(stat)
}

fn corpus() -> Vec<Graph> {
    (0..200u64)
        .map(|seed| bounded_er(&mut ChaCha8Rng::seed_from_u64(seed), 4))
        .collect()
}

fn exact_vs_brute_force() -> Verdict {
    let start = Instant::now();
    let graphs = corpus();
    let mut edges = 0;
    for (t, g) in graphs.iter().enumerate() {
        for (u, v) in g.edges() {
            let b = g.local_bipartite(u, v).map_err(|e| e.to_string())?;
            let flow = emd_transport(&b).value;
            let brute = brute_force_emd(&b).map_err(|e| e.to_string())?;
            ensure!(
                flow == brute,
                "graph {t}, edge ({u}, {v}): {flow} vs {brute}"
            );
            edges += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took <= Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "{edges} edges on 200 graphs in {:.1}s",
        took.as_secs_f64()
    ))
}

fn matching_reformulation() -> Verdict {
    let mut checked = 0;
    for (t, g) in corpus().iter().enumerate() {
        for (u, v) in g.edges() {
            if g.degree(u) != g.degree(v) {
                continue;
            }
            let h = reduced_instance(g, u, v).map_err(|e| e.to_string())?;
            let via_matching =
                one() - ratio(min_weight_perfect_matching(&h), 1 + g.degree(v) as i64);
            let c = curvature_edge(g, u, v).map_err(|e| e.to_string())?;
            ensure!(
                via_matching == c,
                "graph {t}, edge ({u}, {v}): {via_matching} vs {c}"
            );
            checked += 1;
        }
    }
    ensure!(checked > 0, "no equal-degree edges in the corpus");
    Ok(format!("{checked} equal-degree edges"))
}

fn degree_overlap_bounds() -> Verdict {
    let mut edges = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(3..=60);
        let p = rng.gen_range(0.05..0.5);
        let g = er(&mut rng, n, p);
        for (u, v) in g.edges() {
            let b = curvature_bounds(&g, u, v).map_err(|e| e.to_string())?;
            let c = curvature_edge(&g, u, v).map_err(|e| e.to_string())?;
            let emd = one() - c.clone();
            ensure!(
                b.lower <= c && c <= b.upper,
                "seed {seed}, ({u}, {v}): {} <= {c} <= {}",
                b.lower,
                b.upper
            );
            ensure!(
                b.tvd <= emd && emd <= b.tvd.clone() * BigInt::from(3),
                "seed {seed}, ({u}, {v}): tvd {} emd {emd}",
                b.tvd
            );
            edges += 1;
        }
    }
    Ok(format!("{edges} edges on 100 graphs"))
}

fn small_graph_values() -> Verdict {
    let cases: [(&str, Graph, (&str, &str), BigRational); 4] = [
        ("K2", named(&[("1", "2")]), ("1", "2"), int(1)),
        (
            "K3",
            named(&[("a", "b"), ("b", "c"), ("c", "a")]),
            ("a", "b"),
            int(1),
        ),
        (
            "C4",
            named(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]),
            ("a", "b"),
            ratio(2, 3),
        ),
        (
            "P4",
            named(&[("a", "u"), ("u", "v"), ("v", "b")]),
            ("u", "v"),
            int(0),
        ),
    ];
    for (name, g, (a, b), expect) in cases {
        let (u, v) = (g.id(a).unwrap(), g.id(b).unwrap());
        let c = curvature_edge(&g, u, v).map_err(|e| e.to_string())?;
        ensure!(c == expect, "{name}: {c} != {expect}");
        let brute = one() - brute_force_emd(&g.local_bipartite(u, v).unwrap()).unwrap();
        ensure!(brute == expect, "{name}: brute force {brute} != {expect}");
    }
    Ok("K2 = 1, K3 = 1, C4 = 2/3, P4 middle = 0".into())
}

fn padding_gap() -> Verdict {
    let (mut checked, mut exact_cases, mut seed) = (0, 0, 0u64);
    while checked < 100 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        seed += 1;
        let n = rng.gen_range(6..=30);
        let p = rng.gen_range(0.1..0.4);
        let g = er(&mut rng, n, p);
        for (u, v) in g.edges() {
            if checked == 100 || g.degree(u) == g.degree(v) {
                continue;
            }
            let lb = g.local_bipartite(u, v).unwrap();
            let p = pad_to_equal(&lb);
            let emd = emd_transport(&lb).value;
            let padded = padded_emd(&p);
            let slack = ratio(3 * p.b as i64, lb.right.len() as i64);
            ensure!(emd <= padded, "({u}, {v}): padded {padded} below {emd}");
            ensure!(
                padded <= emd.clone() + slack,
                "({u}, {v}): padded {padded}, emd {emd}, b {}",
                p.b
            );
            if p.b == 0 {
                ensure!(padded == emd, "({u}, {v}): b = 0 but {padded} != {emd}");
                exact_cases += 1;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "100 unequal-degree edges, {exact_cases} with exact padding"
    ))
}

fn realization_round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for t in 0..100 {
        let n = rng.gen_range(1..=8);
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(1..=3)).collect())
            .collect();
        let h = MpmctInstance::from_rows(&rows).unwrap();
        let (g, u, v) = realize_as_graph(&h);
        let back = reduced_instance(&g, u, v).map_err(|e| e.to_string())?;
        ensure!(
            back.weight == h.weight,
            "instance {t} differs after realization"
        );
    }
    Ok("100 instances, n <= 8".into())
}

fn gadget(rows: &[Vec<u8>]) -> Arc<WeightedBipartite> {
    let (p, q) = (rows.len(), rows[0].len());
    Arc::new(
        WeightedBipartite::new(
            (0..p).map(|i| format!("x{i}")).collect(),
            (0..q).map(|j| format!("y{j}")).collect(),
            rows.concat(),
        )
        .unwrap(),
    )
}

fn random_gadget(rng: &mut ChaCha8Rng, p: usize, q: usize) -> Arc<WeightedBipartite> {
    let rows: Vec<Vec<u8>> = (0..p)
        .map(|_| (0..q).map(|_| rng.gen_range(1..=3)).collect())
        .collect();
    gadget(&rows)
}

/// Neighbors of padded row / right node in class `s`, from the materialized padding.
fn padded_neighbors(h: &WeightedBipartite, a: usize, b: usize, x: Vertex, s: u8) -> Vec<usize> {
    let p = h.left_len();
    let w = |row: usize, col: usize| {
        if row < p * a {
            h.weight(row / a, col)
        } else {
            3
        }
    };
    match x.side {
        Side::Left => (0..h.right_len()).filter(|&c| w(x.index, c) == s).collect(),
        Side::Right => (0..p * a + b).filter(|&r| w(r, x.index) == s).collect(),
    }
}

fn padding_simulation() -> Verdict {
    // Overhead per virtual query.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = random_gadget(&mut rng, 4, 11);
    let mut s =
        make_padded_session(QuerySession::on_bipartite(Arc::clone(&h), 1), 2, 3, 2).unwrap();
    for step in 0..10_000 {
        if step % 400 == 0 {
            s.reset_exploration();
        }
        let side = if rng.gen_bool(0.5) {
            Side::Left
        } else {
            Side::Right
        };
        let x = Vertex {
            side,
            index: rng.gen_range(0..11),
        };
        let class = rng.gen_range(1..=3);
        let before = s.inner().counters();
        let kind = rng.gen_range(0..3);
        match kind {
            0 => drop(s.weighted_neighbor_query(x, class).unwrap()),
            1 => drop(s.selective_degree_query(x, class).unwrap()),
            _ => drop(
                s.pair_query(Vertex::left(x.index), Vertex::right(rng.gen_range(0..11)))
                    .unwrap(),
            ),
        }
        let d = s.inner().counters().since(&before);
        let ok = match kind {
            0 => d.weighted_neighbor <= 1 && d.selective_degree <= 1 && d.pair == 0,
            1 => d.weighted_neighbor == 0 && d.selective_degree <= 1 && d.pair == 0,
            _ => d.pair <= 1 && d.weighted_neighbor == 0 && d.selective_degree == 0,
        };
        ensure!(
            ok && d.neighbor == 0,
            "step {step}: real queries {d:?} for one virtual query"
        );
    }

    // First answers are uniform over the padded neighbor set.
    let fixed: [(
        Arc<WeightedBipartite>,
        usize,
        usize,
        Vertex,
        u8,
        Option<Vertex>,
    ); 3] = [
        // x_1^2 after one query on x_1^1.
        (
            gadget(&[vec![3, 3, 1, 3, 2, 3], vec![1; 6], vec![2; 6]]),
            2,
            0,
            Vertex::left(1),
            3,
            Some(Vertex::left(0)),
        ),
        // A right node whose weight-3 rows include a special row.
        (
            gadget(&[
                vec![3, 1, 2, 2, 2, 2, 2],
                vec![1, 2, 1, 1, 1, 1, 1],
                vec![3, 1, 2, 2, 2, 2, 2],
            ]),
            2,
            1,
            Vertex::right(0),
            3,
            None,
        ),
        // A fresh copy row of a node with three weight-2 neighbors.
        (
            gadget(&[vec![2, 1, 2, 3, 2], vec![3, 3, 3, 3, 3]]),
            2,
            1,
            Vertex::left(1),
            2,
            None,
        ),
    ];
    let mut p_values = Vec::new();
    for (t, (h, a, b, key, class, warmup)) in fixed.iter().enumerate() {
        let mut counts: HashMap<usize, u64> = HashMap::new();
        for seed in 0..20_000u64 {
            let mut s = make_padded_session(
                QuerySession::on_bipartite(Arc::clone(h), seed),
                *a,
                *b,
                seed ^ 0xabc,
            )
            .unwrap();
            if let Some(w) = warmup {
                s.weighted_neighbor_query(*w, *class).unwrap();
            }
            let got = s
                .weighted_neighbor_query(*key, *class)
                .unwrap()
                .expect("non-empty key");
            *counts.entry(got.index).or_default() += 1;
        }
        let support: BTreeSet<usize> = counts.keys().copied().collect();
        let truth: BTreeSet<usize> = padded_neighbors(h, *a, *b, *key, *class)
            .into_iter()
            .collect();
        ensure!(
            support == truth,
            "instance {t}: answers {support:?}, padded set {truth:?}"
        );
        let counts: Vec<u64> = counts.values().copied().collect();
        let pv = chi_square_p(&counts);
        ensure!(pv > 0.01, "instance {t}: chi-square p = {pv:.4}");
        p_values.push(format!("{pv:.3}"));
    }

    // Draining any key returns the padded neighbor set.
    let mut keys = 0;
    for (seed, p, a, b) in [
        (1u64, 3usize, 2usize, 1usize),
        (2, 2, 3, 1),
        (3, 4, 1, 3),
        (4, 3, 3, 2),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_gadget(&mut rng, p, a * p + b);
        let mut s =
            make_padded_session(QuerySession::on_bipartite(Arc::clone(&h), seed), a, b, seed)
                .unwrap();
        for side in [Side::Left, Side::Right] {
            for index in 0..a * p + b {
                for class in 1..=3 {
                    let x = Vertex { side, index };
                    let mut got = Vec::new();
                    while let Some(z) = s.weighted_neighbor_query(x, class).unwrap() {
                        got.push(z.index);
                    }
                    got.sort_unstable();
                    ensure!(
                        got == padded_neighbors(&h, a, b, x, class),
                        "{x} class {class} drains wrongly"
                    );
                    keys += 1;
                }
            }
        }
    }
    Ok(format!(
        "10000 mixed queries; chi-square p = [{}]; {keys} keys drained",
        p_values.join(", ")
    ))
}

/// Reduced instance with at most `d` weight-1 and `d` weight-2 pairs per node.
fn bounded_instance(seed: u64, d: usize) -> MpmctInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(20..=60);
    let mut rows = vec![vec![3u8; n]; n];
    for class in [1u8, 2] {
        let (mut ld, mut rd) = (vec![0; n], vec![0; n]);
        for _ in 0..n * d / 2 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if rows[i][j] == 3 && ld[i] < d && rd[j] < d {
                rows[i][j] = class;
                ld[i] += 1;
                rd[j] += 1;
            }
        }
    }
    MpmctInstance::from_rows(&rows).unwrap()
}

fn approximation_contract() -> Verdict {
    let eps = ratio(1, 10);
    let trials = 300;
    let outcomes: Vec<Result<[bool; 4]>> = par::map_range(trials, |t| {
        let seed = 9000 + t as u64;
        let h = bounded_instance(seed, 3);
        let (g, u, v) = realize_as_graph(&h);
        let c = curvature_edge(&g, u, v)?;
        let local = MatchingBackend::Local(LocalMatchingConfig::new(seed));
        let mut hits = [false; 4];
        for (k, (mode, backend)) in [
            (ApproxMode::EqualB, &MatchingBackend::Exact),
            (ApproxMode::EqualB, &local),
            (ApproxMode::EqualA, &MatchingBackend::Exact),
            (ApproxMode::EqualA, &local),
        ]
        .into_iter()
        .enumerate()
        {
            let out = approx_edge(&g, u, v, mode, &eps, &eps, 3, backend, seed)?;
            let radius = if mode == ApproxMode::EqualB {
                ratio(1, 2) + eps.clone()
            } else {
                one() + eps.clone()
            };
            hits[k] = out.estimate <= c && out.estimate >= c.clone() - radius;
        }
        Ok(hits)
    });
    let mut counts = [0usize; 4];
    for o in outcomes {
        let hits = o.map_err(|e| e.to_string())?;
        for k in 0..4 {
            counts[k] += usize::from(hits[k]);
        }
    }
    let detail = format!(
        "(1/2 + eps): exact {}/{trials}, local {}/{trials}; (1 + eps): exact {}/{trials}, local {}/{trials}",
        counts[0], counts[1], counts[2], counts[3]
    );
    ensure!(counts[0] == trials && counts[2] == trials, "{detail}");
    ensure!(
        counts[1] * 10 >= trials * 9 && counts[3] * 10 >= trials * 9,
        "{detail}"
    );
    Ok(detail)
}

fn key(x: NodeId, y: NodeId) -> (NodeId, NodeId) {
    (x.min(y), x.max(y))
}

/// Exact curvature table with `+r` added on edges whose endpoint indices sum to an even number.
fn biased_table(g: &Graph, r: &BigRational) -> impl Fn(NodeId, NodeId) -> Result<BigRational> {
    let map: HashMap<(NodeId, NodeId), BigRational> = edge_curvatures(g)
        .into_iter()
        .map(|((a, b), c)| {
            let c = if (a.0 + b.0) % 2 == 0 {
                c + r.clone()
            } else {
                c
            };
            (key(a, b), c)
        })
        .collect();
    move |x, y| {
        map.get(&key(x, y))
            .cloned()
            .ok_or_else(|| Error::NotAnEdge(x.to_string(), y.to_string()))
    }
}

fn sampling_estimators() -> Verdict {
    let r = ratio(1, 5);
    let two_r = r.clone() * BigInt::from(2);
    let mut report = Vec::new();

    // Star center and a hub on a sparse random graph: degree above k.
    let star = Arc::new(graph_from(&(1..=210).map(|i| (0, i)).collect::<Vec<_>>()));
    let hub = {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut pairs: Vec<(usize, usize)> = (1..=240).map(|i| (0, i)).collect();
        for i in 1..=240 {
            for j in i + 1..=240 {
                if rng.gen_bool(0.01) {
                    pairs.push((i, j));
                }
            }
        }
        Arc::new(graph_from(&pairs))
    };
    for (name, g) in [("star", &star), ("random+hub", &hub)] {
        let center = g.id("0").unwrap();
        let truth = curvature_node(g, center).map_err(|e| e.to_string())?;
        let b = biased_table(g, &r);
        let mut hits = 0;
        for seed in 0..300u64 {
            let cfg = EstimatorConfig::new(r.clone(), seed).unwrap();
            let mut s = QuerySession::on_graph(Arc::clone(g), seed);
            let out =
                estimate_node_curvature(&mut s, center, &cfg, &b).map_err(|e| e.to_string())?;
            ensure!(
                !out.exhaustive,
                "{name}: expected sampling, got full enumeration"
            );
            if (out.estimate - truth.clone()).abs() <= two_r {
                hits += 1;
            }
        }
        ensure!(hits * 3 >= 600, "{name}: {hits}/300 within 2r");
        report.push(format!("{name} {hits}/300"));
    }

    // Uniform edges on P3 and K_{1,3}.
    for (name, g) in [
        ("P3", Arc::new(named(&[("a", "b"), ("b", "c")]))),
        (
            "K1,3",
            Arc::new(named(&[("c", "x"), ("c", "y"), ("c", "z")])),
        ),
    ] {
        let deg: Vec<usize> = g.nodes().map(|x| g.degree(x)).collect();
        let mut s = QuerySession::on_graph(Arc::clone(&g), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut counts: HashMap<(NodeId, NodeId), u64> = HashMap::new();
        for _ in 0..20_000 {
            let (x, y) = sample_uniform_edge(&mut s, &deg, &mut rng).map_err(|e| e.to_string())?;
            *counts.entry(key(x, y)).or_default() += 1;
        }
        ensure!(
            counts.len() == g.edge_count(),
            "{name}: not every edge sampled"
        );
        let pv = chi_square_p(&counts.values().copied().collect::<Vec<_>>());
        ensure!(pv > 0.01, "{name}: chi-square p = {pv:.4}");
        report.push(format!("{name} p = {pv:.3}"));
    }

    // Full enumeration with exact B.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = Arc::new(er(&mut rng, 25, 0.2));
    let exact = |x, y| curvature_edge(&g, x, y);
    let cfg = EstimatorConfig::new(r.clone(), 0).unwrap();
    let mut s = QuerySession::on_graph(Arc::clone(&g), 0);
    for v in g.nodes().filter(|&v| g.degree(v) > 0) {
        let out = estimate_node_curvature(&mut s, v, &cfg, &exact).map_err(|e| e.to_string())?;
        ensure!(
            out.exhaustive && out.estimate == curvature_node(&g, v).unwrap(),
            "node {v} not exact"
        );
    }
    let deg: Vec<usize> = g.nodes().map(|x| g.degree(x)).collect();
    let out = estimate_avg_curvature(&mut s, &deg, &cfg, &exact).map_err(|e| e.to_string())?;
    ensure!(
        out.exhaustive && out.estimate == curvature_avg(&g).unwrap(),
        "average not exact"
    );
    report.push("full enumeration exact".into());
    Ok(report.join("; "))
}

fn query_count_illustration() -> Verdict {
    let start = Instant::now();
    let pair = run_experiment(
        Strategy::PairScan,
        FamilyMix::new(FamilyKind::SingleLight, 20).unwrap(),
        200,
        10,
    )
    .map_err(|e| e.to_string())?;
    let neigh = run_experiment(
        Strategy::NeighborScan,
        FamilyMix::new(FamilyKind::SingleLight, 30).unwrap(),
        200,
        11,
    )
    .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let (tp, tn) = (pair.thresholds.unwrap(), neigh.thresholds.unwrap());
    let detail = format!(
        "pair-scan n=20 mean {:.1} (bound {:.1}); neighbor-scan n=30 mean {:.1} (bound {:.1}, table {:.1}); {:.2}s",
        pair.summary.mean, tp.bound, neigh.summary.mean, tn.bound, tn.table, took.as_secs_f64()
    );
    ensure!(
        pair.summary.mean >= tp.bound && neigh.summary.mean >= tn.bound,
        "{detail}"
    );
    ensure!(took <= Duration::from_secs(30), "{detail}");
    Ok(detail)
}

fn cli_determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("ricci-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("g.txt");
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = er(&mut rng, 30, 0.3);
    let text: String = g
        .edges()
        .map(|(a, b)| format!("{} {}\n", g.label(a), g.label(b)))
        .collect();
    std::fs::write(&path, text).map_err(|e| e.to_string())?;
    let input = path.to_str().unwrap().to_string();
    let (a, b) = g.edges().next().unwrap();
    let (la, lb) = (g.label(a).to_string(), g.label(b).to_string());
    let node = g
        .label(g.nodes().max_by_key(|&x| g.degree(x)).unwrap())
        .to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["curvature", "graph", "--input", &input],
        vec![
            "approx", "edge", "--mode", "unequal", "--delta", "1", "--seed", "7", "--input",
            &input, "--u", &la, "--v", &lb,
        ],
        vec![
            "approx", "node", "--r", "0.2", "--seed", "7", "--input", &input, "--u", &node,
        ],
        vec![
            "approx", "avg", "--r", "0.25", "--seed", "7", "--input", &input, "--format", "csv",
        ],
        vec![
            "experiment",
            "--family",
            "permutation",
            "--n",
            "15",
            "--trials",
            "50",
            "--seed",
            "7",
        ],
    ];
    let run = |args: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ricci").chain(args.iter().copied());
        let code = ricci_cli::run(argv, None, &mut out, &mut err);
        (code, out)
    };
    for args in &commands {
        let first = run(args);
        let second = run(args);
        ensure!(first.0 == 0, "{args:?} exited with {}", first.0);
        ensure!(first == second, "{args:?} differs between runs");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "{} commands, byte-identical reruns",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        (
            "exact solver equals brute-force oracle",
            exact_vs_brute_force,
        ),
        (
            "matching reformulation on equal-degree edges",
            matching_reformulation,
        ),
        (
            "degree/overlap bounds and TVD sandwich",
            degree_overlap_bounds,
        ),
        ("fixed small-graph curvatures", small_graph_values),
        ("padding gap", padding_gap),
        ("realization round trip", realization_round_trip),
        ("padded-oracle simulation", padding_simulation),
        ("local approximation radius", approximation_contract),
        ("node / average sampling estimators", sampling_estimators),
        ("query-count illustration", query_count_illustration),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
