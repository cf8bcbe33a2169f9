//! Sampling estimators for node curvature and average graph curvature,
//! built from an edge-curvature black box and neighbor queries.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::emd::curvature_edge;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::numeric::{clamp, int, mean, one};
use crate::oracle::{BipartiteOracle, QueryCounters, QuerySession};

/// Number of samples for two-sided deviation at most `r` with failure
/// probability at most 1/3 when each summand lies in an interval of width
/// `3/k`: `k = ceil(9 / (2 r^2) * ln 6)`.
pub fn sample_count(r: &BigRational) -> Result<usize> {
    if *r <= BigRational::zero() {
        return Err(Error::domain("r must be positive"));
    }
    let r = r.to_f64().unwrap_or(f64::INFINITY);
    let k = (9.0 / (2.0 * r * r) * 6f64.ln()).ceil();
    Ok((k as usize).max(1))
}

/// Two-sided Hoeffding failure bound `2 exp(-2 k r^2 / 9)` for the mean of
/// `k` independent values in `[-2, 1]`.
pub fn hoeffding_failure(k: usize, r: f64) -> f64 {
    2.0 * (-2.0 * k as f64 * r * r / 9.0).exp()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatorConfig {
    /// Additive radius of the edge-curvature black box.
    pub r: BigRational,
    pub k: usize,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn new(r: BigRational, seed: u64) -> Result<Self> {
        let k = sample_count(&r)?;
        Ok(EstimatorConfig { r, k, seed })
    }

    pub fn with_samples(r: BigRational, k: usize, seed: u64) -> Result<Self> {
        if r <= BigRational::zero() || k == 0 {
            return Err(Error::domain("need r > 0 and k >= 1"));
        }
        Ok(EstimatorConfig { r, k, seed })
    }
}

/// Edge-curvature routine `B`. Answers are expected to lie in `[C, C + r]`
/// for the configured radius `r`.
pub trait EdgeCurvatureOracle {
    fn edge_curvature(&self, x: NodeId, y: NodeId) -> Result<BigRational>;
}

/// Exact curvature from the full graph.
#[derive(Debug, Clone, Copy)]
pub struct ExactEdgeCurvature<'g>(pub &'g Graph);

impl EdgeCurvatureOracle for ExactEdgeCurvature<'_> {
    fn edge_curvature(&self, x: NodeId, y: NodeId) -> Result<BigRational> {
        curvature_edge(self.0, x, y)
    }
}

impl<F> EdgeCurvatureOracle for F
where
    F: Fn(NodeId, NodeId) -> Result<BigRational>,
{
    fn edge_curvature(&self, x: NodeId, y: NodeId) -> Result<BigRational> {
        self(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledCurvature {
    pub estimate: BigRational,
    /// Edges averaged over (with repetition when sampled).
    pub samples: usize,
    /// True when every incident edge (or every edge) was enumerated.
    pub exhaustive: bool,
    pub queries: QueryCounters,
}

fn key(x: NodeId, y: NodeId) -> (NodeId, NodeId) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Calls `b` once per distinct edge.
struct Memo<'b, B: ?Sized> {
    b: &'b B,
    seen: HashMap<(NodeId, NodeId), BigRational>,
}

impl<'b, B: EdgeCurvatureOracle + ?Sized> Memo<'b, B> {
    fn new(b: &'b B) -> Self {
        Memo {
            b,
            seen: HashMap::new(),
        }
    }

    fn get(&mut self, x: NodeId, y: NodeId) -> Result<BigRational> {
        if let Some(c) = self.seen.get(&key(x, y)) {
            return Ok(c.clone());
        }
        let c = self.b.edge_curvature(x, y)?;
        self.seen.insert(key(x, y), c.clone());
        Ok(c)
    }
}

fn finish(values: &[BigRational], exhaustive: bool, queries: QueryCounters) -> SampledCurvature {
    let raw = mean(values).expect("at least one sample");
    SampledCurvature {
        estimate: clamp(raw, &int(-2), &one()),
        samples: values.len(),
        exhaustive,
        queries,
    }
}

/// Estimates `C(v)`, the mean curvature of the edges at `v`.
///
/// Up to `k + 1` neighbor queries detect whether `deg(v) <= k`; if so all
/// incident edges are averaged. Otherwise `k` neighbors are drawn
/// independently (exploration is forgotten before each draw).
pub fn estimate_node_curvature<B: EdgeCurvatureOracle + ?Sized>(
    s: &mut QuerySession,
    v: NodeId,
    cfg: &EstimatorConfig,
    b: &B,
) -> Result<SampledCurvature> {
    let before = s.counters();
    let mut memo = Memo::new(b);
    s.forget(v);
    let mut probe = Vec::new();
    while probe.len() <= cfg.k {
        match s.neighbor_query(v)? {
            Some(u) => probe.push(u),
            None => break,
        }
    }
    if probe.is_empty() {
        return Err(Error::IsolatedNode(v.to_string()));
    }
    let exhaustive = probe.len() <= cfg.k;
    let values = if exhaustive {
        probe
            .iter()
            .map(|&u| memo.get(v, u))
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut values = Vec::with_capacity(cfg.k);
        for _ in 0..cfg.k {
            s.forget(v);
            let u = s.neighbor_query(v)?.expect("v has neighbors");
            values.push(memo.get(v, u)?);
        }
        values
    };
    s.forget(v);
    Ok(finish(&values, exhaustive, s.counters().since(&before)))
}

/// Draws a node with probability proportional to its degree, then one of its
/// neighbors uniformly: a uniform edge.
pub fn sample_uniform_edge(
    s: &mut QuerySession,
    degrees: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<(NodeId, NodeId)> {
    let dist = WeightedIndex::new(degrees).map_err(|_| Error::EmptyEdgeSet)?;
    let x = NodeId(dist.sample(rng));
    s.forget(x);
    let y = s
        .neighbor_query(x)?
        .ok_or_else(|| Error::domain(format!("degree map says node {x} has neighbors")))?;
    s.forget(x);
    Ok((x, y))
}

/// Estimates the average edge curvature given all degrees. When `k` covers
/// the edge count every edge is enumerated by neighbor queries.
pub fn estimate_avg_curvature<B: EdgeCurvatureOracle + ?Sized>(
    s: &mut QuerySession,
    degrees: &[usize],
    cfg: &EstimatorConfig,
    b: &B,
) -> Result<SampledCurvature> {
    if degrees.len() != s.node_count()? {
        return Err(Error::domain("degree map does not cover every node"));
    }
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let before = s.counters();
    let mut memo = Memo::new(b);
    let edges = total / 2;
    let values = if cfg.k >= edges {
        let mut values = Vec::with_capacity(edges);
        for (x, &d) in degrees.iter().enumerate() {
            let x = NodeId(x);
            s.forget(x);
            for _ in 0..d {
                let y = s.neighbor_query(x)?.ok_or_else(|| {
                    Error::domain(format!("node {x} has fewer neighbors than its degree"))
                })?;
                if x < y {
                    values.push(memo.get(x, y)?);
                }
            }
            s.forget(x);
        }
        values
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut values = Vec::with_capacity(cfg.k);
        for _ in 0..cfg.k {
            let (x, y) = sample_uniform_edge(s, degrees, &mut rng)?;
            values.push(memo.get(x, y)?);
        }
        values
    };
    Ok(finish(&values, cfg.k >= edges, s.counters().since(&before)))
}

/// Adds `r` to the curvature of the edges selected by `biased`.
pub fn with_upward_bias<'a, B, P>(
    b: &'a B,
    r: &'a BigRational,
    biased: P,
) -> impl Fn(NodeId, NodeId) -> Result<BigRational> + 'a
where
    B: EdgeCurvatureOracle + ?Sized,
    P: Fn(NodeId, NodeId) -> bool + 'a,
{
    move |x, y| {
        let c = b.edge_curvature(x, y)?;
        Ok(if biased(x, y) { c + r.clone() } else { c })
    }
}
