//! Hidden-instance oracles with per-query-type counters.
//!
//! A [`QuerySession`] wraps either a graph (neighbor queries) or a weighted
//! complete bipartite instance (pair, weighted neighbor and selective degree
//! queries). Neighbor-type queries return a uniformly random
//! not-yet-explored answer, then `None` once the key is exhausted.
//! Exploration is one-directional and keyed per (node, weight class).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emd::MpmctInstance;
use crate::error::{Error, Result};
use crate::graph::{Graph, LocalBipartite, NodeId};
use crate::reduction::PaddedBipartite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub side: Side,
    pub index: usize,
}

impl Vertex {
    pub fn left(index: usize) -> Self {
        Vertex {
            side: Side::Left,
            index,
        }
    }

    pub fn right(index: usize) -> Self {
        Vertex {
            side: Side::Right,
            index,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Left => write!(f, "L{}", self.index),
            Side::Right => write!(f, "R{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounters {
    pub pair: u64,
    pub neighbor: u64,
    pub weighted_neighbor: u64,
    pub selective_degree: u64,
}

impl QueryCounters {
    pub fn since(&self, earlier: &QueryCounters) -> QueryCounters {
        QueryCounters {
            pair: self.pair - earlier.pair,
            neighbor: self.neighbor - earlier.neighbor,
            weighted_neighbor: self.weighted_neighbor - earlier.weighted_neighbor,
            selective_degree: self.selective_degree - earlier.selective_degree,
        }
    }

    /// Query count with selective degree queries excluded.
    pub fn without_degree(&self) -> u64 {
        self.pair + self.neighbor + self.weighted_neighbor
    }
}

pub(crate) fn check_class(s: u8) -> Result<()> {
    if (1..=3).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidWeight(s))
    }
}

/// Complete bipartite instance with weights in `{0, 1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBipartite {
    left: Vec<String>,
    right: Vec<String>,
    weight: Vec<u8>,
    /// `by_class[side][s - 1][index]` lists opposite-side indices at weight `s`.
    by_class: [[Vec<Vec<usize>>; 3]; 2],
}

impl WeightedBipartite {
    pub fn new(left: Vec<String>, right: Vec<String>, weight: Vec<u8>) -> Result<Self> {
        if weight.len() != left.len() * right.len() {
            return Err(Error::domain(format!(
                "weight matrix has {} entries, expected {} x {}",
                weight.len(),
                left.len(),
                right.len()
            )));
        }
        if let Some(&w) = weight.iter().find(|&&w| w > 3) {
            return Err(Error::InvalidWeight(w));
        }
        let (p, q) = (left.len(), right.len());
        let mut by_class: [[Vec<Vec<usize>>; 3]; 2] = Default::default();
        for s in 0..3 {
            by_class[0][s] = vec![Vec::new(); p];
            by_class[1][s] = vec![Vec::new(); q];
        }
        for i in 0..p {
            for j in 0..q {
                let w = weight[i * q + j];
                if w > 0 {
                    by_class[0][usize::from(w) - 1][i].push(j);
                    by_class[1][usize::from(w) - 1][j].push(i);
                }
            }
        }
        Ok(WeightedBipartite {
            left,
            right,
            weight,
            by_class,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let h = MpmctInstance::from_rows(rows)?;
        Ok(Self::from_mpmct(&h))
    }

    pub fn from_mpmct(h: &MpmctInstance) -> Self {
        Self::new(h.left.clone(), h.right.clone(), h.weight.clone()).expect("valid instance")
    }

    pub fn from_local(g: &Graph, b: &LocalBipartite) -> Self {
        let label = |x: &NodeId| g.label(*x).to_string();
        Self::new(
            b.left.iter().map(label).collect(),
            b.right.iter().map(label).collect(),
            b.weight.clone(),
        )
        .expect("valid gadget")
    }

    /// Materializes a padded gadget (used as a reference for the simulated one).
    pub fn from_padded(g: &Graph, p: &PaddedBipartite) -> Self {
        let n = p.size();
        let mut weight = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                weight.push(p.weight(row, col));
            }
        }
        Self::new(
            p.left_expanded.iter().map(|l| l.to_string()).collect(),
            p.base
                .right
                .iter()
                .map(|&y| g.label(y).to_string())
                .collect(),
            weight,
        )
        .expect("valid padding")
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn left_labels(&self) -> &[String] {
        &self.left
    }

    pub fn right_labels(&self) -> &[String] {
        &self.right
    }

    pub fn weight(&self, i: usize, j: usize) -> u8 {
        self.weight[i * self.right.len() + j]
    }

    pub fn len_of(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left.len(),
            Side::Right => self.right.len(),
        }
    }

    /// Opposite-side indices joined to `x` by weight `s`, ascending.
    pub fn class_neighbors(&self, x: Vertex, s: u8) -> &[usize] {
        let side = usize::from(x.side == Side::Right);
        &self.by_class[side][usize::from(s) - 1][x.index]
    }

    fn check_vertex(&self, x: Vertex) -> Result<()> {
        if x.index < self.len_of(x.side) {
            Ok(())
        } else {
            Err(Error::UnknownNode(x.to_string()))
        }
    }
}

/// Query access to a hidden weighted bipartite instance.
pub trait BipartiteOracle {
    fn left_len(&self) -> usize;
    fn right_len(&self) -> usize;
    fn pair_query(&mut self, x: Vertex, y: Vertex) -> Result<u8>;
    /// A uniformly random not-yet-returned opposite-side node at weight `s`
    /// from `x`, or `None` once every such node has been returned.
    fn weighted_neighbor_query(&mut self, x: Vertex, s: u8) -> Result<Option<Vertex>>;
    fn selective_degree_query(&mut self, x: Vertex, s: u8) -> Result<usize>;
    fn counters(&self) -> QueryCounters;
    /// Forgets every returned answer; counters are kept.
    fn reset_exploration(&mut self);

    fn len_of(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left_len(),
            Side::Right => self.right_len(),
        }
    }
}

impl<T: BipartiteOracle + ?Sized> BipartiteOracle for &mut T {
    fn left_len(&self) -> usize {
        (**self).left_len()
    }

    fn right_len(&self) -> usize {
        (**self).right_len()
    }

    fn pair_query(&mut self, x: Vertex, y: Vertex) -> Result<u8> {
        (**self).pair_query(x, y)
    }

    fn weighted_neighbor_query(&mut self, x: Vertex, s: u8) -> Result<Option<Vertex>> {
        (**self).weighted_neighbor_query(x, s)
    }

    fn selective_degree_query(&mut self, x: Vertex, s: u8) -> Result<usize> {
        (**self).selective_degree_query(x, s)
    }

    fn counters(&self) -> QueryCounters {
        (**self).counters()
    }

    fn reset_exploration(&mut self) {
        (**self).reset_exploration()
    }
}

#[derive(Debug, Clone)]
enum Hidden {
    Graph(Arc<Graph>),
    Bipartite(Arc<WeightedBipartite>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum ExploreKey {
    Node(usize),
    Class(Vertex, u8),
}

/// Partially shuffled candidate pool: `pool[..returned]` were handed out.
#[derive(Debug, Clone)]
struct Exploration {
    pool: Vec<usize>,
    returned: usize,
}

#[derive(Debug, Clone)]
pub struct QuerySession {
    hidden: Hidden,
    counters: QueryCounters,
    explored: HashMap<ExploreKey, Exploration>,
    rng: ChaCha8Rng,
}

impl QuerySession {
    pub fn on_graph(g: impl Into<Arc<Graph>>, seed: u64) -> Self {
        Self::with_hidden(Hidden::Graph(g.into()), seed)
    }

    pub fn on_bipartite(h: impl Into<Arc<WeightedBipartite>>, seed: u64) -> Self {
        Self::with_hidden(Hidden::Bipartite(h.into()), seed)
    }

    fn with_hidden(hidden: Hidden, seed: u64) -> Self {
        QuerySession {
            hidden,
            counters: QueryCounters::default(),
            explored: HashMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn graph(&self) -> Result<&Graph> {
        match &self.hidden {
            Hidden::Graph(g) => Ok(g),
            Hidden::Bipartite(_) => Err(Error::domain("neighbor queries need a graph session")),
        }
    }

    fn bipartite(&self) -> Result<&Arc<WeightedBipartite>> {
        match &self.hidden {
            Hidden::Bipartite(h) => Ok(h),
            Hidden::Graph(_) => Err(Error::domain("weighted queries need a bipartite session")),
        }
    }

    fn draw(&mut self, key: ExploreKey, candidates: impl FnOnce() -> Vec<usize>) -> Option<usize> {
        let state = self.explored.entry(key).or_insert_with(|| Exploration {
            pool: candidates(),
            returned: 0,
        });
        let remaining = state.pool.len() - state.returned;
        if remaining == 0 {
            return None;
        }
        let pick = state.returned + self.rng.gen_range(0..remaining);
        state.pool.swap(state.returned, pick);
        state.returned += 1;
        Some(state.pool[state.returned - 1])
    }

    pub fn neighbor_query(&mut self, x: NodeId) -> Result<Option<NodeId>> {
        let g = Arc::clone(match &self.hidden {
            Hidden::Graph(g) => g,
            Hidden::Bipartite(_) => {
                return Err(Error::domain("neighbor queries need a graph session"))
            }
        });
        if x.0 >= g.node_count() {
            return Err(Error::UnknownNode(x.to_string()));
        }
        self.counters.neighbor += 1;
        let got = self.draw(ExploreKey::Node(x.0), || {
            g.neighbors(x).iter().map(|n| n.0).collect()
        });
        Ok(got.map(NodeId))
    }

    /// Forgets the neighbors already returned for `x`.
    pub fn forget(&mut self, x: NodeId) {
        self.explored.remove(&ExploreKey::Node(x.0));
    }

    pub fn node_count(&self) -> Result<usize> {
        Ok(self.graph()?.node_count())
    }

    /// Neighbors already returned for `x`, in the order they were returned.
    pub fn explored_neighbors(&self, x: NodeId) -> Vec<NodeId> {
        self.explored
            .get(&ExploreKey::Node(x.0))
            .map(|e| e.pool[..e.returned].iter().copied().map(NodeId).collect())
            .unwrap_or_default()
    }
}

impl BipartiteOracle for QuerySession {
    fn left_len(&self) -> usize {
        self.bipartite().map_or(0, |h| h.left_len())
    }

    fn right_len(&self) -> usize {
        self.bipartite().map_or(0, |h| h.right_len())
    }

    fn pair_query(&mut self, x: Vertex, y: Vertex) -> Result<u8> {
        let h = self.bipartite()?;
        if x.side != Side::Left || y.side != Side::Right {
            return Err(Error::domain(format!(
                "pair query expects (left, right), got ({x}, {y})"
            )));
        }
        h.check_vertex(x)?;
        h.check_vertex(y)?;
        let w = h.weight(x.index, y.index);
        self.counters.pair += 1;
        Ok(w)
    }

    fn weighted_neighbor_query(&mut self, x: Vertex, s: u8) -> Result<Option<Vertex>> {
        check_class(s)?;
        let h = Arc::clone(self.bipartite()?);
        h.check_vertex(x)?;
        self.counters.weighted_neighbor += 1;
        let got = self.draw(ExploreKey::Class(x, s), || h.class_neighbors(x, s).to_vec());
        Ok(got.map(|index| Vertex {
            side: x.side.opposite(),
            index,
        }))
    }

    fn selective_degree_query(&mut self, x: Vertex, s: u8) -> Result<usize> {
        check_class(s)?;
        let h = self.bipartite()?;
        h.check_vertex(x)?;
        let d = h.class_neighbors(x, s).len();
        self.counters.selective_degree += 1;
        Ok(d)
    }

    fn counters(&self) -> QueryCounters {
        self.counters
    }

    fn reset_exploration(&mut self) {
        self.explored.clear();
    }
}
