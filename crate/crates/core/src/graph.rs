//! Undirected unweighted graphs and the per-edge bipartite gadget.
//!
//! Node identifiers are opaque strings; internally every node is a dense
//! [`NodeId`] so adjacency lives in plain vectors.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::BufRead;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Immutable simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    // sorted, deduplicated
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from label pairs. Duplicate and reversed pairs collapse
    /// into one edge; a pair `(x, x)` is rejected.
    pub fn from_edge_list<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut builder = GraphBuilder::default();
        for (a, b) in pairs {
            builder.add_edge(a.as_ref(), b.as_ref())?;
        }
        Ok(builder.build())
    }

    /// Parses the whitespace-separated edge-list format. Lines starting with
    /// `#` and blank lines are skipped.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut builder = GraphBuilder::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::MalformedInput {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::MalformedInput {
                    line: lineno + 1,
                    reason: format!("expected 2 tokens, found {}", tokens.len()),
                });
            }
            builder.add_edge(tokens[0], tokens[1])?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    /// Every edge once, as `(a, b)` with `a < b`, in lexicographic index order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, nbrs)| {
            nbrs.iter()
                .filter(move |b| b.0 > a)
                .map(move |&b| (NodeId(a), b))
        })
    }

    pub fn id(&self, label: &str) -> Result<NodeId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.0]
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node.0]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.0].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a.0].binary_search(&b).is_ok()
    }

    pub(crate) fn check_node(&self, node: NodeId) -> Result<()> {
        if node.0 < self.labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("#{}", node.0)))
        }
    }

    pub(crate) fn check_edge(&self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if self.has_edge(u, v) {
            Ok(())
        } else {
            Err(Error::NotAnEdge(
                self.label(u).to_string(),
                self.label(v).to_string(),
            ))
        }
    }

    /// `dist(x, y)` if it is at most `cap`, otherwise `cap`.
    pub fn bounded_distance(&self, x: NodeId, y: NodeId, cap: u32) -> Result<u32> {
        self.check_node(x)?;
        self.check_node(y)?;
        if cap == 0 {
            return Err(Error::domain("distance cap must be at least 1"));
        }
        if x == y {
            return Ok(0);
        }
        let mut depth = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        depth[x.0] = 0;
        queue.push_back(x);
        while let Some(z) = queue.pop_front() {
            let dz = depth[z.0];
            if dz + 1 >= cap {
                break;
            }
            for &w in self.neighbors(z) {
                if depth[w.0] == u32::MAX {
                    if w == y {
                        return Ok(dz + 1);
                    }
                    depth[w.0] = dz + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(cap)
    }

    /// Orders an edge so that the first endpoint has the smaller degree
    /// (ties keep the given order).
    pub fn orient(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn local_bipartite(&self, u: NodeId, v: NodeId) -> Result<LocalBipartite> {
        self.check_edge(u, v)?;
        let (u, v) = self.orient(u, v);
        let mut left = Vec::with_capacity(1 + self.degree(u));
        left.push(u);
        left.extend_from_slice(self.neighbors(u));
        let mut right = Vec::with_capacity(1 + self.degree(v));
        right.push(v);
        right.extend_from_slice(self.neighbors(v));

        // Truncated BFS of depth 2 from each left node; anything unmarked is at
        // distance 3 through x - u - v - y.
        let mut mark = vec![u8::MAX; self.node_count()];
        let mut touched = Vec::new();
        let mut weight = Vec::with_capacity(left.len() * right.len());
        for &x in &left {
            mark[x.0] = 0;
            touched.push(x);
            for &a in self.neighbors(x) {
                if mark[a.0] > 1 {
                    mark[a.0] = 1;
                    touched.push(a);
                }
            }
            for &a in self.neighbors(x) {
                for &b in self.neighbors(a) {
                    if mark[b.0] > 2 {
                        mark[b.0] = 2;
                        touched.push(b);
                    }
                }
            }
            for &y in &right {
                weight.push(mark[y.0].min(3));
            }
            for t in touched.drain(..) {
                mark[t.0] = u8::MAX;
            }
        }
        Ok(LocalBipartite {
            u,
            v,
            left,
            right,
            weight,
        })
    }

    pub fn overlap_stats(&self, u: NodeId, v: NodeId) -> Result<OverlapStats> {
        self.check_edge(u, v)?;
        let (u, v) = self.orient(u, v);
        let ell = sorted_intersection_len(self.neighbors(u), self.neighbors(v));
        Ok(OverlapStats {
            k: self.degree(u) - ell,
            ell,
            m: self.degree(v) - ell,
        })
    }
}

pub(crate) fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
}

impl GraphBuilder {
    pub fn add_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len());
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        self.adjacency.push(Vec::new());
        id
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoop(a.to_string()));
        }
        let a = self.add_node(a);
        let b = self.add_node(b);
        self.adjacency[a.0].push(b);
        self.adjacency[b.0].push(a);
        Ok(())
    }

    pub fn build(mut self) -> Graph {
        let mut twice = 0;
        for nbrs in &mut self.adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
            twice += nbrs.len();
        }
        Graph {
            labels: self.labels,
            index: self.index,
            adjacency: self.adjacency,
            edge_count: twice / 2,
        }
    }
}

/// Complete bipartite gadget of an edge `{u, v}`: closed neighborhoods on
/// each side, shortest-path weights between them, uniform masses.
///
/// `left[0] == u` and `right[0] == v`, and `deg(u) <= deg(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalBipartite {
    pub u: NodeId,
    pub v: NodeId,
    pub left: Vec<NodeId>,
    pub right: Vec<NodeId>,
    /// Row-major, `left.len() x right.len()`, entries in `0..=3`.
    pub weight: Vec<u8>,
}

impl LocalBipartite {
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u8 {
        self.weight[i * self.right.len() + j]
    }

    pub fn left_mass(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.left.len()))
    }

    pub fn right_mass(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.right.len()))
    }

    pub fn deg_u(&self) -> usize {
        self.left.len() - 1
    }

    pub fn deg_v(&self) -> usize {
        self.right.len() - 1
    }
}

/// `k = deg(u) - ell`, `ell = |Nbr(u) ∩ Nbr(v)|`, `m = deg(v) - ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapStats {
    pub k: usize,
    pub ell: usize,
    pub m: usize,
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
