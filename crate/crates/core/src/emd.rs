//! Exact earth mover's distance on edge gadgets and the curvature values
//! built on it.
//!
//! The transportation LP is solved as an integral min-cost flow after scaling
//! both marginals by `lcm(1 + deg u, 1 + deg v)`; the incidence matrix of the
//! flow network is totally unimodular, so the scaled optimum is integral and
//! the value is exact. Equal-degree edges can alternatively be solved as a
//! minimum-weight perfect matching on the reduced instance.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::flow::transport_cost;
use crate::graph::{Graph, LocalBipartite, NodeId};
use crate::numeric::{int, mean, ratio};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmdMethod {
    TransportFlow,
    Matching,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmdResult {
    pub value: BigRational,
    pub method: EmdMethod,
    /// Optimal cost of the scaled integral problem.
    pub plan_weight: i64,
    pub scale: i64,
}

/// Complete bipartite instance with equal sides and weights in `{1, 2, 3}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpmctInstance {
    pub left: Vec<String>,
    pub right: Vec<String>,
    /// Row-major `n x n`.
    pub weight: Vec<u8>,
}

impl MpmctInstance {
    pub fn new(left: Vec<String>, right: Vec<String>, weight: Vec<u8>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::domain(format!(
                "sides differ in size: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        if weight.len() != left.len() * right.len() {
            return Err(Error::domain("weight matrix has wrong size"));
        }
        if let Some(&w) = weight.iter().find(|w| !(1..=3).contains(*w)) {
            return Err(Error::InvalidWeight(w));
        }
        Ok(Self {
            left,
            right,
            weight,
        })
    }

    /// Square instance with labels `u1..un` / `v1..vn`.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("weight rows must form a square matrix"));
        }
        Self::new(
            (1..=n).map(|i| format!("u{i}")).collect(),
            (1..=n).map(|j| format!("v{j}")).collect(),
            rows.concat(),
        )
    }

    pub fn n(&self) -> usize {
        self.left.len()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u8 {
        self.weight[i * self.left.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n)
            .map(|i| self.weight[i * n..(i + 1) * n].to_vec())
            .collect()
    }
}

/// Exact EMD of an edge gadget by min-cost flow.
pub fn emd_transport(b: &LocalBipartite) -> EmdResult {
    let (p, q) = (b.left.len() as i64, b.right.len() as i64);
    let scale = p.lcm(&q);
    let supply = vec![scale / p; b.left.len()];
    let demand = vec![scale / q; b.right.len()];
    let cost: Vec<i64> = b.weight.iter().map(|&w| i64::from(w)).collect();
    let plan_weight = transport_cost(&supply, &demand, &cost);
    EmdResult {
        value: ratio(plan_weight, scale),
        method: EmdMethod::TransportFlow,
        plan_weight,
        scale,
    }
}

/// The equal-degree residue `H = (L, R, w)` of an edge once `u`, `v` and the
/// common neighbors are matched to themselves at zero cost.
pub fn reduced_instance(g: &Graph, u: NodeId, v: NodeId) -> Result<MpmctInstance> {
    g.check_edge(u, v)?;
    if g.degree(u) != g.degree(v) {
        return Err(Error::DegreeMismatch {
            left: g.degree(u),
            right: g.degree(v),
        });
    }
    let b = g.local_bipartite(u, v)?;
    let (u, v) = (b.u, b.v);
    let rows: Vec<usize> = (0..b.left.len())
        .filter(|&i| {
            let x = b.left[i];
            x != u && x != v && !g.has_edge(x, v)
        })
        .collect();
    let cols: Vec<usize> = (0..b.right.len())
        .filter(|&j| {
            let y = b.right[j];
            y != u && y != v && !g.has_edge(y, u)
        })
        .collect();
    debug_assert_eq!(rows.len(), cols.len());
    let mut weight = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &j in &cols {
            weight.push(b.weight(i, j));
        }
    }
    MpmctInstance::new(
        rows.iter()
            .map(|&i| g.label(b.left[i]).to_string())
            .collect(),
        cols.iter()
            .map(|&j| g.label(b.right[j]).to_string())
            .collect(),
        weight,
    )
}

/// Total weight of a minimum-weight perfect matching; `0` for the empty
/// instance.
pub fn min_weight_perfect_matching(h: &MpmctInstance) -> i64 {
    let cost: Vec<i64> = h.weight.iter().map(|&w| i64::from(w)).collect();
    min_cost_assignment(h.n(), &cost)
}

/// EMD of an equal-degree edge through the reduced matching instance.
pub fn emd_matching(g: &Graph, u: NodeId, v: NodeId) -> Result<EmdResult> {
    let h = reduced_instance(g, u, v)?;
    let plan_weight = min_weight_perfect_matching(&h);
    let scale = 1 + g.degree(v) as i64;
    Ok(EmdResult {
        value: ratio(plan_weight, scale),
        method: EmdMethod::Matching,
        plan_weight,
        scale,
    })
}

pub fn curvature_edge(g: &Graph, u: NodeId, v: NodeId) -> Result<BigRational> {
    let b = g.local_bipartite(u, v)?;
    Ok(int(1) - emd_transport(&b).value)
}

/// Curvature of every edge, in [`Graph::edges`] order.
pub fn edge_curvatures(g: &Graph) -> Vec<((NodeId, NodeId), BigRational)> {
    let edges: Vec<_> = g.edges().collect();
    par::map_slice(&edges, |&(a, b)| {
        (
            (a, b),
            curvature_edge(g, a, b).expect("edge from edge list"),
        )
    })
}

/// Sequential twin of [`edge_curvatures`].
pub fn edge_curvatures_seq(g: &Graph) -> Vec<((NodeId, NodeId), BigRational)> {
    let edges: Vec<_> = g.edges().collect();
    par::map_slice_seq(&edges, |&(a, b)| {
        (
            (a, b),
            curvature_edge(g, a, b).expect("edge from edge list"),
        )
    })
}

pub fn curvature_node(g: &Graph, v: NodeId) -> Result<BigRational> {
    g.check_node(v)?;
    if g.degree(v) == 0 {
        return Err(Error::IsolatedNode(g.label(v).to_string()));
    }
    let values = g
        .neighbors(v)
        .iter()
        .map(|&u| curvature_edge(g, v, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(&values).expect("non-empty"))
}

pub fn curvature_avg(g: &Graph) -> Result<BigRational> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let values: Vec<BigRational> = edge_curvatures(g).into_iter().map(|(_, c)| c).collect();
    Ok(mean(&values).expect("non-empty"))
}

/// Largest unit-expansion state space the brute-force oracle will enumerate.
pub const BRUTE_FORCE_STATE_LIMIT: u128 = 4_000_000;

/// Independent EMD oracle: expands every left node into `S / (1 + deg u)`
/// unit copies and every right node into `S / (1 + deg v)` unit copies and
/// takes the minimum over all unit perfect matchings, divided by `S`.
///
/// Identical unit copies are interchangeable, so the enumeration runs over
/// the multiset of right-copy usage counts instead of over `S!` orderings;
/// the minimum is the same.
pub fn brute_force_emd(b: &LocalBipartite) -> Result<BigRational> {
    let (p, q) = (b.left.len(), b.right.len());
    let scale = p.lcm(&q);
    let left_units = scale / p;
    let right_units = scale / q;
    let radix = right_units + 1;
    let states = (radix as u128).checked_pow(q as u32).unwrap_or(u128::MAX);
    if states > BRUTE_FORCE_STATE_LIMIT {
        return Err(Error::OracleTooLarge {
            states,
            limit: BRUTE_FORCE_STATE_LIMIT,
        });
    }
    let states = states as usize;
    let stride: Vec<usize> = (0..q).map(|j| radix.pow(j as u32)).collect();
    const UNSET: u32 = u32::MAX;
    let mut best = vec![UNSET; states];
    best[0] = 0;
    for state in 0..states {
        let cost = best[state];
        if cost == UNSET {
            continue;
        }
        let mut used = 0;
        let mut rest = state;
        let mut counts = Vec::with_capacity(q);
        for _ in 0..q {
            counts.push(rest % radix);
            used += rest % radix;
            rest /= radix;
        }
        if used == scale {
            continue;
        }
        let row = used / left_units;
        for (j, &c) in counts.iter().enumerate() {
            if c < right_units {
                let next = state + stride[j];
                let cand = cost + u32::from(b.weight(row, j));
                if cand < best[next] {
                    best[next] = cand;
                }
            }
        }
    }
    let full = states - 1;
    Ok(BigRational::new(
        BigInt::from(best[full]),
        BigInt::from(scale),
    ))
}
