//! Padding an unequal-degree edge gadget to a square instance, and realizing
//! an arbitrary ternary instance as the gadget of an actual graph.

use std::fmt;

use num_rational::BigRational;

use crate::assignment::min_cost_assignment;
use crate::emd::MpmctInstance;
use crate::graph::{Graph, GraphBuilder, LocalBipartite, NodeId};
use crate::numeric::ratio;

/// Left-side node of a padded gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PaddedLabel {
    /// Copy `copy` (1-based) of base left node `base` (0-based row).
    Copy { base: usize, copy: usize },
    /// Special all-3 row, 1-based.
    Special(usize),
}

impl fmt::Display for PaddedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaddedLabel::Copy { base, copy } => write!(f, "x{}^{}", base + 1, copy),
            PaddedLabel::Special(i) => write!(f, "r{i}"),
        }
    }
}

/// Split `deg(v) + 1 = a * (deg(u) + 1) + b` with `a >= 1`, `0 <= b < deg(u) + 1`.
pub fn padding_split(closed_u: usize, closed_v: usize) -> (usize, usize) {
    debug_assert!(closed_u >= 1 && closed_u <= closed_v);
    (closed_v / closed_u, closed_v % closed_u)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedBipartite {
    pub base: LocalBipartite,
    pub a: usize,
    pub b: usize,
    /// `x_1^1..x_1^a, x_2^1.., ..., r_1..r_b`; length `1 + deg(v)`.
    pub left_expanded: Vec<PaddedLabel>,
}

impl PaddedBipartite {
    pub fn size(&self) -> usize {
        self.left_expanded.len()
    }

    pub fn weight(&self, row: usize, col: usize) -> u8 {
        match self.left_expanded[row] {
            PaddedLabel::Copy { base, .. } => self.base.weight(base, col),
            PaddedLabel::Special(_) => 3,
        }
    }
}

pub fn pad_to_equal(base: &LocalBipartite) -> PaddedBipartite {
    let (a, b) = padding_split(base.left.len(), base.right.len());
    let mut left_expanded = Vec::with_capacity(base.right.len());
    for i in 0..base.left.len() {
        for j in 1..=a {
            left_expanded.push(PaddedLabel::Copy { base: i, copy: j });
        }
    }
    left_expanded.extend((1..=b).map(PaddedLabel::Special));
    PaddedBipartite {
        base: base.clone(),
        a,
        b,
        left_expanded,
    }
}

/// Exact EMD of the padded gadget with uniform `1 / (1 + deg v)` mass on both
/// sides: a minimum-weight perfect matching divided by its size.
pub fn padded_emd(p: &PaddedBipartite) -> BigRational {
    let n = p.size();
    let mut cost = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            cost.push(i64::from(p.weight(row, col)));
        }
    }
    ratio(min_cost_assignment(n, &cost), n as i64)
}

/// Builds a graph whose edge `{u, v}` has `h` as its reduced instance:
/// `u_i` hang off `u`, `v_j` off `v`, weight-1 pairs are adjacent and
/// weight-2 pairs share a fresh midpoint.
pub fn realize_as_graph(h: &MpmctInstance) -> (Graph, NodeId, NodeId) {
    let n = h.n();
    let mut b = GraphBuilder::default();
    let u = b.add_node("u");
    let v = b.add_node("v");
    for i in 1..=n {
        b.add_node(&format!("u{i}"));
    }
    for j in 1..=n {
        b.add_node(&format!("v{j}"));
    }
    b.add_edge("u", "v").expect("distinct");
    for i in 1..=n {
        b.add_edge("u", &format!("u{i}")).expect("distinct");
        b.add_edge("v", &format!("v{i}")).expect("distinct");
    }
    for i in 0..n {
        for j in 0..n {
            let (ui, vj) = (format!("u{}", i + 1), format!("v{}", j + 1));
            match h.weight(i, j) {
                1 => b.add_edge(&ui, &vj).expect("distinct"),
                2 => {
                    let mid = format!("x{}_{}", i + 1, j + 1);
                    b.add_edge(&ui, &mid).expect("distinct");
                    b.add_edge(&mid, &vj).expect("distinct");
                }
                _ => {}
            }
        }
    }
    (b.build(), u, v)
}
