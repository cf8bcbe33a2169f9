//! Closed-form total-variation and curvature bounds for an edge, computed
//! from the common-neighbor count alone (no distance search).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::numeric::{int, ratio};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureBounds {
    pub tvd: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
}

/// `1 - (ell + 2) / (deg(v) + 1)` where `v` is the higher-degree endpoint.
pub fn tvd_closed_form(g: &Graph, u: NodeId, v: NodeId) -> Result<BigRational> {
    let s = g.overlap_stats(u, v)?;
    let (_, v) = g.orient(u, v);
    Ok(int(1) - ratio(s.ell as i64 + 2, g.degree(v) as i64 + 1))
}

pub fn curvature_bounds(g: &Graph, u: NodeId, v: NodeId) -> Result<CurvatureBounds> {
    let s = g.overlap_stats(u, v)?;
    let (_, v) = g.orient(u, v);
    let closed = BigInt::from(g.degree(v) + 1);
    let ell = s.ell as i64;
    let tvd = int(1) - ratio(ell + 2, 1) / closed.clone();
    Ok(CurvatureBounds {
        tvd,
        lower: int(-2) + ratio(3 * ell + 6, 1) / closed.clone(),
        upper: ratio(ell + 2, 1) / closed,
    })
}
