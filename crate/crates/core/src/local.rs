//! Constant-query curvature approximations for a single edge.
//!
//! Equal degrees: estimate normalized matchings of the weight-1 / weight-2
//! subgraphs of the reduced instance and turn them into an upper estimate
//! `Delta` of the optimal matching weight, hence a lower estimate of the
//! curvature. Unequal degrees: pad the gadget on the fly ([`PaddedSession`]),
//! hide the zero-cost pairs ([`ReducedView`]) and run the same algorithms.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emd::reduced_instance;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::matching::{estimate_matching, MatchingBackend};
use crate::numeric::{int, one, ratio};
use crate::oracle::{
    check_class, BipartiteOracle, QueryCounters, QuerySession, Side, Vertex, WeightedBipartite,
};
use crate::reduction::{padding_split, PaddedLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bias {
    /// The estimate never exceeds the true curvature (given estimator success).
    LowerBiased,
}

/// Branch of the case analysis that produced `Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxCase {
    /// Empty reduced instance; the curvature is exactly 1.
    Empty,
    /// Weight-1 matching only: `Delta = 3 - 2 m1`.
    WeightOne,
    /// `m1 <= 1/4`: `Delta = 3 - m2`.
    Case1,
    /// `m2 <= 1/2` or `m1 >= 1/2` or `m12 <= 3/4`: `Delta = 3 - 2 m1`.
    Case2,
    /// `m12 <= 2 m1 + delta`: `Delta = 3 - 2 m1`.
    Case31,
    /// Otherwise: `Delta = 3 - m12`.
    Case32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxCurvature {
    pub estimate: BigRational,
    /// Additive radius: `C - guarantee <= estimate <= C`.
    pub guarantee: BigRational,
    pub side: Bias,
    pub queries: QueryCounters,
    /// Estimated normalized optimal matching weight.
    pub delta_hat: BigRational,
    pub case: ApproxCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Radius `1 + eps`, one matching estimate.
    A,
    /// Radius `1/2 + eps`, three matching estimates.
    B,
}

fn square_size<O: BipartiteOracle>(s: &O) -> Result<usize> {
    let (n, m) = (s.left_len(), s.right_len());
    if n != m {
        return Err(Error::DegreeMismatch { left: n, right: m });
    }
    Ok(n)
}

fn finish(
    delta_hat: BigRational,
    n: usize,
    closed_v: usize,
    guarantee: BigRational,
    queries: QueryCounters,
    case: ApproxCase,
) -> ApproxCurvature {
    let estimate = one() - delta_hat.clone() * ratio(n as i64, closed_v as i64);
    ApproxCurvature {
        estimate,
        guarantee,
        side: Bias::LowerBiased,
        queries,
        delta_hat,
        case,
    }
}

fn check_scale(n: usize, closed_v: usize) -> Result<()> {
    if closed_v == 0 || n >= closed_v {
        return Err(Error::domain(format!(
            "reduced size {n} must be below deg(v) + 1 = {closed_v}"
        )));
    }
    Ok(())
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if *eps <= BigRational::zero() {
        return Err(Error::domain("eps must be positive"));
    }
    Ok(())
}

/// Additive `(1 + eps)` lower estimate from the weight-1 matching alone.
///
/// `s` answers queries on the reduced instance; `closed_v` is `deg(v) + 1`.
pub fn approx_equal_a<O: BipartiteOracle>(
    mut s: O,
    closed_v: usize,
    eps: &BigRational,
    d: usize,
    backend: &MatchingBackend,
) -> Result<ApproxCurvature> {
    check_eps(eps)?;
    let n = square_size(&s)?;
    check_scale(n, closed_v)?;
    let guarantee = one() + eps.clone();
    let before = s.counters();
    if n == 0 {
        return Ok(finish(
            int(0),
            0,
            closed_v,
            guarantee,
            QueryCounters::default(),
            ApproxCase::Empty,
        ));
    }
    let delta = eps.clone() / BigInt::from(2);
    let m1 = estimate_matching(&mut s, &[1], &delta, d, backend)?.m_tilde;
    let delta_hat = int(3) - m1 * BigInt::from(2);
    let queries = s.counters().since(&before);
    Ok(finish(
        delta_hat,
        n,
        closed_v,
        guarantee,
        queries,
        ApproxCase::WeightOne,
    ))
}

/// Additive `(1/2 + eps)` lower estimate from the weight-1, weight-2 and
/// combined matchings, following the case ladder on the estimates.
pub fn approx_equal_b<O: BipartiteOracle>(
    mut s: O,
    closed_v: usize,
    eps: &BigRational,
    d: usize,
    backend: &MatchingBackend,
) -> Result<ApproxCurvature> {
    check_eps(eps)?;
    let n = square_size(&s)?;
    check_scale(n, closed_v)?;
    let guarantee = ratio(1, 2) + eps.clone();
    let before = s.counters();
    if n == 0 {
        return Ok(finish(
            int(0),
            0,
            closed_v,
            guarantee,
            QueryCounters::default(),
            ApproxCase::Empty,
        ));
    }
    let delta = eps.clone() / BigInt::from(5);
    let seed = match backend {
        MatchingBackend::Local(c) => c.seed,
        MatchingBackend::Exact => 0,
    };
    let m1 = estimate_matching(&mut s, &[1], &delta, d, &backend.reseeded(seed))?.m_tilde;
    let m2 = estimate_matching(
        &mut s,
        &[2],
        &delta,
        d,
        &backend.reseeded(seed.wrapping_add(1)),
    )?
    .m_tilde;
    let m12 = estimate_matching(
        &mut s,
        &[1, 2],
        &delta,
        d,
        &backend.reseeded(seed.wrapping_add(2)),
    )?
    .m_tilde;
    let two = BigInt::from(2);
    let (delta_hat, case) = if m1 <= ratio(1, 4) {
        (int(3) - m2, ApproxCase::Case1)
    } else if m2 <= ratio(1, 2) || m1 >= ratio(1, 2) || m12 <= ratio(3, 4) {
        (int(3) - m1 * two, ApproxCase::Case2)
    } else if m12 <= m1.clone() * two.clone() + delta {
        (int(3) - m1 * two, ApproxCase::Case31)
    } else {
        (int(3) - m12, ApproxCase::Case32)
    };
    let queries = s.counters().since(&before);
    Ok(finish(delta_hat, n, closed_v, guarantee, queries, case))
}

#[derive(Debug, Clone, Default)]
struct CopyFamily {
    /// Real answers so far for `(x_i, s)`, in arrival order.
    revealed: Vec<usize>,
    /// Answers handed to each copy `x_i^j`.
    per_copy: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, Default)]
struct RightKey {
    /// Base left indices revealed by real `(y, s)` queries.
    revealed: Vec<usize>,
    /// Padded rows handed out for the virtual `(y, s)`.
    returned: BTreeSet<usize>,
}

/// Bookkeeping of the padded-session simulation.
#[derive(Debug, Clone, Default)]
pub struct PadSimState {
    sigma: HashMap<(Vertex, u8), usize>,
    left: HashMap<(usize, u8), CopyFamily>,
    right: HashMap<(usize, u8), RightKey>,
    special: HashMap<usize, BTreeSet<usize>>,
}

impl PadSimState {
    /// Number of distinct `(node, class)` keys whose true count is known.
    pub fn degrees_known(&self) -> usize {
        self.sigma.len()
    }
}

/// Virtual oracle on the padded gadget, answering each query with at most
/// one same-type query and one selective degree query on the real gadget.
///
/// Left rows are `x_1^1..x_1^a, x_2^1, .., r_1..r_b`; right nodes are the
/// real right nodes.
#[derive(Debug)]
pub struct PaddedSession<O: BipartiteOracle> {
    inner: O,
    a: usize,
    b: usize,
    base_left: usize,
    counters: QueryCounters,
    rng: ChaCha8Rng,
    state: PadSimState,
}

pub fn make_padded_session<O: BipartiteOracle>(
    inner: O,
    a: usize,
    b: usize,
    seed: u64,
) -> Result<PaddedSession<O>> {
    let (p, q) = (inner.left_len(), inner.right_len());
    if a == 0 || a * p + b != q || (p > 0 && b >= p) {
        return Err(Error::domain(format!(
            "padding {a} * {p} + {b} does not split {q}"
        )));
    }
    Ok(PaddedSession {
        inner,
        a,
        b,
        base_left: p,
        counters: QueryCounters::default(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        state: PadSimState::default(),
    })
}

impl<O: BipartiteOracle> PaddedSession<O> {
    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn state(&self) -> &PadSimState {
        &self.state
    }

    pub fn label(&self, row: usize) -> PaddedLabel {
        if row < self.base_left * self.a {
            PaddedLabel::Copy {
                base: row / self.a,
                copy: row % self.a + 1,
            }
        } else {
            PaddedLabel::Special(row - self.base_left * self.a + 1)
        }
    }

    fn row_of(&self, base: usize, copy: usize) -> usize {
        base * self.a + copy
    }

    fn check(&self, x: Vertex) -> Result<()> {
        if x.index < self.len_of(x.side) {
            Ok(())
        } else {
            Err(Error::UnknownNode(x.to_string()))
        }
    }

    fn sigma(&mut self, x: Vertex, s: u8) -> Result<usize> {
        if let Some(&c) = self.state.sigma.get(&(x, s)) {
            return Ok(c);
        }
        let c = self.inner.selective_degree_query(x, s)?;
        self.state.sigma.insert((x, s), c);
        Ok(c)
    }

    fn real_neighbor(&mut self, x: Vertex, s: u8) -> Result<usize> {
        match self.inner.weighted_neighbor_query(x, s)? {
            Some(z) => Ok(z.index),
            None => Err(Error::domain(format!(
                "real oracle exhausted ({x}, {s}) before its selective degree"
            ))),
        }
    }

    /// Query `(x_i^j, s)`.
    fn copy_query(&mut self, i: usize, copy: usize, s: u8) -> Result<Option<usize>> {
        let sigma = self.sigma(Vertex::left(i), s)?;
        let a = self.a;
        let fam = self.state.left.entry((i, s)).or_insert_with(|| CopyFamily {
            revealed: Vec::new(),
            per_copy: vec![BTreeSet::new(); a],
        });
        let kappa_i = fam.revealed.len();
        let kappa_c = fam.per_copy[copy].len();
        let cached: Vec<usize> = fam
            .revealed
            .iter()
            .copied()
            .filter(|y| !fam.per_copy[copy].contains(y))
            .collect();
        let answer = if kappa_i == sigma {
            if kappa_c == sigma {
                return Ok(None);
            }
            cached[self.rng.gen_range(0..cached.len())]
        } else {
            let y_p = self.real_neighbor(Vertex::left(i), s)?;
            let answer = if kappa_c == kappa_i {
                y_p
            } else {
                let lambda_i = sigma - kappa_i;
                let lambda_c = sigma - kappa_c;
                assert_eq!(
                    lambda_i + cached.len(),
                    lambda_c,
                    "mixing weights must sum to 1"
                );
                let r = self.rng.gen_range(0..lambda_c);
                if r < lambda_i {
                    y_p
                } else {
                    cached[r - lambda_i]
                }
            };
            self.state
                .left
                .get_mut(&(i, s))
                .expect("created above")
                .revealed
                .push(y_p);
            answer
        };
        self.state
            .left
            .get_mut(&(i, s))
            .expect("created above")
            .per_copy[copy]
            .insert(answer);
        Ok(Some(answer))
    }

    /// Query `(r_k, s)`: every right node sits at weight 3.
    fn special_query(&mut self, k: usize, s: u8) -> Option<usize> {
        let q = self.right_len();
        let seen = self.state.special.entry(k).or_default();
        if s != 3 || seen.len() == q {
            return None;
        }
        let free: Vec<usize> = (0..q).filter(|y| !seen.contains(y)).collect();
        let pick = free[self.rng.gen_range(0..free.len())];
        seen.insert(pick);
        Some(pick)
    }

    /// Query `(y, s)` from the right side.
    fn right_query(&mut self, y: usize, s: u8) -> Result<Option<usize>> {
        let nu1 = self.sigma(Vertex::right(y), s)?;
        let (a, b, p) = (self.a, self.b, self.base_left);
        let nu2 = if s == 3 { b } else { 0 };
        let key = self.state.right.entry((y, s)).or_default();
        let kappa = key.returned.len();
        let total = a * nu1 + nu2;
        if kappa >= total {
            return Ok(None);
        }
        let lambda = total - kappa;
        let specials = (0..nu2).map(|k| p * a + k);
        let known: Vec<usize> = key
            .revealed
            .iter()
            .flat_map(|&i| (0..a).map(move |j| i * a + j))
            .chain(specials)
            .filter(|r| !key.returned.contains(r))
            .collect();
        let revealed = key.revealed.len();
        let answer = if revealed == nu1 {
            debug_assert_eq!(known.len(), lambda);
            known[self.rng.gen_range(0..known.len())]
        } else {
            let x_p = self.real_neighbor(Vertex::right(y), s)?;
            let j = if a == 1 { 0 } else { self.rng.gen_range(0..a) };
            let phi = nu1 - revealed;
            assert_eq!(
                a * phi + known.len(),
                lambda,
                "mixing weights must sum to 1"
            );
            let r = if known.is_empty() {
                0
            } else {
                self.rng.gen_range(0..lambda)
            };
            self.state
                .right
                .get_mut(&(y, s))
                .expect("created above")
                .revealed
                .push(x_p);
            if r < a * phi {
                self.row_of(x_p, j)
            } else {
                known[r - a * phi]
            }
        };
        self.state
            .right
            .get_mut(&(y, s))
            .expect("created above")
            .returned
            .insert(answer);
        Ok(Some(answer))
    }
}

impl<O: BipartiteOracle> BipartiteOracle for PaddedSession<O> {
    fn left_len(&self) -> usize {
        self.inner.right_len()
    }

    fn right_len(&self) -> usize {
        self.inner.right_len()
    }

    fn pair_query(&mut self, x: Vertex, y: Vertex) -> Result<u8> {
        if x.side != Side::Left || y.side != Side::Right {
            return Err(Error::domain(format!(
                "pair query expects (left, right), got ({x}, {y})"
            )));
        }
        self.check(x)?;
        self.check(y)?;
        self.counters.pair += 1;
        match self.label(x.index) {
            PaddedLabel::Copy { base, .. } => self.inner.pair_query(Vertex::left(base), y),
            PaddedLabel::Special(_) => Ok(3),
        }
    }

    fn weighted_neighbor_query(&mut self, x: Vertex, s: u8) -> Result<Option<Vertex>> {
        check_class(s)?;
        self.check(x)?;
        self.counters.weighted_neighbor += 1;
        match x.side {
            Side::Left => {
                let got = match self.label(x.index) {
                    PaddedLabel::Copy { base, copy } => self.copy_query(base, copy - 1, s)?,
                    PaddedLabel::Special(k) => self.special_query(k, s),
                };
                Ok(got.map(Vertex::right))
            }
            Side::Right => Ok(self.right_query(x.index, s)?.map(Vertex::left)),
        }
    }

    fn selective_degree_query(&mut self, x: Vertex, s: u8) -> Result<usize> {
        check_class(s)?;
        self.check(x)?;
        self.counters.selective_degree += 1;
        match x.side {
            Side::Left => match self.label(x.index) {
                PaddedLabel::Copy { base, .. } => self.sigma(Vertex::left(base), s),
                PaddedLabel::Special(_) => Ok(if s == 3 { self.right_len() } else { 0 }),
            },
            Side::Right => {
                let nu1 = self.sigma(x, s)?;
                Ok(self.a * nu1 + if s == 3 { self.b } else { 0 })
            }
        }
    }

    fn counters(&self) -> QueryCounters {
        self.counters
    }

    fn reset_exploration(&mut self) {
        self.state.left.clear();
        self.state.right.clear();
        self.state.special.clear();
        self.inner.reset_exploration();
    }
}

/// Hides a set of left and right nodes from an oracle and renumbers the rest.
///
/// Weighted neighbor queries skip hidden answers by asking again; selective
/// degrees are those of the wrapped oracle and so are upper bounds.
#[derive(Debug)]
pub struct ReducedView<O: BipartiteOracle> {
    inner: O,
    left: Vec<usize>,
    right: Vec<usize>,
    left_pos: Vec<Option<usize>>,
    right_pos: Vec<Option<usize>>,
}

impl<O: BipartiteOracle> ReducedView<O> {
    pub fn new(inner: O, hidden_left: &[usize], hidden_right: &[usize]) -> Self {
        let keep = |len: usize, hidden: &[usize]| -> (Vec<usize>, Vec<Option<usize>>) {
            let hidden: BTreeSet<usize> = hidden.iter().copied().collect();
            let kept: Vec<usize> = (0..len).filter(|i| !hidden.contains(i)).collect();
            let mut pos = vec![None; len];
            for (k, &i) in kept.iter().enumerate() {
                pos[i] = Some(k);
            }
            (kept, pos)
        };
        let (left, left_pos) = keep(inner.left_len(), hidden_left);
        let (right, right_pos) = keep(inner.right_len(), hidden_right);
        ReducedView {
            inner,
            left,
            right,
            left_pos,
            right_pos,
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    fn outer(&self, x: Vertex) -> Result<Vertex> {
        let map = match x.side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        map.get(x.index)
            .map(|&index| Vertex {
                side: x.side,
                index,
            })
            .ok_or_else(|| Error::UnknownNode(x.to_string()))
    }

    fn visible(&self, z: Vertex) -> Option<Vertex> {
        let pos = match z.side {
            Side::Left => &self.left_pos,
            Side::Right => &self.right_pos,
        };
        pos[z.index].map(|index| Vertex {
            side: z.side,
            index,
        })
    }
}

impl<O: BipartiteOracle> BipartiteOracle for ReducedView<O> {
    fn left_len(&self) -> usize {
        self.left.len()
    }

    fn right_len(&self) -> usize {
        self.right.len()
    }

    fn pair_query(&mut self, x: Vertex, y: Vertex) -> Result<u8> {
        let (x, y) = (self.outer(x)?, self.outer(y)?);
        self.inner.pair_query(x, y)
    }

    fn weighted_neighbor_query(&mut self, x: Vertex, s: u8) -> Result<Option<Vertex>> {
        let x = self.outer(x)?;
        loop {
            match self.inner.weighted_neighbor_query(x, s)? {
                None => return Ok(None),
                Some(z) => {
                    if let Some(v) = self.visible(z) {
                        return Ok(Some(v));
                    }
                }
            }
        }
    }

    fn selective_degree_query(&mut self, x: Vertex, s: u8) -> Result<usize> {
        let x = self.outer(x)?;
        self.inner.selective_degree_query(x, s)
    }

    fn counters(&self) -> QueryCounters {
        self.inner.counters()
    }

    fn reset_exploration(&mut self) {
        self.inner.reset_exploration()
    }
}

/// Whether an unequal-degree edge can be handled: `deg(v) + 1` is a multiple
/// of `deg(u) + 1`, or `deg(u) >= (1 - delta/3) deg(v)`.
pub fn unequal_supported(deg_u: usize, deg_v: usize, delta: &BigRational) -> bool {
    let (_, b) = padding_split(deg_u + 1, deg_v + 1);
    b == 0
        || ratio(deg_u as i64, 1) >= (one() - delta.clone() / BigInt::from(3)) * BigInt::from(deg_v)
}

/// Curvature estimate for an edge whose endpoint degrees may differ.
///
/// `real` answers queries on the full edge gadget; `left` / `right` are the
/// closed neighborhoods of the lower- and higher-degree endpoint (known
/// without queries). The result is lower-biased with radius
/// `(1 + eps)` or `(1/2 + eps)` plus `delta` when padding is inexact.
#[allow(clippy::too_many_arguments)]
pub fn approx_unequal<O: BipartiteOracle>(
    real: O,
    left: &[NodeId],
    right: &[NodeId],
    variant: Variant,
    eps: &BigRational,
    delta: &BigRational,
    d: usize,
    backend: &MatchingBackend,
    seed: u64,
) -> Result<ApproxCurvature> {
    let (p, q) = (left.len(), right.len());
    if real.left_len() != p || real.right_len() != q || p == 0 || p > q {
        return Err(Error::domain("neighborhood lists do not match the oracle"));
    }
    if *delta <= BigRational::zero() {
        return Err(Error::domain("delta must be positive"));
    }
    if !unequal_supported(p - 1, q - 1, delta) {
        return Err(Error::UnsupportedRegime(format!(
            "deg(u) = {}, deg(v) = {}: deg(v) + 1 is not a multiple of deg(u) + 1 and deg(u) < (1 - delta/3) deg(v)",
            p - 1,
            q - 1
        )));
    }
    let (a, b) = padding_split(p, q);
    let before = real.counters();
    let right_set: BTreeSet<NodeId> = right.iter().copied().collect();
    let left_set: BTreeSet<NodeId> = left.iter().copied().collect();
    let hidden_left: Vec<usize> = (0..p)
        .filter(|&i| right_set.contains(&left[i]))
        .map(|i| i * a)
        .collect();
    let hidden_right: Vec<usize> = (0..q).filter(|&j| left_set.contains(&right[j])).collect();

    let padded = make_padded_session(real, a, b, seed)?;
    let mut view = ReducedView::new(padded, &hidden_left, &hidden_right);
    let mut out = match variant {
        Variant::A => approx_equal_a(&mut view, q, eps, d, backend)?,
        Variant::B => approx_equal_b(&mut view, q, eps, d, backend)?,
    };
    out.queries = view.inner().inner().counters().since(&before);
    if b > 0 {
        out.guarantee += delta.clone();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxMode {
    EqualA,
    EqualB,
    Unequal,
}

/// Builds the oracle for edge `{u, v}` of `g` and runs the chosen algorithm.
/// Equal modes query the reduced instance; the unequal mode queries the
/// full gadget through the padding simulation (variant B).
#[allow(clippy::too_many_arguments)]
pub fn approx_edge(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    mode: ApproxMode,
    eps: &BigRational,
    delta: &BigRational,
    d: usize,
    backend: &MatchingBackend,
    seed: u64,
) -> Result<ApproxCurvature> {
    let b = g.local_bipartite(u, v)?;
    let closed_v = b.right.len();
    match mode {
        ApproxMode::EqualA | ApproxMode::EqualB => {
            let h = reduced_instance(g, u, v)?;
            let s = QuerySession::on_bipartite(WeightedBipartite::from_mpmct(&h), seed);
            if mode == ApproxMode::EqualA {
                approx_equal_a(s, closed_v, eps, d, backend)
            } else {
                approx_equal_b(s, closed_v, eps, d, backend)
            }
        }
        ApproxMode::Unequal => {
            let s = QuerySession::on_bipartite(WeightedBipartite::from_local(g, &b), seed);
            approx_unequal(
                s,
                &b.left,
                &b.right,
                Variant::B,
                eps,
                delta,
                d,
                backend,
                seed ^ 0x5eed,
            )
        }
    }
}
