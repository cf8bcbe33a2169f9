//! Normalized maximum-matching size of a weight-class subgraph, estimated
//! through weighted neighbor queries.
//!
//! The exact backend drains every left node and runs augmenting paths. The
//! local backend answers "is this left node matched?" for sampled nodes by
//! simulating, around the node only, a phased matching: phase `k` augments
//! the phase `k - 1` matching along a random-rank greedy maximal set of
//! vertex-disjoint augmenting paths with `2k - 1` edges (phase 1 is the
//! random-rank greedy maximal matching). The sampled fraction is shifted
//! down by `delta / 2` so the estimate stays below the true value with high
//! probability.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{clamp, int, one, ratio};
use crate::oracle::{check_class, BipartiteOracle, QueryCounters, Side, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingEstimate {
    /// Estimated maximum-matching size divided by the side size `n`.
    pub m_tilde: BigRational,
    pub delta: BigRational,
    pub queries_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalMatchingConfig {
    pub seed: u64,
    /// Upper limit on augmentation phases (phase 1 = greedy matching).
    pub max_phases: usize,
    pub max_samples: usize,
}

impl LocalMatchingConfig {
    pub fn new(seed: u64) -> Self {
        LocalMatchingConfig {
            seed,
            max_phases: 2,
            max_samples: 1_000,
        }
    }

    /// `8 ln(20) / delta^2` samples put the sampled fraction within
    /// `delta / 4` of its mean except with probability 1/10; the other
    /// `delta / 4` is left for stopping after finitely many phases.
    pub fn samples_for(&self, delta: &BigRational) -> usize {
        let d = delta.to_f64().unwrap_or(1.0).max(1e-9);
        let wanted = (8.0 * 20f64.ln() / (d * d)).ceil() as usize;
        wanted.clamp(1, self.max_samples)
    }

    /// Phases needed for augmenting paths up to `2 ceil(1/delta) + 1` edges.
    pub fn phases_for(&self, delta: &BigRational) -> usize {
        let inv = (one() / delta).ceil().to_integer();
        let wanted = inv.to_usize().unwrap_or(usize::MAX).saturating_add(1);
        wanted.clamp(1, self.max_phases.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingBackend {
    Exact,
    Local(LocalMatchingConfig),
}

impl MatchingBackend {
    /// Same backend with a different seed (exact ignores it).
    pub fn reseeded(&self, seed: u64) -> Self {
        match *self {
            MatchingBackend::Exact => MatchingBackend::Exact,
            MatchingBackend::Local(c) => MatchingBackend::Local(LocalMatchingConfig { seed, ..c }),
        }
    }
}

fn check_classes(weights: &[u8]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::domain("at least one weight class is required"));
    }
    weights.iter().try_for_each(|&s| check_class(s))
}

pub fn estimate_matching<O: BipartiteOracle>(
    s: &mut O,
    weights: &[u8],
    delta: &BigRational,
    d: usize,
    backend: &MatchingBackend,
) -> Result<MatchingEstimate> {
    check_classes(weights)?;
    if *delta <= BigRational::zero() {
        return Err(Error::domain("delta must be positive"));
    }
    match backend {
        MatchingBackend::Exact => {
            let (est, degrees) = exact_with_degrees(s, weights)?;
            if let Some((x, deg)) = degrees.into_iter().find(|&(_, deg)| deg > d) {
                return Err(Error::DegreeBoundViolated {
                    node: x.to_string(),
                    degree: deg,
                    bound: d,
                });
            }
            Ok(est)
        }
        MatchingBackend::Local(cfg) => local_backend(s, weights, delta, d, cfg),
    }
}

/// Reveals the chosen-weight subgraph by draining every left node and returns
/// its exact normalized maximum matching.
pub fn exact_backend<O: BipartiteOracle>(s: &mut O, weights: &[u8]) -> Result<MatchingEstimate> {
    check_classes(weights)?;
    exact_with_degrees(s, weights).map(|(est, _)| est)
}

/// Also reports the largest per-class degree seen at every node.
fn exact_with_degrees<O: BipartiteOracle>(
    s: &mut O,
    weights: &[u8],
) -> Result<(MatchingEstimate, Vec<(Vertex, usize)>)> {
    let before = s.counters();
    let n = s.left_len();
    s.reset_exploration();
    let mut adj = vec![Vec::new(); n];
    let mut right_deg: HashMap<(usize, u8), usize> = HashMap::new();
    let mut degrees = Vec::new();
    for (i, list) in adj.iter_mut().enumerate() {
        let mut widest = 0;
        for &w in weights {
            let mut count = 0;
            while let Some(y) = s.weighted_neighbor_query(Vertex::left(i), w)? {
                list.push(y.index);
                *right_deg.entry((y.index, w)).or_insert(0) += 1;
                count += 1;
            }
            widest = widest.max(count);
        }
        list.sort_unstable();
        degrees.push((Vertex::left(i), widest));
    }
    let mut per_right: HashMap<usize, usize> = HashMap::new();
    for ((j, _), c) in right_deg {
        let e = per_right.entry(j).or_insert(0);
        *e = (*e).max(c);
    }
    let mut right: Vec<_> = per_right.into_iter().collect();
    right.sort_unstable();
    degrees.extend(right.into_iter().map(|(j, c)| (Vertex::right(j), c)));

    let size = max_matching(n, s.right_len(), &adj);
    let m_tilde = if n == 0 {
        BigRational::zero()
    } else {
        ratio(size as i64, n as i64)
    };
    Ok((
        MatchingEstimate {
            m_tilde,
            delta: BigRational::zero(),
            queries_used: total_queries(s.counters().since(&before)),
        },
        degrees,
    ))
}

fn total_queries(c: QueryCounters) -> u64 {
    c.without_degree() + c.selective_degree
}

/// Maximum bipartite matching size by repeated augmenting-path search.
pub fn max_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
    fn augment(
        x: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                if owner[y].is_none_or(|x2| augment(x2, adj, seen, owner)) {
                    owner[y] = Some(x);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; right];
    let mut size = 0;
    for x in 0..left {
        let mut seen = vec![false; right];
        if augment(x, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn encode(v: Vertex) -> u64 {
    (v.index as u64) << 1 | u64::from(v.side == Side::Right)
}

type Path = Vec<Vertex>;

/// Local simulation state for one sampled node; discarded between samples so
/// every sample pays for its own exploration.
struct Explorer<'a, O: BipartiteOracle> {
    oracle: &'a mut O,
    weights: &'a [u8],
    bound: usize,
    rank_seed: u64,
    degree_cache: &'a mut HashMap<(Vertex, u8), usize>,
    adj: HashMap<Vertex, Vec<Vertex>>,
    partner_memo: HashMap<(usize, Vertex), Option<Vertex>>,
    chosen_memo: HashMap<(usize, Path), bool>,
}

impl<O: BipartiteOracle> Explorer<'_, O> {
    fn neighbors(&mut self, z: Vertex) -> Result<Vec<Vertex>> {
        if let Some(list) = self.adj.get(&z) {
            return Ok(list.clone());
        }
        let mut list = Vec::new();
        for &w in self.weights {
            let deg = match self.degree_cache.get(&(z, w)) {
                Some(&deg) => deg,
                None => {
                    let deg = self.oracle.selective_degree_query(z, w)?;
                    self.degree_cache.insert((z, w), deg);
                    deg
                }
            };
            if deg > self.bound {
                return Err(Error::DegreeBoundViolated {
                    node: z.to_string(),
                    degree: deg,
                    bound: self.bound,
                });
            }
            for _ in 0..deg {
                match self.oracle.weighted_neighbor_query(z, w)? {
                    Some(y) => list.push(y),
                    None => break,
                }
            }
        }
        list.sort_unstable();
        self.adj.insert(z, list.clone());
        Ok(list)
    }

    fn rank(&self, phase: usize, path: &[Vertex]) -> u64 {
        path.iter()
            .fold(mix(self.rank_seed ^ phase as u64), |h, &v| {
                mix(h ^ encode(v))
            })
    }

    /// Partner of `z` in the phase-`phase` matching.
    fn partner(&mut self, phase: usize, z: Vertex) -> Result<Option<Vertex>> {
        if phase == 0 {
            return Ok(None);
        }
        if let Some(&p) = self.partner_memo.get(&(phase, z)) {
            return Ok(p);
        }
        let mut result = None;
        let mut found = false;
        for path in self.paths_through(phase, z)? {
            if self.chosen(phase, &path)? {
                let pos = path.iter().position(|&w| w == z).expect("on path");
                result = Some(if pos % 2 == 0 {
                    path[pos + 1]
                } else {
                    path[pos - 1]
                });
                found = true;
                break;
            }
        }
        if !found {
            result = self.partner(phase - 1, z)?;
        }
        self.partner_memo.insert((phase, z), result);
        Ok(result)
    }

    /// Whether `path` is in the greedy maximal disjoint set of phase `phase`.
    fn chosen(&mut self, phase: usize, path: &Path) -> Result<bool> {
        if let Some(&c) = self.chosen_memo.get(&(phase, path.clone())) {
            return Ok(c);
        }
        let own = (self.rank(phase, path), path.clone());
        let mut rivals = BTreeSet::new();
        for &z in path {
            for other in self.paths_through(phase, z)? {
                let key = (self.rank(phase, &other), other);
                if key < own {
                    rivals.insert(key);
                }
            }
        }
        let mut verdict = true;
        for (_, other) in rivals {
            if self.chosen(phase, &other)? {
                verdict = false;
                break;
            }
        }
        self.chosen_memo.insert((phase, path.clone()), verdict);
        Ok(verdict)
    }

    /// Augmenting paths with `2 phase - 1` edges relative to the
    /// phase `phase - 1` matching that pass through `z`. A path is stored
    /// from its free left end: `x0 y0 x1 y1 ...`, with `y_i x_{i+1}` matched.
    fn paths_through(&mut self, phase: usize, z: Vertex) -> Result<Vec<Path>> {
        let len = 2 * phase;
        let prev = phase - 1;
        let mut out = Vec::new();
        let parity = usize::from(z.side == Side::Right);
        for pos in (parity..len).step_by(2) {
            let heads = self.extend_back(prev, vec![z], pos)?;
            let tails = self.extend_forward(prev, vec![z], pos, len)?;
            for head in &heads {
                for tail in &tails {
                    let mut path: Path = head.iter().rev().copied().collect();
                    path.extend_from_slice(&tail[1..]);
                    let distinct: BTreeSet<_> = path.iter().collect();
                    if distinct.len() == path.len() {
                        out.push(path);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reversed prefixes from `z` at position `pos` back to position 0.
    fn extend_back(&mut self, prev: usize, acc: Vec<Vertex>, pos: usize) -> Result<Vec<Path>> {
        let cur = *acc.last().expect("non-empty");
        if pos == 0 {
            return Ok(if self.partner(prev, cur)?.is_none() {
                vec![acc]
            } else {
                vec![]
            });
        }
        let mut out = Vec::new();
        if pos.is_multiple_of(2) {
            if let Some(p) = self.partner(prev, cur)? {
                let mut next = acc;
                next.push(p);
                out.extend(self.extend_back(prev, next, pos - 1)?);
            }
        } else {
            for x in self.neighbors(cur)? {
                if !acc.contains(&x) {
                    let mut next = acc.clone();
                    next.push(x);
                    out.extend(self.extend_back(prev, next, pos - 1)?);
                }
            }
        }
        Ok(out)
    }

    /// Suffixes from `z` at position `pos` to position `len - 1`.
    fn extend_forward(
        &mut self,
        prev: usize,
        acc: Vec<Vertex>,
        pos: usize,
        len: usize,
    ) -> Result<Vec<Path>> {
        let cur = *acc.last().expect("non-empty");
        if pos == len - 1 {
            return Ok(if self.partner(prev, cur)?.is_none() {
                vec![acc]
            } else {
                vec![]
            });
        }
        let mut out = Vec::new();
        if pos.is_multiple_of(2) {
            for y in self.neighbors(cur)? {
                if !acc.contains(&y) {
                    let mut next = acc.clone();
                    next.push(y);
                    out.extend(self.extend_forward(prev, next, pos + 1, len)?);
                }
            }
        } else if let Some(p) = self.partner(prev, cur)? {
            let mut next = acc;
            next.push(p);
            out.extend(self.extend_forward(prev, next, pos + 1, len)?);
        }
        Ok(out)
    }
}

fn local_backend<O: BipartiteOracle>(
    s: &mut O,
    weights: &[u8],
    delta: &BigRational,
    d: usize,
    cfg: &LocalMatchingConfig,
) -> Result<MatchingEstimate> {
    let before = s.counters();
    let n = s.left_len();
    if n == 0 {
        return Ok(MatchingEstimate {
            m_tilde: BigRational::zero(),
            delta: delta.clone(),
            queries_used: 0,
        });
    }
    let samples = cfg.samples_for(delta);
    let phases = cfg.phases_for(delta);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rank_seed: u64 = rng.gen();
    let mut degree_cache = HashMap::new();
    let mut matched = 0i64;
    for _ in 0..samples {
        let x = Vertex::left(rng.gen_range(0..n));
        s.reset_exploration();
        let mut ex = Explorer {
            oracle: s,
            weights,
            bound: d,
            rank_seed,
            degree_cache: &mut degree_cache,
            adj: HashMap::new(),
            partner_memo: HashMap::new(),
            chosen_memo: HashMap::new(),
        };
        if ex.partner(phases, x)?.is_some() {
            matched += 1;
        }
    }
    s.reset_exploration();
    let raw = ratio(matched, samples as i64);
    let shifted = raw - delta.clone() / BigInt::from(2);
    let used = s.counters().since(&before);
    Ok(MatchingEstimate {
        m_tilde: clamp(shifted, &int(0), &int(1)),
        delta: delta.clone(),
        queries_used: total_queries(used),
    })
}
