//! Hard instance families for exact / approximate edge curvature and a
//! harness that measures how many queries natural scan strategies spend
//! telling the two classes apart.
//!
//! Class 1 instances contain weight-1 pairs (one pair, or a perfect matching);
//! class 2 is the all-heavy instance. Every node has at most one weight-1
//! pair and no weight-2 pair, so selective degree queries reveal nothing
//! beyond what neighbor queries do.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::emd::MpmctInstance;
use crate::error::{Error, Result};
use crate::oracle::{BipartiteOracle, QuerySession, Vertex, WeightedBipartite};
use crate::par;

/// All weights 3 except `w(u_i, v_j) = 1` (1-based indices).
pub fn gen_single_light(n: usize, i: usize, j: usize) -> Result<MpmctInstance> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    let mut rows = vec![vec![3u8; n]; n];
    rows[i - 1][j - 1] = 1;
    MpmctInstance::from_rows(&rows)
}

pub fn gen_all_heavy(n: usize) -> MpmctInstance {
    MpmctInstance::from_rows(&vec![vec![3u8; n]; n]).expect("square all-3 matrix")
}

/// Weight 1 on `(u_i, v_{pi(i)})`, 3 elsewhere; `pi` lists `pi(1), .., pi(n)`.
pub fn gen_permutation(n: usize, pi: &[usize]) -> Result<MpmctInstance> {
    let mut seen = vec![false; n];
    if pi.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    for &p in pi {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::NotAPermutation(n));
        }
        seen[p - 1] = true;
    }
    let mut rows = vec![vec![3u8; n]; n];
    for (i, &p) in pi.iter().enumerate() {
        rows[i][p - 1] = 1;
    }
    MpmctInstance::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    SingleLight,
    AllHeavy,
    Permutation,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::SingleLight => "single_light",
            FamilyKind::AllHeavy => "all_heavy",
            FamilyKind::Permutation => "permutation",
        }
    }

    /// Class the family belongs to: 1 if it has weight-1 pairs.
    pub fn class(self) -> Class {
        match self {
            FamilyKind::AllHeavy => Class::Heavy,
            _ => Class::Light,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "single_light" => Ok(FamilyKind::SingleLight),
            "all_heavy" => Ok(FamilyKind::AllHeavy),
            "permutation" => Ok(FamilyKind::Permutation),
            _ => Err(Error::domain(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    /// Has weight-1 pairs.
    Light,
    /// All weights 3.
    Heavy,
}

/// A hidden instance together with how it was drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFamily {
    pub kind: FamilyKind,
    pub n: usize,
    /// 1-based `(i, j)` for single-light, `pi` for permutation, empty otherwise.
    pub params: Vec<usize>,
    pub instance: MpmctInstance,
}

impl InstanceFamily {
    pub fn draw(kind: FamilyKind, n: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let (params, instance) = match kind {
            FamilyKind::SingleLight => {
                let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
                (vec![i, j], gen_single_light(n, i, j)?)
            }
            FamilyKind::AllHeavy => (Vec::new(), gen_all_heavy(n)),
            FamilyKind::Permutation => {
                let mut pi: Vec<usize> = (1..=n).collect();
                pi.shuffle(rng);
                let h = gen_permutation(n, &pi)?;
                (pi, h)
            }
        };
        Ok(InstanceFamily {
            kind,
            n,
            params,
            instance,
        })
    }
}

/// Which light family is mixed 50/50 with the all-heavy instance.
/// `AllHeavy` means the heavy instance only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMix {
    pub light: FamilyKind,
    pub n: usize,
}

impl FamilyMix {
    pub fn new(light: FamilyKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("family size must be at least 1"));
        }
        Ok(FamilyMix { light, n })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<InstanceFamily> {
        let kind = if self.light != FamilyKind::AllHeavy && rng.gen_bool(0.5) {
            self.light
        } else {
            FamilyKind::AllHeavy
        };
        InstanceFamily::draw(kind, self.n, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Pair queries over all `n^2` pairs in random order until a weight-1 pair.
    PairScan,
    /// `(x, 1)` weighted neighbor queries over left nodes in random order.
    NeighborScan,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::PairScan => "pair-scan",
            Strategy::NeighborScan => "neighbor-scan",
        }
    }

    pub fn decide<O: BipartiteOracle>(self, s: &mut O, rng: &mut ChaCha8Rng) -> Result<Class> {
        let (p, q) = (s.left_len(), s.right_len());
        match self {
            Strategy::PairScan => {
                let mut pairs: Vec<(usize, usize)> =
                    (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).collect();
                pairs.shuffle(rng);
                for (i, j) in pairs {
                    if s.pair_query(Vertex::left(i), Vertex::right(j))? < 3 {
                        return Ok(Class::Light);
                    }
                }
            }
            Strategy::NeighborScan => {
                let mut order: Vec<usize> = (0..p).collect();
                order.shuffle(rng);
                for i in order {
                    if s.weighted_neighbor_query(Vertex::left(i), 1)?.is_some() {
                        return Ok(Class::Light);
                    }
                }
            }
        }
        Ok(Class::Heavy)
    }

    /// Lower bounds on the expected count of this strategy's query type:
    /// `(bound, table)` with `deg(v) - 1 = n`.
    pub fn thresholds(self, light: FamilyKind, n: usize) -> Option<Thresholds> {
        let n = n as f64;
        match (self, light) {
            (Strategy::PairScan, FamilyKind::SingleLight) => Some(Thresholds {
                bound: n * n / 6.0,
                table: n * n / 6.0,
            }),
            (Strategy::NeighborScan, FamilyKind::SingleLight) => Some(Thresholds {
                bound: n / 6.0,
                table: n / 2.0,
            }),
            (Strategy::PairScan, FamilyKind::Permutation) => Some(Thresholds {
                bound: n / 6.0,
                table: n / 6.0,
            }),
            _ => None,
        }
    }

    fn primary(self, t: &TrialRecord) -> u64 {
        match self {
            Strategy::PairScan => t.pair_q,
            Strategy::NeighborScan => t.wneigh_q,
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "pair-scan" => Ok(Strategy::PairScan),
            "neighbor-scan" | "weighted-neighbor-scan" => Ok(Strategy::NeighborScan),
            _ => Err(Error::domain(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub bound: f64,
    pub table: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub family: FamilyKind,
    pub correct: bool,
    pub pair_q: u64,
    pub wneigh_q: u64,
    pub seldeg_q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuerySummary {
    pub mean: f64,
    pub p50: u64,
    pub p90: u64,
    pub max: u64,
}

impl QuerySummary {
    fn of(mut counts: Vec<u64>) -> Self {
        counts.sort_unstable();
        let rank = |p: f64| {
            let idx = ((p * counts.len() as f64).ceil() as usize).clamp(1, counts.len()) - 1;
            counts[idx]
        };
        QuerySummary {
            mean: counts.iter().sum::<u64>() as f64 / counts.len() as f64,
            p50: rank(0.5),
            p90: rank(0.9),
            max: *counts.last().expect("at least one trial"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub strategy: Strategy,
    pub mix: FamilyMix,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    /// Summary of the strategy's own query type.
    pub summary: QuerySummary,
    pub accuracy: f64,
    pub thresholds: Option<Thresholds>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "trial,family,correct,pair_q,wneigh_q,seldeg_q";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.trial, t.family, t.correct, t.pair_q, t.wneigh_q, t.seldeg_q
            ));
        }
        out
    }

    /// Mean count of the strategy's query type meets both thresholds.
    pub fn meets_thresholds(&self) -> Option<(bool, bool)> {
        self.thresholds
            .map(|t| (self.summary.mean >= t.bound, self.summary.mean >= t.table))
    }
}

/// Seed of trial `t`: a splitmix64 step of the master seed.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    let mut z = seed.wrapping_add((t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_trial(strategy: Strategy, mix: FamilyMix, seed: u64, t: usize) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, t));
    let hidden = mix.draw(&mut rng)?;
    let mut s =
        QuerySession::on_bipartite(WeightedBipartite::from_mpmct(&hidden.instance), rng.gen());
    let answer = strategy.decide(&mut s, &mut rng)?;
    let c = s.counters();
    Ok(TrialRecord {
        trial: t,
        family: hidden.kind,
        correct: answer == hidden.kind.class(),
        pair_q: c.pair,
        wneigh_q: c.weighted_neighbor,
        seldeg_q: c.selective_degree,
    })
}

/// Runs `trials` independent trials; per-trial seeds derive from `seed`, so
/// the report does not depend on scheduling.
pub fn run_experiment(
    strategy: Strategy,
    mix: FamilyMix,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let records = par::map_range(trials, |t| run_trial(strategy, mix, seed, t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let summary = QuerySummary::of(records.iter().map(|r| strategy.primary(r)).collect());
    let accuracy = records.iter().filter(|r| r.correct).count() as f64 / trials as f64;
    Ok(ExperimentReport {
        strategy,
        mix,
        seed,
        trials: records,
        summary,
        accuracy,
        thresholds: strategy.thresholds(mix.light, mix.n),
    })
}
