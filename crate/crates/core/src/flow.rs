//! Integral min-cost flow by successive shortest paths with node potentials.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    rev: usize,
    cap: i64,
    cost: i64,
}

#[derive(Debug, Clone)]
pub struct MinCostFlow {
    graph: Vec<Vec<Arc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowOutcome {
    pub flow: i64,
    pub cost: i64,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) {
        let fwd = self.graph[from].len();
        let bwd = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Arc {
            to,
            rev: bwd,
            cap,
            cost,
        });
        self.graph[to].push(Arc {
            to: from,
            rev: fwd,
            cap: 0,
            cost: -cost,
        });
    }

    /// Bellman-Ford distances from `source` over arcs with residual capacity.
    fn initial_potentials(&self, source: usize) -> Vec<i64> {
        let n = self.graph.len();
        let mut dist = vec![INF; n];
        dist[source] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == INF {
                    continue;
                }
                for a in &self.graph[u] {
                    if a.cap > 0 && dist[u] + a.cost < dist[a.to] {
                        dist[a.to] = dist[u] + a.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist.iter().map(|&d| if d == INF { 0 } else { d }).collect()
    }

    /// Pushes up to `limit` units from `source` to `sink` at minimum cost.
    ///
    /// Dijkstra pops ties by node index, so results (including which optimum
    /// is found) are deterministic.
    pub fn run(&mut self, source: usize, sink: usize, limit: i64) -> FlowOutcome {
        let n = self.graph.len();
        let mut potential = self.initial_potentials(source);
        let mut dist = vec![INF; n];
        let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); n];
        let mut heap = BinaryHeap::new();
        let mut flow = 0;
        let mut cost = 0;

        while flow < limit {
            dist.fill(INF);
            dist[source] = 0;
            heap.push(Reverse((0i64, source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (idx, a) in self.graph[u].iter().enumerate() {
                    if a.cap == 0 {
                        continue;
                    }
                    let nd = d + a.cost + potential[u] - potential[a.to];
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        prev[a.to] = (u, idx);
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
            if dist[sink] == INF {
                break;
            }
            for (p, &d) in potential.iter_mut().zip(&dist) {
                if d < INF {
                    *p += d;
                }
            }
            let mut push = limit - flow;
            let mut node = sink;
            while node != source {
                let (u, idx) = prev[node];
                push = push.min(self.graph[u][idx].cap);
                node = u;
            }
            let mut node = sink;
            while node != source {
                let (u, idx) = prev[node];
                let rev = self.graph[u][idx].rev;
                self.graph[u][idx].cap -= push;
                self.graph[node][rev].cap += push;
                cost += push * self.graph[u][idx].cost;
                node = u;
            }
            flow += push;
        }
        FlowOutcome { flow, cost }
    }
}

/// Minimum cost of a transportation problem with integral supplies, demands
/// and a dense row-major cost matrix. Supplies and demands must balance.
pub fn transport_cost(supply: &[i64], demand: &[i64], cost: &[i64]) -> i64 {
    let (rows, cols) = (supply.len(), demand.len());
    debug_assert_eq!(cost.len(), rows * cols);
    debug_assert_eq!(supply.iter().sum::<i64>(), demand.iter().sum::<i64>());
    let source = rows + cols;
    let sink = source + 1;
    let mut mcf = MinCostFlow::new(rows + cols + 2);
    for (i, &s) in supply.iter().enumerate() {
        mcf.add_arc(source, i, s, 0);
    }
    for (j, &d) in demand.iter().enumerate() {
        mcf.add_arc(rows + j, sink, d, 0);
    }
    for i in 0..rows {
        for j in 0..cols {
            mcf.add_arc(i, rows + j, supply[i].min(demand[j]), cost[i * cols + j]);
        }
    }
    let total: i64 = supply.iter().sum();
    let out = mcf.run(source, sink, total);
    debug_assert_eq!(out.flow, total);
    out.cost
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_path() {
        let mut m = MinCostFlow::new(3);
        m.add_arc(0, 1, 5, 2);
        m.add_arc(1, 2, 3, 1);
        assert_eq!(m.run(0, 2, 10), FlowOutcome { flow: 3, cost: 9 });
    }

    #[test]
    fn prefers_cheaper_route_then_spills() {
        let mut m = MinCostFlow::new(4);
        m.add_arc(0, 1, 2, 1);
        m.add_arc(0, 2, 2, 5);
        m.add_arc(1, 3, 2, 1);
        m.add_arc(2, 3, 2, 1);
        assert_eq!(
            m.run(0, 3, 3),
            FlowOutcome {
                flow: 3,
                cost: 2 * 2 + 6
            }
        );
    }

    #[test]
    fn rerouting_through_reverse_arc() {
        // Greedy first path 0-1-2-3 must be partly undone to reach flow 2.
        let mut m = MinCostFlow::new(4);
        m.add_arc(0, 1, 1, 1);
        m.add_arc(0, 2, 1, 3);
        m.add_arc(1, 2, 1, 1);
        m.add_arc(1, 3, 1, 4);
        m.add_arc(2, 3, 1, 1);
        assert_eq!(m.run(0, 3, 2), FlowOutcome { flow: 2, cost: 9 });
    }

    #[test]
    fn transport_small() {
        // 2 sources of 1 unit, 2 sinks; diagonal cheap.
        assert_eq!(transport_cost(&[1, 1], &[1, 1], &[1, 3, 3, 1]), 2);
        assert_eq!(transport_cost(&[2], &[1, 1], &[1, 2]), 3);
    }
}
