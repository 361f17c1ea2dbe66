use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::model::ContactNetwork;
use crate::rng::{self, domain};

use super::AnalysisError;

/// Directed day-stamped edges: `u -> v` on day `d` iff some link of a copy of
/// `u` with neighbour `v` joined on day `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DayAggregatedGraph {
    node_count: u32,
    days: u32,
    offsets: Vec<usize>,
    /// (target, day mask), sorted by target within each source.
    edges: Vec<(u32, u128)>,
}

impl DayAggregatedGraph {
    pub fn from_edges(node_count: u32, days: u32, edges: &[(u32, u32, u32)]) -> Result<Self, AnalysisError> {
        if !(2..=128).contains(&days) {
            return Err(AnalysisError::Horizon(days));
        }
        let mut keyed: Vec<(u32, u32, u32)> = edges.iter().copied().filter(|&(u, v, d)| u != v && d < days).collect();
        keyed.sort_unstable();
        let mut offsets = vec![0usize; node_count as usize + 1];
        let mut out: Vec<(u32, u128)> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (u, v, d) in keyed {
            if last == Some((u, v)) {
                out.last_mut().unwrap().1 |= 1u128 << d;
            } else {
                out.push((v, 1u128 << d));
                offsets[u as usize + 1] += 1;
                last = Some((u, v));
            }
        }
        for i in 0..node_count as usize {
            offsets[i + 1] += offsets[i];
        }
        Ok(DayAggregatedGraph { node_count, days, offsets, edges: out })
    }

    pub fn from_network(net: &ContactNetwork) -> Result<Self, AnalysisError> {
        let grid = net.grid();
        let edges: Vec<(u32, u32, u32)> = net.links().map(|l| (l.host.0, l.neighbour.0, grid.day_of(l.join))).collect();
        Self::from_edges(net.node_count(), grid.horizon_days(), &edges)
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn days(&self) -> u32 {
        self.days
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn out(&self, u: u32) -> &[(u32, u128)] {
        &self.edges[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    /// Hop distance from `source` to every node; `None` when unreachable.
    pub fn distances(&self, source: u32, params: &TemporalParams) -> Vec<Option<u32>> {
        let mut acc = Accumulator::new(self.node_count as usize, self.days as usize);
        let mut dist = vec![u32::MAX; self.node_count as usize];
        self.search(source, params, &mut dist, &mut acc);
        dist.into_iter().map(|d| (d != u32::MAX).then_some(d)).collect()
    }

    /// Layered search over (node, feasible arrival days) states. Returns the
    /// nodes whose `dist` entry was set.
    fn search(&self, source: u32, params: &TemporalParams, dist: &mut [u32], acc: &mut Accumulator) -> Vec<u32> {
        let all = if self.days == 128 { u128::MAX } else { (1u128 << self.days) - 1 };
        let next_days = |arrived: u128| {
            let mut w = 0u128;
            for k in params.min_gap_days..=params.max_gap_days {
                if k < 128 {
                    w |= arrived << k;
                }
            }
            w & all
        };
        struct State {
            node: u32,
            mask: u128,
            sigma: u128,
        }
        let mut layers: Vec<Vec<State>> = vec![vec![State { node: source, mask: all, sigma: 1 }]];
        // child -> parents, per layer
        let mut links: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
        dist[source as usize] = 0;
        let mut touched = vec![source];
        let mut index: FxHashMap<(u32, u128), u32> = FxHashMap::default();
        loop {
            let k = layers.len();
            if k > self.days as usize {
                break;
            }
            let prev = &layers[k - 1];
            let mut layer: Vec<State> = Vec::new();
            let mut edges: Vec<(u32, u32)> = Vec::new();
            index.clear();
            for (pi, p) in prev.iter().enumerate() {
                let window = if k == 1 { all } else { next_days(p.mask) };
                if window == 0 {
                    continue;
                }
                for &(v, m) in self.out(p.node) {
                    let mask = m & window;
                    if mask == 0 {
                        continue;
                    }
                    let ci = *index.entry((v, mask)).or_insert_with(|| {
                        layer.push(State { node: v, mask, sigma: 0 });
                        (layer.len() - 1) as u32
                    });
                    layer[ci as usize].sigma += p.sigma;
                    edges.push((pi as u32, ci));
                }
            }
            if layer.is_empty() {
                break;
            }
            for s in &layer {
                if dist[s.node as usize] == u32::MAX {
                    dist[s.node as usize] = k as u32;
                    touched.push(s.node);
                }
            }
            layers.push(layer);
            links.push(edges);
        }
        // closeness: count every state that first reaches its node
        for (k, layer) in layers.iter().enumerate().skip(1) {
            let mut seen: Vec<u32> = layer.iter().filter(|s| dist[s.node as usize] == k as u32).map(|s| s.node).collect();
            seen.sort_unstable();
            seen.dedup();
            for v in seen {
                acc.reached[v as usize * acc.days + k - 1] += 1;
            }
        }
        // tau: shortest paths that continue from a state to a terminal state
        let mut below: Vec<u128> = Vec::new();
        for k in (1..layers.len()).rev() {
            let layer = &layers[k];
            let mut tau: Vec<u128> = layer
                .iter()
                .map(|s| if dist[s.node as usize] == k as u32 { 1 } else { 0 })
                .collect();
            if k + 1 < layers.len() {
                for &(p, c) in &links[k + 1] {
                    tau[p as usize] += below[c as usize];
                }
            }
            for (i, s) in layer.iter().enumerate() {
                let terminal = (dist[s.node as usize] == k as u32) as u128;
                if s.node != source {
                    acc.between[s.node as usize] += s.sigma * (tau[i] - terminal);
                }
            }
            below = tau;
        }
        touched
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalParams {
    /// Smallest day gap between consecutive hops.
    pub min_gap_days: u32,
    pub max_gap_days: u32,
}

impl Default for TemporalParams {
    fn default() -> Self {
        TemporalParams { min_gap_days: 1, max_gap_days: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sources {
    All,
    /// Uniform sample without replacement; results are scaled by `n / count`.
    Sample { count: u32, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMetrics {
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    /// Set when only a sample of sources was searched.
    pub approximate: bool,
    pub sources: u32,
}

#[derive(Clone)]
struct Accumulator {
    days: usize,
    between: Vec<u128>,
    /// `reached[v * days + k - 1]`: sources at hop distance `k` from `v`.
    reached: Vec<u32>,
}

impl Accumulator {
    fn new(n: usize, days: usize) -> Self {
        Accumulator { days, between: vec![0; n], reached: vec![0; n * days] }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for (a, b) in self.between.iter_mut().zip(other.between) {
            *a += b;
        }
        for (a, b) in self.reached.iter_mut().zip(other.reached) {
            *a += b;
        }
        self
    }
}

/// Temporal betweenness (shortest time-respecting paths through each node,
/// counted once per distinct node sequence) and closeness `sum_u 1/dist(u, v)`.
pub fn temporal_metrics(g: &DayAggregatedGraph, params: &TemporalParams, sources: Sources) -> TemporalMetrics {
    let n = g.node_count as usize;
    let days = g.days as usize;
    let (list, approximate): (Vec<u32>, bool) = match sources {
        Sources::Sample { count, seed } if (count as usize) < n => {
            let mut r = rng::stream(seed, &[domain::TEMPORAL]);
            let mut s: Vec<u32> = rand::seq::index::sample(&mut r, n, count as usize).into_iter().map(|i| i as u32).collect();
            s.sort_unstable();
            (s, true)
        }
        _ => ((0..g.node_count).collect(), false),
    };
    let acc = list
        .par_iter()
        .fold(
            || (Accumulator::new(n, days), vec![u32::MAX; n]),
            |(mut acc, mut dist), &s| {
                for v in g.search(s, params, &mut dist, &mut acc) {
                    dist[v as usize] = u32::MAX;
                }
                (acc, dist)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(|| Accumulator::new(n, days), Accumulator::merge);
    let scale = if approximate { n as f64 / list.len() as f64 } else { 1.0 };
    let betweenness = acc.between.iter().map(|&b| b as f64 * scale).collect();
    let closeness = (0..n)
        .map(|v| {
            let row = &acc.reached[v * days..(v + 1) * days];
            let s: f64 = row.iter().enumerate().map(|(k, &c)| c as f64 / (k + 1) as f64).sum();
            s * scale
        })
        .collect();
    TemporalMetrics { betweenness, closeness, approximate, sources: list.len() as u32 }
}
