use crate::model::ContactNetwork;

/// Degrees on the directed collapse and clustering on the undirected one.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticMetrics {
    pub out_degree: Vec<u32>,
    pub in_degree: Vec<u32>,
    pub clustering: Vec<f64>,
}

impl StaticMetrics {
    pub fn of_edges(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut directed: Vec<u64> = edges.into_iter().map(|(u, v)| ((u as u64) << 32) | v as u64).collect();
        directed.sort_unstable();
        directed.dedup();
        let mut out_degree = vec![0u32; n as usize];
        let mut in_degree = vec![0u32; n as usize];
        let mut undirected = Vec::with_capacity(directed.len());
        for &e in &directed {
            let (u, v) = ((e >> 32) as u32, e as u32);
            out_degree[u as usize] += 1;
            in_degree[v as usize] += 1;
            undirected.push((u.min(v), u.max(v)));
        }
        StaticMetrics { out_degree, in_degree, clustering: undirected_clustering(n, &undirected) }
    }

    pub fn mean_clustering(&self) -> f64 {
        if self.clustering.is_empty() {
            return 0.0;
        }
        self.clustering.iter().sum::<f64>() / self.clustering.len() as f64
    }

    pub fn mean_out_degree(&self) -> f64 {
        if self.out_degree.is_empty() {
            return 0.0;
        }
        self.out_degree.iter().map(|&d| d as f64).sum::<f64>() / self.out_degree.len() as f64
    }
}

/// Local clustering `2 T(v) / (k (k - 1))`, zero for `k < 2`. Duplicate and
/// reversed edges are merged; self-loops are ignored.
pub fn undirected_clustering(n: u32, edges: &[(u32, u32)]) -> Vec<f64> {
    let mut e: Vec<(u32, u32)> = edges.iter().filter(|(u, v)| u != v).map(|&(u, v)| (u.min(v), u.max(v))).collect();
    e.sort_unstable();
    e.dedup();
    let n = n as usize;
    let mut degree = vec![0u32; n];
    for &(u, v) in &e {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    // orient each edge from lower to higher (degree, id) rank
    let rank = |x: u32| (degree[x as usize], x);
    let mut offsets = vec![0usize; n + 1];
    for &(u, v) in &e {
        let from = if rank(u) < rank(v) { u } else { v };
        offsets[from as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut out = vec![0u32; e.len()];
    for &(u, v) in &e {
        let (from, to) = if rank(u) < rank(v) { (u, v) } else { (v, u) };
        out[fill[from as usize]] = to;
        fill[from as usize] += 1;
    }
    let mut triangles = vec![0u64; n];
    let mut mark = vec![u32::MAX; n];
    for u in 0..n {
        let nu = &out[offsets[u]..offsets[u + 1]];
        for &w in nu {
            mark[w as usize] = u as u32;
        }
        for &v in nu {
            for &w in &out[offsets[v as usize]..offsets[v as usize + 1]] {
                if mark[w as usize] == u as u32 {
                    triangles[u] += 1;
                    triangles[v as usize] += 1;
                    triangles[w as usize] += 1;
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let k = degree[v] as f64;
            if degree[v] < 2 {
                0.0
            } else {
                2.0 * triangles[v] as f64 / (k * (k - 1.0))
            }
        })
        .collect()
}

/// Metrics of the whole-window collapse.
pub fn static_metrics(net: &ContactNetwork) -> StaticMetrics {
    StaticMetrics::of_edges(net.node_count(), net.links().map(|l| (l.host.0, l.neighbour.0)))
}

/// Metrics of each day's collapse; a link belongs to the day it joins.
pub fn daily_static_metrics(net: &ContactNetwork) -> Vec<StaticMetrics> {
    let grid = net.grid();
    let mut per_day: Vec<Vec<(u32, u32)>> = vec![Vec::new(); grid.horizon_days() as usize];
    for l in net.links() {
        per_day[grid.day_of(l.join) as usize].push((l.host.0, l.neighbour.0));
    }
    per_day.into_iter().map(|e| StaticMetrics::of_edges(net.node_count(), e)).collect()
}
