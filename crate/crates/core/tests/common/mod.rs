//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use spdt_core::extraction::GpsUpdate;

/// Exposure by RK4 on the well-mixed room:
/// `C' = g/V [host present] - r C`, `E' = p C [neighbour present]`,
/// integrated piecewise between the four event times.
pub fn exposure_by_ode(start: f64, end: f64, join: f64, leave: f64, g: f64, p: f64, v: f64, r: f64) -> f64 {
    let mut cuts = [start, end, join, leave];
    cuts.sort_by(f64::total_cmp);
    let (mut c, mut e) = (0.0f64, 0.0f64);
    let h_max = (0.005 / r).min(5.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let source = if mid >= start && mid < end { g / v } else { 0.0 };
        let breathing = if mid >= join && mid < leave { p } else { 0.0 };
        let steps = ((b - a) / h_max).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let f = |c: f64| (source - r * c, breathing * c);
        for _ in 0..steps {
            let k1 = f(c);
            let k2 = f(c + 0.5 * h * k1.0);
            let k3 = f(c + 0.5 * h * k2.0);
            let k4 = f(c + h * k3.0);
            c += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            e += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
    }
    e
}

/// Brute-force temporal metrics on a small day-stamped digraph.
///
/// Walks every node sequence from every source, checks each by trying all
/// day assignments with hop gaps in `[min_gap, max_gap]`, keeps the shortest
/// feasible sequences per pair and counts interior visits. Closeness is
/// returned scaled by `lcm(1..=days)` so it stays an integer.
pub struct TemporalOracle {
    pub betweenness: Vec<u64>,
    pub closeness_scaled: Vec<u64>,
    pub scale: u64,
    pub dist: Vec<Vec<Option<u32>>>,
}

fn feasible(seq: &[u32], days_of: &dyn Fn(u32, u32) -> Vec<u32>, min_gap: u32, max_gap: u32) -> bool {
    fn go(seq: &[u32], i: usize, prev: Option<u32>, days_of: &dyn Fn(u32, u32) -> Vec<u32>, lo: u32, hi: u32) -> bool {
        if i + 1 == seq.len() {
            return true;
        }
        for d in days_of(seq[i], seq[i + 1]) {
            let ok = match prev {
                None => true,
                Some(p) => d >= p + lo && d <= p + hi,
            };
            if ok && go(seq, i + 1, Some(d), days_of, lo, hi) {
                return true;
            }
        }
        false
    }
    go(seq, 0, None, days_of, min_gap, max_gap)
}

pub fn temporal_oracle(n: u32, days: u32, edges: &[(u32, u32, u32)], min_gap: u32, max_gap: u32) -> TemporalOracle {
    let days_of = |u: u32, v: u32| -> Vec<u32> {
        let mut d: Vec<u32> = edges.iter().filter(|e| e.0 == u && e.1 == v).map(|e| e.2).collect();
        d.sort_unstable();
        d.dedup();
        d
    };
    let scale = (1..=days as u64).fold(1u64, |l, k| l / gcd(l, k) * k);
    let mut dist = vec![vec![None; n as usize]; n as usize];
    let mut betweenness = vec![0u64; n as usize];
    let mut closeness_scaled = vec![0u64; n as usize];
    for s in 0..n {
        // feasible sequences grouped by length; prefixes of feasible walks are feasible
        let mut frontier: Vec<Vec<u32>> = vec![vec![s]];
        let mut by_len: Vec<Vec<Vec<u32>>> = vec![frontier.clone()];
        for _ in 0..days {
            let mut next = Vec::new();
            for seq in &frontier {
                for v in 0..n {
                    if v == *seq.last().unwrap() {
                        continue;
                    }
                    let mut ext = seq.clone();
                    ext.push(v);
                    if !days_of(ext[ext.len() - 2], v).is_empty() && feasible(&ext, &days_of, min_gap, max_gap) {
                        next.push(ext);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            by_len.push(next.clone());
            frontier = next;
        }
        dist[s as usize][s as usize] = Some(0);
        for (len, seqs) in by_len.iter().enumerate().skip(1) {
            for seq in seqs {
                let t = *seq.last().unwrap();
                if t != s && dist[s as usize][t as usize].is_none() {
                    dist[s as usize][t as usize] = Some(len as u32);
                }
            }
        }
        for t in 0..n {
            if t == s {
                continue;
            }
            if let Some(d) = dist[s as usize][t as usize] {
                closeness_scaled[t as usize] += scale / d as u64;
                for seq in &by_len[d as usize] {
                    if *seq.last().unwrap() == t {
                        for &v in &seq[1..seq.len() - 1] {
                            betweenness[v as usize] += 1;
                        }
                    }
                }
            }
        }
    }
    TemporalOracle { betweenness, closeness_scaled, scale, dist }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Metres per degree of latitude on the sphere used by the extractor.
pub const METRES_PER_DEG: f64 = 6_371_008.8 * std::f64::consts::PI / 180.0;

pub const BASE_LAT: f64 = 35.6812;
pub const BASE_LON: f64 = 139.7671;
/// 2024-03-04 00:00:00 UTC.
pub const MIDNIGHT: i64 = 1_709_510_400;

pub fn hm(h: i64, m: i64) -> i64 {
    MIDNIGHT + h * 3600 + m * 60
}

/// Update `north_m` metres north of the base point.
pub fn update(user: u64, north_m: f64, t: i64) -> GpsUpdate {
    GpsUpdate { user, lat: BASE_LAT + north_m / METRES_PER_DEG, lon: BASE_LON, timestamp: t }
}

/// Updates every `every_min` minutes over `[from, to]`, at a fixed offset.
pub fn presence(user: u64, north_m: f64, from: i64, to: i64, every_min: i64) -> Vec<GpsUpdate> {
    let mut out = Vec::new();
    let mut t = from;
    while t <= to {
        out.push(update(user, north_m, t));
        t += every_min * 60;
    }
    out
}
