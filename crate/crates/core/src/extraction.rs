//! Empirical networks from GPS location updates, and densification.
//!
//! A user's updates are segmented into stays: an update joins the current
//! stay while it is within `radius_m` of the stay's first update and at most
//! `gap_seconds` after the previous one. Each stay with positive length acts
//! as a host copy centred on its medoid update. Another user's visit to the
//! centre (a run of consecutive updates within `radius_m`, gaps at most
//! `gap_seconds`, at least two updates) that starts between the host's
//! arrival and `delta_seconds` after its departure yields a link.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rand::Rng;
use rayon::prelude::*;

use crate::model::{ContactNetwork, CopySpan, LinkRecord, NetworkBuilder, NetworkError, NodeId, TimeGrid, SECONDS_PER_DAY};
use crate::rng;

/// Mean Earth radius in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;
const METRES_PER_DEGREE: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
/// Grid-index cell edge in metres.
pub const CELL_M: f64 = 25.0;

#[derive(Debug, thiserror::Error)]
pub enum ExtractionError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no location updates")]
    Empty,
    #[error("invalid parameter: {0}")]
    Params(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsUpdate {
    pub user: u64,
    pub lat: f64,
    pub lon: f64,
    pub timestamp: i64,
}

/// One update of a user's time-sorted trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fix {
    pub lat: f64,
    pub lon: f64,
    pub t: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionParams {
    pub radius_m: f64,
    pub gap_seconds: i64,
    pub delta_seconds: i64,
    pub step_seconds: u32,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams { radius_m: 20.0, gap_seconds: 30 * 60, delta_seconds: 10_800, step_seconds: 300 }
    }
}

impl ExtractionParams {
    fn validate(&self) -> Result<(), ExtractionError> {
        if !(self.radius_m > 0.0 && self.radius_m <= CELL_M) {
            return Err(ExtractionError::Params(format!("radius {} m must be in (0, {CELL_M}]", self.radius_m)));
        }
        if self.gap_seconds < 0 || self.delta_seconds < 0 {
            return Err(ExtractionError::Params("gap and delta must be non-negative".into()));
        }
        TimeGrid::new(self.step_seconds, 1)?;
        Ok(())
    }
}

/// Great-circle distance in metres.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

fn dist(a: &Fix, b: &Fix) -> f64 {
    haversine_m(a.lat, a.lon, b.lat, b.lon)
}

/// Reads `user_id,lat,lon,unix_timestamp` lines; a non-numeric first line is a header.
pub fn read_gps_csv<R: BufRead>(reader: R) -> Result<Vec<GpsUpdate>, ExtractionError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed = (|| {
            if fields.len() != 4 {
                return Err(format!("expected 4 fields, got {}", fields.len()));
            }
            let user = fields[0].parse::<u64>().map_err(|_| format!("bad user id {:?}", fields[0]))?;
            let lat = fields[1].parse::<f64>().map_err(|_| format!("bad latitude {:?}", fields[1]))?;
            let lon = fields[2].parse::<f64>().map_err(|_| format!("bad longitude {:?}", fields[2]))?;
            let timestamp = fields[3].parse::<i64>().map_err(|_| format!("bad timestamp {:?}", fields[3]))?;
            if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                return Err(format!("coordinates out of range: {lat},{lon}"));
            }
            Ok(GpsUpdate { user, lat, lon, timestamp })
        })();
        match parsed {
            Ok(u) => out.push(u),
            Err(_) if lineno == 1 && fields.iter().any(|f| f.parse::<f64>().is_err()) => {}
            Err(message) => return Err(ExtractionError::Parse { line: lineno, message }),
        }
    }
    Ok(out)
}

/// Time-sorted traces of users, indexed by dense id (ascending raw id).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Traces {
    pub users: Vec<u64>,
    pub fixes: Vec<Vec<Fix>>,
}

impl Traces {
    pub fn from_updates(updates: &[GpsUpdate]) -> Self {
        let mut by_user: BTreeMap<u64, Vec<Fix>> = BTreeMap::new();
        for u in updates {
            by_user.entry(u.user).or_default().push(Fix { lat: u.lat, lon: u.lon, t: u.timestamp });
        }
        let mut t = Traces::default();
        for (user, mut fixes) in by_user {
            fixes.sort_by(|a, b| a.t.cmp(&b.t).then(a.lat.total_cmp(&b.lat)).then(a.lon.total_cmp(&b.lon)));
            t.users.push(user);
            t.fixes.push(fixes);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StayVisit {
    pub user: u32,
    pub center: Fix,
    /// First and last update times, seconds.
    pub start: i64,
    pub end: i64,
    /// Index range of the member updates in the user's trace.
    pub first: usize,
    pub last: usize,
}

/// Index of the update minimising the summed distance to the others.
fn medoid(fixes: &[Fix]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, a) in fixes.iter().enumerate() {
        let s: f64 = fixes.iter().map(|b| dist(a, b)).sum();
        if s < best.0 {
            best = (s, i);
        }
    }
    best.1
}

/// Greedy stay segmentation of one user's time-sorted updates.
pub fn detect_stays(user: u32, fixes: &[Fix], params: &ExtractionParams) -> Vec<StayVisit> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < fixes.len() {
        let mut j = i + 1;
        while j < fixes.len()
            && fixes[j].t - fixes[j - 1].t <= params.gap_seconds
            && dist(&fixes[i], &fixes[j]) <= params.radius_m
        {
            j += 1;
        }
        let c = i + medoid(&fixes[i..j]);
        out.push(StayVisit { user, center: fixes[c], start: fixes[i].t, end: fixes[j - 1].t, first: i, last: j - 1 });
        i = j;
    }
    out
}

/// A link with times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawLink {
    pub host: u32,
    pub copy_start: i64,
    pub copy_end: i64,
    pub neighbour: u32,
    pub join: i64,
    pub leave: i64,
}

/// Spatial hash of all updates: cell -> (time, user, index) sorted by time.
struct GridIndex {
    lat_cell: f64,
    lon_cell: f64,
    cells: HashMap<(i64, i64), Vec<(i64, u32, u32)>>,
}

impl GridIndex {
    fn new(traces: &Traces) -> Self {
        let max_abs_lat =
            traces.fixes.iter().flatten().map(|f| f.lat.abs()).fold(0.0f64, f64::max).min(89.0);
        let lat_cell = CELL_M / METRES_PER_DEGREE;
        // cells are at least CELL_M wide everywhere in the data
        let lon_cell = (lat_cell / max_abs_lat.to_radians().cos()).min(360.0);
        let mut g = GridIndex { lat_cell, lon_cell, cells: HashMap::new() };
        for (u, fixes) in traces.fixes.iter().enumerate() {
            for (k, f) in fixes.iter().enumerate() {
                g.cells.entry(g.cell(f)).or_default().push((f.t, u as u32, k as u32));
            }
        }
        for v in g.cells.values_mut() {
            v.sort_unstable();
        }
        g
    }

    fn cell(&self, f: &Fix) -> (i64, i64) {
        ((f.lat / self.lat_cell).floor() as i64, (f.lon / self.lon_cell).floor() as i64)
    }

    /// Updates in the 3x3 neighbourhood of `center` with time in `[from, to]`.
    fn probe(&self, center: &Fix, from: i64, to: i64, out: &mut Vec<(u32, u32)>) {
        let (cy, cx) = self.cell(center);
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(v) = self.cells.get(&(cy + dy, cx + dx)) {
                    let lo = v.partition_point(|e| e.0 < from);
                    for e in v[lo..].iter().take_while(|e| e.0 <= to) {
                        out.push((e.1, e.2));
                    }
                }
            }
        }
    }
}

/// Links of one host stay.
fn stay_links(stay: &StayVisit, traces: &Traces, index: &GridIndex, params: &ExtractionParams) -> Vec<RawLink> {
    let window_end = stay.end + params.delta_seconds;
    let mut cand = Vec::new();
    index.probe(&stay.center, stay.start, window_end, &mut cand);
    cand.retain(|&(u, k)| u != stay.user && dist(&traces.fixes[u as usize][k as usize], &stay.center) <= params.radius_m);
    cand.sort_unstable();
    let in_range = |f: &Fix| dist(f, &stay.center) <= params.radius_m;
    let mut out = Vec::new();
    for &(u, k) in &cand {
        let fixes = &traces.fixes[u as usize];
        let k = k as usize;
        // a run that was already under way before this update is not a new arrival
        if k > 0 && in_range(&fixes[k - 1]) && fixes[k].t - fixes[k - 1].t <= params.gap_seconds {
            continue;
        }
        let mut e = k;
        while e + 1 < fixes.len() && in_range(&fixes[e + 1]) && fixes[e + 1].t - fixes[e].t <= params.gap_seconds {
            e += 1;
        }
        if e > k && fixes[e].t > fixes[k].t {
            out.push(RawLink {
                host: stay.user,
                copy_start: stay.start,
                copy_end: stay.end,
                neighbour: u,
                join: fixes[k].t,
                leave: fixes[e].t,
            });
        }
    }
    out
}

/// Result of [`extract`]: the network and the raw user id of each node.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub network: ContactNetwork,
    pub users: Vec<u64>,
    /// Unix time of step 0 (UTC midnight before the first update).
    pub origin: i64,
    pub stays: usize,
    pub raw_links: Vec<RawLink>,
}

/// Stays of every user, in user order.
pub fn all_stays(traces: &Traces, params: &ExtractionParams) -> Vec<StayVisit> {
    let per_user: Vec<Vec<StayVisit>> = traces
        .fixes
        .par_iter()
        .enumerate()
        .map(|(u, f)| detect_stays(u as u32, f, params))
        .collect();
    per_user.into_iter().flatten().collect()
}

/// Links of all host stays with positive length, in canonical order.
pub fn extract_links(traces: &Traces, stays: &[StayVisit], params: &ExtractionParams) -> Vec<RawLink> {
    let index = GridIndex::new(traces);
    let mut links: Vec<RawLink> = stays
        .par_iter()
        .filter(|s| s.end > s.start)
        .flat_map_iter(|s| stay_links(s, traces, &index, params))
        .collect();
    links.sort_unstable();
    links
}

/// Maps second-resolution links onto the step grid.
///
/// Starts and joins are floored; copy ends and leaves are floored and then
/// advanced by one step so every interval keeps positive length. Copies of a
/// host that touch or overlap after mapping are merged.
pub fn assemble(links: &[RawLink], n_users: u32, origin: i64, params: &ExtractionParams) -> Result<ContactNetwork, ExtractionError> {
    let step = params.step_seconds as i64;
    let to_step = |t: i64| -> u32 { ((t - origin).div_euclid(step)) as u32 };
    let delta_steps = (params.delta_seconds + step - 1) / step;
    let max_end = links.iter().map(|l| to_step(l.copy_end) + 1).max().unwrap_or(1);
    let z = SECONDS_PER_DAY / params.step_seconds;
    let grid = TimeGrid::new(params.step_seconds, max_end.div_ceil(z).max(1))?;
    let mut b = NetworkBuilder::new(grid, delta_steps as u32, n_users);
    let mut i = 0;
    while i < links.len() {
        let host = links[i].host;
        let mut j = i;
        while j < links.len() && links[j].host == host {
            j += 1;
        }
        // group the host's links by mapped copy, merging touching copies
        let mut copies: Vec<(CopySpan, Vec<LinkRecord>)> = Vec::new();
        for l in &links[i..j] {
            let span = CopySpan { start: to_step(l.copy_start), end: to_step(l.copy_end) + 1 };
            let rec = LinkRecord { join: to_step(l.join), leave: to_step(l.leave) + 1, neighbour: l.neighbour };
            match copies.last_mut() {
                Some((last, recs)) if span.start <= last.end => {
                    last.end = last.end.max(span.end);
                    recs.push(rec);
                }
                _ => copies.push((span, vec![rec])),
            }
        }
        for (span, mut recs) in copies {
            b.push_copy(NodeId(host), span.start, span.end)?;
            recs.sort_unstable();
            recs.dedup();
            for r in recs {
                b.push_link(NodeId(r.neighbour), r.join, r.leave)?;
            }
        }
        i = j;
    }
    Ok(b.finish())
}

/// Full pipeline from updates to a network.
pub fn extract(updates: &[GpsUpdate], params: &ExtractionParams) -> Result<Extraction, ExtractionError> {
    params.validate()?;
    if updates.is_empty() {
        return Err(ExtractionError::Empty);
    }
    let traces = Traces::from_updates(updates);
    let min_t = updates.iter().map(|u| u.timestamp).min().unwrap();
    let origin = min_t.div_euclid(SECONDS_PER_DAY as i64) * SECONDS_PER_DAY as i64;
    let stays = all_stays(&traces, params);
    let raw_links = extract_links(&traces, &stays, params);
    let network = assemble(&raw_links, traces.len() as u32, origin, params)?;
    Ok(Extraction { network, users: traces.users, origin, stays: stays.len(), raw_links })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillPolicy {
    /// Every day without host activity receives a copy of a random active day.
    AllMissingDays,
    /// Only one randomly chosen missing day is filled.
    OneMissingDay,
}

/// Fills days on which a user hosted nothing with whole-day-shifted copies
/// of one of the user's active days, chosen uniformly per filled day.
///
/// Original copies are kept unchanged. A shifted copy is skipped when it
/// would overlap or touch another copy of the same host; its end is cut at
/// the horizon and links joining at or after the horizon are dropped.
pub fn densify(net: &ContactNetwork, policy: FillPolicy, seed: u64) -> Result<ContactNetwork, NetworkError> {
    let grid = *net.grid();
    let z = grid.steps_per_day();
    let days = grid.horizon_days();
    let horizon = grid.horizon_steps();
    let per_host: Vec<Vec<(CopySpan, Vec<LinkRecord>)>> = (0..net.node_count())
        .into_par_iter()
        .map(|host| {
            let range = net.copy_range(NodeId(host));
            let original: Vec<(CopySpan, Vec<LinkRecord>)> =
                range.map(|c| (net.spans()[c], net.link_records(c).to_vec())).collect();
            if original.is_empty() {
                return original;
            }
            let mut by_day: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (i, (s, _)) in original.iter().enumerate() {
                by_day.entry(grid.day_of(s.start)).or_default().push(i);
            }
            let active: Vec<u32> = by_day.keys().copied().collect();
            let mut missing: Vec<u32> = (0..days).filter(|d| !by_day.contains_key(d)).collect();
            let mut r = rng::stream(seed, &[rng::domain::DENSIFY, host as u64]);
            if policy == FillPolicy::OneMissingDay && !missing.is_empty() {
                let keep = missing[r.random_range(0..missing.len())];
                missing = vec![keep];
            }
            let mut all = original;
            for target in missing {
                let source = active[r.random_range(0..active.len())];
                let shift = (target as i64 - source as i64) * z as i64;
                for &ci in &by_day[&source] {
                    let (span, recs) = &all[ci];
                    let start = (span.start as i64 + shift) as u32;
                    let end = ((span.end as i64 + shift) as u32).min(horizon);
                    let recs: Vec<LinkRecord> = recs
                        .iter()
                        .map(|l| LinkRecord {
                            join: (l.join as i64 + shift) as u32,
                            leave: (l.leave as i64 + shift) as u32,
                            neighbour: l.neighbour,
                        })
                        .filter(|l| l.join < horizon)
                        .collect();
                    if recs.is_empty() || start >= end {
                        continue;
                    }
                    let clash = all.iter().any(|(s, _)| start <= s.end && s.start <= end);
                    if !clash {
                        all.push((CopySpan { start, end }, recs));
                    }
                }
            }
            all.sort_by_key(|(s, _)| s.start);
            all
        })
        .collect();
    let mut b = NetworkBuilder::new(grid, net.delta(), net.node_count());
    for (host, copies) in per_host.into_iter().enumerate() {
        for (span, recs) in copies {
            b.push_copy(NodeId(host as u32), span.start, span.end)?;
            for l in recs {
                b.push_link(NodeId(l.neighbour), l.join, l.leave)?;
            }
        }
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Point `metres` north of the reference.
    fn north(metres: f64) -> (f64, f64) {
        (35.0 + metres / METRES_PER_DEGREE, 139.0)
    }

    fn fix(metres: f64, t: i64) -> Fix {
        let (lat, lon) = north(metres);
        Fix { lat, lon, t }
    }

    #[test]
    fn haversine_matches_meridian_arc() {
        let (lat, lon) = north(20.0);
        let d = haversine_m(35.0, 139.0, lat, lon);
        assert!((d - 20.0).abs() < 1e-6, "{d}");
        assert_eq!(haversine_m(1.0, 2.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn single_update_is_zero_length_stay() {
        let s = detect_stays(0, &[fix(0.0, 100)], &ExtractionParams::default());
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end), (100, 100));
    }

    #[test]
    fn two_close_updates_form_one_stay() {
        let s = detect_stays(0, &[fix(0.0, 0), fix(10.0, 600)], &ExtractionParams::default());
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end), (0, 600));
    }

    #[test]
    fn long_gap_splits_stay() {
        let f: Vec<Fix> = [0, 600, 1200, 1200 + 35 * 60, 1200 + 40 * 60, 1200 + 45 * 60]
            .iter()
            .map(|&t| fix(1.0, t))
            .collect();
        let s = detect_stays(0, &f, &ExtractionParams::default());
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].first, s[0].last, s[1].first, s[1].last), (0, 2, 3, 5));
    }

    #[test]
    fn growth_is_measured_from_the_first_update() {
        // each step is 15 m from the previous but the third is 30 m from the first
        let f = [fix(0.0, 0), fix(15.0, 60), fix(30.0, 120)];
        let s = detect_stays(0, &f, &ExtractionParams::default());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn radius_boundary_is_inclusive() {
        let f = [fix(0.0, 0), fix(20.0 - 1e-9, 60)];
        assert_eq!(detect_stays(0, &f, &ExtractionParams::default()).len(), 1);
        let f = [fix(0.0, 0), fix(20.001, 60)];
        assert_eq!(detect_stays(0, &f, &ExtractionParams::default()).len(), 2);
    }

    #[test]
    fn header_is_skipped_and_errors_carry_line() {
        let ok = read_gps_csv("user_id,lat,lon,unix_timestamp\n1,35.0,139.0,100\n".as_bytes()).unwrap();
        assert_eq!(ok.len(), 1);
        let e = read_gps_csv("1,35.0,139.0,100\n2,95.0,139.0,100\n".as_bytes()).unwrap_err();
        assert!(matches!(e, ExtractionError::Parse { line: 2, .. }), "{e}");
    }
}
