//! Airborne exposure along SPDT links and a day-stepped SIR process.
//!
//! While a host is present, the well-mixed concentration at the place grows
//! as `(g / (r V)) (1 - e^{-r (t - t_s)})`; after the host leaves at `t_l` it
//! decays as `e^{-r (t - t_l)}`. A neighbour present on `[t_s', t_l')`
//! inhales `p` times the integral of the concentration over its stay.

use std::io::{self, Write};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, KvFile};
use crate::model::ContactNetwork;
use crate::numeric::CompensatedSum;
use crate::rng;

#[derive(Debug, thiserror::Error)]
pub enum DiffusionError {
    #[error("invalid parameter: {0}")]
    Params(String),
    #[error("{seeds} seeds requested but the network has {nodes} nodes")]
    TooManySeeds { seeds: u32, nodes: u32 },
    #[error("{requested} days requested but the network covers {available}")]
    Horizon { requested: u32, available: u32 },
    #[error("series lengths differ ({0} vs {1})")]
    Length(usize, usize),
    #[error("reference series is zero on day {0}")]
    ZeroReference(usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Removal time `b` (minutes): log-uniform on `[min, median]` with mass 1/2
/// and log-uniform on `[median, max]` with mass 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalTime {
    pub min_minutes: f64,
    pub median_minutes: f64,
    pub max_minutes: f64,
}

impl RemovalTime {
    pub fn new(min_minutes: f64, median_minutes: f64, max_minutes: f64) -> Result<Self, DiffusionError> {
        if !(min_minutes > 0.0 && min_minutes <= median_minutes && median_minutes <= max_minutes) {
            return Err(DiffusionError::Params(format!(
                "removal times must satisfy 0 < min <= median <= max (got {min_minutes}, {median_minutes}, {max_minutes})"
            )));
        }
        Ok(RemovalTime { min_minutes, median_minutes, max_minutes })
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let (lo, med, hi) = (self.min_minutes.ln(), self.median_minutes.ln(), self.max_minutes.ln());
        if u < 0.5 {
            (lo + 2.0 * u * (med - lo)).exp()
        } else {
            (med + (2.0 * u - 1.0) * (hi - med)).exp()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// Removal rate per second for a removal time in minutes.
    pub fn rate(minutes: f64) -> f64 {
        1.0 / (60.0 * minutes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiseaseParams {
    /// Particle generation rate `g`, PFU per second.
    pub generation_rate: f64,
    /// Pulmonary ventilation `p`, m^3 per second.
    pub ventilation: f64,
    /// Mixing volume `V`, m^3.
    pub volume: f64,
    pub removal: RemovalTime,
    /// Infectiousness `sigma` per PFU.
    pub sigma: f64,
    /// Infectious period, uniform on the integers `tau_min..=tau_max` days.
    pub tau_min: u32,
    pub tau_max: u32,
    /// Days from infection to infectiousness.
    pub incubation: u32,
    pub seeds: u32,
}

impl Default for DiseaseParams {
    fn default() -> Self {
        DiseaseParams::from_kv(&KvFile::defaults()).expect("embedded defaults are valid")
    }
}

impl DiseaseParams {
    pub fn from_kv(kv: &KvFile) -> Result<Self, DiffusionError> {
        let p = DiseaseParams {
            generation_rate: kv.positive("generation_rate")?,
            ventilation: kv.positive("ventilation_m3_per_s")?,
            volume: kv.positive("volume_m3")?,
            removal: RemovalTime::new(
                kv.positive("removal_min_min")?,
                kv.positive("removal_median_min")?,
                kv.positive("removal_max_min")?,
            )?,
            sigma: kv.require("sigma")?,
            tau_min: kv.require("tau_min_days")?,
            tau_max: kv.require("tau_max_days")?,
            incubation: kv.require("incubation_days")?,
            seeds: kv.require("seeds")?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn write_kv(&self, kv: &mut KvFile) {
        kv.set("generation_rate", self.generation_rate);
        kv.set("ventilation_m3_per_s", self.ventilation);
        kv.set("volume_m3", self.volume);
        kv.set("removal_median_min", self.removal.median_minutes);
        kv.set("removal_min_min", self.removal.min_minutes);
        kv.set("removal_max_min", self.removal.max_minutes);
        kv.set("sigma", self.sigma);
        kv.set("tau_min_days", self.tau_min);
        kv.set("tau_max_days", self.tau_max);
        kv.set("incubation_days", self.incubation);
        kv.set("seeds", self.seeds);
    }

    pub fn validate(&self) -> Result<(), DiffusionError> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(DiffusionError::Params(format!("sigma={} must be non-negative", self.sigma)));
        }
        if self.tau_min < 1 || self.tau_max < self.tau_min {
            return Err(DiffusionError::Params(format!(
                "infectious period range {}..={} is invalid",
                self.tau_min, self.tau_max
            )));
        }
        if self.incubation < 1 {
            return Err(DiffusionError::Params("incubation must be at least one day".into()));
        }
        Ok(())
    }

    fn prefactor(&self, r: f64) -> f64 {
        self.generation_rate * self.ventilation / (self.volume * r * r)
    }
}

/// `x - (1 - e^{-x})`, accurate for small `x`.
fn excess(x: f64) -> f64 {
    if x < 1e-3 {
        x * x * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0)
    } else {
        x + (-x).exp_m1()
    }
}

/// Exposure (PFU) of a neighbour present on `[join, leave)` to a host present
/// on `[start, end)`, all in seconds, with removal rate `r` per second.
///
/// Splits into the part while the host is present and the decaying part
/// after it left; every exponent is non-positive, so absolute times of any
/// size are safe.
pub fn link_exposure(start: f64, end: f64, join: f64, leave: f64, params: &DiseaseParams, r: f64) -> f64 {
    debug_assert!(r > 0.0);
    let k = params.prefactor(r);
    let mut e = 0.0;
    let direct_end = leave.min(end);
    if direct_end > join {
        let a = r * (join - start);
        let d = r * (direct_end - join);
        e += excess(d) + (-a).exp_m1() * (-d).exp_m1();
    }
    if leave > end {
        let from = join.max(end);
        e += -(-r * (end - start)).exp_m1() * (-r * (from - end)).exp() * -(-r * (leave - from)).exp_m1();
    }
    (k * e).max(0.0)
}

/// Sum of link exposures with one shared removal rate.
pub fn total_exposure<I: IntoIterator<Item = (f64, f64, f64, f64)>>(links: I, params: &DiseaseParams, r: f64) -> f64 {
    links.into_iter().map(|(s, e, j, l)| link_exposure(s, e, j, l, params, r)).collect::<CompensatedSum>().value()
}

/// Dose-response `1 - e^{-sigma E}`.
pub fn infection_probability(exposure: f64, sigma: f64) -> f64 {
    -(-sigma * exposure).exp_m1()
}

/// Link as seen by the day loop, times in steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct DayLink {
    neighbour: u32,
    host: u32,
    start: u32,
    end: u32,
    join: u32,
    leave: u32,
}

/// Links grouped by the day of the neighbour's arrival, then by neighbour.
pub struct DayIndex {
    step_seconds: f64,
    steps_per_day: u32,
    days: u32,
    offsets: Vec<usize>,
    links: Vec<DayLink>,
}

impl DayIndex {
    pub fn new(net: &ContactNetwork) -> Self {
        let grid = net.grid();
        let days = grid.horizon_days();
        let mut counts = vec![0usize; days as usize + 1];
        for l in net.links() {
            counts[grid.day_of(l.join) as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut links = vec![DayLink { neighbour: 0, host: 0, start: 0, end: 0, join: 0, leave: 0 }; net.link_count()];
        for l in net.links() {
            let slot = &mut counts[grid.day_of(l.join) as usize];
            links[*slot] = DayLink {
                neighbour: l.neighbour.0,
                host: l.host.0,
                start: l.copy_start,
                end: l.copy_end,
                join: l.join,
                leave: l.leave,
            };
            *slot += 1;
        }
        for d in 0..days as usize {
            links[offsets[d]..offsets[d + 1]].sort_unstable();
        }
        DayIndex { step_seconds: grid.step_seconds() as f64, steps_per_day: grid.steps_per_day(), days, offsets, links }
    }

    pub fn days(&self) -> u32 {
        self.days
    }

    fn day(&self, d: u32) -> &[DayLink] {
        &self.links[self.offsets[d as usize]..self.offsets[d as usize + 1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Seed,
    Infect,
    Recover,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Seed => "seed",
            EventKind::Infect => "infect",
            EventKind::Recover => "recover",
        }
    }
}

/// A state change; `day` is the first day the new state holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub day: u32,
    pub node: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Infectious nodes per day.
    pub prevalence: Vec<u32>,
    /// Nodes ever infectious up to each day, seeds included.
    pub cumulative: Vec<u32>,
    pub events: Vec<Event>,
}

const NEVER: u32 = u32::MAX;

/// One SIR realisation over `days` days.
///
/// Seeds are infectious from day 0. Each day, every susceptible node that
/// arrives somewhere (link day = day of its arrival) after or while an
/// infectious host was there accumulates exposure from all such links, with
/// one removal time drawn for the node and day. A host counts if it was
/// infectious on the day its visit started. An infection decided on day `D`
/// makes the node infectious from `D + incubation` for `tau` days.
pub fn run_sir(index: &DayIndex, n_nodes: u32, params: &DiseaseParams, days: u32, seed: u64, run: u64) -> Result<RunResult, DiffusionError> {
    params.validate()?;
    if params.seeds > n_nodes {
        return Err(DiffusionError::TooManySeeds { seeds: params.seeds, nodes: n_nodes });
    }
    if days > index.days() {
        return Err(DiffusionError::Horizon { requested: days, available: index.days() });
    }
    let mut inf_start = vec![NEVER; n_nodes as usize];
    let mut inf_end = vec![NEVER; n_nodes as usize];
    let mut events = Vec::new();
    let mut run_rng = rng::stream(seed, &[rng::domain::SIR_RUN, run]);
    let mut seeds: Vec<u32> = index::sample(&mut run_rng, n_nodes as usize, params.seeds as usize)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    seeds.sort_unstable();
    for &s in &seeds {
        let tau = run_rng.random_range(params.tau_min..=params.tau_max);
        inf_start[s as usize] = 0;
        inf_end[s as usize] = tau;
        events.push(Event { day: 0, node: s, kind: EventKind::Seed });
    }
    let infectious = |start: &[u32], end: &[u32], node: u32, day: u32| {
        let (a, b) = (start[node as usize], end[node as usize]);
        a != NEVER && a <= day && day < b
    };
    let dt = index.step_seconds;
    let mut new_cases: Vec<(u32, u32)> = Vec::new();
    for day in 0..days {
        new_cases.clear();
        let links = index.day(day);
        let mut i = 0;
        while i < links.len() {
            let u = links[i].neighbour;
            let mut j = i;
            while j < links.len() && links[j].neighbour == u {
                j += 1;
            }
            if inf_start[u as usize] == NEVER {
                let hot: Vec<&DayLink> = links[i..j]
                    .iter()
                    .filter(|l| infectious(&inf_start, &inf_end, l.host, l.start / index.steps_per_day))
                    .collect();
                if !hot.is_empty() {
                    let mut r = rng::stream(seed, &[rng::domain::SIR_NODE_DAY, run, day as u64, u as u64]);
                    let rate = RemovalTime::rate(params.removal.sample(&mut r));
                    let e = total_exposure(
                        hot.iter().map(|l| (l.start as f64 * dt, l.end as f64 * dt, l.join as f64 * dt, l.leave as f64 * dt)),
                        params,
                        rate,
                    );
                    if r.random::<f64>() < infection_probability(e, params.sigma) {
                        let tau = r.random_range(params.tau_min..=params.tau_max);
                        new_cases.push((u, tau));
                    }
                }
            }
            i = j;
        }
        for &(u, tau) in &new_cases {
            let start = day + params.incubation;
            inf_start[u as usize] = start;
            inf_end[u as usize] = start + tau;
            events.push(Event { day: start, node: u, kind: EventKind::Infect });
        }
    }
    let mut prevalence = vec![0u32; days as usize];
    let mut cumulative = vec![0u32; days as usize];
    for node in 0..n_nodes as usize {
        let (a, b) = (inf_start[node], inf_end[node]);
        if a == NEVER {
            continue;
        }
        for d in a.min(days)..b.min(days) {
            prevalence[d as usize] += 1;
        }
        for d in a.min(days)..days {
            cumulative[d as usize] += 1;
        }
        events.push(Event { day: b, node: node as u32, kind: EventKind::Recover });
    }
    events.sort_by_key(|e| (e.day, e.kind as u8, e.node));
    Ok(RunResult { prevalence, cumulative, events })
}

/// Mean and sample standard deviation per day over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub prevalence_mean: Vec<f64>,
    pub prevalence_std: Vec<f64>,
    pub cumulative_mean: Vec<f64>,
    pub cumulative_std: Vec<f64>,
}

fn mean_std(columns: &[&[u32]], day: usize) -> (f64, f64) {
    let n = columns.len() as f64;
    let mean = columns.iter().map(|c| c[day] as f64).sum::<f64>() / n;
    if columns.len() < 2 {
        return (mean, 0.0);
    }
    let var = columns.iter().map(|c| (c[day] as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl SeriesSummary {
    pub fn of(runs: &[RunResult]) -> Self {
        let days = runs.first().map_or(0, |r| r.prevalence.len());
        let p: Vec<&[u32]> = runs.iter().map(|r| r.prevalence.as_slice()).collect();
        let c: Vec<&[u32]> = runs.iter().map(|r| r.cumulative.as_slice()).collect();
        let mut s = SeriesSummary {
            prevalence_mean: vec![],
            prevalence_std: vec![],
            cumulative_mean: vec![],
            cumulative_std: vec![],
        };
        for d in 0..days {
            let (m, sd) = mean_std(&p, d);
            s.prevalence_mean.push(m);
            s.prevalence_std.push(sd);
            let (m, sd) = mean_std(&c, d);
            s.cumulative_mean.push(m);
            s.cumulative_std.push(sd);
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "day,I_p_mean,I_p_std,I_a_mean,I_a_std")?;
        for d in 0..self.prevalence_mean.len() {
            writeln!(
                w,
                "{d},{},{},{},{}",
                self.prevalence_mean[d], self.prevalence_std[d], self.cumulative_mean[d], self.cumulative_std[d]
            )?;
        }
        Ok(())
    }
}

/// Independent runs `0..runs`, in parallel; results are in run order.
pub fn simulate(net: &ContactNetwork, params: &DiseaseParams, runs: u32, days: u32, seed: u64) -> Result<Vec<RunResult>, DiffusionError> {
    let index = DayIndex::new(net);
    simulate_indexed(&index, net.node_count(), params, runs, days, seed)
}

pub fn simulate_indexed(index: &DayIndex, n_nodes: u32, params: &DiseaseParams, runs: u32, days: u32, seed: u64) -> Result<Vec<RunResult>, DiffusionError> {
    (0..runs as u64).into_par_iter().map(|run| run_sir(index, n_nodes, params, days, seed, run)).collect()
}

pub fn write_events<W: Write>(runs: &[RunResult], mut w: W) -> io::Result<()> {
    writeln!(w, "run,day,node,event")?;
    for (i, r) in runs.iter().enumerate() {
        for e in &r.events {
            writeln!(w, "{i},{},{},{}", e.day, e.node, e.kind.as_str())?;
        }
    }
    Ok(())
}

/// Day-wise absolute percentage variation and its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Apv {
    pub per_day: Vec<f64>,
    pub mean: f64,
}

/// `100 |I_r - I_o| / I_r` per day.
pub fn apv(reference: &[f64], observed: &[f64]) -> Result<Apv, DiffusionError> {
    if reference.len() != observed.len() {
        return Err(DiffusionError::Length(reference.len(), observed.len()));
    }
    let mut per_day = Vec::with_capacity(reference.len());
    for (d, (&r, &o)) in reference.iter().zip(observed).enumerate() {
        if r == 0.0 {
            return Err(DiffusionError::ZeroReference(d));
        }
        per_day.push(100.0 * (r - o).abs() / r);
    }
    let mean = if per_day.is_empty() { 0.0 } else { per_day.iter().sum::<f64>() / per_day.len() as f64 };
    Ok(Apv { per_day, mean })
}
