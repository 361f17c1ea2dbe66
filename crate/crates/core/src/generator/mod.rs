//! Synthetic SPDT networks (GDH/GDT) and activity-driven baselines (BDH/BDT).
//!
//! SPDT generation runs in two phases. Phase 1 draws, per node and in
//! parallel, the activity sequence, the number of links of each copy and
//! their timings from the node's own random stream. Phase 2 resolves the
//! neighbour identities with the reinforcement process, sequentially, in the
//! canonical order (copy start, host). Output is produced by replaying each
//! node's stream, so only copies, link counts and neighbour ids are held in
//! memory between the phases.

mod activity;
mod adn;
mod social;

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{ConfigError, KvFile};
use crate::model::io::{LinkWriter, NetworkMeta};
use crate::model::{ContactNetwork, CopySpan, LinkEvent, LinkRecord, NetworkBuilder, NetworkError, NodeId, TimeGrid};
use crate::rng;
use crate::stochastic::{mixed_degree_pmf, BoundedPowerLaw, DistributionError};

pub use activity::{equilibrium_active_fraction, ActivityEvent, NodeSimulator};
pub use adn::{AdnDegree, AdnParams, Potential, ADN_SLOT_SECONDS};
pub use social::SocialState;

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    Params(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("about {expected} links would be generated, above the cap of {cap}; reduce nodes or days")]
    TooLarge { expected: u64, cap: u64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeModel {
    /// Every node uses the same continuation probability.
    Homogeneous { lambda: f64 },
    /// Per-node continuation probability drawn from a bounded power law.
    Heterogeneous(BoundedPowerLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub rho: f64,
    pub q: f64,
    pub degree: DegreeModel,
    pub p_c: f64,
    pub p_b: f64,
    pub delta: u32,
    pub eta: f64,
    pub mu: f64,
    pub n_nodes: u32,
    pub grid: TimeGrid,
    pub master_seed: u64,
}

impl ModelParams {
    /// Reference parameters with heterogeneous degrees.
    pub fn defaults(n_nodes: u32, grid: TimeGrid, master_seed: u64) -> Self {
        let kv = KvFile::defaults();
        ModelParams::from_kv(&kv, Mode::Gdt, n_nodes, grid, master_seed).expect("embedded defaults are valid")
    }

    /// Reads the model keys; `mode` selects which degree keys are required.
    pub fn from_kv(kv: &KvFile, mode: Mode, n_nodes: u32, grid: TimeGrid, master_seed: u64) -> Result<Self, GeneratorError> {
        let degree = match mode {
            Mode::Gdh => DegreeModel::Homogeneous { lambda: kv.require("lambda")? },
            Mode::Gdt | Mode::Bdt | Mode::Bdh => {
                let psi: f64 = kv.get("psi")?.unwrap_or(1.0);
                DegreeModel::Heterogeneous(BoundedPowerLaw::new(kv.positive("beta")?, kv.probability("xi")?, psi)?)
            }
        };
        let p = ModelParams {
            rho: kv.probability("rho")?,
            q: kv.probability("q")?,
            degree,
            p_c: kv.probability("p_c")?,
            p_b: kv.probability(if kv.contains("p_b") { "p_b" } else { "rho" })?,
            delta: kv.require("delta_steps")?,
            eta: kv.positive("eta")?,
            mu: kv.require("mu")?,
            n_nodes,
            grid,
            master_seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        for (name, v) in [("rho", self.rho), ("q", self.q), ("p_c", self.p_c), ("p_b", self.p_b)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(GeneratorError::Params(format!("{name}={v} is not in (0, 1]")));
            }
        }
        if !(self.eta > 0.0) {
            return Err(GeneratorError::Params(format!("eta={} must be positive", self.eta)));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(GeneratorError::Params(format!("mu={} is not in [0, 1]", self.mu)));
        }
        if let DegreeModel::Homogeneous { lambda } = self.degree {
            if !(0.0..1.0).contains(&lambda) {
                return Err(GeneratorError::Params(format!("lambda={lambda} is not in [0, 1)")));
            }
        }
        if self.n_nodes < 2 {
            return Err(GeneratorError::Params("at least two nodes are required".into()));
        }
        Ok(())
    }

    /// Expected links per copy with degrees capped at `n - 1`.
    pub fn expected_degree(&self) -> f64 {
        let cap = (self.n_nodes - 1) as u64;
        match self.degree {
            DegreeModel::Homogeneous { lambda } => {
                // E[min(D, cap)] = sum_{k<cap} lambda^k
                (1.0 - lambda.powf(cap as f64)) / (1.0 - lambda)
            }
            DegreeModel::Heterogeneous(law) => {
                let limit = cap.min(200_000);
                let (mut mean, mut mass) = (0.0, 0.0);
                for d in 1..=limit {
                    let p = mixed_degree_pmf(d, &law).unwrap_or(0.0);
                    mean += d as f64 * p;
                    mass += p;
                }
                mean + (1.0 - mass).max(0.0) * cap as f64
            }
        }
    }

    /// Rough link-count estimate used to refuse runs that cannot fit in memory.
    pub fn expected_links(&self) -> f64 {
        let pi1 = self.q / (self.q + self.rho);
        let starts = self.n_nodes as f64 * self.grid.horizon_steps() as f64 * pi1 * self.rho;
        starts * self.expected_degree()
    }
}

/// Network family to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Gdt,
    Gdh,
    Bdt,
    Bdh,
}

impl FromStr for Mode {
    type Err = GeneratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gdt" => Ok(Mode::Gdt),
            "gdh" => Ok(Mode::Gdh),
            "bdt" => Ok(Mode::Bdt),
            "bdh" => Ok(Mode::Bdh),
            _ => Err(GeneratorError::Params(format!("unknown mode `{s}` (gdt, gdh, bdt, bdh)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gdt => "gdt",
            Mode::Gdh => "gdh",
            Mode::Bdt => "bdt",
            Mode::Bdh => "bdh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateOptions {
    /// Refuse to generate more links than this.
    pub max_links: u64,
    /// Nodes per parallel work unit.
    pub chunk_nodes: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { max_links: u32::MAX as u64 - 1, chunk_nodes: 8192 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub copies: u64,
    pub links: u64,
}

/// Copies and links of one host, in canonical order once closed.
#[derive(Debug, Clone, Default)]
pub struct NodeBlock {
    pub host: u32,
    pub spans: Vec<CopySpan>,
    /// End offset into `links` of each copy.
    pub link_ends: Vec<usize>,
    pub links: Vec<LinkRecord>,
}

impl NodeBlock {
    fn reset(&mut self, host: u32) {
        self.host = host;
        self.spans.clear();
        self.link_ends.clear();
        self.links.clear();
    }

    fn open_copy(&mut self, start: u32, end: u32) {
        self.spans.push(CopySpan { start, end });
    }

    fn push_link(&mut self, rec: LinkRecord) {
        self.links.push(rec);
    }

    /// Sorts the open copy's links; drops the copy if it has none.
    fn close_copy(&mut self) {
        if self.spans.len() == self.link_ends.len() {
            return;
        }
        let from = self.link_ends.last().copied().unwrap_or(0);
        if self.links.len() == from {
            self.spans.pop();
        } else {
            self.links[from..].sort_unstable();
            self.link_ends.push(self.links.len());
        }
    }

    pub fn copies(&self) -> impl Iterator<Item = (CopySpan, &[LinkRecord])> {
        self.spans.iter().enumerate().map(move |(i, &s)| {
            let from = if i == 0 { 0 } else { self.link_ends[i - 1] };
            (s, &self.links[from..self.link_ends[i]])
        })
    }
}

/// Destination of generated node blocks, fed in host order.
pub trait NetworkSink {
    fn accept(&mut self, block: &NodeBlock) -> Result<(), GeneratorError>;
}

impl NetworkSink for NetworkBuilder {
    fn accept(&mut self, block: &NodeBlock) -> Result<(), GeneratorError> {
        for (span, links) in block.copies() {
            self.push_copy(NodeId(block.host), span.start, span.end)?;
            for l in links {
                self.push_link(NodeId(l.neighbour), l.join, l.leave)?;
            }
        }
        Ok(())
    }
}

impl NetworkSink for LinkWriter {
    fn accept(&mut self, block: &NodeBlock) -> Result<(), GeneratorError> {
        for (span, links) in block.copies() {
            for l in links {
                self.write(&LinkEvent {
                    host: block.host,
                    copy_start: span.start,
                    copy_end: span.end,
                    neighbour: l.neighbour,
                    join: l.join,
                    leave: l.leave,
                })?;
            }
        }
        Ok(())
    }
}

/// Builds node blocks chunk by chunk in parallel and feeds them to `sink` in host order.
fn emit_blocks<S, F>(n_nodes: u32, chunk: usize, sink: &mut S, build: F) -> Result<Summary, GeneratorError>
where
    S: NetworkSink,
    F: Fn(u32, &mut NodeBlock) + Sync,
{
    let mut summary = Summary::default();
    let chunk = chunk.max(1) as u32;
    let mut lo = 0u32;
    while lo < n_nodes {
        let hi = lo.saturating_add(chunk).min(n_nodes);
        let blocks: Vec<NodeBlock> = (lo..hi)
            .into_par_iter()
            .map(|node| {
                let mut b = NodeBlock::default();
                b.reset(node);
                build(node, &mut b);
                b
            })
            .collect();
        for b in &blocks {
            summary.copies += b.spans.len() as u64;
            summary.links += b.links.len() as u64;
            sink.accept(b)?;
        }
        lo = hi;
    }
    Ok(summary)
}

/// Phase-1 result: copies that received at least one link, in host order.
struct Plan {
    lambdas: Vec<f64>,
    node_offsets: Vec<usize>,
    spans: Vec<CopySpan>,
    link_offsets: Vec<u32>,
}

fn plan(sim: &NodeSimulator, opts: &GenerateOptions) -> Result<Plan, GeneratorError> {
    let n = sim.params().n_nodes;
    let mut plan = Plan {
        lambdas: Vec::with_capacity(n as usize),
        node_offsets: Vec::with_capacity(n as usize + 1),
        spans: Vec::new(),
        link_offsets: vec![0],
    };
    plan.node_offsets.push(0);
    let mut total: u64 = 0;
    let chunk = opts.chunk_nodes.max(1) as u32;
    let mut lo = 0u32;
    while lo < n {
        let hi = lo.saturating_add(chunk).min(n);
        let parts: Vec<(f64, Vec<CopySpan>, Vec<u32>)> = (lo..hi)
            .into_par_iter()
            .map(|node| {
                let (mut spans, mut counts) = (Vec::new(), Vec::new());
                let lambda = sim.run(node, |e| match e {
                    ActivityEvent::Copy { start, end } => {
                        spans.push(CopySpan { start, end });
                        counts.push(0u32);
                    }
                    ActivityEvent::Link { .. } => *counts.last_mut().unwrap() += 1,
                });
                let keep: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
                let mut k = keep.iter();
                spans.retain(|_| *k.next().unwrap());
                counts.retain(|&c| c > 0);
                (lambda, spans, counts)
            })
            .collect();
        for (lambda, spans, counts) in parts {
            plan.lambdas.push(lambda);
            plan.spans.extend_from_slice(&spans);
            for c in counts {
                total += c as u64;
                if total > opts.max_links {
                    return Err(GeneratorError::TooLarge { expected: total, cap: opts.max_links });
                }
                plan.link_offsets.push(total as u32);
            }
            plan.node_offsets.push(plan.spans.len());
        }
        lo = hi;
    }
    Ok(plan)
}

/// Phase 2: neighbour ids for every planned link.
fn wire(params: &ModelParams, plan: &Plan) -> Result<Vec<u32>, GeneratorError> {
    let horizon = params.grid.horizon_steps() as usize;
    let copies = plan.spans.len();
    // counting sort by start step; hosts are visited in order, so ties keep host order
    let mut next = vec![0usize; horizon + 1];
    for s in &plan.spans {
        next[s.start as usize + 1] += 1;
    }
    for i in 1..next.len() {
        next[i] += next[i - 1];
    }
    let mut order = vec![0u32; copies];
    let mut order_host = vec![0u32; copies];
    for host in 0..params.n_nodes as usize {
        for c in plan.node_offsets[host]..plan.node_offsets[host + 1] {
            let slot = &mut next[plan.spans[c].start as usize];
            order[*slot] = c as u32;
            order_host[*slot] = host as u32;
            *slot += 1;
        }
    }
    drop(next);

    let weights = match params.degree {
        DegreeModel::Heterogeneous(_) => Some(plan.lambdas.as_slice()),
        DegreeModel::Homogeneous { .. } => None,
    };
    let mut social = SocialState::new(params.n_nodes, params.eta, params.mu, weights)?;
    let mut rng = rng::stream(params.master_seed, &[rng::domain::SOCIAL]);
    let mut neighbours = vec![0u32; *plan.link_offsets.last().unwrap() as usize];
    let mut chosen = Vec::new();
    for (&c, &host) in order.iter().zip(&order_host) {
        let (from, to) = (plan.link_offsets[c as usize] as usize, plan.link_offsets[c as usize + 1] as usize);
        social.select_neighbours(host, to - from, &mut rng, &mut chosen)?;
        neighbours[from..to].copy_from_slice(&chosen);
    }
    Ok(neighbours)
}

fn generate_spdt<S: NetworkSink>(params: &ModelParams, opts: &GenerateOptions, sink: &mut S) -> Result<Summary, GeneratorError> {
    params.validate()?;
    let expected = params.expected_links();
    if expected > opts.max_links as f64 {
        return Err(GeneratorError::TooLarge { expected: expected as u64, cap: opts.max_links });
    }
    let sim = NodeSimulator::new(params)?;
    let plan = plan(&sim, opts)?;
    log::debug!("planned {} copies and {} links", plan.spans.len(), plan.link_offsets.last().unwrap());
    let neighbours = wire(params, &plan)?;
    emit_blocks(params.n_nodes, opts.chunk_nodes, sink, |node, block| {
        let mut copy = plan.node_offsets[node as usize];
        let mut used = 0usize;
        sim.run(node, |e| match e {
            ActivityEvent::Copy { start, end } => {
                block.close_copy();
                if used > 0 {
                    copy += 1;
                }
                used = 0;
                block.open_copy(start, end);
            }
            ActivityEvent::Link { join, leave } => {
                let neighbour = neighbours[plan.link_offsets[copy] as usize + used];
                used += 1;
                block.push_link(LinkRecord { join, leave, neighbour });
            }
        });
        block.close_copy();
        debug_assert_eq!(block.spans.len(), plan.node_offsets[node as usize + 1] - plan.node_offsets[node as usize]);
    })
}

fn generate_with<S: NetworkSink>(mode: Mode, params: &ModelParams, opts: &GenerateOptions, sink: &mut S) -> Result<Summary, GeneratorError> {
    match mode {
        Mode::Gdt | Mode::Gdh => {
            let p = params.clone();
            if mode == Mode::Gdh && !matches!(p.degree, DegreeModel::Homogeneous { .. }) {
                return Err(GeneratorError::Params("gdh requires a homogeneous degree model (lambda)".into()));
            }
            if mode == Mode::Gdt && !matches!(p.degree, DegreeModel::Heterogeneous(_)) {
                return Err(GeneratorError::Params("gdt requires a heterogeneous degree model (beta, xi)".into()));
            }
            p.validate()?;
            generate_spdt(&p, opts, sink)
        }
        Mode::Bdt | Mode::Bdh => {
            let degree = match (mode, params.degree) {
                (Mode::Bdh, _) => AdnDegree::Fixed(3),
                (_, DegreeModel::Heterogeneous(law)) => AdnDegree::Mixed(law),
                (_, DegreeModel::Homogeneous { .. }) => {
                    return Err(GeneratorError::Params("bdt requires a heterogeneous degree model (beta, xi)".into()))
                }
            };
            let adn = AdnParams::defaults(degree, params.n_nodes, params.grid, params.master_seed)?;
            adn::generate(&adn, opts, sink)
        }
    }
}

fn builder_for(params: &ModelParams, mode: Mode) -> NetworkBuilder {
    let delta = if matches!(mode, Mode::Bdt | Mode::Bdh) { 0 } else { params.delta };
    NetworkBuilder::new(params.grid, delta, params.n_nodes)
}

/// Generates an SPDT network (GDT or GDH, following the degree model) in memory.
pub fn generate_network(params: &ModelParams) -> Result<ContactNetwork, GeneratorError> {
    let mode = match params.degree {
        DegreeModel::Homogeneous { .. } => Mode::Gdh,
        DegreeModel::Heterogeneous(_) => Mode::Gdt,
    };
    generate(mode, params, &GenerateOptions::default())
}

/// Generates any network family in memory.
pub fn generate(mode: Mode, params: &ModelParams, opts: &GenerateOptions) -> Result<ContactNetwork, GeneratorError> {
    let mut b = builder_for(params, mode);
    generate_with(mode, params, opts, &mut b)?;
    Ok(b.finish())
}

/// Generates straight to a network directory without holding the links in memory.
pub fn generate_to_dir(mode: Mode, params: &ModelParams, dir: &Path, opts: &GenerateOptions) -> Result<Summary, GeneratorError> {
    let delta = if matches!(mode, Mode::Bdt | Mode::Bdh) { 0 } else { params.delta };
    let meta = NetworkMeta { grid: params.grid, delta_steps: delta, node_count: params.n_nodes };
    let mut w = LinkWriter::create(dir, &meta)?;
    let summary = generate_with(mode, params, opts, &mut w)?;
    w.finish()?;
    Ok(summary)
}

/// Generates an activity-driven baseline in memory.
pub fn generate_adn(params: &AdnParams) -> Result<ContactNetwork, GeneratorError> {
    let mut b = NetworkBuilder::new(params.grid, 0, params.n_nodes);
    adn::generate(params, &GenerateOptions::default(), &mut b)?;
    Ok(b.finish())
}
