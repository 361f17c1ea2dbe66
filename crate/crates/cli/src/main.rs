use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use spdt_core::analysis::{
    cip_histograms, daily_static_metrics, rse, static_metrics, temporal_metrics, DayAggregatedGraph, Histogram, Sources,
    TemporalParams,
};
use spdt_core::config::KvFile;
use spdt_core::diffusion::{apv, simulate, write_events, DiseaseParams, SeriesSummary};
use spdt_core::extraction::{densify, extract, read_gps_csv, ExtractionParams, FillPolicy};
use spdt_core::fitting::{fit_all, CipSamples, FitError};
use spdt_core::generator::{generate_to_dir, GenerateOptions, Mode, ModelParams};
use spdt_core::model::io::{read_network, write_network};
use spdt_core::model::DEFAULT_DELTA_STEPS;
use spdt_core::{ContactNetwork, TimeGrid};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nprofile: ",
    env!("SPDT_BUILD_PROFILE"),
    "\ntarget: ",
    env!("SPDT_BUILD_TARGET")
);

#[derive(Parser, Debug)]
#[command(name = "spdt", version, long_version = LONG_VERSION, about = "Fit, generate, analyse and simulate SPDT contact networks")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a network from GPS updates (user_id,lat,lon,unix_timestamp).
    Extract(ExtractArgs),
    /// Fill days without activity with copies of active days.
    Densify(DensifyArgs),
    /// Fit model parameters from CIP samples or a network.
    Fit(FitArgs),
    /// Generate a synthetic network.
    Generate(GenerateArgs),
    /// Run SIR simulations on a network.
    Simulate(SimulateArgs),
    /// Compute CIP histograms and static or temporal metrics.
    Analyze(AnalyzeArgs),
    /// RSE between two histograms, or APV between two simulation series.
    Compare(CompareArgs),
    /// Check a network directory and report the first violation.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 10_800)]
    delta_seconds: i64,
    #[arg(long, default_value_t = 20.0)]
    radius_m: f64,
    #[arg(long, default_value_t = 30)]
    gap_min: i64,
    #[arg(long, default_value_t = 300)]
    step_seconds: u32,
}

#[derive(Args, Debug)]
struct DensifyArgs {
    #[arg(short, long)]
    network: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Fill only one missing day per user.
    #[arg(long)]
    one_day: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Active periods, one integer (steps) per line.
    #[arg(long, requires_all = ["h", "d", "tc", "td"], conflicts_with = "network")]
    ta: Option<PathBuf>,
    /// Activations per node and day.
    #[arg(long)]
    h: Option<PathBuf>,
    /// Links per active copy.
    #[arg(long)]
    d: Option<PathBuf>,
    /// Link creation delays.
    #[arg(long)]
    tc: Option<PathBuf>,
    /// Link durations.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Inactive periods (optional, reported only).
    #[arg(long)]
    tw: Option<PathBuf>,
    /// Take all samples from a network instead.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    delta_steps: Option<u32>,
    #[arg(long, default_value_t = 300)]
    step_seconds: u32,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value = "gdt")]
    mode: Mode,
    #[arg(long)]
    nodes: u32,
    #[arg(long)]
    days: u32,
    #[arg(long, default_value_t = 300)]
    step_seconds: u32,
    /// Overrides delta_steps from the parameter file.
    #[arg(long)]
    delta: Option<u32>,
    /// key=value parameter file layered over the built-in defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Single parameter override, key=value (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Refuse to generate more links than this.
    #[arg(long)]
    max_links: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(short, long)]
    network: PathBuf,
    /// key=value disease file layered over the built-in defaults.
    #[arg(long)]
    disease: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value_t = 100)]
    runs: u32,
    /// Days to simulate (default: the network horizon).
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    seeds: Option<u32>,
    /// Median particle removal time in minutes.
    #[arg(long)]
    removal_median: Option<f64>,
    /// Infectious period fixed at 3 days.
    #[arg(long)]
    strict_tau: bool,
    /// Also write the per-run event log.
    #[arg(long)]
    events: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(short, long)]
    network: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// CIP histograms (t_a, t_w, h, d, t_c, t_d).
    #[arg(long)]
    cip: bool,
    /// Degrees and clustering, whole window and per day.
    #[arg(long = "static")]
    static_metrics: bool,
    /// Temporal betweenness and closeness.
    #[arg(long)]
    temporal: bool,
    /// Search only this many random sources (approximate).
    #[arg(long)]
    sample_sources: Option<u32>,
    #[arg(long, default_value_t = 5)]
    max_gap_days: u32,
    #[arg(long, default_value_t = 1)]
    incubation_days: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Histogram (bin,proportion) or simulation series CSV.
    observed: PathBuf,
    /// Reference of the same kind.
    reference: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    network: PathBuf,
}

/// Command-line misuse detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 1;
        }
        if let Some(f) = cause.downcast_ref::<FitError>() {
            if matches!(f, FitError::NonConvergence { .. } | FitError::Boundary { .. }) {
                return 3;
            }
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the worker pool")?;
    }
    let threads = rayon::current_num_threads();
    match cli.command {
        Command::Extract(a) => cmd_extract(a, threads),
        Command::Densify(a) => cmd_densify(a, threads),
        Command::Fit(a) => cmd_fit(a, threads),
        Command::Generate(a) => cmd_generate(a, threads),
        Command::Simulate(a) => cmd_simulate(a, threads),
        Command::Analyze(a) => cmd_analyze(a, threads),
        Command::Compare(a) => cmd_compare(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Resolved configuration written beside every output.
fn run_log(command: &str, threads: usize, fill: impl FnOnce(&mut KvFile)) -> KvFile {
    let mut kv = KvFile::new();
    kv.set("command", command);
    kv.set("version", env!("CARGO_PKG_VERSION"));
    kv.set("threads", threads);
    fill(&mut kv);
    kv
}

fn save_run_log(kv: &KvFile, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("run.kv");
    kv.write(&path).with_context(|| format!("writing {}", path.display()))?;
    info!("configuration logged to {}", path.display());
    Ok(())
}

fn load_network(dir: &Path) -> Result<ContactNetwork> {
    let net = read_network(dir).with_context(|| format!("reading network {}", dir.display()))?;
    info!("{}: {} nodes, {} copies, {} links", dir.display(), net.node_count(), net.copy_count(), net.link_count());
    Ok(net)
}

fn apply_sets(kv: &mut KvFile, sets: &[String]) -> Result<()> {
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {s:?}")))?;
        kv.set(k.trim(), v.trim());
    }
    Ok(())
}

fn cmd_extract(a: ExtractArgs, threads: usize) -> Result<()> {
    let params = ExtractionParams {
        radius_m: a.radius_m,
        gap_seconds: a.gap_min * 60,
        delta_seconds: a.delta_seconds,
        step_seconds: a.step_seconds,
    };
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let updates = read_gps_csv(BufReader::new(file)).with_context(|| format!("reading {}", a.input.display()))?;
    info!("{} updates", updates.len());
    let ex = extract(&updates, &params)?;
    write_network(&ex.network, &a.output)?;
    let mut w = BufWriter::new(File::create(a.output.join("users.csv"))?);
    writeln!(w, "node,user_id")?;
    for (i, u) in ex.users.iter().enumerate() {
        writeln!(w, "{i},{u}")?;
    }
    w.flush()?;
    info!("{} stays, {} links", ex.stays, ex.network.link_count());
    let log = run_log("extract", threads, |kv| {
        kv.set("input", a.input.display());
        kv.set("radius_m", params.radius_m);
        kv.set("gap_seconds", params.gap_seconds);
        kv.set("delta_seconds", params.delta_seconds);
        kv.set("step_seconds", params.step_seconds);
        kv.set("origin_unix", ex.origin);
    });
    save_run_log(&log, &a.output)
}

fn cmd_densify(a: DensifyArgs, threads: usize) -> Result<()> {
    let net = load_network(&a.network)?;
    let policy = if a.one_day { FillPolicy::OneMissingDay } else { FillPolicy::AllMissingDays };
    let dense = densify(&net, policy, a.seed)?;
    info!("{} links -> {} links", net.link_count(), dense.link_count());
    write_network(&dense, &a.output)?;
    let users = a.network.join("users.csv");
    if users.exists() {
        fs::copy(&users, a.output.join("users.csv"))?;
    }
    let log = run_log("densify", threads, |kv| {
        kv.set("network", a.network.display());
        kv.set("policy", if a.one_day { "one_missing_day" } else { "all_missing_days" });
        kv.set("seed", a.seed);
    });
    save_run_log(&log, &a.output)
}

fn read_samples(path: &Path) -> Result<Vec<u64>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: u64 = t.parse().with_context(|| format!("{}:{}: expected a non-negative integer, got {t:?}", path.display(), i + 1))?;
        out.push(v);
    }
    Ok(out)
}

fn cmd_fit(a: FitArgs, threads: usize) -> Result<()> {
    let (samples, delta, z) = if let Some(dir) = &a.network {
        let net = load_network(dir)?;
        let delta = a.delta_steps.unwrap_or(net.delta());
        (spdt_core::analysis::cip_samples(&net), delta, net.grid().steps_per_day())
    } else {
        let need = |p: &Option<PathBuf>, flag: &str| -> Result<Vec<u64>> {
            match p {
                Some(p) => read_samples(p),
                None => Err(usage(format!("fit needs --{flag} (or --network)"))),
            }
        };
        let samples = CipSamples {
            active_periods: need(&a.ta, "ta")?,
            inactive_periods: match &a.tw {
                Some(p) => read_samples(p)?,
                None => Vec::new(),
            },
            activation_frequencies: need(&a.h, "h")?,
            degrees: need(&a.d, "d")?,
            link_delays: need(&a.tc, "tc")?,
            link_durations: need(&a.td, "td")?,
        };
        let z = TimeGrid::new(a.step_seconds, 1).map_err(|e| usage(e.to_string()))?.steps_per_day();
        (samples, a.delta_steps.unwrap_or(DEFAULT_DELTA_STEPS), z)
    };
    let fit = fit_all(&samples, z, delta as u64)?;
    for w in &fit.diagnostics.warnings {
        warn!("{w}");
    }
    let mut kv = KvFile::new();
    kv.set("rho", fit.rho);
    kv.set("q", fit.q);
    kv.set("lambda", fit.lambda);
    kv.set("beta", fit.beta);
    kv.set("xi", fit.xi);
    kv.set("psi", 1);
    kv.set("p_c", fit.p_c);
    kv.set("p_b", fit.p_b);
    kv.set("delta_steps", delta);
    kv.set("step_seconds", 86_400 / z);
    if let Some(parent) = a.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    kv.write(&a.output).with_context(|| format!("writing {}", a.output.display()))?;
    println!("{kv}");
    let log = run_log("fit", threads, |kv| {
        kv.set("output", a.output.display());
        if let Some(n) = &a.network {
            kv.set("network", n.display());
        }
        for (k, p) in [("ta", &a.ta), ("tw", &a.tw), ("h", &a.h), ("d", &a.d), ("tc", &a.tc), ("td", &a.td)] {
            if let Some(p) = p {
                kv.set(k, p.display());
            }
        }
        kv.set("delta_steps", delta);
        kv.set("steps_per_day", z);
        kv.set("one_step_beta", fit.diagnostics.mixed.one_step_beta);
        kv.set("one_step_xi", fit.diagnostics.mixed.one_step_xi);
    });
    let log_path = a.output.with_extension("run.kv");
    log.write(&log_path).with_context(|| format!("writing {}", log_path.display()))?;
    Ok(())
}

fn cmd_generate(a: GenerateArgs, threads: usize) -> Result<()> {
    let mut kv = KvFile::defaults();
    if let Some(p) = &a.params {
        kv.overlay(&KvFile::read(p).with_context(|| format!("reading {}", p.display()))?);
    }
    apply_sets(&mut kv, &a.set)?;
    if let Some(d) = a.delta {
        kv.set("delta_steps", d);
    }
    if let Some(s) = kv.get::<u32>("step_seconds")? {
        if a.params.is_some() && s != a.step_seconds {
            warn!("parameter file was fitted at {s} s steps; generating at {} s", a.step_seconds);
        }
    }
    let grid = TimeGrid::new(a.step_seconds, a.days).map_err(|e| usage(e.to_string()))?;
    let params = ModelParams::from_kv(&kv, a.mode, a.nodes, grid, a.seed)?;
    let mut opts = GenerateOptions::default();
    if let Some(m) = a.max_links {
        opts.max_links = m;
    }
    info!("generating {} with {} nodes over {} days, about {:.3e} links", a.mode, a.nodes, a.days, params.expected_links());
    let summary = generate_to_dir(a.mode, &params, &a.output, &opts)?;
    info!("{} copies, {} links", summary.copies, summary.links);
    let log = run_log("generate", threads, |log| {
        log.set("mode", a.mode);
        log.set("nodes", a.nodes);
        log.set("days", a.days);
        log.set("step_seconds", a.step_seconds);
        log.set("seed", a.seed);
        log.set("max_links", opts.max_links);
        for k in kv.keys() {
            log.set(&format!("param.{k}"), kv.get_str(k).unwrap_or_default());
        }
        log.set("copies", summary.copies);
        log.set("links", summary.links);
    });
    save_run_log(&log, &a.output)
}

fn cmd_simulate(a: SimulateArgs, threads: usize) -> Result<()> {
    let mut kv = KvFile::defaults();
    if let Some(p) = &a.disease {
        kv.overlay(&KvFile::read(p).with_context(|| format!("reading {}", p.display()))?);
    }
    apply_sets(&mut kv, &a.set)?;
    if let Some(s) = a.seeds {
        kv.set("seeds", s);
    }
    if let Some(m) = a.removal_median {
        kv.set("removal_median_min", m);
    }
    if a.strict_tau {
        kv.set("tau_min_days", 3);
        kv.set("tau_max_days", 3);
    }
    let params = DiseaseParams::from_kv(&kv)?;
    let net = load_network(&a.network)?;
    let days = a.days.unwrap_or(net.grid().horizon_days());
    let runs = simulate(&net, &params, a.runs, days, a.seed)?;
    fs::create_dir_all(&a.output)?;
    let mut w = BufWriter::new(File::create(a.output.join("series.csv"))?);
    SeriesSummary::of(&runs).write_csv(&mut w)?;
    w.flush()?;
    if a.events {
        let mut w = BufWriter::new(File::create(a.output.join("events.csv"))?);
        write_events(&runs, &mut w)?;
        w.flush()?;
    }
    let log = run_log("simulate", threads, |log| {
        log.set("network", a.network.display());
        log.set("runs", a.runs);
        log.set("days", days);
        log.set("seed", a.seed);
        let mut resolved = KvFile::new();
        params.write_kv(&mut resolved);
        for k in resolved.keys() {
            log.set(&format!("disease.{k}"), resolved.get_str(k).unwrap_or_default());
        }
    });
    save_run_log(&log, &a.output)
}

fn write_histogram(h: &Histogram, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    h.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs, threads: usize) -> Result<()> {
    let (mut cip, mut stat, temporal) = (a.cip, a.static_metrics, a.temporal);
    if !cip && !stat && !temporal {
        cip = true;
        stat = true;
    }
    let net = load_network(&a.network)?;
    fs::create_dir_all(&a.output)?;
    if cip {
        let h = cip_histograms(&net);
        for (name, hist) in h.named() {
            write_histogram(hist, &a.output.join(format!("cip_{name}.csv")))?;
        }
    }
    let mut nodes = BufWriter::new(File::create(a.output.join("node_metrics.csv"))?);
    writeln!(nodes, "node,metric,value")?;
    if stat {
        let m = static_metrics(&net);
        for v in 0..net.node_count() as usize {
            writeln!(nodes, "{v},out_degree,{}", m.out_degree[v])?;
            writeln!(nodes, "{v},in_degree,{}", m.in_degree[v])?;
            writeln!(nodes, "{v},clustering,{}", m.clustering[v])?;
        }
        let degrees: Vec<u64> = m.out_degree.iter().map(|&d| d as u64).collect();
        write_histogram(&Histogram::from_integers(&degrees), &a.output.join("out_degree.csv"))?;
        let degrees: Vec<u64> = m.in_degree.iter().map(|&d| d as u64).collect();
        write_histogram(&Histogram::from_integers(&degrees), &a.output.join("in_degree.csv"))?;
        write_histogram(&Histogram::from_reals(&m.clustering, 0.01), &a.output.join("clustering.csv"))?;
        let mut daily = BufWriter::new(File::create(a.output.join("daily_static.csv"))?);
        writeln!(daily, "day,mean_out_degree,mean_clustering")?;
        for (d, m) in daily_static_metrics(&net).iter().enumerate() {
            writeln!(daily, "{d},{},{}", m.mean_out_degree(), m.mean_clustering())?;
        }
        daily.flush()?;
        info!("mean clustering {:.4}", m.mean_clustering());
    }
    let mut approximate = false;
    if temporal {
        let g = DayAggregatedGraph::from_network(&net)?;
        let params = TemporalParams { min_gap_days: a.incubation_days, max_gap_days: a.max_gap_days };
        if params.min_gap_days == 0 || params.max_gap_days < params.min_gap_days {
            return Err(usage("need 1 <= incubation-days <= max-gap-days"));
        }
        let sources = match a.sample_sources {
            Some(count) => Sources::Sample { count, seed: a.seed },
            None => Sources::All,
        };
        let m = temporal_metrics(&g, &params, sources);
        approximate = m.approximate;
        if m.approximate {
            warn!("temporal metrics estimated from {} sampled sources", m.sources);
        }
        for v in 0..net.node_count() as usize {
            writeln!(nodes, "{v},temporal_betweenness,{}", m.betweenness[v])?;
            writeln!(nodes, "{v},temporal_closeness,{}", m.closeness[v])?;
        }
    }
    nodes.flush()?;
    let log = run_log("analyze", threads, |log| {
        log.set("network", a.network.display());
        log.set("cip", cip);
        log.set("static", stat);
        log.set("temporal", temporal);
        log.set("max_gap_days", a.max_gap_days);
        log.set("incubation_days", a.incubation_days);
        if let Some(s) = a.sample_sources {
            log.set("sample_sources", s);
            log.set("seed", a.seed);
        }
        log.set("temporal_approximate", approximate);
    });
    save_run_log(&log, &a.output)
}

/// Mean prevalence and cumulative columns of a `series.csv`.
fn read_series(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let (Some(p), Some(c)) = (col("I_p_mean"), col("I_a_mean")) else {
        bail!("{}: not a simulation series (needs I_p_mean and I_a_mean columns)", path.display());
    };
    let (mut prev, mut cum) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let get = |k: usize| -> Result<f64> {
            f.get(k)
                .and_then(|s| s.trim().parse().ok())
                .with_context(|| format!("{}:{}: bad number", path.display(), i + 2))
        };
        prev.push(get(p)?);
        cum.push(get(c)?);
    }
    Ok((prev, cum))
}

fn is_series(path: &Path) -> Result<bool> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut first = String::new();
    BufReader::new(f).read_line(&mut first)?;
    Ok(first.starts_with("day,"))
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    match (is_series(&a.observed)?, is_series(&a.reference)?) {
        (true, true) => {
            let (op, oc) = read_series(&a.observed)?;
            let (rp, rc) = read_series(&a.reference)?;
            let p = apv(&rp, &op)?;
            let c = apv(&rc, &oc)?;
            println!("day,apv_prevalence,apv_cumulative");
            for d in 0..p.per_day.len() {
                println!("{d},{},{}", p.per_day[d], c.per_day[d]);
            }
            println!("mean,{},{}", p.mean, c.mean);
        }
        (false, false) => {
            let read = |p: &Path| -> Result<Histogram> {
                let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                Histogram::read_csv(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))
            };
            let e = rse(&read(&a.observed)?, &read(&a.reference)?)?;
            println!("rse={e}");
        }
        _ => return Err(usage("compare needs two histograms or two simulation series")),
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    net.validate().with_context(|| format!("validating {}", a.network.display()))?;
    println!("ok: {} nodes, {} copies, {} links", net.node_count(), net.copy_count(), net.link_count());
    Ok(())
}
