//! Batch experiments: TPRR-versus-p curves per route-discovery strategy,
//! averaged over random topologies and flows.
//!
//! A sweep config is plain `key = value` text with `#` comments:
//!
//! ```text
//! topology    = geometric     # geometric | mesh | file
//! nodes       = 16
//! density     = 64            # nodes/km²
//! range       = 0.254         # km
//! shape       = circle        # circle | square
//! topologies  = 100
//! strategies  = shortest, klimited:3, klimited:5, full
//! flows       = all           # all | <count>
//! p_min       = 0.0
//! p_max       = 1.0
//! p_step      = 0.05
//! method      = exact         # exact | montecarlo:<trials>
//! master_seed = 1
//! output      = curves.csv
//! ```
//!
//! See [`SweepConfig::parse`] for every key and its default.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{sp_bound_closed, sp_bound_topology, NetworkParams};
use crate::error::{Error, Result};
use crate::formats::read_graph;
use crate::graph::{Flow, ProbGraph};
use crate::overlay::{build_overlay, RdpStrategy};
use crate::reliability::{tprr_exact, tprr_montecarlo, DEFAULT_GUARD};
use crate::rng::derive_seed;
use crate::topology::{
    generate_full_mesh, generate_random_geometric, generate_without_isolated, Shape, TopologySpec,
};

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySource {
    Geometric {
        n: usize,
        delta: f64,
        r: f64,
        shape: Shape,
        reject_isolated: bool,
    },
    Mesh { n: usize },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSelection {
    All,
    Sample(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { trials: u64 },
}

/// Which shortest-path bound fills the `sp_bound` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Closed form from node count, density and range.
    Closed,
    /// `(1 - p)^h(s,t)` averaged over the evaluated flows.
    Topology,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub topology: TopologySource,
    pub topologies: usize,
    pub strategies: Vec<RdpStrategy>,
    pub flows: FlowSelection,
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub method: Method,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    /// Largest overlay evaluated exactly; larger ones fall back to
    /// Monte-Carlo unless `strict`.
    pub guard: usize,
    pub fallback_trials: u64,
    pub strict: bool,
    pub bound: BoundKind,
}

const GEOMETRIC_DEFAULT: TopologySource = TopologySource::Geometric {
    n: 16,
    delta: 64.0,
    r: 0.254,
    shape: Shape::Circle,
    reject_isolated: false,
};

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            topology: GEOMETRIC_DEFAULT,
            topologies: 1,
            strategies: vec![RdpStrategy::SingleShortestPath, RdpStrategy::FullMultipath],
            flows: FlowSelection::All,
            p_min: 0.0,
            p_max: 1.0,
            p_step: 0.05,
            method: Method::Exact,
            master_seed: 1,
            output: None,
            guard: DEFAULT_GUARD,
            fallback_trials: 10_000,
            strict: false,
            bound: BoundKind::Closed,
        }
    }
}

pub fn parse_strategies(value: &str) -> Result<Vec<RdpStrategy>> {
    let list = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<RdpStrategy>>>()?;
    if list.is_empty() {
        return Err(Error::InvalidParameter("no strategies given".into()));
    }
    Ok(list)
}

fn parse_method(value: &str) -> Result<Method> {
    match value.split_once(':') {
        None if value == "exact" => Ok(Method::Exact),
        Some((name, trials)) if matches!(name.trim(), "montecarlo" | "mc") => {
            match trials.trim().parse::<u64>() {
                Ok(t) if t > 0 => Ok(Method::MonteCarlo { trials: t }),
                _ => Err(Error::InvalidParameter(format!("bad trial count '{trials}'"))),
            }
        }
        _ => Err(Error::InvalidParameter(format!(
            "unknown method '{value}', expected 'exact' or 'montecarlo:<trials>'"
        ))),
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("expected true or false, got '{value}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad number '{value}'")))
}

impl SweepConfig {
    /// Reads a `key = value` config. Unknown and repeated keys are errors.
    ///
    /// | key | default |
    /// |-----|---------|
    /// | `topology` | `geometric` (`mesh`, `file`) |
    /// | `nodes`, `density`, `range`, `shape` | 16, 64, 0.254, `circle` |
    /// | `reject_isolated` | `false` |
    /// | `graph` | required for `topology = file` |
    /// | `topologies` | 1 |
    /// | `strategies` | `shortest,full` |
    /// | `flows` | `all` |
    /// | `p_min`, `p_max`, `p_step` | 0, 1, 0.05 |
    /// | `method` | `exact` |
    /// | `master_seed` | 1 |
    /// | `output` | none |
    /// | `guard`, `fallback_trials`, `strict` | 30, 10000, `false` |
    /// | `bound` | `closed` for geometric, `topology` otherwise |
    pub fn parse(reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        BufReader::new(reader).read_to_string(&mut text)?;
        let mut values: HashMap<String, (usize, String)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected 'key = value', got '{body}'")))?;
            let key = key.trim().to_owned();
            if values.insert(key.clone(), (line, value.trim().to_owned())).is_some() {
                return Err(Error::parse(line, format!("duplicate key '{key}'")));
            }
        }

        let mut cfg = SweepConfig::default();
        let mut take = |key: &str| values.remove(key);
        let at = |line: usize| move |e: Error| Error::parse(line, e.to_string());

        let mut geo = (16usize, 64.0f64, 0.254f64, Shape::Circle, false);
        if let Some((l, v)) = take("nodes") {
            geo.0 = parse_num(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("density") {
            geo.1 = parse_num(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("range") {
            geo.2 = parse_num(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("shape") {
            geo.3 = v.parse().map_err(at(l))?;
        }
        if let Some((l, v)) = take("reject_isolated") {
            geo.4 = parse_bool(&v).map_err(at(l))?;
        }
        let graph = take("graph");
        let kind = take("topology");
        let kind_line = kind.as_ref().map_or(0, |(l, _)| *l);
        cfg.topology = match kind.as_ref().map(|(_, v)| v.as_str()).unwrap_or("geometric") {
            "geometric" => {
                let (n, delta, r, shape, reject_isolated) = geo;
                TopologySpec {
                    n,
                    delta,
                    r,
                    shape,
                    seed: 0,
                    p_fail_default: 0.0,
                }
                .validate()
                .map_err(at(kind_line))?;
                TopologySource::Geometric {
                    n,
                    delta,
                    r,
                    shape,
                    reject_isolated,
                }
            }
            "mesh" => {
                if geo.0 < 2 {
                    return Err(Error::parse(kind_line, "mesh needs at least 2 nodes"));
                }
                TopologySource::Mesh { n: geo.0 }
            }
            "file" => {
                let (_, path) = graph
                    .clone()
                    .ok_or_else(|| Error::parse(kind_line, "topology = file needs a 'graph' path"))?;
                TopologySource::File(PathBuf::from(path))
            }
            other => return Err(Error::parse(kind_line, format!("unknown topology '{other}'"))),
        };
        if let (Some((l, _)), false) = (&graph, matches!(cfg.topology, TopologySource::File(_))) {
            return Err(Error::parse(*l, "'graph' is only valid with topology = file"));
        }
        cfg.bound = match cfg.topology {
            TopologySource::Geometric { .. } => BoundKind::Closed,
            _ => BoundKind::Topology,
        };

        if let Some((l, v)) = take("topologies") {
            cfg.topologies = parse_num(&v).map_err(at(l))?;
            if cfg.topologies == 0 {
                return Err(Error::parse(l, "topologies must be at least 1"));
            }
        }
        if let Some((l, v)) = take("strategies") {
            cfg.strategies = parse_strategies(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("flows") {
            cfg.flows = match v.as_str() {
                "all" => FlowSelection::All,
                count => match count.parse::<usize>() {
                    Ok(k) if k > 0 => FlowSelection::Sample(k),
                    _ => return Err(Error::parse(l, format!("flows must be 'all' or a positive count, got '{count}'"))),
                },
            };
        }
        let mut p_line = 0;
        for (key, slot) in [
            ("p_min", &mut cfg.p_min),
            ("p_max", &mut cfg.p_max),
            ("p_step", &mut cfg.p_step),
        ] {
            if let Some((l, v)) = take(key) {
                *slot = parse_num(&v).map_err(at(l))?;
                p_line = p_line.max(l);
            }
        }
        if !(0.0 <= cfg.p_min && cfg.p_min <= cfg.p_max && cfg.p_max <= 1.0) {
            return Err(Error::parse(
                p_line,
                format!("need 0 <= p_min <= p_max <= 1, got p_min = {}, p_max = {}", cfg.p_min, cfg.p_max),
            ));
        }
        if !(cfg.p_step > 0.0) {
            return Err(Error::parse(p_line, format!("p_step must be positive, got {}", cfg.p_step)));
        }
        if let Some((l, v)) = take("method") {
            cfg.method = parse_method(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("master_seed") {
            cfg.master_seed = parse_num(&v).map_err(at(l))?;
        }
        if let Some((_, v)) = take("output") {
            cfg.output = Some(PathBuf::from(v));
        }
        if let Some((l, v)) = take("guard") {
            cfg.guard = parse_num(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("fallback_trials") {
            cfg.fallback_trials = parse_num(&v).map_err(at(l))?;
            if cfg.fallback_trials == 0 {
                return Err(Error::parse(l, "fallback_trials must be positive"));
            }
        }
        if let Some((l, v)) = take("strict") {
            cfg.strict = parse_bool(&v).map_err(at(l))?;
        }
        if let Some((l, v)) = take("bound") {
            cfg.bound = match v.as_str() {
                "closed" => BoundKind::Closed,
                "topology" => BoundKind::Topology,
                other => return Err(Error::parse(l, format!("unknown bound '{other}'"))),
            };
            if cfg.bound == BoundKind::Closed && !matches!(cfg.topology, TopologySource::Geometric { .. }) {
                return Err(Error::parse(l, "the closed-form bound needs a geometric topology"));
            }
        }

        if let Some((key, (line, _))) = values.into_iter().min_by_key(|(_, (l, _))| *l) {
            return Err(Error::parse(line, format!("unknown key '{key}'")));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        SweepConfig::parse(File::open(path)?)
    }

    /// Grid points from `p_min` to `p_max` inclusive.
    pub fn p_grid(&self) -> Vec<f64> {
        let span = self.p_max - self.p_min;
        let steps = (span / self.p_step + 1e-9).floor() as usize;
        let mut grid: Vec<f64> = (0..=steps)
            .map(|i| (self.p_min + i as f64 * self.p_step).min(self.p_max))
            .collect();
        if let Some(last) = grid.last_mut() {
            if (self.p_max - *last).abs() < 1e-9 {
                *last = self.p_max;
            }
        }
        if grid.last().is_some_and(|&p| p < self.p_max) {
            grid.push(self.p_max);
        }
        grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub strategy: RdpStrategy,
    pub p: f64,
    pub mean_tprr: f64,
    pub var_tprr: f64,
    pub sp_bound: f64,
}

/// Rows sorted by (strategy, p).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn rows_for(&self, strategy: RdpStrategy) -> impl Iterator<Item = &CurveRow> {
        self.rows.iter().filter(move |r| r.strategy == strategy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub table: CurveTable,
    /// Overlays evaluated by Monte-Carlo because they exceeded the guard.
    pub fallbacks: usize,
    /// Placements rejected for containing isolated nodes.
    pub resamples: usize,
}

/// Running mean and sum of squared deviations (Welford), fed in a fixed
/// order so results do not depend on thread scheduling.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }
}

const FLOW_SAMPLE_TAG: u64 = 0xf10e;

fn select_flows(g: &ProbGraph, selection: FlowSelection, master_seed: u64, topology: usize) -> Vec<Flow> {
    let all = g.all_flows();
    match selection {
        FlowSelection::Sample(k) if k < all.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[master_seed, topology as u64, FLOW_SAMPLE_TAG]));
            let mut picked = rand::seq::index::sample(&mut rng, all.len(), k).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| all[i]).collect()
        }
        _ => all,
    }
}

/// Runs every (topology, strategy, flow, p) cell.
///
/// Topology `i` uses seed `master_seed + i`. Each cell's mean is the
/// uniform-weight mean TPRR over the selected flows, averaged over
/// topologies; the variance is the sample variance over all
/// (topology, flow) values. Monte-Carlo sub-seeds depend on
/// (master seed, topology, flow, p index) but not on the strategy, so all
/// strategies see the same link states.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let grid = cfg.p_grid();
    let mut strategies = cfg.strategies.clone();
    strategies.sort();
    strategies.dedup();

    let file_graph = match &cfg.topology {
        TopologySource::File(path) => Some(read_graph(BufReader::new(File::open(path)?))?),
        _ => None,
    };
    let closed_params = match (cfg.bound, &cfg.topology) {
        (BoundKind::Closed, TopologySource::Geometric { n, delta, r, .. }) => {
            Some(NetworkParams::from_density(*n, *delta, *r)?)
        }
        (BoundKind::Closed, _) => {
            return Err(Error::InvalidParameter(
                "the closed-form bound needs a geometric topology".into(),
            ))
        }
        _ => None,
    };

    let mut cells = vec![vec![Moments::default(); grid.len()]; strategies.len()];
    let mut bound_moments = vec![Moments::default(); grid.len()];
    let mut fallbacks = 0;
    let mut resamples = 0;

    for topo in 0..cfg.topologies {
        let seed = cfg.master_seed.wrapping_add(topo as u64);
        let graph = match &cfg.topology {
            TopologySource::Geometric {
                n,
                delta,
                r,
                shape,
                reject_isolated,
            } => {
                let spec = TopologySpec {
                    n: *n,
                    delta: *delta,
                    r: *r,
                    shape: *shape,
                    seed,
                    p_fail_default: 0.0,
                };
                if *reject_isolated {
                    let (t, rejected) = generate_without_isolated(&spec, 10_000)?;
                    resamples += rejected;
                    t.graph
                } else {
                    generate_random_geometric(&spec)?.graph
                }
            }
            TopologySource::Mesh { n } => generate_full_mesh(*n, 0.0)?,
            TopologySource::File(_) => file_graph.clone().unwrap_or_else(|| unreachable!()),
        };
        let flows = select_flows(&graph, cfg.flows, cfg.master_seed, topo);

        if cfg.bound == BoundKind::Topology {
            for f in &flows {
                for (k, &p) in grid.iter().enumerate() {
                    bound_moments[k].push(sp_bound_topology(&graph, *f, p)?);
                }
            }
        }

        for (si, &strategy) in strategies.iter().enumerate() {
            let per_flow: Vec<(Vec<f64>, bool)> = flows
                .par_iter()
                .enumerate()
                .map(|(fi, &f)| evaluate_flow(cfg, &graph, f, strategy, &grid, topo, fi))
                .collect::<Result<_>>()?;
            for (values, fell_back) in per_flow {
                fallbacks += fell_back as usize;
                for (k, v) in values.into_iter().enumerate() {
                    cells[si][k].push(v);
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(strategies.len() * grid.len());
    for (si, &strategy) in strategies.iter().enumerate() {
        for (k, &p) in grid.iter().enumerate() {
            let sp_bound = match closed_params {
                Some(params) => sp_bound_closed(&params, p)?,
                None => bound_moments[k].mean,
            };
            rows.push(CurveRow {
                strategy,
                p,
                mean_tprr: cells[si][k].mean.clamp(0.0, 1.0),
                var_tprr: cells[si][k].sample_variance(),
                sp_bound,
            });
        }
    }
    Ok(SweepReport {
        table: CurveTable { rows },
        fallbacks,
        resamples,
    })
}

fn evaluate_flow(
    cfg: &SweepConfig,
    g: &ProbGraph,
    f: Flow,
    strategy: RdpStrategy,
    grid: &[f64],
    topo: usize,
    flow_index: usize,
) -> Result<(Vec<f64>, bool)> {
    let overlay = build_overlay(g, f, strategy);
    let sub_seed = |k: usize| derive_seed(&[cfg.master_seed, topo as u64, flow_index as u64, k as u64]);
    let trials = match cfg.method {
        Method::MonteCarlo { trials } => Some(trials),
        Method::Exact if overlay.edge_count() > cfg.guard => {
            if cfg.strict {
                return Err(Error::GuardExceeded {
                    m: overlay.edge_count(),
                    limit: cfg.guard,
                });
            }
            warn!(
                "{strategy} overlay for flow {f} on topology {topo} has {} edges (guard {}); using Monte-Carlo with {} trials",
                overlay.edge_count(),
                cfg.guard,
                cfg.fallback_trials
            );
            Some(cfg.fallback_trials)
        }
        Method::Exact => None,
    };
    let values = grid
        .iter()
        .enumerate()
        .map(|(k, &p)| match trials {
            Some(trials) => Ok(tprr_montecarlo(&overlay, Some(p), trials, sub_seed(k))?.estimate),
            None => Ok(tprr_exact(&overlay, Some(p))),
        })
        .collect::<Result<Vec<f64>>>()?;
    let fell_back = matches!(cfg.method, Method::Exact) && trials.is_some();
    Ok((values, fell_back))
}

pub const CSV_HEADER: [&str; 5] = ["strategy", "p", "mean_tprr", "var_tprr", "sp_bound"];

/// Fixed-point text with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 30) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv(table: &CurveTable, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in &table.rows {
        out.write_record([
            row.strategy.to_string(),
            format_sig12(row.p),
            format_sig12(row.mean_tprr),
            format_sig12(row.var_tprr),
            format_sig12(row.sp_bound),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(table: &CurveTable, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_csv(table, std::io::BufWriter::new(file))
}

pub fn read_csv(reader: impl Read) -> Result<CurveTable> {
    let mut input = csv::Reader::from_reader(reader);
    let header = input.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, "unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for (i, record) in input.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let num = |j: usize| -> Result<f64> {
            record
                .get(j)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(line, format!("bad value in column {}", CSV_HEADER[j])))
        };
        rows.push(CurveRow {
            strategy: record
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|e: Error| Error::parse(line, e.to_string()))?,
            p: num(1)?,
            mean_tprr: num(2)?,
            var_tprr: num(3)?,
            sp_bound: num(4)?,
        });
    }
    Ok(CurveTable { rows })
}
