use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tprr::bounds::{avg_hop_distance, sp_bound_closed, sp_bound_topology, NetworkParams};
use tprr::formats::{read_dump, read_graph, read_overlay, write_coords, write_graph, write_overlay, write_spectrum};
use tprr::reliability::{
    cutset_spectrum, tprr_bruteforce, tprr_exact, tprr_montecarlo, ReliabilityPolynomial, DEFAULT_GUARD,
};
use tprr::sweep::{emit_csv, run_sweep, write_csv, SweepConfig};
use tprr::topology::{degree_stats, generate_full_mesh, generate_random_geometric, generate_without_isolated, Shape, TopologySpec};
use tprr::{build_overlay, overlay_from_tables, Error, Flow, RdpStrategy};

/// Terminal-pair routing reliability of route-discovery overlays.
///
/// Exit status: 0 on success, 1 on usage or input errors, 2 when a model
/// constraint is violated (enumeration guard, inconsistent routing dump,
/// invalid graph).
#[derive(Parser)]
#[command(name = "tprr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a physical topology (graph file plus coordinate sidecar).
    Gen(GenArgs),
    /// Build the overlay a strategy discovers for one flow.
    Overlay(OverlayArgs),
    /// Evaluate the TPRR of an overlay file.
    Tprr(TprrArgs),
    /// Write the cutset spectrum and reliability polynomial of an overlay.
    Poly(PolyArgs),
    /// Shortest-path upper bound, closed form or from a graph.
    Bound(BoundArgs),
    /// Run a sweep config and write the curve table as CSV.
    Sweep(SweepArgs),
    /// Build a flow's overlay from a routing-table dump.
    Tables(TablesArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Node count.
    #[arg(long, default_value_t = 16)]
    nodes: usize,
    /// Node density in nodes/km².
    #[arg(long, default_value_t = 64.0)]
    density: f64,
    /// Transmission range in km.
    #[arg(long, default_value_t = 0.254)]
    range: f64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Circle)]
    shape: ShapeArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Failure probability stored on every generated edge.
    #[arg(long, default_value_t = 0.1)]
    p_fail: f64,
    /// Generate a full mesh instead of a random geometric graph.
    #[arg(long)]
    mesh: bool,
    /// Redraw placements until no node is isolated.
    #[arg(long)]
    reject_isolated: bool,
    /// Graph file to write (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coordinate sidecar file to write.
    #[arg(long)]
    coords: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Circle,
    Square,
}

#[derive(Args)]
struct FlowArgs {
    /// Source node.
    #[arg(long)]
    src: usize,
    /// Destination node.
    #[arg(long)]
    dst: usize,
}

#[derive(Args)]
struct OverlayArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    flow: FlowArgs,
    /// shortest | kdisjoint:<k> | klimited:<k> | full
    #[arg(long, default_value = "shortest")]
    strategy: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Brute,
    Mc,
}

#[derive(Args)]
struct TprrArgs {
    #[arg(long)]
    overlay: PathBuf,
    /// Uniform failure probability; the stored per-edge values otherwise.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Edge limit for enumeration.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: usize,
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long)]
    overlay: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, conflicts_with = "graph")]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 64.0)]
    density: f64,
    #[arg(long, default_value_t = 0.254)]
    range: f64,
    /// Use the physical hop distance of `--src -> --dst` in this graph.
    #[arg(long, requires_all = ["src", "dst"])]
    graph: Option<PathBuf>,
    #[arg(long)]
    src: Option<usize>,
    #[arg(long)]
    dst: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's `output`; stdout when neither is set.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fail instead of falling back to Monte-Carlo on oversized overlays.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    dump: PathBuf,
    #[command(flatten)]
    flow: FlowArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open(path: &Path) -> tprr::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?))
}

fn output(path: Option<&Path>) -> tprr::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> tprr::Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let (graph, coords) = if a.mesh {
                (generate_full_mesh(a.nodes, a.p_fail)?, None)
            } else {
                let spec = TopologySpec {
                    n: a.nodes,
                    delta: a.density,
                    r: a.range,
                    shape: match a.shape {
                        ShapeArg::Circle => Shape::Circle,
                        ShapeArg::Square => Shape::Square,
                    },
                    seed: a.seed,
                    p_fail_default: a.p_fail,
                };
                let topo = if a.reject_isolated {
                    let (topo, rejected) = generate_without_isolated(&spec, 10_000)?;
                    eprintln!("rejected {rejected} placements with isolated nodes");
                    topo
                } else {
                    generate_random_geometric(&spec)?
                };
                (topo.graph, Some(topo.coords))
            };
            let (mean, min, max) = degree_stats(&graph);
            eprintln!(
                "{} nodes, {} edges, out-degree mean {mean:.3} min {min} max {max}",
                graph.node_count(),
                graph.edge_count()
            );
            let mut w = output(a.out.as_deref())?;
            write_graph(&graph, &mut w)?;
            w.flush()?;
            if let (Some(path), Some(coords)) = (a.coords, coords) {
                let mut w = output(Some(&path))?;
                write_coords(&coords, &mut w)?;
                w.flush()?;
            }
        }
        Command::Overlay(a) => {
            let g = read_graph(open(&a.graph)?)?;
            let f = Flow::new(a.flow.src, a.flow.dst)?;
            g.check_flow(f)?;
            let strategy: RdpStrategy = a.strategy.parse()?;
            let o = build_overlay(&g, f, strategy);
            let mut w = output(a.out.as_deref())?;
            write_overlay(&o, &mut w)?;
            w.flush()?;
        }
        Command::Tprr(a) => {
            let file = read_overlay(open(&a.overlay)?)?;
            let o = file.overlay();
            match a.method {
                MethodArg::Exact => {
                    if let Some(p) = a.p {
                        if !(0.0..=1.0).contains(&p) {
                            return Err(Error::InvalidProbability(p));
                        }
                    }
                    println!("{}", tprr_exact(&o, a.p));
                }
                MethodArg::Brute => println!("{}", tprr_bruteforce(&o, a.p, a.guard)?),
                MethodArg::Mc => {
                    let est = tprr_montecarlo(&o, a.p, a.trials, a.seed)?;
                    println!(
                        "{} std_error {} trials {} seed {}",
                        est.estimate, est.std_error, est.trials, est.seed
                    );
                }
            }
        }
        Command::Poly(a) => {
            let file = read_overlay(open(&a.overlay)?)?;
            let spectrum = cutset_spectrum(&file.overlay(), a.guard)?;
            let poly = ReliabilityPolynomial::from_spectrum(&spectrum);
            let mut w = output(a.out.as_deref())?;
            write_spectrum(&spectrum, Some(&poly), &mut w)?;
            w.flush()?;
        }
        Command::Bound(a) => match (a.graph, a.nodes) {
            (Some(path), _) => {
                let g = read_graph(open(&path)?)?;
                let f = Flow::new(a.src.unwrap_or(0), a.dst.unwrap_or(0))?;
                g.check_flow(f)?;
                println!("{}", sp_bound_topology(&g, f, a.p)?);
            }
            (None, Some(n)) => {
                let params = NetworkParams::from_density(n, a.density, a.range)?;
                println!(
                    "{} hops {}",
                    sp_bound_closed(&params, a.p)?,
                    avg_hop_distance(&params)?
                );
            }
            (None, None) => {
                return Err(Error::InvalidParameter("bound needs --nodes or --graph".into()));
            }
        },
        Command::Sweep(a) => {
            let mut cfg = SweepConfig::from_path(&a.config)?;
            cfg.strict |= a.strict;
            if a.output.is_some() {
                cfg.output = a.output;
            }
            let report = run_sweep(&cfg)?;
            if report.fallbacks > 0 {
                eprintln!("{} overlays evaluated by Monte-Carlo fallback", report.fallbacks);
            }
            if report.resamples > 0 {
                eprintln!("{} placements rejected for isolated nodes", report.resamples);
            }
            match &cfg.output {
                Some(path) => emit_csv(&report.table, path)?,
                None => write_csv(&report.table, io::stdout().lock())?,
            }
        }
        Command::Tables(a) => {
            let g = read_graph(open(&a.graph)?)?;
            let dump = read_dump(open(&a.dump)?)?;
            let f = Flow::new(a.flow.src, a.flow.dst)?;
            let o = overlay_from_tables(&g, &dump, f)?;
            let mut w = output(a.out.as_deref())?;
            write_overlay(&o, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_consistency_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
