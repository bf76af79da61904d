use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperoracle::eval::{emit_profile_csv, evaluate, BfsOracle};
use hyperoracle::exact::{
    exact_all_pairs, sample_pairs_with, PairSample, DEFAULT_ALL_PAIRS_CAP, DEFAULT_PAIRS_PER_SOURCE,
};
use hyperoracle::graph::{
    flat_grid, hyper_grid, largest_component, load_edge_list, read_binary, read_graph_file, write_binary,
    write_edge_list, LoadOptions, LoadedGraph,
};
use hyperoracle::hyperbolicity::{estimate_delta, exact_delta, DeltaEstimate};
use hyperoracle::range::{range_width_report, LogBase, RangeOracle};
use hyperoracle::tree::{select_roots, Expansion, OracleConfig, RootStrategy, TreeKind, TreeOracle};
use hyperoracle::{Error, Graph, GraphStats, HalfHops, NodeId};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "hyperoracle", version, about = "Tree-based distance oracles for large undirected graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print node/edge counts and degree statistics of a graph.
    LoadStats {
        /// Edge list or binary graph; stdin when omitted or "-".
        file: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Generate a synthetic graph.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Write the binary graph format instead of an edge list.
        #[arg(long, global = true)]
        binary: bool,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Estimate the four-point hyperbolicity constant.
    Delta {
        #[command(flatten)]
        graph: GraphArgs,
        /// Nodes sampled; all nodes when at least n.
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        /// Quadruple budget; exhaustive when all quadruples fit.
        #[arg(long, default_value_t = 10_000_000)]
        quadruples: u64,
        #[arg(long)]
        seed: u64,
        /// All quadruples of all nodes from an all-pairs table.
        #[arg(long)]
        exhaustive: bool,
        /// Largest graph accepted by --exhaustive.
        #[arg(long, default_value_t = DEFAULT_ALL_PAIRS_CAP)]
        cap: usize,
    },
    /// Build a tree oracle and write it in binary form.
    Build {
        kind: KindArg,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = hyperoracle::tree::DEFAULT_TREE_COUNT)]
        k: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Degree)]
        strategy: StrategyArg,
        /// Sibling expansion order for hyperbfs trees.
        #[arg(long, value_enum, default_value_t = ExpansionArg::Dec)]
        expansion: ExpansionArg,
        #[arg(long)]
        seed: u64,
        /// Oracle file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the distance between two nodes.
    Query {
        #[command(flatten)]
        oracle: OracleArgs,
        x: u64,
        y: u64,
    },
    /// Estimate distances for every "x y" line of a file.
    QueryBatch {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Pair file; stdin when "-".
        file: PathBuf,
    },
    /// Sample node pairs with exact distances.
    Pairs {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PAIRS_PER_SOURCE)]
        per_source: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distortion of an oracle against exact distances, bucketed by distance.
    Eval {
        #[command(flatten)]
        graph: GraphArgs,
        /// Oracle file built from the same graph.
        #[arg(long, required_unless_present = "self_check")]
        oracle: Option<PathBuf>,
        /// Evaluate exact BFS distances instead of an oracle.
        #[arg(long)]
        self_check: bool,
        /// Number of sampled pairs.
        #[arg(long, conflicts_with = "pairs_file", required_unless_present = "pairs_file")]
        pairs: Option<usize>,
        /// Pair sample written by `pairs`.
        #[arg(long)]
        pairs_file: Option<PathBuf>,
        /// Seed for sampling pairs.
        #[arg(long, required_unless_present = "pairs_file")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Guaranteed distance ranges from hyperbfs and gromov trees.
    Range {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = hyperoracle::range::DEFAULT_HYPER_TREES)]
        kh: usize,
        #[arg(long, default_value_t = hyperoracle::range::DEFAULT_GROMOV_TREES)]
        kg: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Degree)]
        strategy: StrategyArg,
        /// Delta for the additive term, such as 1.5, or "auto" to estimate it.
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, default_value_t = 1000)]
        delta_nodes: usize,
        #[arg(long, default_value_t = 10_000_000)]
        delta_quadruples: u64,
        /// Use ln n instead of log2 n in the additive term.
        #[arg(long)]
        natural_log: bool,
        #[arg(long)]
        seed: u64,
        /// Print the range of one pair instead of a report.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        pair: Option<Vec<u64>>,
        /// Pairs in the width report.
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time graph loading, hyperbfs building and queries.
    Bench {
        /// Graph file (edge list or binary).
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Trees to build.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        queries: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// k x k lattice.
    Flatgrid {
        #[arg(long)]
        k: usize,
    },
    /// Triangulated {3,7} tiling with the given number of rings.
    Hypergrid {
        #[arg(long)]
        rings: usize,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Treat lines as arcs; reciprocal arcs merge into one edge.
    #[arg(long)]
    directed: bool,
    #[arg(long, default_value = "#")]
    comment: String,
    /// Keep only the largest connected component.
    #[arg(long)]
    lcc: bool,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list or binary graph; stdin when omitted or "-".
    #[arg(long, short)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    oracle: PathBuf,
    /// Graph the oracle was built from; node ids are then read as input ids.
    #[arg(long, short)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hyperbfs,
    Gromov,
    Steiner,
}

impl From<KindArg> for TreeKind {
    fn from(k: KindArg) -> TreeKind {
        match k {
            KindArg::Hyperbfs => TreeKind::HyperBfs,
            KindArg::Gromov => TreeKind::Gromov,
            KindArg::Steiner => TreeKind::Steiner,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Degree,
    Closeness,
    Diverse,
    Random,
}

impl From<StrategyArg> for RootStrategy {
    fn from(s: StrategyArg) -> RootStrategy {
        match s {
            StrategyArg::Degree => RootStrategy::Degree,
            StrategyArg::Closeness => RootStrategy::Closeness,
            StrategyArg::Diverse => RootStrategy::Diverse,
            StrategyArg::Random => RootStrategy::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpansionArg {
    /// Highest degree first.
    Dec,
    /// Lowest degree first.
    Inc,
}

impl From<ExpansionArg> for Expansion {
    fn from(e: ExpansionArg) -> Expansion {
        match e {
            ExpansionArg::Dec => Expansion::DegreeDescending,
            ExpansionArg::Inc => Expansion::DegreeAscending,
        }
    }
}

impl InputArgs {
    fn options(&self) -> LoadOptions {
        LoadOptions { comment_prefix: self.comment.clone(), undirected: !self.directed, ..LoadOptions::default() }
    }

    fn load(&self, path: Option<&Path>) -> anyhow::Result<LoadedGraph> {
        let opts = self.options();
        let loaded = match path {
            Some(p) if p != Path::new("-") => {
                read_graph_file(p, &opts).with_context(|| format!("reading {}", p.display()))?
            }
            _ => {
                let mut bytes = Vec::new();
                io::stdin().lock().read_to_end(&mut bytes).context("reading stdin")?;
                if bytes.starts_with(b"HOGR") {
                    let graph = read_binary(&bytes[..])?;
                    let relabel = hyperoracle::graph::Relabel::identity(graph.n());
                    LoadedGraph { graph, relabel, report: Default::default() }
                } else {
                    load_edge_list(&bytes[..], &opts)?
                }
            }
        };
        if !self.lcc {
            return Ok(loaded);
        }
        let (graph, kept) = largest_component(&loaded.graph);
        info!("largest component keeps {} of {} nodes", graph.n(), loaded.graph.n());
        Ok(LoadedGraph { relabel: loaded.relabel.restrict(&kept), graph, report: loaded.report })
    }
}

impl GraphArgs {
    fn load(&self) -> anyhow::Result<LoadedGraph> {
        self.input.load(self.graph.as_deref())
    }
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => {
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Maps input ids to dense ids when a graph is known.
struct Ids(Option<LoadedGraph>);

impl Ids {
    fn node(&self, external: u64, n: usize) -> anyhow::Result<NodeId> {
        let node = match &self.0 {
            Some(l) => l.relabel.to_node(external).ok_or(Error::NodeOutOfRange { node: external, n })?,
            None if external < n as u64 => external as NodeId,
            None => return Err(Error::NodeOutOfRange { node: external, n }.into()),
        };
        Ok(node)
    }
}

fn open_oracle(args: &OracleArgs) -> anyhow::Result<(TreeOracle, Ids)> {
    let file = File::open(&args.oracle).with_context(|| format!("opening {}", args.oracle.display()))?;
    let oracle = TreeOracle::load(file).with_context(|| format!("reading {}", args.oracle.display()))?;
    let ids = match &args.graph {
        Some(p) => {
            let loaded = args.input.load(Some(p))?;
            if loaded.graph.n() != oracle.n() {
                return Err(Error::SizeMismatch { oracle: oracle.n(), graph: loaded.graph.n() }.into());
            }
            Ids(Some(loaded))
        }
        None => Ids(None),
    };
    Ok((oracle, ids))
}

fn median(mut runs: Vec<Duration>) -> Duration {
    runs.sort_unstable();
    runs[runs.len() / 2]
}

/// One untimed warm-up, then the median of three timed runs.
fn timed<T>(mut f: impl FnMut() -> anyhow::Result<T>) -> anyhow::Result<(Duration, T)> {
    let mut last = f()?;
    let mut runs = Vec::with_capacity(3);
    for _ in 0..3 {
        let started = Instant::now();
        last = f()?;
        runs.push(started.elapsed());
    }
    Ok((median(runs), last))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::LoadStats { file, input } => {
            let loaded = input.load(file.as_deref())?;
            println!("{}", GraphStats::of(&loaded.graph));
            let r = loaded.report;
            if r.self_loops + r.duplicate_edges + r.collapsed_reverse_arcs > 0 {
                eprintln!(
                    "dropped {} self-loops, {} duplicate edges; merged {} reciprocal arcs",
                    r.self_loops, r.duplicate_edges, r.collapsed_reverse_arcs
                );
            }
        }
        Command::Gen { family, binary, out } => {
            let g = match family {
                GenFamily::Flatgrid { k } => flat_grid(k)?,
                GenFamily::Hypergrid { rings } => hyper_grid(rings)?,
            };
            let mut w = sink(out.as_deref())?;
            if binary {
                write_binary(&g, &mut w)?;
            } else {
                write_edge_list(&g, &mut w)?;
            }
            w.flush()?;
        }
        Command::Delta { graph, nodes, quadruples, seed, exhaustive, cap } => {
            let g = graph.load()?.graph;
            let est = if exhaustive {
                let mut est = exact_delta(&exact_all_pairs(&g, cap)?)?;
                est.seed = seed;
                est
            } else {
                estimate_delta(&g, nodes, quadruples, seed)?
            };
            println!("{}", DeltaEstimate::CSV_HEADER);
            println!("{}", est.csv_row());
        }
        Command::Build { kind, graph, k, strategy, expansion, seed, out } => {
            let g = graph.load()?.graph;
            let cfg =
                OracleConfig { kind: kind.into(), k, strategy: strategy.into(), expansion: expansion.into(), seed };
            let oracle = TreeOracle::build(&g, &cfg)?;
            if let Some(meta) = oracle.meta() {
                info!("built {} {} trees in {:.3}s", oracle.k(), oracle.kind(), meta.build_time.as_secs_f64());
            }
            let mut w = sink(out.as_deref())?;
            oracle.save(&mut w)?;
            w.flush()?;
        }
        Command::Query { oracle, x, y } => {
            let (o, ids) = open_oracle(&oracle)?;
            let (x, y) = (ids.node(x, o.n())?, ids.node(y, o.n())?);
            println!("{}", o.query(x, y));
        }
        Command::QueryBatch { oracle, file } => {
            let (o, ids) = open_oracle(&oracle)?;
            let reader: Box<dyn BufRead> = if file == Path::new("-") {
                Box::new(BufReader::new(io::stdin().lock()))
            } else {
                Box::new(BufReader::new(File::open(&file).with_context(|| format!("opening {}", file.display()))?))
            };
            let mut w = sink(None)?;
            writeln!(w, "x,y,estimate")?;
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') || t.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    continue;
                }
                let mut parts = t.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
                let mut next = || -> anyhow::Result<u64> {
                    let tok = parts.next().ok_or(Error::Parse { line: i + 1, msg: "expected two node ids".into() })?;
                    Ok(tok.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad node id {tok:?}") })?)
                };
                let (ex, ey) = (next()?, next()?);
                let est = o.query(ids.node(ex, o.n())?, ids.node(ey, o.n())?);
                writeln!(w, "{ex},{ey},{est}")?;
            }
            w.flush()?;
        }
        Command::Pairs { graph, count, seed, per_source, out } => {
            let g = graph.load()?.graph;
            let sample = sample_pairs_with(&g, count, seed, per_source)?;
            let mut w = sink(out.as_deref())?;
            sample.write_csv(&mut w)?;
        }
        Command::Eval { graph, oracle, self_check, pairs, pairs_file, seed, out } => {
            let g = graph.load()?.graph;
            let sample = load_or_sample(&g, pairs, pairs_file.as_deref(), seed.unwrap_or(0))?;
            let profile = if self_check {
                evaluate(&g, &BfsOracle::new(&g), &sample)?
            } else {
                let path = oracle.expect("clap requires --oracle without --self-check");
                let o = TreeOracle::load(File::open(&path).with_context(|| format!("opening {}", path.display()))?)?;
                evaluate(&g, &o, &sample)?
            };
            info!(
                "{} pairs: mean absolute error {:.4} (standard error {:.4})",
                profile.pairs(),
                profile.mean_absolute(),
                profile.stderr_absolute()
            );
            emit_profile_csv(&profile, sink(out.as_deref())?)?;
        }
        Command::Range {
            graph,
            kh,
            kg,
            strategy,
            delta,
            delta_nodes,
            delta_quadruples,
            natural_log,
            seed,
            pair,
            pairs,
            out,
        } => {
            let loaded = graph.load()?;
            let g = &loaded.graph;
            let (delta, sampled) = if delta == "auto" {
                let est = estimate_delta(g, delta_nodes, delta_quadruples, seed)?;
                (est.max_delta, est.sample_node_count < g.n())
            } else {
                let d = HalfHops::parse(&delta)
                    .ok_or_else(|| Error::InvalidArgument(format!("delta {delta:?} is not a multiple of 0.5")))?;
                (d, false)
            };
            let roots = select_roots(g, strategy.into(), kh.max(kg), seed)?;
            let h = TreeOracle::from_roots(g, TreeKind::HyperBfs, &roots[..kh], Expansion::default())?;
            let gr = TreeOracle::from_roots(g, TreeKind::Gromov, &roots[..kg], Expansion::default())?;
            let base = if natural_log { LogBase::Natural } else { LogBase::Two };
            let o = RangeOracle::new(h, gr, delta, base)?;
            if let Some(p) = pair {
                let ids = Ids(Some(loaded.clone()));
                let r = o.range_query(ids.node(p[0], g.n())?, ids.node(p[1], g.n())?);
                println!("{},{}", r.lower, r.upper);
                return Ok(());
            }
            let sample = sample_pairs_with(g, pairs, seed, DEFAULT_PAIRS_PER_SOURCE)?;
            let report = range_width_report(&o, &sample)?;
            let mut w = sink(out.as_deref())?;
            writeln!(
                w,
                "# delta={}{} additive={} pairs={} containment_failures={} width_violations={} max_width={}",
                delta,
                if sampled { " (sampled; containment is statistical)" } else { "" },
                o.additive(),
                report.pairs,
                report.containment_failures,
                report.width_violations,
                report.max_width
            )?;
            report.write_csv(&mut w)?;
        }
        Command::Bench { file, input, k, queries, seed } => {
            let (load, g) = timed(|| Ok(input.load(Some(&file))?.graph))?;
            let cfg = OracleConfig { k, ..OracleConfig::new(TreeKind::HyperBfs) };
            let (build, oracle) = timed(|| Ok(TreeOracle::build(&g, &cfg)?))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = g.n();
            let pairs: Vec<(NodeId, NodeId)> =
                (0..queries).map(|_| (rng.gen_range(0..n) as NodeId, rng.gen_range(0..n) as NodeId)).collect();
            let (query, checksum) =
                timed(|| Ok(pairs.iter().map(|&(x, y)| oracle.query(x, y).doubled()).sum::<u64>()))?;
            println!(
                "# n={} m={} trees={k} queries={queries} checksum={checksum}; median of 3 after one warm-up",
                n,
                g.m()
            );
            println!("loading_graph_s,hyper_bfs_tree_s,queries_s");
            println!("{:.3},{:.3},{:.3}", load.as_secs_f64(), build.as_secs_f64(), query.as_secs_f64());
        }
    }
    Ok(())
}

fn load_or_sample(g: &Graph, count: Option<usize>, file: Option<&Path>, seed: u64) -> anyhow::Result<PairSample> {
    match (count, file) {
        (_, Some(p)) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Ok(PairSample::read_csv(BufReader::new(f))?)
        }
        (Some(c), None) => Ok(sample_pairs_with(g, c, seed, DEFAULT_PAIRS_PER_SOURCE)?),
        (None, None) => bail!(Error::InvalidArgument("give --pairs or --pairs-file".into())),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::CapExceeded { .. } => EXIT_CAP,
                Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return EXIT_INPUT;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.chain()
                .any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
