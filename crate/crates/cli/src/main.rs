use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use netpolar_cli::config::AplMode;
use netpolar_cli::{Failure, InputKind, Outcome, PartialConfig, RunConfig};

/// Polarized community detection and structural profiling of interaction
/// networks.
#[derive(Parser)]
#[command(name = "netpolar", version)]
struct Cli {
    /// Flat key=value file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a raw log into a sorted source,target,weight CSV.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and write the report bundle.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute profiles.csv for an existing clusters.csv.
    Metrics {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// node_id,label,stability assignment.
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long, value_name = "MODE")]
        apl_mode: Option<AplMode>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Interaction log: source,target (events) or source,target,weight.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Expected layout; detected from the header when omitted.
    #[arg(long, value_name = "events|edges")]
    input_kind: Option<InputKind>,
}

#[derive(Args)]
struct GraphArgs {
    /// Drop edges lighter than this [default: 3].
    #[arg(long)]
    min_weight: Option<u64>,
    /// Restrict the analysis to the largest weakly connected component.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    giant_component: Option<bool>,
}

#[derive(Args)]
struct AnalysisArgs {
    /// Ensemble size [default: 100].
    #[arg(long)]
    runs: Option<usize>,
    /// Tolerated fraction of dissenting runs [default: 0.05].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// PageRank damping [default: 0.85].
    #[arg(long)]
    damping: Option<f64>,
    /// label,node_id table of cluster anchors.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// paper-literal or reachable-only [default: paper-literal].
    #[arg(long, value_name = "MODE")]
    apl_mode: Option<AplMode>,
    /// Keep edges touching unassigned nodes in the weak-ties graph.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    weak_ties_include_unassigned: Option<bool>,
    /// Add an unassigned column to the interaction matrix.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    matrix_include_unassigned: Option<bool>,
    /// Nodes listed per cluster in top_nodes.csv [default: 5].
    #[arg(long)]
    top_k: Option<usize>,
    /// Write the ego network of this node (repeatable).
    #[arg(long)]
    ego: Vec<String>,
    /// Worker threads [default: one per core].
    #[arg(long)]
    workers: Option<usize>,
}

impl InputArgs {
    fn apply(self, cfg: &mut PartialConfig) {
        cfg.input = self.input;
        cfg.input_kind = self.input_kind;
    }
}

impl GraphArgs {
    fn apply(self, cfg: &mut PartialConfig) {
        cfg.min_weight = self.min_weight;
        cfg.giant_component = self.giant_component;
    }
}

impl AnalysisArgs {
    fn apply(self, cfg: &mut PartialConfig) {
        cfg.runs = self.runs;
        cfg.epsilon = self.epsilon;
        cfg.seed = self.seed;
        cfg.damping = self.damping;
        cfg.anchors = self.anchors;
        cfg.apl_mode = self.apl_mode;
        cfg.weak_ties_include_unassigned = self.weak_ties_include_unassigned;
        cfg.matrix_include_unassigned = self.matrix_include_unassigned;
        cfg.top_k = self.top_k;
        cfg.ego = (!self.ego.is_empty()).then_some(self.ego);
        cfg.workers = self.workers;
    }
}

fn resolve(config: Option<PathBuf>, flags: PartialConfig) -> Outcome<RunConfig> {
    let file = match config {
        Some(path) => fs::read_to_string(&path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .and_then(|text| {
                PartialConfig::parse(&text)
                    .with_context(|| format!("invalid config file {}", path.display()))
            })
            .map_err(Failure::Input)?,
        None => PartialConfig::default(),
    };
    flags.or(file).resolve().map_err(Failure::Input)
}

fn run(cli: Cli) -> Outcome<()> {
    let mut flags = PartialConfig::default();
    match cli.command {
        Command::Ingest { input, out } => {
            input.apply(&mut flags);
            flags.out = out;
            let cfg = resolve(cli.config, flags)?;
            let (csv, counts) = netpolar_cli::ingest(&cfg)?;
            let report = format!(
                "events: {}\nself-loops dropped: {}\nedges: {}",
                counts.events, counts.self_loops, counts.edges
            );
            match &cfg.out {
                Some(path) => {
                    fs::write(path, csv)
                        .with_context(|| format!("cannot write {}", path.display()))
                        .map_err(Failure::Input)?;
                    println!("{report}");
                }
                None => {
                    print!("{csv}");
                    eprintln!("{report}");
                }
            }
            Ok(())
        }
        Command::Analyze {
            input,
            graph,
            analysis,
            out,
        } => {
            input.apply(&mut flags);
            graph.apply(&mut flags);
            analysis.apply(&mut flags);
            flags.out = out;
            let cfg = resolve(cli.config, flags)?;
            let out = cfg.out().map_err(Failure::Input)?.clone();
            netpolar_cli::analyze(&cfg)?.write(&out)
        }
        Command::Metrics {
            input,
            graph,
            clusters,
            apl_mode,
            workers,
            out,
        } => {
            input.apply(&mut flags);
            graph.apply(&mut flags);
            flags.clusters = clusters;
            flags.apl_mode = apl_mode;
            flags.workers = workers;
            flags.out = out;
            let cfg = resolve(cli.config, flags)?;
            let out = cfg.out().map_err(Failure::Input)?.clone();
            netpolar_cli::metrics(&cfg)?.write(&out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.exit_code())
        }
    }
}
