//! The `ingest`, `analyze` and `metrics` commands as library calls.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use log::{info, warn};
use netpolar::centrality::{pagerank, weak_ties_subgraph, PageRankConfig};
use netpolar::community::{
    consensus_cluster_with_pagerank, louvain, modularity, run_seed, AnchorSet,
};
use netpolar::graph::{
    build_graph, giant_component, parse_interaction_log, DirectedGraph, ParsedLog,
};
use netpolar::report::{
    cluster_reports, cluster_size_distribution, ego_network, interaction_matrix, top_nodes_report,
};
use netpolar::tables;
use sha2::{Digest, Sha256};

use crate::config::{InputKind, RunConfig};

/// A failed command. Input failures cover bad flags, unreadable or
/// malformed files; everything else is a pipeline failure.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Pipeline(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Pipeline(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Pipeline(e) => e,
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

trait Classify<T> {
    fn input(self) -> Outcome<T>;
    fn stage(self, stage: &str) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Outcome<T> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn stage(self, stage: &str) -> Outcome<T> {
        self.map_err(|e| Failure::Pipeline(e.into().context(format!("{stage} failed"))))
    }
}

/// Output files held in memory until every stage has succeeded.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bundle {
    files: BTreeMap<String, String>,
}

impl Bundle {
    fn add(&mut self, name: String, contents: String) -> Outcome<()> {
        if self.files.insert(name.clone(), contents).is_some() {
            return Err(Failure::Pipeline(anyhow!(
                "two outputs map to the file name `{name}`"
            )));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    /// Writes every file into `dir`. On error the files written so far are
    /// removed, along with `dir` if this call created it.
    pub fn write(&self, dir: &Path) -> Outcome<()> {
        let created = !dir.exists();
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))
            .input()?;
        let mut written: Vec<PathBuf> = Vec::new();
        for (name, contents) in &self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, contents) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                if created {
                    let _ = fs::remove_dir(dir);
                }
                return Err(Failure::Pipeline(
                    anyhow::Error::new(e).context(format!("cannot write {}", path.display())),
                ));
            }
            written.push(path);
        }
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn read_file(path: &Path, what: &str) -> Outcome<Vec<u8>> {
    fs::read(path)
        .with_context(|| format!("cannot read {what} file {}", path.display()))
        .input()
}

struct LoadedLog {
    sha256: String,
    parsed: ParsedLog,
    kind: InputKind,
}

fn load_log(cfg: &RunConfig) -> Outcome<LoadedLog> {
    let path = cfg.input().input()?;
    let bytes = read_file(path, "input")?;
    let parsed = parse_interaction_log(bytes.as_slice())
        .with_context(|| format!("cannot parse {}", path.display()))
        .input()?;
    let kind = InputKind::from(parsed.kind);
    if let Some(expected) = cfg.input_kind {
        if expected != kind {
            return Err(Failure::Input(anyhow!(
                "{}: header describes {} but --input-kind is {}",
                path.display(),
                kind.as_str(),
                expected.as_str()
            )));
        }
    }
    if parsed.self_loops > 0 {
        info!("dropped {} self-loop events", parsed.self_loops);
    }
    Ok(LoadedLog {
        sha256: sha256_hex(&bytes),
        parsed,
        kind,
    })
}

/// The thresholded graph and the graph the analysis runs on.
struct Graphs {
    full: DirectedGraph,
    giant: DirectedGraph,
    giant_selected: bool,
}

impl Graphs {
    fn analysis(&self) -> &DirectedGraph {
        if self.giant_selected {
            &self.giant
        } else {
            &self.full
        }
    }
}

fn build(cfg: &RunConfig, log: &LoadedLog) -> Outcome<Graphs> {
    let full = build_graph(log.parsed.edges.iter().cloned(), cfg.min_weight)
        .stage("graph construction")?;
    if full.is_empty() {
        return Err(Failure::Pipeline(anyhow!(
            "graph construction failed: no edge reaches min_weight {}",
            cfg.min_weight
        )));
    }
    let giant = giant_component(&full).stage("giant component extraction")?;
    Ok(Graphs {
        full,
        giant,
        giant_selected: cfg.giant_component,
    })
}

/// Counts reported by `ingest`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IngestCounts {
    pub events: u64,
    pub self_loops: u64,
    pub edges: usize,
}

/// Aggregates the input log into a sorted `source,target,weight` table.
pub fn ingest(cfg: &RunConfig) -> Outcome<(String, IngestCounts)> {
    let log = load_log(cfg)?;
    let mut csv = Vec::new();
    netpolar::graph::write_edge_list(&mut csv, &log.parsed.edges).stage("edge list encoding")?;
    let counts = IngestCounts {
        events: log.parsed.events,
        self_loops: log.parsed.self_loops,
        edges: log.parsed.edges.len(),
    };
    Ok((String::from_utf8(csv).expect("UTF-8 ids"), counts))
}

fn run_pooled<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Outcome<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .stage("thread pool setup")?;
            Ok(pool.install(job))
        }
    }
}

/// Full pipeline: consensus clustering, profiles, matrices, rankings and
/// per-cluster distributions.
pub fn analyze(cfg: &RunConfig) -> Outcome<Bundle> {
    let anchors_path = cfg.anchors().input()?;
    let anchors_bytes = read_file(anchors_path, "anchors")?;
    let anchors = AnchorSet::from_csv(anchors_bytes.as_slice())
        .with_context(|| format!("cannot parse anchors file {}", anchors_path.display()))
        .input()?;
    let log = load_log(cfg)?;
    let graphs = build(cfg, &log)?;
    let g = graphs.analysis();
    for center in &cfg.ego {
        if !g.contains(center) {
            return Err(Failure::Input(anyhow!(
                "ego node `{center}` is not in the analysed graph"
            )));
        }
    }
    let manifest = cfg.manifest(log.kind, &log.sha256, &sha256_hex(&anchors_bytes));
    run_pooled(cfg.workers, || {
        analyze_graph(cfg, &graphs, &anchors, &log, manifest)
    })?
}

fn analyze_graph(
    cfg: &RunConfig,
    graphs: &Graphs,
    anchors: &AnchorSet,
    log: &LoadedLog,
    manifest: String,
) -> Outcome<Bundle> {
    let g = graphs.analysis();
    let pr_cfg = PageRankConfig {
        damping: cfg.damping,
        ..Default::default()
    };
    let pr = pagerank(g, &pr_cfg).stage("PageRank")?;
    let cc = consensus_cluster_with_pagerank(g, &cfg.consensus, anchors, &pr)
        .stage("consensus clustering")?;
    let first = louvain(g, run_seed(cfg.consensus.master_seed, 0)).stage("community detection")?;
    let first_q = modularity(g, &first).stage("modularity")?;
    let reports = cluster_reports(g, &cc);
    let profiles: Vec<_> = reports.iter().map(|r| r.profile.clone()).collect();
    let matrix = interaction_matrix(g, &cc, cfg.matrix_include_unassigned);
    let weak = weak_ties_subgraph(g, &cc, cfg.weak_ties_include_unassigned);
    let weak_csv = if weak.is_empty() {
        "node_id,pagerank\n".to_string()
    } else {
        tables::pagerank_csv(&pagerank(&weak, &pr_cfg).stage("weak-ties PageRank")?)
    };

    let mut bundle = Bundle::default();
    bundle.add("run_manifest.txt".into(), manifest)?;
    bundle.add("clusters.csv".into(), tables::clusters_csv(&cc))?;
    bundle.add(
        "profiles.csv".into(),
        tables::profiles_csv(&profiles, cfg.apl_mode.0),
    )?;
    bundle.add(
        "interaction_matrix.csv".into(),
        tables::interaction_matrix_csv(&matrix),
    )?;
    bundle.add(
        "interaction_matrix_raw.csv".into(),
        tables::interaction_matrix_raw_csv(&matrix),
    )?;
    bundle.add(
        "top_nodes.csv".into(),
        tables::top_nodes_csv(&top_nodes_report(&cc, &pr, cfg.top_k)),
    )?;
    bundle.add(
        "cluster_sizes.csv".into(),
        tables::cluster_sizes_csv(&cluster_size_distribution(&first)),
    )?;
    bundle.add("pagerank.csv".into(), tables::pagerank_csv(&pr))?;
    bundle.add("weak_ties_pagerank.csv".into(), weak_csv)?;
    for r in &reports {
        let stem = tables::file_stem(&r.profile.label);
        bundle.add(
            format!("lorenz_{stem}.csv"),
            tables::lorenz_csv(r.lorenz.as_ref()),
        )?;
        bundle.add(
            format!("indegree_{stem}.csv"),
            tables::indegree_csv(&r.in_degree),
        )?;
        bundle.add(format!("kcore_{stem}.csv"), tables::kcore_csv(&r.cores))?;
    }
    for center in &cfg.ego {
        let ego = ego_network(g, center).stage("ego network extraction")?;
        bundle.add(
            format!("ego_{}.csv", tables::file_stem(center)),
            tables::edge_list_csv(&ego),
        )?;
    }

    let stable: usize = cc.clusters().iter().map(|c| c.members.len()).sum();
    let mut summary = String::new();
    let mut line = |k: &str, v: String| summary.push_str(&format!("{k}={v}\n"));
    line("events", log.parsed.events.to_string());
    line("self_loops_dropped", log.parsed.self_loops.to_string());
    line("aggregated_pairs", log.parsed.edges.len().to_string());
    line("nodes", graphs.full.node_count().to_string());
    line("edges", graphs.full.edge_count().to_string());
    line(
        "giant_component_nodes",
        graphs.giant.node_count().to_string(),
    );
    line(
        "giant_component_edges",
        graphs.giant.edge_count().to_string(),
    );
    line(
        "analysed_graph",
        if graphs.giant_selected {
            "giant_component"
        } else {
            "full"
        }
        .to_string(),
    );
    line("first_run_modularity", format!("{first_q:.6}"));
    line("first_run_communities", first.community_count().to_string());
    line("clusters", cc.clusters().len().to_string());
    line("stable_nodes", stable.to_string());
    line("unassigned_nodes", cc.unassigned().len().to_string());
    bundle.add("summary.txt".into(), summary)?;
    Ok(bundle)
}

/// Recomputes `profiles.csv` for a stored assignment.
pub fn metrics(cfg: &RunConfig) -> Outcome<Bundle> {
    let clusters_path = cfg.clusters().input()?;
    let clusters_bytes = read_file(clusters_path, "clusters")?;
    let log = load_log(cfg)?;
    let graphs = build(cfg, &log)?;
    let g = graphs.analysis();
    let cc = tables::read_clusters_csv(clusters_bytes.as_slice(), g)
        .with_context(|| format!("cannot use clusters file {}", clusters_path.display()))
        .input()?;
    if cc.clusters().is_empty() {
        warn!(
            "no labelled clusters in {}; profiles are empty",
            clusters_path.display()
        );
    }
    let profiles = run_pooled(cfg.workers, || netpolar::report::cluster_profiles(g, &cc))?;
    let mut bundle = Bundle::default();
    bundle.add(
        "profiles.csv".into(),
        tables::profiles_csv(&profiles, cfg.apl_mode.0),
    )?;
    Ok(bundle)
}
