use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use log::warn;
use rayon::prelude::*;

use super::{louvain, Partition};
use crate::centrality::{pagerank, PageRankConfig, PageRankVector};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Label reserved for nodes outside every stable cluster.
pub const UNASSIGNED_LABEL: &str = "__unassigned__";

/// Labelled groups of anchor accounts, in priority order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnchorSet {
    entries: Vec<(String, Vec<NodeId>)>,
}

impl AnchorSet {
    pub fn new(entries: Vec<(String, Vec<NodeId>)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (label, _) in &entries {
            if label.is_empty() || label == UNASSIGNED_LABEL {
                return Err(Error::InvalidParameter(format!(
                    "invalid anchor label `{label}`"
                )));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate anchor label `{label}`"
                )));
            }
        }
        Ok(AnchorSet { entries })
    }

    /// Reads `label,node_id` rows. Rows sharing a label are grouped; labels
    /// keep their order of first appearance.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let header: Vec<String> = csv
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if header != ["label", "node_id"] {
            return Err(Error::Parse {
                row: 1,
                message: format!(
                    "expected header `label,node_id`, got `{}`",
                    header.join(",")
                ),
            });
        }
        let mut entries: Vec<(String, Vec<NodeId>)> = Vec::new();
        for (i, rec) in csv.records().enumerate() {
            let row = i as u64 + 2;
            let rec = rec?;
            if rec.len() != 2 || rec[0].is_empty() {
                return Err(Error::Parse {
                    row,
                    message: "expected `label,node_id`".into(),
                });
            }
            let id = NodeId::new(&rec[1]).map_err(|_| Error::Parse {
                row,
                message: "empty node id".into(),
            })?;
            match entries.iter_mut().find(|(l, _)| l == &rec[0]) {
                Some((_, ids)) => ids.push(id),
                None => entries.push((rec[0].to_string(), vec![id])),
            }
        }
        AnchorSet::new(entries)
    }

    pub fn entries(&self) -> &[(String, Vec<NodeId>)] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ensemble size, tolerance and seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsensusConfig {
    pub runs: usize,
    pub epsilon: f64,
    pub master_seed: u64,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        ConsensusConfig {
            runs: 100,
            epsilon: 0.05,
            master_seed: 0,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Minimum number of runs, `⌈(1−ε)·N⌉`, a node must spend under one
    /// label. The small slack absorbs representation error so that
    /// `ε = 0.05, N = 100` yields 95.
    pub fn threshold(&self) -> usize {
        let raw = (1.0 - self.epsilon) * self.runs as f64;
        ((raw - 1e-9).ceil() as usize).max(1)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of ensemble run `run`: `splitmix64(splitmix64(master) ^ run)`.
/// Earlier runs keep their seeds when the ensemble grows.
pub fn run_seed(master_seed: u64, run: usize) -> u64 {
    splitmix64(splitmix64(master_seed) ^ run as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub label: String,
    /// Sorted member ids.
    pub members: Vec<NodeId>,
}

/// Stable labelled clusters and the nodes left outside them.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsensusClustering {
    clusters: Vec<Cluster>,
    unassigned: Vec<NodeId>,
    stability: BTreeMap<NodeId, f64>,
    config: Option<ConsensusConfig>,
    lookup: HashMap<NodeId, usize>,
}

impl ConsensusClustering {
    /// Builds a clustering from explicit `(node, label, stability)` rows.
    /// Graph nodes missing from `rows` are unassigned with stability 0;
    /// `labels` fixes cluster order and may name empty clusters.
    pub fn from_assignments<I>(
        g: &DirectedGraph,
        labels: &[String],
        rows: I,
        config: Option<ConsensusConfig>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, Option<String>, f64)>,
    {
        let mut clusters: Vec<Cluster> = labels
            .iter()
            .map(|l| Cluster {
                label: l.clone(),
                members: Vec::new(),
            })
            .collect();
        let mut stability = BTreeMap::new();
        let mut unknown = BTreeSet::new();
        let mut placed: HashMap<NodeId, usize> = HashMap::new();
        for (id, label, score) in rows {
            if !g.contains(id.as_str()) {
                unknown.insert(id.to_string());
                continue;
            }
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::InvalidParameter(format!(
                    "stability of {id} outside [0, 1]"
                )));
            }
            if stability.insert(id.clone(), score).is_some() {
                return Err(Error::InvalidParameter(format!("node {id} listed twice")));
            }
            if let Some(label) = label {
                let c = clusters
                    .iter()
                    .position(|c| c.label == label)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown label `{label}`")))?;
                clusters[c].members.push(id.clone());
                placed.insert(id, c);
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownNodes(unknown.into_iter().collect()));
        }
        let mut unassigned = Vec::new();
        for id in g.nodes() {
            stability.entry(id.clone()).or_insert(0.0);
            if !placed.contains_key(id) {
                unassigned.push(id.clone());
            }
        }
        for c in &mut clusters {
            c.members.sort();
        }
        Ok(ConsensusClustering {
            clusters,
            unassigned,
            stability,
            config,
            lookup: placed,
        })
    }

    /// Clusters in label order.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn unassigned(&self) -> &[NodeId] {
        &self.unassigned
    }

    pub fn config(&self) -> Option<&ConsensusConfig> {
        self.config.as_ref()
    }

    /// Fraction of runs the node spent under its most frequent label.
    pub fn stability(&self, id: &str) -> Option<f64> {
        self.stability.get(id).copied()
    }

    pub fn cluster_index_of(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn label_of(&self, id: &str) -> Option<&str> {
        self.cluster_index_of(id)
            .map(|c| self.clusters[c].label.as_str())
    }

    /// `(node, label, stability)` rows sorted by `(label, node)`, unassigned
    /// nodes under [`UNASSIGNED_LABEL`].
    pub fn rows(&self) -> Vec<(&NodeId, &str, f64)> {
        let mut rows: Vec<(&NodeId, &str, f64)> = self
            .clusters
            .iter()
            .flat_map(|c| c.members.iter().map(move |id| (id, c.label.as_str())))
            .chain(self.unassigned.iter().map(|id| (id, UNASSIGNED_LABEL)))
            .map(|(id, label)| (id, label, self.stability[id]))
            .collect();
        rows.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        rows
    }
}

/// Present anchor node indices per label, in anchor-set order.
fn anchor_indices(g: &DirectedGraph, anchors: &AnchorSet) -> Vec<Vec<usize>> {
    anchors
        .entries()
        .iter()
        .map(|(label, ids)| {
            let mut present = Vec::new();
            for id in ids {
                match g.index_of(id.as_str()) {
                    Some(i) => present.push(i),
                    None => warn!("anchor {id} of `{label}` is not in the graph"),
                }
            }
            present
        })
        .collect()
}

/// Community claimed by each label, `None` for a miss.
fn match_indexed(p: &Partition, anchors: &[Vec<usize>], scores: &[f64]) -> Vec<Option<usize>> {
    // (community, score of the claiming anchor) per label.
    let claims: Vec<Option<(usize, f64)>> = anchors
        .iter()
        .map(|nodes| {
            nodes
                .iter()
                .copied()
                // Highest score, then smallest index (= smallest id).
                .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
                .map(|best| (p.community_of(best), scores[best]))
        })
        .collect();
    claims
        .iter()
        .enumerate()
        .map(|(label, claim)| {
            let (community, score) = (*claim)?;
            let beaten = claims.iter().enumerate().any(|(other, rival)| match rival {
                Some((c, s)) if *c == community && other != label => {
                    *s > score || (*s == score && other < label)
                }
                _ => false,
            });
            (!beaten).then_some(community)
        })
        .collect()
}

/// Labels communities of `p` through their highest-PageRank anchors. When
/// two labels claim one community the stronger anchor wins and the other
/// label is left unmatched.
pub fn match_clusters(
    p: &Partition,
    g: &DirectedGraph,
    anchors: &AnchorSet,
    pr: &PageRankVector,
) -> BTreeMap<String, usize> {
    let indices = anchor_indices(g, anchors);
    match_indexed(p, &indices, pr.scores())
        .into_iter()
        .zip(anchors.labels())
        .filter_map(|(c, label)| c.map(|c| (label.to_string(), c)))
        .collect()
}

/// Consensus clustering with anchors matched by default-configured PageRank.
pub fn consensus_cluster(
    g: &DirectedGraph,
    config: &ConsensusConfig,
    anchors: &AnchorSet,
) -> Result<ConsensusClustering> {
    let pr = pagerank(g, &PageRankConfig::default())?;
    consensus_cluster_with_pagerank(g, config, anchors, &pr)
}

/// Runs Louvain `config.runs` times and keeps, per label, the nodes found
/// in that label's community in at least `config.threshold()` runs.
///
/// Runs execute on the current rayon pool; votes are merged in run order,
/// so the result does not depend on the pool size.
pub fn consensus_cluster_with_pagerank(
    g: &DirectedGraph,
    config: &ConsensusConfig,
    anchors: &AnchorSet,
    pr: &PageRankVector,
) -> Result<ConsensusClustering> {
    config.validate()?;
    if pr.len() != g.node_count() {
        return Err(Error::InvalidParameter(
            "PageRank vector does not match the graph".into(),
        ));
    }
    let n = g.node_count();
    let labels = anchors.len();
    let anchor_nodes = anchor_indices(g, anchors);

    let per_run: Vec<Vec<Option<usize>>> = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            let p = louvain(g, run_seed(config.master_seed, run))?;
            let matched = match_indexed(&p, &anchor_nodes, pr.scores());
            let mut label_of_community = vec![None; p.community_count()];
            for (label, c) in matched.into_iter().enumerate() {
                if let Some(c) = c {
                    label_of_community[c] = Some(label);
                }
            }
            Ok((0..n)
                .map(|v| label_of_community[p.community_of(v)])
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut votes = vec![0usize; n * labels];
    let mut matched_runs = vec![0usize; labels];
    for run in &per_run {
        let mut seen = vec![false; labels];
        for (v, label) in run.iter().enumerate() {
            if let Some(l) = *label {
                votes[v * labels + l] += 1;
                seen[l] = true;
            }
        }
        for (count, hit) in matched_runs.iter_mut().zip(seen) {
            *count += usize::from(hit);
        }
    }
    for (label, count) in anchors.labels().zip(&matched_runs) {
        if *count == 0 {
            warn!("anchor label `{label}` was not matched in any run");
        }
    }

    let threshold = config.threshold();
    let runs = config.runs as f64;
    let rows = (0..n).map(|v| {
        let tally = &votes[v * labels..(v + 1) * labels];
        // Most votes; earlier label on ties.
        let best = tally
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)));
        let (label, count) = best.map_or((None, 0), |(l, &c)| (Some(l), c));
        let assigned = label.filter(|_| count >= threshold && count > 0);
        (
            g.node(v).clone(),
            assigned.map(|l| anchors.entries()[l].0.clone()),
            count as f64 / runs,
        )
    });
    let label_names: Vec<String> = anchors.labels().map(str::to_string).collect();
    ConsensusClustering::from_assignments(g, &label_names, rows, Some(*config))
}
