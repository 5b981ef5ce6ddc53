//! PageRank over the directed interaction graph.

use std::collections::BTreeSet;

use log::warn;

use crate::community::ConsensusClustering;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, WeightedEdge};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageRankConfig {
    /// Probability of following an out-edge, in `(0, 1)`.
    pub damping: f64,
    /// Stop once the L1 change between iterations drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Split a node's mass in proportion to edge weight instead of evenly
    /// across its out-edges.
    pub weighted: bool,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 1000,
            weighted: false,
        }
    }
}

impl PageRankConfig {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// PageRank scores aligned with the graph's node order.
#[derive(Clone, Debug, PartialEq)]
pub struct PageRankVector {
    nodes: Vec<NodeId>,
    scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl PageRankVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(id))
            .ok()
            .map(|i| self.scores[i])
    }

    /// Scores indexed like the source graph's nodes.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, f64)> {
        self.nodes.iter().zip(self.scores.iter().copied())
    }
}

/// Power iteration from the uniform vector. Dangling mass is spread evenly
/// over all nodes at every step.
pub fn pagerank(g: &DirectedGraph, cfg: &PageRankConfig) -> Result<PageRankVector> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let c = cfg.damping;
    let nf = n as f64;

    // Each step pulls mass over incoming edges, divided by the sender's
    // out-degree (or out-weight).
    let out_norm: Vec<f64> = (0..n)
        .map(|j| {
            if cfg.weighted {
                g.weighted_out_degree(j) as f64
            } else {
                g.out_degree(j) as f64
            }
        })
        .collect();
    let dangling: Vec<usize> = (0..n).filter(|&j| g.out_degree(j) == 0).collect();

    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let dangling_mass: f64 = dangling.iter().map(|&j| rank[j]).sum();
        let base = (1.0 - c) / nf + c * dangling_mass / nf;
        for (i, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .in_edges(i)
                .iter()
                .map(|&(j, w)| {
                    let share = if cfg.weighted { w as f64 } else { 1.0 };
                    rank[j] * share / out_norm[j]
                })
                .sum();
            *slot = base + c * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!(
            "PageRank did not converge within {} iterations",
            cfg.max_iterations
        );
    }
    Ok(PageRankVector {
        nodes: g.nodes().to_vec(),
        scores: rank,
        iterations,
        converged,
    })
}

/// Top `k` nodes by score, descending, ties by ascending id. With `within`
/// the ranking is restricted to those ids, reusing the given scores.
pub fn rank_nodes(
    pr: &PageRankVector,
    within: Option<&BTreeSet<NodeId>>,
    k: usize,
) -> Vec<(NodeId, f64)> {
    if k == 0 {
        return Vec::new();
    }
    let mut ranked: Vec<(&NodeId, f64)> = pr
        .iter()
        .filter(|(id, _)| within.is_none_or(|set| set.contains(*id)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(id, s)| (id.clone(), s))
        .collect()
}

/// Subgraph of edges joining two different labelled clusters. With
/// `include_unassigned`, edges touching an unassigned node are kept as well;
/// edges inside one cluster are always dropped.
pub fn weak_ties_subgraph(
    g: &DirectedGraph,
    cc: &ConsensusClustering,
    include_unassigned: bool,
) -> DirectedGraph {
    let cluster: Vec<Option<usize>> = g
        .nodes()
        .iter()
        .map(|id| cc.cluster_index_of(id.as_str()))
        .collect();
    let keep_edge = |s: usize, t: usize| match (cluster[s], cluster[t]) {
        (Some(a), Some(b)) => a != b,
        _ => include_unassigned,
    };
    let mut endpoints = BTreeSet::new();
    let mut kept = Vec::new();
    for (s, t, w) in g.edge_indices() {
        if keep_edge(s, t) {
            endpoints.insert(g.node(s).clone());
            endpoints.insert(g.node(t).clone());
            kept.push(WeightedEdge {
                source: g.node(s).clone(),
                target: g.node(t).clone(),
                weight: w,
            });
        }
    }
    if kept.is_empty() {
        warn!("no inter-cluster edges; weak-ties graph is empty");
        return DirectedGraph::empty();
    }
    DirectedGraph::with_nodes(endpoints, kept).expect("endpoints are members")
}
