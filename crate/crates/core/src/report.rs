//! Per-cluster result tables: interaction matrix, cluster profiles, top
//! PageRank nodes, cluster-size histogram and ego networks.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rayon::prelude::*;

use crate::centrality::{rank_nodes, PageRankVector};
use crate::community::{ConsensusClustering, Partition, UNASSIGNED_LABEL};
use crate::error::{Error, Result};
use crate::graph::{induced_by_index, induced_subgraph, DirectedGraph, NodeId};
use crate::topology::{
    clustering_coefficient, gini, in_degree_centralization, in_degree_distribution, in_degrees,
    k_core_decomposition, lorenz_points, path_length_summary, CoreDecomposition,
    DegreeDistribution, LorenzCurve, PathLengthMode,
};

/// Interaction weight between clusters: `raw[i][j]` sums the weights of
/// edges from members of row cluster `i` to members of column `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionMatrix {
    /// Row labels (the labelled clusters).
    pub rows: Vec<String>,
    /// Column labels: the row labels, plus [`UNASSIGNED_LABEL`] when
    /// requested.
    pub columns: Vec<String>,
    pub raw: Vec<Vec<u64>>,
    /// Rows divided by their totals; all-zero rows stay zero.
    pub normalized: Vec<Vec<f64>>,
}

pub fn interaction_matrix(
    g: &DirectedGraph,
    cc: &ConsensusClustering,
    include_unassigned: bool,
) -> InteractionMatrix {
    let rows: Vec<String> = cc.clusters().iter().map(|c| c.label.clone()).collect();
    let mut columns = rows.clone();
    if include_unassigned {
        columns.push(UNASSIGNED_LABEL.to_string());
    }
    let unassigned_col = rows.len();
    let cluster: Vec<Option<usize>> = g
        .nodes()
        .iter()
        .map(|id| cc.cluster_index_of(id.as_str()))
        .collect();

    let mut raw = vec![vec![0u64; columns.len()]; rows.len()];
    for (s, t, w) in g.edge_indices() {
        let Some(row) = cluster[s] else { continue };
        match cluster[t] {
            Some(col) => raw[row][col] += w,
            None if include_unassigned => raw[row][unassigned_col] += w,
            None => {}
        }
    }
    let normalized = raw
        .iter()
        .zip(&rows)
        .map(|(row, label)| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                warn!("cluster `{label}` has no outgoing interactions; row left at zero");
                return vec![0.0; row.len()];
            }
            row.iter().map(|&x| x as f64 / total as f64).collect()
        })
        .collect();
    InteractionMatrix {
        rows,
        columns,
        raw,
        normalized,
    }
}

/// Structural summary of one cluster's intra-network. Metrics that are
/// undefined for the cluster (too few nodes, no in-edges, no reachable
/// pairs) are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterProfile {
    pub label: String,
    pub nodes: usize,
    pub edges: usize,
    pub gini_in: Option<f64>,
    pub centralization_in: Option<f64>,
    pub clustering: Option<f64>,
    pub path_length_paper: Option<f64>,
    pub path_length_reachable: Option<f64>,
    pub k_max: Option<usize>,
    pub k_avg: Option<f64>,
    pub k_std: Option<f64>,
}

impl ClusterProfile {
    pub fn path_length(&self, mode: PathLengthMode) -> Option<f64> {
        match mode {
            PathLengthMode::PaperLiteral => self.path_length_paper,
            PathLengthMode::ReachableOnly => self.path_length_reachable,
        }
    }
}

/// A profile together with the distributions behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport {
    pub profile: ClusterProfile,
    pub lorenz: Option<LorenzCurve>,
    pub in_degree: DegreeDistribution,
    pub cores: CoreDecomposition,
}

/// Metrics of a single graph, labelled `label`.
pub fn profile_graph(label: &str, g: &DirectedGraph) -> ClusterReport {
    let n = g.node_count();
    let degrees = in_degrees(g);
    let lorenz = lorenz_points(&degrees).ok();
    let gini_in = lorenz.as_ref().and_then(|_| gini(&degrees).ok());
    let paths = path_length_summary(g);
    let cores = k_core_decomposition(g);
    let profile = ClusterProfile {
        label: label.to_string(),
        nodes: n,
        edges: g.edge_count(),
        gini_in,
        centralization_in: in_degree_centralization(g).ok(),
        clustering: (n > 0).then(|| clustering_coefficient(g).average),
        path_length_paper: paths.average(PathLengthMode::PaperLiteral).ok(),
        path_length_reachable: paths.average(PathLengthMode::ReachableOnly).ok(),
        k_max: (n > 0).then_some(cores.k_max),
        k_avg: (n > 0).then_some(cores.k_avg),
        k_std: (n > 0).then_some(cores.k_std),
    };
    ClusterReport {
        profile,
        lorenz,
        in_degree: in_degree_distribution(g, false),
        cores,
    }
}

/// Reports for every labelled cluster, ordered by descending size and then
/// by label.
pub fn cluster_reports(g: &DirectedGraph, cc: &ConsensusClustering) -> Vec<ClusterReport> {
    let mut reports: Vec<ClusterReport> = cc
        .clusters()
        .par_iter()
        .map(|cluster| {
            let mut keep: Vec<usize> = cluster
                .members
                .iter()
                .map(|id| {
                    g.index_of(id.as_str())
                        .expect("cluster members belong to g")
                })
                .collect();
            keep.sort_unstable();
            profile_graph(&cluster.label, &induced_by_index(g, &keep))
        })
        .collect();
    reports.sort_by(|a, b| {
        b.profile
            .nodes
            .cmp(&a.profile.nodes)
            .then_with(|| a.profile.label.cmp(&b.profile.label))
    });
    reports
}

pub fn cluster_profiles(g: &DirectedGraph, cc: &ConsensusClustering) -> Vec<ClusterProfile> {
    cluster_reports(g, cc)
        .into_iter()
        .map(|r| r.profile)
        .collect()
}

/// Top-`k` nodes of each cluster by full-graph PageRank, clusters ordered by
/// descending size and then by label.
pub fn top_nodes_report(
    cc: &ConsensusClustering,
    pr: &PageRankVector,
    k: usize,
) -> Vec<(String, Vec<(NodeId, f64)>)> {
    let mut clusters: Vec<_> = cc.clusters().iter().collect();
    clusters.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.label.cmp(&b.label))
    });
    clusters
        .into_iter()
        .map(|c| {
            let members: BTreeSet<NodeId> = c.members.iter().cloned().collect();
            (c.label.clone(), rank_nodes(pr, Some(&members), k))
        })
        .collect()
}

/// Number of communities of each size.
pub fn cluster_size_distribution(p: &Partition) -> BTreeMap<usize, usize> {
    let mut histogram = BTreeMap::new();
    for size in p.sizes() {
        *histogram.entry(size).or_insert(0) += 1;
    }
    histogram
}

/// Induced subgraph on `center` and all of its in- and out-neighbours.
pub fn ego_network(g: &DirectedGraph, center: &str) -> Result<DirectedGraph> {
    let c = g
        .index_of(center)
        .ok_or_else(|| Error::UnknownNodes(vec![center.to_string()]))?;
    let mut members: BTreeSet<usize> = BTreeSet::from([c]);
    members.extend(g.out_edges(c).iter().map(|&(u, _)| u));
    members.extend(g.in_edges(c).iter().map(|&(u, _)| u));
    let ids: Vec<&str> = members.iter().map(|&v| g.node(v).as_str()).collect();
    induced_subgraph(g, ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{pagerank, PageRankConfig};
    use crate::graph::{build_graph, WeightedEdge};

    fn weighted(list: &[(&str, &str, u64)]) -> DirectedGraph {
        build_graph(
            list.iter()
                .map(|&(s, t, w)| WeightedEdge::new(s, t, w).unwrap()),
            1,
        )
        .unwrap()
    }

    fn clustering(g: &DirectedGraph, groups: &[(&str, &[&str])]) -> ConsensusClustering {
        let labels: Vec<String> = groups.iter().map(|(l, _)| l.to_string()).collect();
        let rows = groups.iter().flat_map(|(l, ids)| {
            ids.iter()
                .map(move |id| (NodeId::new(*id).unwrap(), Some(l.to_string()), 1.0))
        });
        ConsensusClustering::from_assignments(g, &labels, rows, None).unwrap()
    }

    #[test]
    fn intra_only_gives_identity() {
        let g = weighted(&[("a", "b", 1), ("c", "d", 2)]);
        let cc = clustering(&g, &[("X", &["a", "b"]), ("Y", &["c", "d"])]);
        let m = interaction_matrix(&g, &cc, false);
        assert_eq!(m.normalized, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn hand_normalised_row() {
        let g = weighted(&[("a", "b", 3), ("a", "c", 1)]);
        let cc = clustering(&g, &[("X", &["a", "c"]), ("Y", &["b"])]);
        let m = interaction_matrix(&g, &cc, false);
        assert_eq!(m.raw[0], [1, 3]);
        assert_eq!(m.normalized[0], [0.25, 0.75]);
        assert_eq!(m.normalized[1], [0.0, 0.0]);
    }

    #[test]
    fn unassigned_column_is_optional() {
        let g = weighted(&[("a", "b", 2), ("a", "z", 2)]);
        let cc = clustering(&g, &[("X", &["a", "b"])]);
        let without = interaction_matrix(&g, &cc, false);
        assert_eq!(without.normalized[0], [1.0]);
        let with = interaction_matrix(&g, &cc, true);
        assert_eq!(with.columns, ["X", UNASSIGNED_LABEL]);
        assert_eq!(with.raw[0], [2, 2]);
        assert_eq!(with.normalized[0], [0.5, 0.5]);
    }

    #[test]
    fn in_star_profile() {
        let g = weighted(&[("a", "h", 1), ("b", "h", 1), ("c", "h", 1)]);
        let cc = clustering(&g, &[("S", &["a", "b", "c", "h"])]);
        let p = &cluster_profiles(&g, &cc)[0];
        assert_eq!(p.centralization_in, Some(1.0));
        assert_eq!(p.clustering, Some(0.0));
        assert_eq!((p.nodes, p.edges), (4, 3));
    }

    #[test]
    fn triangle_pendant_profile() {
        let g = weighted(&[("a", "b", 1), ("b", "c", 1), ("c", "a", 1), ("d", "a", 1)]);
        let cc = clustering(&g, &[("T", &["a", "b", "c", "d"])]);
        let p = &cluster_profiles(&g, &cc)[0];
        assert_eq!(p.clustering, Some(7.0 / 12.0));
        assert_eq!(p.k_avg, Some(7.0 / 4.0));
        // In-degrees [2, 1, 1, 0].
        assert!((p.gini_in.unwrap() - gini(&[2.0, 1.0, 1.0, 0.0]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_cluster_has_undefined_metrics() {
        let g = weighted(&[("a", "b", 1), ("c", "d", 1)]);
        let cc = clustering(&g, &[("X", &["a", "c"]), ("E", &[])]);
        let profiles = cluster_profiles(&g, &cc);
        let x = &profiles[0];
        assert_eq!((x.nodes, x.edges), (2, 0));
        assert_eq!(x.gini_in, None);
        assert_eq!(x.centralization_in, None);
        assert_eq!(x.path_length_paper, Some(0.0));
        assert_eq!(x.path_length_reachable, None);
        let e = &profiles[1];
        assert_eq!(e.nodes, 0);
        assert_eq!((e.clustering, e.k_max), (None, None));
    }

    #[test]
    fn profiles_ordered_by_size() {
        let g = weighted(&[("a", "b", 1), ("c", "d", 1), ("d", "e", 1)]);
        let cc = clustering(&g, &[("small", &["a", "b"]), ("big", &["c", "d", "e"])]);
        let labels: Vec<String> = cluster_profiles(&g, &cc)
            .into_iter()
            .map(|p| p.label)
            .collect();
        assert_eq!(labels, ["big", "small"]);
    }

    #[test]
    fn top_nodes_from_full_graph_scores() {
        let mut edges = Vec::new();
        for leaf in ["l1", "l2", "l3", "l4"] {
            edges.push((leaf, "hub", 1));
            edges.push(("hub", leaf, 1));
        }
        let g = weighted(&edges);
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        let cc = clustering(&g, &[("C", &["hub"]), ("L", &["l1", "l2", "l3", "l4"])]);
        let table = top_nodes_report(&cc, &pr, 5);
        assert_eq!(table[0].0, "L");
        assert_eq!(table[0].1.len(), 4);
        assert_eq!(table[0].1[0].0.as_str(), "l1");
        assert!((table[0].1[0].1 - 0.13108).abs() < 1e-4);
        assert_eq!(table[1].1.len(), 1);
    }

    #[test]
    fn size_distribution() {
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(cluster_size_distribution(&p), BTreeMap::from([(3, 2)]));
        assert_eq!(
            cluster_size_distribution(&Partition::singletons(5)),
            BTreeMap::from([(1, 5)])
        );
    }

    #[test]
    fn ego_networks() {
        let g = weighted(&[("a", "b", 1), ("b", "c", 1), ("c", "a", 1), ("d", "a", 1)]);
        assert_eq!(ego_network(&g, "a").unwrap().node_count(), 4);
        let c = ego_network(&g, "c").unwrap();
        let ids: Vec<&str> = c.nodes().iter().map(NodeId::as_str).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(c.edge_count(), 3);
        assert!(ego_network(&g, "zz").is_err());

        let pair = weighted(&[("x", "y", 1), ("y", "z", 1)]);
        assert_eq!(ego_network(&pair, "x").unwrap().node_count(), 2);
    }
}
