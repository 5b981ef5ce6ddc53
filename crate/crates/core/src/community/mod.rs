//! Modularity, Louvain optimisation and the anchored consensus ensemble.
//!
//! All modularity arithmetic runs on integer edge weights. The quantity
//! `4m² · Q` is an exact integer, so comparisons between partitions never
//! suffer from rounding and `Q` itself is a single correctly rounded
//! division.

mod consensus;
mod louvain;

use crate::error::{Error, Result};
use crate::graph::{undirected_view, DirectedGraph, UndirectedView};

pub use consensus::{
    consensus_cluster, consensus_cluster_with_pagerank, match_clusters, run_seed, AnchorSet,
    Cluster, ConsensusClustering, ConsensusConfig, UNASSIGNED_LABEL,
};
pub use louvain::{delta_modularity, louvain, louvain_traced, louvain_view, LouvainState};

/// Assignment of every node to a community; ids are contiguous from zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    community_count: usize,
}

impl Partition {
    /// Relabels arbitrary community ids in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let assignment: Vec<usize> = raw
            .iter()
            .map(|&c| {
                let next = relabel.len();
                *relabel.entry(c).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            community_count: relabel.len(),
        }
    }

    /// Every node alone.
    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            community_count: n,
        }
    }

    /// All nodes in one community.
    pub fn whole(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member lists indexed by community id; members ascend.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Community sizes indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Integer numerator of modularity: `Σ_c (in_c · 2m − tot_c²)`, where
/// `in_c` sums `A_ij` over ordered member pairs and `tot_c` sums degrees.
pub(crate) fn modularity_numerator(view: &UndirectedView, p: &Partition) -> i128 {
    let k = p.community_count();
    let mut inside = vec![0i128; k];
    let mut total = vec![0i128; k];
    for i in 0..view.node_count() {
        let c = p.community_of(i);
        total[c] += view.degree(i) as i128;
        inside[c] += 2 * view.self_loop(i) as i128;
        for &(j, w) in view.neighbors(i) {
            if p.community_of(j) == c {
                inside[c] += w as i128;
            }
        }
    }
    let two_m = 2 * view.total_weight() as i128;
    inside
        .iter()
        .zip(&total)
        .map(|(&a, &t)| a * two_m - t * t)
        .sum()
}

pub(crate) fn numerator_to_q(numerator: i128, m: u64) -> f64 {
    let two_m = 2.0 * m as f64;
    numerator as f64 / (two_m * two_m)
}

/// Modularity of `p` on a weighted undirected graph.
pub fn modularity_view(view: &UndirectedView, p: &Partition) -> Result<f64> {
    if p.len() != view.node_count() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            view.node_count()
        )));
    }
    if view.total_weight() == 0 {
        return Err(Error::NoEdges);
    }
    Ok(numerator_to_q(
        modularity_numerator(view, p),
        view.total_weight(),
    ))
}

/// Modularity of `p` on the symmetrised, weighted form of `g`.
pub fn modularity(g: &DirectedGraph, p: &Partition) -> Result<f64> {
    modularity_view(&undirected_view(g), p)
}

/// Collapses each community into one node. Intra-community weight becomes a
/// self-loop and inter-community weights are summed.
pub fn aggregate(view: &UndirectedView, p: &Partition) -> UndirectedView {
    let mut edges = Vec::new();
    for i in 0..view.node_count() {
        let ci = p.community_of(i);
        if view.self_loop(i) > 0 {
            edges.push((ci, ci, view.self_loop(i)));
        }
        for &(j, w) in view.neighbors(i) {
            if j > i {
                edges.push((ci, p.community_of(j), w));
            }
        }
    }
    UndirectedView::from_edges(p.community_count(), &edges).expect("community ids are within range")
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::graph::undirected_view;

    #[test]
    fn partition_relabels_by_first_appearance() {
        let p = Partition::from_assignment(&[7, 3, 7, 9]);
        assert_eq!(p.assignment(), [0, 1, 0, 2]);
        assert_eq!(p.community_count(), 3);
        assert_eq!(p.communities(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn one_community_has_zero_modularity() {
        let g = two_triangles();
        assert_eq!(modularity(&g, &Partition::whole(6)).unwrap(), 0.0);
    }

    #[test]
    fn two_triangles_split() {
        let g = two_triangles();
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(modularity(&g, &p).unwrap(), 0.5);
    }

    #[test]
    fn triangle_singletons() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let q = modularity(&g, &Partition::singletons(3)).unwrap();
        assert!((q + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn no_edges_is_an_error() {
        let view = UndirectedView::from_edges(2, &[]).unwrap();
        assert!(matches!(
            modularity_view(&view, &Partition::singletons(2)),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn aggregate_two_triangles_with_bridge() {
        let mut g = two_triangles();
        g = crate::graph::build_graph(
            g.edges()
                .chain([crate::graph::WeightedEdge::new("a", "d", 1).unwrap()]),
            1,
        )
        .unwrap();
        let view = undirected_view(&g);
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        let agg = aggregate(&view, &p);
        assert_eq!(agg.node_count(), 2);
        assert_eq!(agg.self_loop(0), 3);
        assert_eq!(agg.self_loop(1), 3);
        assert_eq!(agg.weight(0, 1), 1);
        assert_eq!(agg.total_weight(), view.total_weight());

        let q_flat = modularity_view(&view, &p).unwrap();
        let q_agg = modularity_view(&agg, &Partition::singletons(2)).unwrap();
        assert_eq!(q_flat, q_agg);
    }

    #[test]
    fn aggregate_identity_and_whole() {
        let view = undirected_view(&two_triangles());
        assert_eq!(aggregate(&view, &Partition::singletons(6)), view);

        let whole = aggregate(&view, &Partition::whole(6));
        assert_eq!(whole.node_count(), 1);
        assert_eq!(whole.self_loop(0), 6);
        assert_eq!(whole.degree(0), 12);
    }
}
