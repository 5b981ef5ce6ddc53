//! Weighted directed interaction graphs.
//!
//! A [`DirectedGraph`] stores nodes sorted by id and adjacency lists sorted by
//! neighbour index, so every traversal over it is deterministic. Edge weights
//! are positive integer event counts.

mod parse;

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub use parse::{parse_interaction_log, write_edge_list, LogKind, ParsedLog};

/// Opaque node identifier, compared by exact byte equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidParameter("empty node id".into()));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Aggregated interactions from `source` (the actor) to `target`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedEdge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: u64,
}

impl WeightedEdge {
    pub fn new(source: &str, target: &str, weight: u64) -> Result<Self> {
        if weight == 0 {
            return Err(Error::InvalidParameter(
                "edge weight must be positive".into(),
            ));
        }
        Ok(WeightedEdge {
            source: NodeId::new(source)?,
            target: NodeId::new(target)?,
            weight,
        })
    }
}

/// Weighted directed simple graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    out_adj: Vec<Vec<(usize, u64)>>,
    in_adj: Vec<Vec<(usize, u64)>>,
    total_weight: u64,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph over exactly `nodes`. Duplicate pairs are summed; every
    /// endpoint must be listed in `nodes` and self-loops are rejected.
    pub fn with_nodes<I>(nodes: BTreeSet<NodeId>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = WeightedEdge>,
    {
        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        let index: HashMap<NodeId, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();

        let mut pairs: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut unknown = BTreeSet::new();
        for edge in edges {
            if edge.weight == 0 {
                return Err(Error::InvalidParameter(
                    "edge weight must be positive".into(),
                ));
            }
            let (s, t) = match (index.get(&edge.source), index.get(&edge.target)) {
                (Some(&s), Some(&t)) => (s, t),
                (s, t) => {
                    if s.is_none() {
                        unknown.insert(edge.source.0.clone());
                    }
                    if t.is_none() {
                        unknown.insert(edge.target.0.clone());
                    }
                    continue;
                }
            };
            if s == t {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on {}",
                    edge.source
                )));
            }
            *pairs.entry((s, t)).or_insert(0) += edge.weight;
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownNodes(unknown.into_iter().collect()));
        }

        let n = nodes.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut total_weight = 0u64;
        // BTreeMap order keeps both adjacency directions sorted.
        for (&(s, t), &w) in &pairs {
            out_adj[s].push((t, w));
            in_adj[t].push((s, w));
            total_weight += w;
        }
        Ok(DirectedGraph {
            nodes,
            index,
            out_adj,
            in_adj,
            total_weight,
            edge_count: pairs.len(),
        })
    }

    pub fn empty() -> Self {
        DirectedGraph {
            nodes: Vec::new(),
            index: HashMap::new(),
            out_adj: Vec::new(),
            in_adj: Vec::new(),
            total_weight: 0,
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total edge weight `m`.
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Node ids in ascending order; positions are the node indices.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &NodeId {
        &self.nodes[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Outgoing `(target, weight)` pairs sorted by target index.
    pub fn out_edges(&self, node: usize) -> &[(usize, u64)] {
        &self.out_adj[node]
    }

    /// Incoming `(source, weight)` pairs sorted by source index.
    pub fn in_edges(&self, node: usize) -> &[(usize, u64)] {
        &self.in_adj[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn weighted_in_degree(&self, node: usize) -> u64 {
        self.in_adj[node].iter().map(|&(_, w)| w).sum()
    }

    pub fn weighted_out_degree(&self, node: usize) -> u64 {
        self.out_adj[node].iter().map(|&(_, w)| w).sum()
    }

    /// Edge weight of `source -> target`, if present.
    pub fn weight(&self, source: usize, target: usize) -> Option<u64> {
        let adj = &self.out_adj[source];
        adj.binary_search_by_key(&target, |&(t, _)| t)
            .ok()
            .map(|pos| adj[pos].1)
    }

    /// All edges as `(source, target, weight)` index triples, sorted.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(s, adj)| adj.iter().map(move |&(t, w)| (s, t, w)))
    }

    /// All edges sorted by `(source, target)`.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        self.edge_indices().map(|(s, t, w)| WeightedEdge {
            source: self.nodes[s].clone(),
            target: self.nodes[t].clone(),
            weight: w,
        })
    }

    /// Simple undirected neighbourhoods: direction and weight dropped,
    /// each list sorted and free of duplicates.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        (0..self.node_count())
            .map(|v| {
                let mut nbrs: Vec<usize> = self.out_adj[v]
                    .iter()
                    .chain(&self.in_adj[v])
                    .map(|&(u, _)| u)
                    .collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect()
    }
}

/// Thresholds aggregated edges into a graph. Self-loops are dropped first,
/// then edges lighter than `min_weight`, then nodes left without edges.
pub fn build_graph<I>(edges: I, min_weight: u64) -> Result<DirectedGraph>
where
    I: IntoIterator<Item = WeightedEdge>,
{
    if min_weight == 0 {
        return Err(Error::InvalidParameter(
            "min_weight must be at least 1".into(),
        ));
    }
    let mut pairs: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for e in edges {
        if e.source == e.target {
            continue;
        }
        *pairs.entry((e.source, e.target)).or_insert(0) += e.weight;
    }
    pairs.retain(|_, w| *w >= min_weight);
    let nodes: BTreeSet<NodeId> = pairs
        .keys()
        .flat_map(|(s, t)| [s.clone(), t.clone()])
        .collect();
    DirectedGraph::with_nodes(
        nodes,
        pairs
            .into_iter()
            .map(|((source, target), weight)| WeightedEdge {
                source,
                target,
                weight,
            }),
    )
}

/// Weakly connected components as sorted index lists, ordered by their
/// smallest member.
pub fn weak_components(g: &DirectedGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &(u, _) in g.out_edges(v).iter().chain(g.in_edges(v)) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Induced subgraph on the largest weakly connected component. Among equally
/// large components the one holding the smallest node id wins.
pub fn giant_component(g: &DirectedGraph) -> Result<DirectedGraph> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    // Components come ordered by smallest member, so the first maximum is
    // also the lexicographic tie-break winner.
    let components = weak_components(g);
    let mut best = &components[0];
    for c in &components[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    Ok(induced_by_index(g, best))
}

/// Induced subgraph on `nodes`. Members without surviving edges stay in the
/// result.
pub fn induced_subgraph<'a, I>(g: &DirectedGraph, nodes: I) -> Result<DirectedGraph>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut keep = Vec::new();
    let mut unknown = BTreeSet::new();
    for id in nodes {
        match g.index_of(id) {
            Some(i) => keep.push(i),
            None => {
                unknown.insert(id.to_string());
            }
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownNodes(unknown.into_iter().collect()));
    }
    keep.sort_unstable();
    keep.dedup();
    Ok(induced_by_index(g, &keep))
}

/// `keep` must be sorted and deduplicated.
pub(crate) fn induced_by_index(g: &DirectedGraph, keep: &[usize]) -> DirectedGraph {
    let mut remap = vec![usize::MAX; g.node_count()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let nodes: Vec<NodeId> = keep.iter().map(|&i| g.nodes[i].clone()).collect();
    let index = nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    let mut out_adj = vec![Vec::new(); keep.len()];
    let mut in_adj = vec![Vec::new(); keep.len()];
    let mut total_weight = 0;
    let mut edge_count = 0;
    // Old indices map monotonically to new ones, so the lists stay sorted.
    for (new_s, &old_s) in keep.iter().enumerate() {
        for &(old_t, w) in g.out_edges(old_s) {
            let new_t = remap[old_t];
            if new_t != usize::MAX {
                out_adj[new_s].push((new_t, w));
                total_weight += w;
                edge_count += 1;
            }
        }
        for &(old_src, w) in g.in_edges(old_s) {
            let new_src = remap[old_src];
            if new_src != usize::MAX {
                in_adj[new_s].push((new_src, w));
            }
        }
    }
    DirectedGraph {
        nodes,
        index,
        out_adj,
        in_adj,
        total_weight,
        edge_count,
    }
}

/// Symmetric weighted graph used by modularity and Louvain.
///
/// `weight(i, j) = w(i→j) + w(j→i)` for `i != j`. Self-loops only appear on
/// aggregated graphs; a self-loop of weight `w` contributes `2w` to its
/// node's degree, so `Σ degree = 2m` always holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedView {
    adj: Vec<Vec<(usize, u64)>>,
    self_loops: Vec<u64>,
    total_weight: u64,
}

impl UndirectedView {
    /// Builds a view from `(i, j, weight)` triples over `n` nodes. Repeated
    /// pairs (in either orientation) are summed; `i == j` adds a self-loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut pairs: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut self_loops = vec![0u64; n];
        let mut total_weight = 0;
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            total_weight += w;
            if i == j {
                self_loops[i] += w;
            } else {
                *pairs.entry((i.min(j), i.max(j))).or_insert(0) += w;
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (&(i, j), &w) in &pairs {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(UndirectedView {
            adj,
            self_loops,
            total_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Total undirected weight `m` (self-loops counted once).
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Neighbours other than the node itself, sorted by index.
    pub fn neighbors(&self, node: usize) -> &[(usize, u64)] {
        &self.adj[node]
    }

    pub fn self_loop(&self, node: usize) -> u64 {
        self.self_loops[node]
    }

    /// Weighted degree `k_i`.
    pub fn degree(&self, node: usize) -> u64 {
        self.adj[node].iter().map(|&(_, w)| w).sum::<u64>() + 2 * self.self_loops[node]
    }

    /// Symmetric adjacency entry `A_ij`; the diagonal holds twice the loop.
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 2 * self.self_loops[i];
        }
        let adj = &self.adj[i];
        adj.binary_search_by_key(&j, |&(t, _)| t)
            .map(|pos| adj[pos].1)
            .unwrap_or(0)
    }
}

/// Symmetrised view of `g` sharing its node indices.
pub fn undirected_view(g: &DirectedGraph) -> UndirectedView {
    let n = g.node_count();
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for (v, list) in adj.iter_mut().enumerate() {
        // Merge the two sorted lists.
        let (outs, ins) = (g.out_edges(v), g.in_edges(v));
        let (mut a, mut b) = (0, 0);
        while a < outs.len() || b < ins.len() {
            match (outs.get(a), ins.get(b)) {
                (Some(&(x, wx)), Some(&(y, wy))) if x == y => {
                    list.push((x, wx + wy));
                    a += 1;
                    b += 1;
                }
                (Some(&(x, wx)), Some(&(y, _))) if x < y => {
                    list.push((x, wx));
                    a += 1;
                }
                (Some(_), Some(&(y, wy))) => {
                    list.push((y, wy));
                    b += 1;
                }
                (Some(&(x, wx)), None) => {
                    list.push((x, wx));
                    a += 1;
                }
                (None, Some(&(y, wy))) => {
                    list.push((y, wy));
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }
    UndirectedView {
        adj,
        self_loops: vec![0; n],
        total_weight: g.total_weight(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(list: &[(&str, &str, u64)]) -> Vec<WeightedEdge> {
        list.iter()
            .map(|&(s, t, w)| WeightedEdge::new(s, t, w).unwrap())
            .collect()
    }

    fn names(g: &DirectedGraph) -> Vec<&str> {
        g.nodes().iter().map(NodeId::as_str).collect()
    }

    #[test]
    fn threshold_boundary() {
        let g = build_graph(edges(&[("a", "b", 3), ("c", "d", 2)]), 3).unwrap();
        assert_eq!(names(&g), ["a", "b"]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(3));
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = build_graph(edges(&[("a", "a", 5)]), 3).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.total_weight(), 0);
    }

    #[test]
    fn zero_min_weight_rejected() {
        assert!(build_graph(Vec::new(), 0).is_err());
    }

    #[test]
    fn degree_sums_equal_total_weight() {
        let g = build_graph(
            edges(&[("a", "b", 3), ("b", "a", 4), ("c", "a", 5), ("b", "c", 3)]),
            1,
        )
        .unwrap();
        let ins: u64 = (0..g.node_count()).map(|v| g.weighted_in_degree(v)).sum();
        let outs: u64 = (0..g.node_count()).map(|v| g.weighted_out_degree(v)).sum();
        assert_eq!(ins, g.total_weight());
        assert_eq!(outs, g.total_weight());
        assert_eq!(g.total_weight(), 15);
    }

    #[test]
    fn giant_component_picks_larger() {
        let g = build_graph(
            edges(&[
                ("a", "b", 1),
                ("b", "c", 1),
                ("c", "d", 1),
                ("d", "e", 1),
                ("x", "y", 1),
                ("y", "z", 1),
            ]),
            1,
        )
        .unwrap();
        let gc = giant_component(&g).unwrap();
        assert_eq!(names(&gc), ["a", "b", "c", "d", "e"]);
        assert_eq!(gc.edge_count(), 4);
    }

    #[test]
    fn giant_component_identity_on_connected() {
        let g = build_graph(edges(&[("a", "b", 1), ("c", "b", 1)]), 1).unwrap();
        assert_eq!(giant_component(&g).unwrap(), g);
    }

    #[test]
    fn giant_component_tie_break() {
        // Both components have 4 nodes; the one holding "a" wins even though
        // its edges are listed second.
        let g = build_graph(
            edges(&[
                ("m", "n", 1),
                ("n", "o", 1),
                ("o", "p", 1),
                ("z", "a", 1),
                ("z", "b", 1),
                ("z", "c", 1),
            ]),
            1,
        )
        .unwrap();
        let gc = giant_component(&g).unwrap();
        assert_eq!(names(&gc), ["a", "b", "c", "z"]);
    }

    #[test]
    fn giant_component_of_empty_graph_fails() {
        assert!(matches!(
            giant_component(&DirectedGraph::empty()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn induced_subgraph_cases() {
        let g = build_graph(edges(&[("a", "b", 1), ("b", "c", 1), ("c", "a", 1)]), 1).unwrap();
        let sub = induced_subgraph(&g, ["a", "b"]).unwrap();
        assert_eq!(names(&sub), ["a", "b"]);
        assert_eq!(sub.edge_count(), 1);

        let all = induced_subgraph(&g, ["c", "a", "b"]).unwrap();
        assert_eq!(all, g);

        let g2 = build_graph(edges(&[("a", "b", 1), ("c", "d", 1)]), 1).unwrap();
        let sub = induced_subgraph(&g2, ["a", "d"]).unwrap();
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 0);

        match induced_subgraph(&g2, ["a", "q", "r"]) {
            Err(Error::UnknownNodes(ids)) => assert_eq!(ids, ["q", "r"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undirected_weights_sum_both_directions() {
        let g = build_graph(edges(&[("a", "b", 2), ("b", "a", 3)]), 1).unwrap();
        let v = undirected_view(&g);
        assert_eq!(v.weight(0, 1), 5);
        assert_eq!(v.weight(1, 0), 5);
        assert_eq!(v.total_weight(), 5);

        let g = build_graph(edges(&[("a", "b", 1)]), 1).unwrap();
        assert_eq!(undirected_view(&g).weight(0, 1), 1);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn undirected_view_matches_a_plus_a_transpose() {
        let g = build_graph(
            edges(&[
                ("a", "b", 2),
                ("b", "a", 1),
                ("b", "c", 4),
                ("c", "d", 1),
                ("d", "c", 7),
                ("d", "a", 3),
            ]),
            1,
        )
        .unwrap();
        let n = g.node_count();
        let mut dense = vec![vec![0u64; n]; n];
        for (s, t, w) in g.edge_indices() {
            dense[s][t] = w;
        }
        let v = undirected_view(&g);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(v.weight(i, j), dense[i][j] + dense[j][i], "({i},{j})");
            }
        }
        let degrees: u64 = (0..n).map(|i| v.degree(i)).sum();
        assert_eq!(degrees, 2 * v.total_weight());
    }

    #[test]
    fn with_nodes_rejects_unknown_endpoint() {
        let nodes: BTreeSet<NodeId> = [NodeId::new("a").unwrap()].into_iter().collect();
        let err = DirectedGraph::with_nodes(nodes, edges(&[("a", "b", 1)])).unwrap_err();
        assert!(matches!(err, Error::UnknownNodes(ids) if ids == ["b"]));
    }
}
