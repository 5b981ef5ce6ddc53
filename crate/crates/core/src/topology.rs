//! Structural metrics of a (cluster) graph: in-degree distribution,
//! centralization, Gini/Lorenz inequality, clustering coefficient, average
//! path length and k-core decomposition.
//!
//! Apart from the weighted in-degree distribution, every metric here uses
//! unweighted degrees.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeBin {
    pub k: u64,
    pub count: usize,
    /// `P(k_in = k)`.
    pub fraction: f64,
    /// `P(K ≥ k)`.
    pub cumulative: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    /// Observed in-degree values, ascending.
    pub bins: Vec<DegreeBin>,
}

impl DegreeDistribution {
    /// `P(K ≥ k)` for any `k`, observed or not.
    pub fn cumulative_at(&self, k: u64) -> f64 {
        self.bins
            .iter()
            .find(|b| b.k >= k)
            .map_or(0.0, |b| b.cumulative)
    }
}

pub fn in_degree_distribution(g: &DirectedGraph, weighted: bool) -> DegreeDistribution {
    let n = g.node_count();
    let mut histogram: BTreeMap<u64, usize> = BTreeMap::new();
    for v in 0..n {
        let k = if weighted {
            g.weighted_in_degree(v)
        } else {
            g.in_degree(v) as u64
        };
        *histogram.entry(k).or_insert(0) += 1;
    }
    let total = n as f64;
    let mut at_least = n;
    let bins = histogram
        .into_iter()
        .map(|(k, count)| {
            let bin = DegreeBin {
                k,
                count,
                fraction: count as f64 / total,
                cumulative: at_least as f64 / total,
            };
            at_least -= count;
            bin
        })
        .collect();
    DegreeDistribution { bins }
}

/// `Σ (k*_in − k_in(i)) / (n−1)²`, normalised by a directed star in which
/// all other nodes point at the centre.
pub fn in_degree_centralization(g: &DirectedGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::Degenerate(format!(
            "centralization needs at least 3 nodes, got {n}"
        )));
    }
    let degrees: Vec<u64> = (0..n).map(|v| g.in_degree(v) as u64).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let spread: u64 = degrees.iter().map(|&k| max - k).sum();
    let star = ((n - 1) * (n - 1)) as f64;
    Ok(spread as f64 / star)
}

/// Points `(i/n, share of the i smallest values)` for `i = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Trapezoidal area under the curve.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }
}

fn checked_sorted(values: &[f64]) -> Result<(Vec<f64>, f64)> {
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "values must be finite and non-negative, got {bad}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    Ok((sorted, total))
}

pub fn lorenz_points(values: &[f64]) -> Result<LorenzCurve> {
    let (sorted, total) = checked_sorted(values)?;
    let n = sorted.len() as f64;
    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push((0.0, 0.0));
    let mut running = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        running += v;
        points.push(((i + 1) as f64 / n, running / total));
    }
    Ok(LorenzCurve { points })
}

/// `1 − 2·B`, with `B` the trapezoidal area under the empirical Lorenz
/// curve of `values`.
pub fn gini(values: &[f64]) -> Result<f64> {
    Ok(1.0 - 2.0 * lorenz_points(values)?.area())
}

/// Unweighted in-degrees in node order.
pub fn in_degrees(g: &DirectedGraph) -> Vec<f64> {
    (0..g.node_count()).map(|v| g.in_degree(v) as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringCoefficient {
    /// `Σ Cl_i / n`; zero for an empty graph.
    pub average: f64,
    /// `Cl_i` in node order; zero for nodes with fewer than two neighbours.
    pub local: Vec<f64>,
}

/// Local and average clustering on the simple undirected form of `g`.
pub fn clustering_coefficient(g: &DirectedGraph) -> ClusteringCoefficient {
    let nbrs = g.undirected_neighbors();
    let n = nbrs.len();
    let mut mark = vec![false; n];
    // Local values as fractions `(2·links, k(k−1))`.
    let fractions: Vec<(u64, u64)> = (0..n)
        .map(|i| {
            let k = nbrs[i].len();
            if k < 2 {
                return (0, 1);
            }
            for &j in &nbrs[i] {
                mark[j] = true;
            }
            // Each link among neighbours is seen from both ends.
            let seen: usize = nbrs[i]
                .iter()
                .map(|&j| nbrs[j].iter().filter(|&&u| mark[u]).count())
                .sum();
            for &j in &nbrs[i] {
                mark[j] = false;
            }
            let links = seen / 2;
            ((2 * links) as u64, (k * (k - 1)) as u64)
        })
        .collect();
    let local: Vec<f64> = fractions
        .iter()
        .map(|&(a, b)| a as f64 / b as f64)
        .collect();
    let average = if n == 0 {
        0.0
    } else {
        exact_mean(&fractions).unwrap_or_else(|| local.iter().sum::<f64>() / n as f64)
    };
    ClusteringCoefficient { average, local }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Mean of the fractions, correctly rounded, or `None` when the exact sum
/// outgrows the integer range.
fn exact_mean(fractions: &[(u64, u64)]) -> Option<f64> {
    const EXACT: u128 = 1 << 53;
    let (mut num, mut den) = (0u128, 1u128);
    for &(a, b) in fractions {
        let (a, b) = (a as u128, b as u128);
        let l = den / gcd(den, b) * b;
        num = num.checked_mul(l / den)?.checked_add(a * (l / b))?;
        den = l;
        let d = gcd(num, den);
        (num, den) = (num / d, den / d);
    }
    let den = den.checked_mul(fractions.len() as u128)?;
    let d = gcd(num, den);
    let (num, den) = (num / d, den / d);
    (num < EXACT && den < EXACT).then(|| num as f64 / den as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathLengthMode {
    /// Unreachable pairs contribute distance 0 and stay in the denominator.
    PaperLiteral,
    /// Average over reachable ordered pairs only.
    ReachableOnly,
}

/// Integer totals behind both average-path-length conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathLengthSummary {
    pub nodes: usize,
    /// Sum of shortest directed distances over reachable ordered pairs.
    pub total_distance: u64,
    pub reachable_pairs: u64,
}

impl PathLengthSummary {
    pub fn ordered_pairs(&self) -> u64 {
        let n = self.nodes as u64;
        n * n.saturating_sub(1)
    }

    pub fn average(&self, mode: PathLengthMode) -> Result<f64> {
        if self.nodes < 2 {
            return Err(Error::Degenerate(format!(
                "average path length needs at least 2 nodes, got {}",
                self.nodes
            )));
        }
        let denominator = match mode {
            PathLengthMode::PaperLiteral => self.ordered_pairs(),
            PathLengthMode::ReachableOnly if self.reachable_pairs == 0 => {
                return Err(Error::NoReachablePairs)
            }
            PathLengthMode::ReachableOnly => self.reachable_pairs,
        };
        Ok(self.total_distance as f64 / denominator as f64)
    }
}

/// Breadth-first search from every node along edge direction. Sources run on
/// the current rayon pool; totals are integers so the result is independent
/// of scheduling.
pub fn path_length_summary(g: &DirectedGraph) -> PathLengthSummary {
    let n = g.node_count();
    let (total_distance, reachable_pairs) = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new()),
            |(dist, queue), source| {
                dist.fill(u32::MAX);
                dist[source] = 0;
                queue.push_back(source);
                let (mut sum, mut reached) = (0u64, 0u64);
                while let Some(v) = queue.pop_front() {
                    let d = dist[v];
                    for &(u, _) in g.out_edges(v) {
                        if dist[u] == u32::MAX {
                            dist[u] = d + 1;
                            sum += u64::from(d + 1);
                            reached += 1;
                            queue.push_back(u);
                        }
                    }
                }
                (sum, reached)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    PathLengthSummary {
        nodes: n,
        total_distance,
        reachable_pairs,
    }
}

pub fn average_path_length(g: &DirectedGraph, mode: PathLengthMode) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::Degenerate(format!(
            "average path length needs at least 2 nodes, got {}",
            g.node_count()
        )));
    }
    path_length_summary(g).average(mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoreDecomposition {
    /// k-index per node, in node order.
    pub k_index: Vec<usize>,
    pub k_max: usize,
    pub k_avg: f64,
    /// Population standard deviation of the k-index.
    pub k_std: f64,
    /// Number of nodes with each k-index value.
    pub shells: BTreeMap<usize, usize>,
}

impl CoreDecomposition {
    /// Nodes in the k-core (k-index at least `k`).
    pub fn core_members(&self, k: usize) -> Vec<usize> {
        (0..self.k_index.len())
            .filter(|&v| self.k_index[v] >= k)
            .collect()
    }
}

/// Bucket-based peeling on the simple undirected form of `g`.
pub fn k_core_decomposition(g: &DirectedGraph) -> CoreDecomposition {
    let nbrs = g.undirected_neighbors();
    let n = nbrs.len();
    let mut degree: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // Nodes sorted by degree with bucket starts, as in Batagelj–Zaversnik.
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for slot in bin.iter_mut() {
        let count = *slot;
        *slot = start;
        start += count;
    }
    let mut order = vec![0usize; n];
    let mut position = vec![0usize; n];
    for v in 0..n {
        position[v] = bin[degree[v]];
        order[position[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_degree).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &u in &nbrs[v] {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = position[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    position[u] = pw;
                    position[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }

    let k_index = degree;
    let k_max = k_index.iter().copied().max().unwrap_or(0);
    let (k_avg, k_std) = if n == 0 {
        (0.0, 0.0)
    } else {
        let mean = k_index.iter().sum::<usize>() as f64 / n as f64;
        let var = k_index
            .iter()
            .map(|&k| (k as f64 - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        (mean, var.sqrt())
    };
    let mut shells = BTreeMap::new();
    for &k in &k_index {
        *shells.entry(k).or_insert(0) += 1;
    }
    CoreDecomposition {
        k_index,
        k_max,
        k_avg,
        k_std,
        shells,
    }
}
