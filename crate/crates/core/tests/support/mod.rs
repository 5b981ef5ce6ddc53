//! Independent reference implementations and graph generators shared by the
//! integration and acceptance tests. Nothing here calls into the metric or
//! clustering code it is used to check.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use netpolar::graph::{build_graph, DirectedGraph, WeightedEdge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn node_name(i: usize) -> String {
    format!("n{i:02}")
}

/// Random directed edge list over `n` nodes with edge probability `p` and
/// weights in `1..=max_weight`. No self-loops.
pub fn random_edges(seed: u64, n: usize, p: f64, max_weight: u64) -> Vec<(usize, usize, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(p) {
                edges.push((s, t, rng.gen_range(1..=max_weight)));
            }
        }
    }
    edges
}

/// Graph from index triples; node `i` is named [`node_name`]`(i)`, so the
/// graph's index order equals the triple indices when all nodes appear.
pub fn graph_from(edges: &[(usize, usize, u64)]) -> DirectedGraph {
    build_graph(
        edges
            .iter()
            .map(|&(s, t, w)| WeightedEdge::new(&node_name(s), &node_name(t), w).unwrap()),
        1,
    )
    .unwrap()
}

/// Dense edge list of `g` re-read through node names.
pub fn dense_weights(g: &DirectedGraph) -> Vec<Vec<u64>> {
    let n = g.node_count();
    let mut w = vec![vec![0u64; n]; n];
    for e in g.edges() {
        let s = g.index_of(e.source.as_str()).unwrap();
        let t = g.index_of(e.target.as_str()).unwrap();
        w[s][t] += e.weight;
    }
    w
}

/// `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)` evaluated literally
/// over the symmetrised matrix `A = W + Wᵀ` with `m = Σ W`.
pub fn modularity_dense(w: &[Vec<u64>], assignment: &[usize]) -> f64 {
    let n = w.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (w[i][j] + w[j][i]) as f64).collect())
        .collect();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Exact `4m² · Q` over the symmetrised matrix.
pub fn modularity_numerator_dense(w: &[Vec<u64>], assignment: &[usize]) -> i128 {
    let n = w.len();
    let a = |i: usize, j: usize| (w[i][j] + w[j][i]) as i128;
    let k: Vec<i128> = (0..n).map(|i| (0..n).map(|j| a(i, j)).sum()).collect();
    let two_m: i128 = k.iter().sum();
    let mut num = 0i128;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                num += a(i, j) * two_m - k[i] * k[j];
            }
        }
    }
    num
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            extend(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    let mut prefix = vec![0];
    extend(&mut prefix, 0, n, &mut out);
    out
}

/// Maximum modularity over all set partitions and every maximiser.
pub fn brute_force_max_q(w: &[Vec<u64>]) -> (f64, Vec<Vec<usize>>) {
    let mut best = i128::MIN;
    let mut winners = Vec::new();
    for p in set_partitions(w.len()) {
        let num = modularity_numerator_dense(w, &p);
        if num > best {
            best = num;
            winners.clear();
        }
        if num == best {
            winners.push(p);
        }
    }
    (modularity_dense(w, &winners[0]), winners)
}

/// Canonical relabelling by first appearance.
pub fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// PageRank by solving `(I − c·T) x = (1−c)/n · 1`, where `T` is the
/// column-stochastic transition matrix with dangling columns uniform.
pub fn pagerank_dense(w: &[Vec<u64>], damping: f64) -> Vec<f64> {
    let n = w.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let out: usize = (0..n).filter(|&i| w[j][i] > 0).count();
        for i in 0..n {
            t[(i, j)] = if out == 0 {
                1.0 / n as f64
            } else if w[j][i] > 0 {
                1.0 / out as f64
            } else {
                0.0
            };
        }
    }
    let system = DMatrix::<f64>::identity(n, n) - t * damping;
    let rhs = DVector::<f64>::from_element(n, (1.0 - damping) / n as f64);
    let x = system.lu().solve(&rhs).expect("non-singular");
    x.iter().copied().collect()
}

/// `Σ_ij |x_i − x_j| / (2 n² μ)`.
pub fn gini_pairwise(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut total = 0.0;
    for a in values {
        for b in values {
            total += (a - b).abs();
        }
    }
    total / (2.0 * n * n * mean)
}

/// Floyd–Warshall over unit-length directed edges: (sum of finite
/// distances over ordered pairs i≠j, number of such pairs).
#[allow(clippy::needless_range_loop)]
pub fn all_pairs_oracle(w: &[Vec<u64>]) -> (u64, u64) {
    let n = w.len();
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if w[i][j] > 0 {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut sum = 0;
    let mut pairs = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] < INF {
                sum += d[i][j];
                pairs += 1;
            }
        }
    }
    (sum, pairs)
}

fn undirected_adjacency(w: &[Vec<u64>]) -> Vec<Vec<bool>> {
    let n = w.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && (w[i][j] > 0 || w[j][i] > 0))
                .collect()
        })
        .collect()
}

/// k-index from the definition: the k-core is what survives repeatedly
/// deleting nodes of degree < k; a node's index is the largest such k.
pub fn k_index_fixed_point(w: &[Vec<u64>]) -> Vec<usize> {
    let adj = undirected_adjacency(w);
    let n = w.len();
    let mut index = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && (0..n).filter(|&u| alive[u] && adj[v][u]).count() < k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
            }
        }
        for v in 0..n {
            if alive[v] {
                index[v] = k;
            }
        }
    }
    index
}

/// Local clustering by enumerating every neighbour pair: (triangles at i,
/// degree of i).
pub fn local_triangles(w: &[Vec<u64>]) -> Vec<(u64, u64)> {
    let adj = undirected_adjacency(w);
    let n = w.len();
    (0..n)
        .map(|i| {
            let nbrs: Vec<usize> = (0..n).filter(|&j| adj[i][j]).collect();
            let mut t = 0;
            for (a, &x) in nbrs.iter().enumerate() {
                for &y in &nbrs[a + 1..] {
                    if adj[x][y] {
                        t += 1;
                    }
                }
            }
            (t, nbrs.len() as u64)
        })
        .collect()
}
