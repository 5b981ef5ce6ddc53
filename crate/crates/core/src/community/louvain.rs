use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{aggregate, numerator_to_q, Partition};
use crate::error::{Error, Result};
use crate::graph::{undirected_view, DirectedGraph, UndirectedView};

/// Community bookkeeping for local moves on one aggregation level.
///
/// `sigma_in(c)` sums `A_ij` over ordered member pairs of `c` (each internal
/// edge twice, a self-loop `w` as `2w`); `sigma_tot(c)` sums member degrees.
/// A node may be detached from every community with [`remove`], which is
/// the state [`delta_modularity`] evaluates against.
///
/// [`remove`]: LouvainState::remove
#[derive(Clone, Debug)]
pub struct LouvainState<'a> {
    view: &'a UndirectedView,
    community: Vec<Option<usize>>,
    sigma_in: Vec<u64>,
    sigma_tot: Vec<u64>,
    degree: Vec<u64>,
}

impl<'a> LouvainState<'a> {
    /// Every node in its own community; community ids equal node indices.
    pub fn singletons(view: &'a UndirectedView) -> Self {
        let n = view.node_count();
        let degree: Vec<u64> = (0..n).map(|i| view.degree(i)).collect();
        LouvainState {
            view,
            community: (0..n).map(Some).collect(),
            sigma_in: (0..n).map(|i| 2 * view.self_loop(i)).collect(),
            sigma_tot: degree.clone(),
            degree,
        }
    }

    pub fn from_partition(view: &'a UndirectedView, p: &Partition) -> Result<Self> {
        if p.len() != view.node_count() {
            return Err(Error::InvalidParameter(
                "partition does not cover the graph".into(),
            ));
        }
        let mut state = Self::singletons(view);
        for i in 0..view.node_count() {
            state.remove(i)?;
        }
        // Community slots stay one per node; partition ids are all < n.
        for i in 0..view.node_count() {
            state.insert(i, p.community_of(i))?;
        }
        Ok(state)
    }

    pub fn node_count(&self) -> usize {
        self.community.len()
    }

    /// Total undirected weight `m`.
    pub fn total_weight(&self) -> u64 {
        self.view.total_weight()
    }

    pub fn community_of(&self, node: usize) -> Option<usize> {
        self.community[node]
    }

    pub fn degree(&self, node: usize) -> u64 {
        self.degree[node]
    }

    pub fn sigma_in(&self, community: usize) -> u64 {
        self.sigma_in[community]
    }

    pub fn sigma_tot(&self, community: usize) -> u64 {
        self.sigma_tot[community]
    }

    /// Weight between `node` and the other current members of `community`.
    pub fn links_to(&self, node: usize, community: usize) -> u64 {
        self.view
            .neighbors(node)
            .iter()
            .filter(|&&(j, _)| self.community[j] == Some(community))
            .map(|&(_, w)| w)
            .sum()
    }

    /// Detaches `node` from its community and returns that community.
    pub fn remove(&mut self, node: usize) -> Result<usize> {
        let c = self.community[node]
            .ok_or_else(|| Error::Bookkeeping(format!("node {node} is already detached")))?;
        let links = self.links_to(node, c);
        self.sigma_in[c] -= 2 * links + 2 * self.view.self_loop(node);
        self.sigma_tot[c] -= self.degree[node];
        self.community[node] = None;
        Ok(c)
    }

    pub fn insert(&mut self, node: usize, community: usize) -> Result<()> {
        if self.community[node].is_some() {
            return Err(Error::Bookkeeping(format!("node {node} is still attached")));
        }
        if community >= self.sigma_tot.len() {
            return Err(Error::Bookkeeping(format!("unknown community {community}")));
        }
        self.insert_with_links(node, community, self.links_to(node, community));
        Ok(())
    }

    fn insert_with_links(&mut self, node: usize, community: usize, links: u64) {
        self.sigma_in[community] += 2 * links + 2 * self.view.self_loop(node);
        self.sigma_tot[community] += self.degree[node];
        self.community[node] = Some(community);
    }

    /// `4m² · Q` for the current assignment. Detached nodes count as
    /// singletons.
    fn modularity_numerator(&self) -> i128 {
        let two_m = 2 * self.view.total_weight() as i128;
        let attached: i128 = self
            .sigma_in
            .iter()
            .zip(&self.sigma_tot)
            .map(|(&inside, &tot)| inside as i128 * two_m - (tot as i128) * (tot as i128))
            .sum();
        let detached: i128 = (0..self.node_count())
            .filter(|&i| self.community[i].is_none())
            .map(|i| {
                let k = self.degree[i] as i128;
                2 * self.view.self_loop(i) as i128 * two_m - k * k
            })
            .sum();
        attached + detached
    }

    pub fn modularity(&self) -> Result<f64> {
        if self.view.total_weight() == 0 {
            return Err(Error::NoEdges);
        }
        Ok(numerator_to_q(
            self.modularity_numerator(),
            self.view.total_weight(),
        ))
    }
}

/// Modularity change from inserting the detached `node` into `target`:
///
/// `[(Σin + k_i,in)/2m − ((Σtot + k_i)/2m)²] − [Σin/2m − (Σtot/2m)² − (k_i/2m)²]`
///
/// with `k_i,in = 2 · links_to(node, target)`, matching `Σin`'s
/// ordered-pair convention. The bracketed expression expands to
/// `(k_i,in · m − Σtot · k_i) / 2m²`, which is what gets evaluated so the
/// result carries a single rounding.
pub fn delta_modularity(state: &LouvainState<'_>, node: usize, target: usize) -> Result<f64> {
    if node >= state.node_count() {
        return Err(Error::Bookkeeping(format!("unknown node {node}")));
    }
    if target >= state.sigma_tot.len() {
        return Err(Error::Bookkeeping(format!("unknown community {target}")));
    }
    if state.community_of(node).is_some() {
        return Err(Error::Bookkeeping(format!(
            "node {node} must be detached before evaluating a move"
        )));
    }
    let m = state.total_weight();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let k_i_in = 2 * state.links_to(node, target) as i128;
    let numerator = gain_numerator(k_i_in, state.sigma_tot(target), state.degree(node), m);
    let m = m as f64;
    Ok(numerator as f64 / (2.0 * m * m))
}

/// `2m² · ΔQ`, exact.
fn gain_numerator(k_i_in: i128, sigma_tot: u64, degree: u64, m: u64) -> i128 {
    k_i_in * m as i128 - sigma_tot as i128 * degree as i128
}

/// Louvain on `g`'s symmetrised weighted form. Deterministic in `(g, seed)`.
pub fn louvain(g: &DirectedGraph, seed: u64) -> Result<Partition> {
    louvain_view(&undirected_view(g), seed).map(|(p, _)| p)
}

/// Like [`louvain`], also returning the modularity after the initial
/// singleton state, after every local-move sweep and after every
/// aggregation.
pub fn louvain_traced(g: &DirectedGraph, seed: u64) -> Result<(Partition, Vec<f64>)> {
    louvain_view(&undirected_view(g), seed)
}

/// Louvain on an undirected weighted graph.
///
/// Each pass runs local moves and aggregation level by level until a level
/// makes no move. Aggregation freezes members together, so the flat result
/// of a pass may still admit an improving single-node move; the next pass
/// starts from that flat partition on the original nodes. Passes repeat
/// until one makes no move at the node level.
pub fn louvain_view(view: &UndirectedView, seed: u64) -> Result<(Partition, Vec<f64>)> {
    let m = view.total_weight();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    let mut last = LouvainState::singletons(view).modularity_numerator();
    trace.push(numerator_to_q(last, m));

    let mut flat = Partition::singletons(view.node_count());
    loop {
        let (next, moved) = multilevel_pass(view, &flat, &mut rng, &mut last, &mut trace)?;
        flat = next;
        if !moved {
            return Ok((flat, trace));
        }
    }
}

/// One pass of the level loop starting from `start` on the original nodes.
/// Returns the flat partition and whether any node moved on the first level.
fn multilevel_pass(
    view: &UndirectedView,
    start: &Partition,
    rng: &mut ChaCha8Rng,
    last: &mut i128,
    trace: &mut Vec<f64>,
) -> Result<(Partition, bool)> {
    let m = view.total_weight();
    let mut membership: Vec<usize> = (0..view.node_count()).collect();
    let mut level = view.clone();
    let mut first_level_moved = false;
    let mut first = true;
    loop {
        let (level_partition, moved) = {
            let mut state = if first {
                LouvainState::from_partition(&level, start)?
            } else {
                LouvainState::singletons(&level)
            };
            let moved = local_moves(&mut state, rng, last, trace);
            let raw: Vec<usize> = state
                .community
                .iter()
                .map(|c| c.expect("all nodes attached after a sweep"))
                .collect();
            (Partition::from_assignment(&raw), moved)
        };
        if first {
            first_level_moved = moved;
            first = false;
        } else if !moved {
            break;
        }
        for c in membership.iter_mut() {
            *c = level_partition.community_of(*c);
        }
        if !moved {
            // First level of a pass with nothing left to move.
            break;
        }
        level = aggregate(&level, &level_partition);

        let numerator = LouvainState::singletons(&level).modularity_numerator();
        debug_assert!(numerator >= *last, "aggregation lowered modularity");
        *last = numerator;
        trace.push(numerator_to_q(numerator, m));
    }
    Ok((Partition::from_assignment(&membership), first_level_moved))
}

/// Sweeps until no node moves. Returns whether anything moved.
fn local_moves(
    state: &mut LouvainState<'_>,
    rng: &mut ChaCha8Rng,
    last: &mut i128,
    trace: &mut Vec<f64>,
) -> bool {
    let n = state.node_count();
    let m = state.total_weight();
    let mut order: Vec<usize> = (0..n).collect();
    let mut neighbor_weight = vec![0u64; n];
    let mut neighbor_communities: Vec<usize> = Vec::new();
    let mut moved_any = false;

    loop {
        order.shuffle(rng);
        let mut moves = 0usize;
        for &i in &order {
            let original = state.community[i].expect("attached");
            for &(j, w) in state.view.neighbors(i) {
                let c = state.community[j].expect("attached");
                if neighbor_weight[c] == 0 {
                    neighbor_communities.push(c);
                }
                neighbor_weight[c] += w;
            }
            let k_i = state.degree[i];
            let own_links = neighbor_weight[original];
            state.sigma_in[original] -= 2 * own_links + 2 * state.view.self_loop(i);
            state.sigma_tot[original] -= k_i;
            state.community[i] = None;

            let stay = gain_numerator(2 * own_links as i128, state.sigma_tot[original], k_i, m);
            let mut best: Option<(usize, i128)> = None;
            neighbor_communities.sort_unstable();
            for &c in &neighbor_communities {
                if c == original {
                    continue;
                }
                let gain =
                    gain_numerator(2 * neighbor_weight[c] as i128, state.sigma_tot[c], k_i, m);
                // Ascending ids with a strict comparison: lowest id wins ties.
                if best.is_none_or(|(_, g)| gain > g) {
                    best = Some((c, gain));
                }
            }
            let target = match best {
                Some((c, gain)) if gain > stay => c,
                _ => original,
            };
            state.insert_with_links(i, target, neighbor_weight[target]);
            if target != original {
                moves += 1;
            }
            for &c in &neighbor_communities {
                neighbor_weight[c] = 0;
            }
            neighbor_weight[original] = 0;
            neighbor_communities.clear();
        }

        let numerator = state.modularity_numerator();
        debug_assert!(numerator >= *last, "local move lowered modularity");
        *last = numerator;
        trace.push(numerator_to_q(numerator, m));

        if moves == 0 {
            return moved_any;
        }
        moved_any = true;
    }
}
