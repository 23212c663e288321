//! Polynomial special cases and structural bounds: optimal covers on trees,
//! biconnected decomposition, the lower bound from dropping the
//! shortest-path requirement, and the two worst-case gadget families.

use thiserror::Error;

use crate::exact::{solve_exact, ExactOptions, ExactStatus};
use crate::graph::{Network, Vertex};
use crate::hitting::{build_hslb_instance, exact_hitting_set, ExactHittingOptions};
use crate::scp::ScpInstance;
use crate::triples::{gen_path_disjoint, gen_set_disjoint, Disjointness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialError {
    #[error("network is not symmetric (arc {0} -> {1} has no matching reverse arc)")]
    NotSymmetric(Vertex, Vertex),
    #[error("underlying undirected graph is not a tree ({edges} edges on {vertices} vertices)")]
    NotTree { vertices: usize, edges: usize },
    #[error("instance has no customers")]
    NoCustomers,
    #[error("invalid fixture size {0}")]
    FixtureSize(usize),
    #[error("fixture self-check failed: {0}")]
    FixtureCheck(String),
}

fn require_symmetric(net: &Network) -> Result<(), SpecialError> {
    let (ok, bad) = net.check_symmetric();
    if ok {
        Ok(())
    } else {
        Err(SpecialError::NotSymmetric(bad[0].tail, bad[0].head))
    }
}

/// Optimal cover when the underlying graph is a tree: prune non-customer
/// leaves until none remain, then take the leaves of what is left.
pub fn tree_optimum(net: &Network) -> Result<Vec<Vertex>, SpecialError> {
    require_symmetric(net)?;
    let n = net.vertex_count();
    let adj = net.undirected_adjacency();
    let edges: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    if edges + 1 != n {
        return Err(SpecialError::NotTree { vertices: n, edges });
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut stack: Vec<Vertex> = (0..n).filter(|&v| degree[v] <= 1 && !net.is_customer(v)).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &adj[v] {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] <= 1 && !net.is_customer(w) {
                    stack.push(w);
                }
            }
        }
    }
    Ok((0..n).filter(|&v| alive[v] && degree[v] <= 1).collect())
}

/// A maximal biconnected piece: either a 2-connected component (three or
/// more vertices) or a bridge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<Vertex>,
    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(Vertex, Vertex)>,
}

impl Block {
    pub fn is_bridge(&self) -> bool {
        self.edges.len() == 1
    }
}

/// Blocks and articulation points of the undirected view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTree {
    pub blocks: Vec<Block>,
    pub articulation_points: Vec<Vertex>,
}

impl BlockTree {
    /// The 2-connected components.
    pub fn components(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| !b.is_bridge())
    }

    pub fn bridges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.blocks.iter().filter(|b| b.is_bridge()).map(|b| b.edges[0])
    }

    /// Adjacency of the block-cut tree: nodes `0..blocks.len()` are blocks,
    /// then one node per articulation point in order.
    pub fn block_cut_tree(&self) -> Vec<Vec<usize>> {
        let nb = self.blocks.len();
        let mut adj = vec![Vec::new(); nb + self.articulation_points.len()];
        for (i, &a) in self.articulation_points.iter().enumerate() {
            for (b, block) in self.blocks.iter().enumerate() {
                if block.vertices.binary_search(&a).is_ok() {
                    adj[b].push(nb + i);
                    adj[nb + i].push(b);
                }
            }
        }
        adj
    }
}

/// Lowpoint decomposition of the subgraph induced by `alive`.
fn decompose(adj: &[Vec<Vertex>], alive: &[bool]) -> BlockTree {
    const UNSET: usize = usize::MAX;
    let n = adj.len();
    let mut disc = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut is_ap = vec![false; n];
    let mut timer = 0;
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();

    for root in (0..n).filter(|&v| alive[v]) {
        if disc[root] != UNSET {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        let mut frames: Vec<(Vertex, Vertex, usize)> = vec![(root, UNSET, 0)];
        while let Some(frame) = frames.last_mut() {
            let (v, parent, i) = *frame;
            if i < adj[v].len() {
                frame.2 += 1;
                let w = adj[v][i];
                if !alive[w] {
                    continue;
                }
                if disc[w] == UNSET {
                    edge_stack.push((v, w));
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    frames.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if parent == UNSET {
                    continue;
                }
                low[parent] = low[parent].min(low[v]);
                if low[v] >= disc[parent] {
                    if parent != root {
                        is_ap[parent] = true;
                    }
                    let mut edges = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        edges.push((e.0.min(e.1), e.0.max(e.1)));
                        if e == (parent, v) {
                            break;
                        }
                    }
                    edges.sort_unstable();
                    let mut vertices: Vec<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                    vertices.sort_unstable();
                    vertices.dedup();
                    blocks.push(Block { vertices, edges });
                }
            }
        }
        if root_children >= 2 {
            is_ap[root] = true;
        }
    }
    blocks.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    BlockTree { blocks, articulation_points: (0..n).filter(|&v| is_ap[v]).collect() }
}

pub fn biconnected_components(net: &Network) -> BlockTree {
    let adj = net.undirected_adjacency();
    decompose(&adj, &vec![true; net.vertex_count()])
}

/// Optimal cover when paths need only be vertex-disjoint, not shortest; a
/// lower bound on the pathwise-disjoint optimum. Returns the cover.
pub fn updfl_lower_bound(net: &Network) -> Result<Vec<Vertex>, SpecialError> {
    require_symmetric(net)?;
    if net.customers().is_empty() {
        return Err(SpecialError::NoCustomers);
    }
    let n = net.vertex_count();
    let adj = net.undirected_adjacency();
    let mut alive = vec![true; n];
    let degree = |alive: &[bool], v: Vertex| adj[v].iter().filter(|&&w| alive[w]).count();

    loop {
        // non-customer leaves
        let mut stack: Vec<Vertex> = (0..n).filter(|&v| alive[v] && !net.is_customer(v) && degree(&alive, v) <= 1).collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &w in &adj[v] {
                if alive[w] && !net.is_customer(w) && degree(&alive, w) <= 1 {
                    stack.push(w);
                }
            }
        }
        // leaf components without an internal customer
        let bt = decompose(&adj, &alive);
        let mut changed = false;
        for block in bt.components() {
            let aps: Vec<Vertex> = block.vertices.iter().copied().filter(|v| bt.articulation_points.binary_search(v).is_ok()).collect();
            if aps.len() != 1 {
                continue;
            }
            let internal = block.vertices.iter().copied().filter(|&v| v != aps[0]);
            if internal.clone().all(|v| !net.is_customer(v)) {
                for v in internal {
                    alive[v] = false;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let bt = decompose(&adj, &alive);
    let leaves: Vec<Vertex> = (0..n).filter(|&v| alive[v] && degree(&alive, v) == 1).collect();
    let mut leaf_picks = Vec::new();
    for block in bt.components() {
        let mut aps = block.vertices.iter().filter(|v| bt.articulation_points.binary_search(v).is_ok());
        if let (Some(&ap), None) = (aps.next(), aps.next()) {
            let pick = block.vertices.iter().copied().find(|&v| v != ap && net.is_customer(v)).expect("pruned");
            leaf_picks.push(pick);
        }
    }
    if leaves.is_empty() && leaf_picks.is_empty() {
        let customers: Vec<Vertex> = net.customers().iter().copied().filter(|&c| alive[c]).collect();
        return Ok(customers.into_iter().take(2).collect());
    }
    let mut cover = leaves;
    cover.extend(leaf_picks);
    cover.sort_unstable();
    cover.dedup();
    Ok(cover)
}

/// Gadget where the hitting-set bound is 3 but the set-disjoint optimum is
/// `n`: customers `0..n`, hub vertices `n..n+3`, extra facilities
/// `n+3..n+6`. Every customer is adjacent to all hubs; extra facility `i`
/// is adjacent to the hubs other than hub `i`.
pub fn build_fig4_fixture(n: usize) -> Result<Network, SpecialError> {
    if n < 4 {
        return Err(SpecialError::FixtureSize(n));
    }
    let hub = |j: usize| n + j;
    let extra = |i: usize| n + 3 + i;
    let mut edges = Vec::new();
    for c in 0..n {
        for j in 0..3 {
            edges.push((c, hub(j), 1));
        }
    }
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            edges.push((extra(i), hub(j), 1));
        }
    }
    let customers: Vec<Vertex> = (0..n).collect();
    let mut facilities = customers.clone();
    facilities.extend((0..3).map(extra));
    let net = Network::from_edges(n + 6, &edges, customers, facilities)
        .map_err(|e| SpecialError::FixtureCheck(e.to_string()))?;

    let hs = build_hslb_instance(&net);
    let hslb = exact_hitting_set(&hs, ExactHittingOptions::default()).map_err(|e| SpecialError::FixtureCheck(e.to_string()))?;
    if hslb.value() != 3 || !hslb.proven {
        return Err(SpecialError::FixtureCheck(format!("hitting-set bound {} (expected 3)", hslb.value())));
    }
    let inst = ScpInstance::from_network(&net, gen_set_disjoint(&net)).map_err(|e| SpecialError::FixtureCheck(e.to_string()))?;
    let opt = solve_exact(&inst, &ExactOptions { hitting: Some(&hs), root_iterations: 4, ..Default::default() })
        .map_err(|e| SpecialError::FixtureCheck(e.to_string()))?;
    if opt.status != ExactStatus::Optimal || opt.cover.len() != n {
        return Err(SpecialError::FixtureCheck(format!("optimum {} (expected {n})", opt.cover.len())));
    }
    Ok(net)
}

/// Gadget with `7N + 2` vertices where the unconstrained bound is 2 but
/// every pathwise-disjoint cover holds all `N` middle customers. Top `0`,
/// bottom `1`, middle customers `2..2+N`, their left vertices
/// `2+N..2+2N`, then a 5-vertex chain per middle customer from the top.
pub fn build_fig5_fixture(big_n: usize) -> Result<Network, SpecialError> {
    if big_n < 2 {
        return Err(SpecialError::FixtureSize(big_n));
    }
    let (top, bottom) = (0, 1);
    let middle = |i: usize| 2 + i;
    let left = |i: usize| 2 + big_n + i;
    let chain = |i: usize, j: usize| 2 + 2 * big_n + 5 * i + j;
    let mut edges = Vec::new();
    for i in 0..big_n {
        edges.push((top, left(i), 1));
        edges.push((bottom, left(i), 1));
        edges.push((left(i), middle(i), 1));
        edges.push((top, chain(i, 0), 1));
        for j in 0..4 {
            edges.push((chain(i, j), chain(i, j + 1), 1));
        }
        edges.push((chain(i, 4), middle(i), 1));
    }
    let n = 7 * big_n + 2;
    let customers: Vec<Vertex> = [top, bottom].into_iter().chain((0..big_n).map(middle)).collect();
    let net = Network::from_edges(n, &edges, customers.clone(), customers)
        .map_err(|e| SpecialError::FixtureCheck(e.to_string()))?;

    if net.vertex_count() != 7 * big_n + 2 {
        return Err(SpecialError::FixtureCheck("vertex count".into()));
    }
    let bound = updfl_lower_bound(&net)?;
    if bound.len() != 2 {
        return Err(SpecialError::FixtureCheck(format!("unconstrained bound {} (expected 2)", bound.len())));
    }
    let ts = gen_path_disjoint(&net, Disjointness::Vertex);
    if let Some(i) = (0..big_n).find(|&i| !ts.for_customer(middle(i)).is_empty()) {
        return Err(SpecialError::FixtureCheck(format!("middle customer {} is coverable by a pair", middle(i))));
    }
    Ok(net)
}
