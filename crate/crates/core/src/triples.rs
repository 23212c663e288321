//! The cover relation `T`: triples `(c, f1, f2)` meaning the facility pair
//! `{f1, f2}` covers customer `c`.
//!
//! Set-disjoint triples reduce to empty intersections of first-hop neighbor
//! sets. Path-disjoint triples (vertex or arc flavour) are found with one
//! residual-graph search per `(c, f1)`: route a single shortest path to
//! `f1` through the unit-capacity shortest-path DAG, then every `f2`
//! reachable in the residual graph admits a second, disjoint path.
//!
//! Generation runs twice per customer, once to count and once to fill
//! exactly-sized buffers, and customers are processed in parallel with a
//! deterministic merge.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Network, ShortestPathDag, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverMode {
    SetDisjoint,
    PathVertexDisjoint,
    PathArcDisjoint,
}

impl CoverMode {
    pub const ALL: [CoverMode; 3] = [
        CoverMode::SetDisjoint,
        CoverMode::PathVertexDisjoint,
        CoverMode::PathArcDisjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoverMode::SetDisjoint => "set",
            CoverMode::PathVertexDisjoint => "path-vertex",
            CoverMode::PathArcDisjoint => "path-arc",
        }
    }
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoverMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" | "set-disjoint" => Ok(CoverMode::SetDisjoint),
            "path-vertex" | "vertex" => Ok(CoverMode::PathVertexDisjoint),
            "path-arc" | "arc" => Ok(CoverMode::PathArcDisjoint),
            other => Err(format!("unknown mode {other:?} (expected set, path-vertex or path-arc)")),
        }
    }
}

/// Disjointness flavour for path-disjoint coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disjointness {
    Vertex,
    Arc,
}

/// One cover record. Stored canonically with `f1 < f2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub customer: u32,
    pub f1: u32,
    pub f2: u32,
}

impl Triple {
    pub fn new(customer: Vertex, a: Vertex, b: Vertex) -> Self {
        let (f1, f2) = if a < b { (a, b) } else { (b, a) };
        Triple { customer: customer as u32, f1: f1 as u32, f2: f2 as u32 }
    }

    pub fn customer(&self) -> Vertex {
        self.customer as Vertex
    }

    /// The member of the pair that is not `f`.
    pub fn partner(&self, f: Vertex) -> Vertex {
        if self.f1 as Vertex == f {
            self.f2 as Vertex
        } else {
            self.f1 as Vertex
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("brute-force enumeration is limited to {limit} vertices (instance has {actual})")]
    TooLarge { limit: usize, actual: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Three copies of the same triples: ordered by customer, by the smaller
/// facility and by the larger facility, each with per-key start offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSet {
    mode: Option<CoverMode>,
    by_customer: Vec<Triple>,
    customer_start: Vec<usize>,
    by_min: Vec<Triple>,
    min_start: Vec<usize>,
    by_max: Vec<Triple>,
    max_start: Vec<usize>,
}

impl TripleSet {
    /// Builds from arbitrary triples over ids `0..id_space`; pairs are
    /// canonicalized and duplicates dropped.
    pub fn from_triples(id_space: usize, mode: Option<CoverMode>, mut triples: Vec<Triple>) -> Self {
        for t in &mut triples {
            *t = Triple::new(t.customer(), t.f1 as Vertex, t.f2 as Vertex);
        }
        triples.sort_unstable();
        triples.dedup();
        Self::from_sorted(id_space, mode, triples)
    }

    fn from_sorted(id_space: usize, mode: Option<CoverMode>, by_customer: Vec<Triple>) -> Self {
        debug_assert!(by_customer.windows(2).all(|w| w[0] < w[1]));
        let customer_start = offsets(id_space, &by_customer, |t| t.customer as usize);
        let (by_min, min_start) = bucket(id_space, &by_customer, |t| t.f1 as usize);
        let (by_max, max_start) = bucket(id_space, &by_customer, |t| t.f2 as usize);
        TripleSet { mode, by_customer, customer_start, by_min, min_start, by_max, max_start }
    }

    pub fn mode(&self) -> Option<CoverMode> {
        self.mode
    }

    pub fn id_space(&self) -> usize {
        self.customer_start.len() - 1
    }

    pub fn len(&self) -> usize {
        self.by_customer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_customer.is_empty()
    }

    /// All triples in `(customer, f1, f2)` order.
    pub fn as_slice(&self) -> &[Triple] {
        &self.by_customer
    }

    pub fn for_customer(&self, c: Vertex) -> &[Triple] {
        &self.by_customer[self.customer_start[c]..self.customer_start[c + 1]]
    }

    /// Triples whose smaller facility is `f`.
    pub fn with_min(&self, f: Vertex) -> &[Triple] {
        &self.by_min[self.min_start[f]..self.min_start[f + 1]]
    }

    /// Triples whose larger facility is `f`.
    pub fn with_max(&self, f: Vertex) -> &[Triple] {
        &self.by_max[self.max_start[f]..self.max_start[f + 1]]
    }

    /// The facility-keyed lists as raw storage, for consistency checks.
    pub fn sorted_copies(&self) -> [&[Triple]; 3] {
        [&self.by_customer, &self.by_min, &self.by_max]
    }

    pub fn contains(&self, c: Vertex, a: Vertex, b: Vertex) -> bool {
        if c >= self.id_space() {
            return false;
        }
        self.for_customer(c).binary_search(&Triple::new(c, a, b)).is_ok()
    }

    /// `p triples <mode> <count>` followed by one `t <c> <f1> <f2>` line each.
    pub fn to_dump_string(&self) -> String {
        let mode = self.mode.map_or("scp", CoverMode::name);
        let mut out = format!("p triples {mode} {}\n", self.len());
        for t in &self.by_customer {
            writeln!(out, "t {} {} {}", t.customer, t.f1, t.f2).unwrap();
        }
        out
    }

    pub fn parse_dump(id_space: usize, text: &str) -> Result<Self, TripleError> {
        let err = |line: usize, msg: &str| TripleError::Parse { line, msg: msg.to_string() };
        let mut mode = None;
        let mut declared = None;
        let mut triples = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                [c, ..] if c.starts_with('#') => {}
                ["p", "triples", m, n] => {
                    mode = m.parse::<CoverMode>().ok();
                    declared = Some(n.parse::<usize>().map_err(|_| err(line_no, "bad count"))?);
                }
                ["t", c, a, b] => {
                    let ids: Result<Vec<usize>, _> = [c, a, b].iter().map(|s| s.parse::<usize>()).collect();
                    let ids = ids.map_err(|_| err(line_no, "bad triple"))?;
                    if ids.iter().any(|&v| v >= id_space) {
                        return Err(err(line_no, "id out of range"));
                    }
                    triples.push(Triple::new(ids[0], ids[1], ids[2]));
                }
                _ => return Err(err(line_no, "unrecognized line")),
            }
        }
        if declared != Some(triples.len()) {
            return Err(err(text.lines().count(), "triple count does not match header"));
        }
        Ok(Self::from_triples(id_space, mode, triples))
    }
}

fn offsets(id_space: usize, triples: &[Triple], key: impl Fn(&Triple) -> usize) -> Vec<usize> {
    let mut start = vec![0usize; id_space + 1];
    for t in triples {
        start[key(t) + 1] += 1;
    }
    for i in 0..id_space {
        start[i + 1] += start[i];
    }
    start
}

/// Stable counting sort by `key`.
fn bucket(
    id_space: usize,
    triples: &[Triple],
    key: impl Fn(&Triple) -> usize,
) -> (Vec<Triple>, Vec<usize>) {
    let start = offsets(id_space, triples, &key);
    let mut next = start.clone();
    let mut out = vec![Triple::default(); triples.len()];
    for t in triples {
        let k = key(t);
        out[next[k]] = *t;
        next[k] += 1;
    }
    (out, start)
}

pub fn gen_set_disjoint(net: &Network) -> TripleSet {
    generate(net, CoverMode::SetDisjoint)
}

pub fn gen_path_disjoint(net: &Network, disjointness: Disjointness) -> TripleSet {
    match disjointness {
        Disjointness::Vertex => generate(net, CoverMode::PathVertexDisjoint),
        Disjointness::Arc => generate(net, CoverMode::PathArcDisjoint),
    }
}

/// Triple generation for any mode: a counting pass sizes one buffer per
/// customer, a second pass fills it.
pub fn generate(net: &Network, mode: CoverMode) -> TripleSet {
    let customers = net.customers();
    let counts: Vec<usize> = customers
        .par_iter()
        .map(|&c| {
            let mut k = 0usize;
            customer_pairs(net, c, mode, |_, _| k += 1);
            k
        })
        .collect();
    let total: usize = counts.iter().sum();

    let mut buf = vec![Triple::default(); total];
    let mut chunks = Vec::with_capacity(customers.len());
    let mut rest = buf.as_mut_slice();
    for &k in &counts {
        let (head, tail) = rest.split_at_mut(k);
        chunks.push(head);
        rest = tail;
    }
    chunks.into_par_iter().zip(customers.par_iter()).for_each(|(chunk, &c)| {
        let mut written = 0usize;
        customer_pairs(net, c, mode, |f1, f2| {
            chunk[written] = Triple::new(c, f1, f2);
            written += 1;
        });
        assert_eq!(written, chunk.len(), "second generation pass disagrees with the count");
    });
    TripleSet::from_sorted(net.vertex_count(), Some(mode), buf)
}

/// Emits every covering pair `(f1, f2)`, `f1 < f2`, for customer `c` in
/// lexicographic order.
fn customer_pairs(net: &Network, c: Vertex, mode: CoverMode, mut emit: impl FnMut(Vertex, Vertex)) {
    let facilities = net.facilities();
    match mode {
        CoverMode::SetDisjoint => {
            let ns = net.neighbor_sets(c);
            for (i, &f1) in facilities.iter().enumerate() {
                if f1 == c {
                    continue;
                }
                let n1 = ns.by_index(i);
                for (j, &f2) in facilities.iter().enumerate().skip(i + 1) {
                    if f2 != c && n1.is_disjoint(ns.by_index(j)) {
                        emit(f1, f2);
                    }
                }
            }
        }
        CoverMode::PathVertexDisjoint | CoverMode::PathArcDisjoint => {
            let split = mode == CoverMode::PathVertexDisjoint;
            let dag = net.shortest_path_dag(c);
            let mut flow = UnitFlowDag::new(net, &dag, split);
            for &f1 in facilities {
                if f1 == c {
                    continue;
                }
                flow.route_lexicographic_path(net, &dag, f1);
                flow.residual_search();
                for &f2 in facilities.iter().filter(|&&f2| f2 > f1 && f2 != c) {
                    if flow.reaches_facility(f2) {
                        emit(f1, f2);
                    }
                }
                flow.clear_flow();
            }
        }
    }
}

/// Unit-capacity flow network over one customer's shortest-path DAG. With
/// vertex splitting, vertex `v` becomes `v_in = 2v -> v_out = 2v + 1` and a
/// DAG arc `(u, v)` becomes `(u_out, v_in)`.
struct UnitFlowDag {
    split: bool,
    source: usize,
    /// `(from, to)` per flow arc.
    arcs: Vec<(usize, usize)>,
    out_start: Vec<usize>,
    out_list: Vec<usize>,
    in_start: Vec<usize>,
    in_list: Vec<usize>,
    /// Flow arc id of each network arc that is in the DAG.
    arc_of: Vec<usize>,
    /// Flow arc id of each vertex's split arc.
    split_of: Vec<usize>,
    used: Vec<bool>,
    used_list: Vec<usize>,
    visited: FixedBitSet,
    queue: Vec<usize>,
    reach: FixedBitSet,
    stack: Vec<Vertex>,
}

const NONE: usize = usize::MAX;

impl UnitFlowDag {
    fn new(net: &Network, dag: &ShortestPathDag, split: bool) -> Self {
        let n = net.vertex_count();
        let c = dag.source();
        let node_count = if split { 2 * n } else { n };
        let node_in = |v: Vertex| if split { 2 * v } else { v };
        let node_out = |v: Vertex| if split { 2 * v + 1 } else { v };

        let mut arcs = Vec::new();
        let mut arc_of = vec![NONE; net.arc_count()];
        let mut split_of = vec![NONE; n];
        if split {
            for v in (0..n).filter(|&v| v != c) {
                split_of[v] = arcs.len();
                arcs.push((node_in(v), node_out(v)));
            }
        }
        for i in dag.dag_arcs() {
            let a = net.arc(i);
            arc_of[i] = arcs.len();
            arcs.push((node_out(a.tail), node_in(a.head)));
        }

        let mut out_start = vec![0usize; node_count + 1];
        let mut in_start = vec![0usize; node_count + 1];
        for &(u, v) in &arcs {
            out_start[u + 1] += 1;
            in_start[v + 1] += 1;
        }
        for i in 0..node_count {
            out_start[i + 1] += out_start[i];
            in_start[i + 1] += in_start[i];
        }
        let mut out_list = vec![0usize; arcs.len()];
        let mut in_list = vec![0usize; arcs.len()];
        let (mut on, mut inn) = (out_start.clone(), in_start.clone());
        for (id, &(u, v)) in arcs.iter().enumerate() {
            out_list[on[u]] = id;
            on[u] += 1;
            in_list[inn[v]] = id;
            inn[v] += 1;
        }

        let used = vec![false; arcs.len()];
        UnitFlowDag {
            split,
            source: node_out(c),
            arcs,
            out_start,
            out_list,
            in_start,
            in_list,
            arc_of,
            split_of,
            used,
            used_list: Vec::new(),
            visited: FixedBitSet::with_capacity(node_count),
            queue: Vec::new(),
            reach: FixedBitSet::with_capacity(n),
            stack: Vec::new(),
        }
    }

    /// Saturates the lexicographically smallest (by vertex id) shortest path
    /// from the source to `target`.
    fn route_lexicographic_path(&mut self, net: &Network, dag: &ShortestPathDag, target: Vertex) {
        dag.backward_reach_into(net, target, &mut self.reach, &mut self.stack);
        let mut v = dag.source();
        while v != target {
            // out arcs are sorted by head, so the first usable one is smallest
            let i = net
                .out_range(v)
                .find(|&i| dag.is_dag_arc(i) && self.reach.contains(net.arc(i).head))
                .expect("target reachable through the DAG");
            self.saturate(self.arc_of[i]);
            v = net.arc(i).head;
            if self.split {
                self.saturate(self.split_of[v]);
            }
        }
    }

    fn saturate(&mut self, id: usize) {
        self.used[id] = true;
        self.used_list.push(id);
    }

    fn clear_flow(&mut self) {
        for id in self.used_list.drain(..) {
            self.used[id] = false;
        }
    }

    /// Breadth-first search from the source in the residual graph.
    fn residual_search(&mut self) {
        self.visited.clear();
        self.queue.clear();
        self.visited.insert(self.source);
        self.queue.push(self.source);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &id in &self.out_list[self.out_start[u]..self.out_start[u + 1]] {
                if !self.used[id] {
                    let v = self.arcs[id].1;
                    if !self.visited.put(v) {
                        self.queue.push(v);
                    }
                }
            }
            for &id in &self.in_list[self.in_start[u]..self.in_start[u + 1]] {
                if self.used[id] {
                    let v = self.arcs[id].0;
                    if !self.visited.put(v) {
                        self.queue.push(v);
                    }
                }
            }
        }
    }

    /// Whether an augmenting path ends at `f`. With vertex splitting the
    /// sink arc leaves `f_out`, so the vertex capacity of `f` is respected.
    fn reaches_facility(&self, f: Vertex) -> bool {
        let node = if self.split { 2 * f + 1 } else { f };
        self.visited.contains(node)
    }
}

/// Counts and percentage of the `|C|(|F|-1)(|F|-2)/2` possible triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleStats {
    pub count: usize,
    pub possible: u64,
    /// Zero when no triple is possible.
    pub percent: f64,
}

pub fn triple_stats(ts: &TripleSet, net: &Network) -> TripleStats {
    let c = net.customers().len() as u64;
    let f = net.facilities().len() as u64;
    let possible = if f >= 2 { c * (f - 1) * (f.saturating_sub(2)) / 2 } else { 0 };
    let percent = if possible == 0 { 0.0 } else { 100.0 * ts.len() as f64 / possible as f64 };
    TripleStats { count: ts.len(), possible, percent }
}

/// Largest instance [`brute_force_triples`] accepts.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 14;

/// All-pairs distances by Floyd–Warshall; `u64::MAX` when unreachable.
pub fn floyd_warshall(net: &Network) -> Vec<Vec<u64>> {
    let n = net.vertex_count();
    let mut d = vec![vec![u64::MAX; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for a in net.arcs() {
        d[a.tail][a.head] = d[a.tail][a.head].min(a.weight);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == u64::MAX {
                continue;
            }
            for j in 0..n {
                if d[k][j] != u64::MAX && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every shortest `from → to` path as a vertex sequence, using a distance
/// matrix from [`floyd_warshall`]. Exponential in general.
pub fn all_shortest_paths(net: &Network, dist: &[Vec<u64>], from: Vertex, to: Vertex) -> Vec<Vec<Vertex>> {
    fn walk(
        net: &Network,
        dist: &[Vec<u64>],
        from: Vertex,
        to: Vertex,
        path: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let v = *path.last().unwrap();
        if v == to {
            out.push(path.clone());
            return;
        }
        for a in net.out_arcs(v) {
            if dist[from][v] + a.weight == dist[from][a.head]
                && dist[from][a.head] + dist[a.head][to] == dist[from][to]
            {
                path.push(a.head);
                walk(net, dist, from, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(net, dist, from, to, &mut vec![from], &mut out);
    out
}

/// Exact triple set straight from the definitions, by enumerating all
/// shortest paths. Only for tiny instances.
pub fn brute_force_triples(net: &Network, mode: CoverMode) -> Result<TripleSet, TripleError> {
    let n = net.vertex_count();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(TripleError::TooLarge { limit: BRUTE_FORCE_MAX_VERTICES, actual: n });
    }
    let dist = floyd_warshall(net);
    let facilities = net.facilities();
    let mut triples = Vec::new();
    for &c in net.customers() {
        let paths: Vec<Vec<OraclePath>> = facilities
            .iter()
            .map(|&f| {
                if f == c {
                    return Vec::new();
                }
                all_shortest_paths(net, &dist, c, f).iter().map(|p| OraclePath::new(p)).collect()
            })
            .collect();
        for i in 0..facilities.len() {
            for j in i + 1..facilities.len() {
                let (f1, f2) = (facilities[i], facilities[j]);
                if f1 == c || f2 == c {
                    continue;
                }
                let (p1, p2) = (&paths[i], &paths[j]);
                let covered = match mode {
                    CoverMode::SetDisjoint => p1.iter().all(|a| p2.iter().all(|b| a.vertices & b.vertices == 0)),
                    CoverMode::PathVertexDisjoint => {
                        p1.iter().any(|a| p2.iter().any(|b| a.vertices & b.vertices == 0))
                    }
                    CoverMode::PathArcDisjoint => {
                        p1.iter().any(|a| p2.iter().any(|b| a.arcs.iter().all(|e| !b.arcs.contains(e))))
                    }
                };
                if covered {
                    triples.push(Triple::new(c, f1, f2));
                }
            }
        }
    }
    Ok(TripleSet::from_triples(n, Some(mode), triples))
}

/// A shortest path seen as its vertex set (source excluded) and arc list.
struct OraclePath {
    vertices: u32,
    arcs: Vec<(Vertex, Vertex)>,
}

impl OraclePath {
    fn new(path: &[Vertex]) -> Self {
        OraclePath {
            vertices: path[1..].iter().fold(0u32, |m, &v| m | (1 << v)),
            arcs: path.windows(2).map(|w| (w[0], w[1])).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::Arc;
    use super::*;
    use crate::generate::{random_network, random_roles};
    use crate::rng::from_seed;

    fn all_modes(net: &Network) -> [TripleSet; 3] {
        CoverMode::ALL.map(|m| generate(net, m))
    }

    #[test]
    fn star_gives_triple_in_every_mode() {
        let net = Network::from_edges(3, &[(0, 1, 1), (0, 2, 1)], vec![0], vec![0, 1, 2]).unwrap();
        for ts in all_modes(&net) {
            assert_eq!(ts.as_slice(), &[Triple::new(0, 1, 2)]);
        }
    }

    #[test]
    fn forced_shared_neighbor_blocks_every_mode() {
        let net = Network::from_edges(4, &[(0, 1, 1), (1, 2, 1), (1, 3, 1)], vec![0], vec![0, 2, 3]).unwrap();
        for ts in all_modes(&net) {
            assert!(ts.is_empty());
        }
    }

    #[test]
    fn diamond_is_covered_in_both_path_modes() {
        // c=0, a=1, b=2, f1=3, f2=4 with directed routes c→a→f1, c→b→f2
        let arcs = [(0, 1), (1, 3), (0, 2), (2, 4), (3, 0), (4, 0)]
            .iter()
            .map(|&(u, v)| Arc::new(u, v, 1))
            .collect();
        let net = Network::new(5, arcs, vec![0], vec![0, 3, 4]).unwrap();
        for mode in [CoverMode::PathVertexDisjoint, CoverMode::PathArcDisjoint] {
            assert!(generate(&net, mode).contains(0, 3, 4));
        }
    }

    #[test]
    fn shared_midpoint_separates_arc_from_vertex_mode() {
        // c=0 reaches m=3 through a=1 or b=2; f1=4 and f2=5 hang off m
        let edges = [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (3, 4, 1), (3, 5, 1)];
        let net = Network::from_edges(6, &edges, vec![0], vec![0, 4, 5]).unwrap();
        let [set, vertex, arc] = all_modes(&net);
        assert!(!set.contains(0, 4, 5));
        assert!(!vertex.contains(0, 4, 5));
        assert!(arc.contains(0, 4, 5));
        for mode in CoverMode::ALL {
            assert_eq!(generate(&net, mode), brute_force_triples(&net, mode).unwrap());
        }
    }

    #[test]
    fn triangle_is_full() {
        let net = Network::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], vec![0, 1, 2], vec![0, 1, 2]).unwrap();
        for ts in all_modes(&net) {
            assert_eq!(ts.len(), 3);
            let st = triple_stats(&ts, &net);
            assert_eq!((st.count, st.possible), (3, 3));
            assert!((st.percent - 100.0).abs() < 1e-12);
        }
        assert_eq!(brute_force_triples(&net, CoverMode::SetDisjoint).unwrap().len(), 3);
    }

    #[test]
    fn stats_without_customers() {
        let net = Network::from_edges(3, &[(0, 1, 1), (1, 2, 1)], vec![], vec![0, 1, 2]).unwrap();
        let ts = gen_set_disjoint(&net);
        let st = triple_stats(&ts, &net);
        assert_eq!((st.count, st.possible, st.percent), (0, 0, 0.0));
    }

    #[test]
    fn three_copies_agree_and_dump_round_trips() {
        let mut rng = from_seed(11);
        let net = random_roles(&random_network(12, 0.3, 4, &mut rng), 0.8, 0.6, &mut rng);
        let ts = gen_path_disjoint(&net, Disjointness::Arc);
        let [a, b, c] = ts.sorted_copies();
        let mut b = b.to_vec();
        let mut c = c.to_vec();
        b.sort_unstable();
        c.sort_unstable();
        assert_eq!(a, b.as_slice());
        assert_eq!(a, c.as_slice());
        for f in 0..net.vertex_count() {
            assert!(ts.with_min(f).iter().all(|t| t.f1 as usize == f));
            assert!(ts.with_max(f).iter().all(|t| t.f2 as usize == f));
        }
        let back = TripleSet::parse_dump(net.vertex_count(), &ts.to_dump_string()).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn oracle_sweep_and_subset_chain() {
        for seed in 0..60 {
            let mut rng = from_seed(seed);
            let n = 3 + (seed as usize % 10);
            let net = random_roles(&random_network(n, 0.35, 3, &mut rng), 0.8, 0.7, &mut rng);
            let [set, vertex, arc] = all_modes(&net);
            for (ts, mode) in [(&set, CoverMode::SetDisjoint), (&vertex, CoverMode::PathVertexDisjoint), (&arc, CoverMode::PathArcDisjoint)] {
                assert_eq!(*ts, brute_force_triples(&net, mode).unwrap(), "seed {seed} mode {mode}");
            }
            assert!(set.as_slice().iter().all(|t| vertex.contains(t.customer(), t.f1 as usize, t.f2 as usize)));
            assert!(vertex.as_slice().iter().all(|t| arc.contains(t.customer(), t.f1 as usize, t.f2 as usize)));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let mut rng = from_seed(4);
        let net = random_roles(&random_network(40, 0.1, 20, &mut rng), 0.7, 0.5, &mut rng);
        for mode in CoverMode::ALL {
            let a = generate(&net, mode);
            let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| generate(&net, mode));
            assert_eq!(a.to_dump_string(), b.to_dump_string());
        }
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let net = random_network(15, 0.0, 1, &mut from_seed(1));
        assert!(matches!(
            brute_force_triples(&net, CoverMode::SetDisjoint),
            Err(TripleError::TooLarge { limit: 14, actual: 15 })
        ));
    }
}
