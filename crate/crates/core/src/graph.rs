//! Weighted digraphs, the `p dpfl` instance format and shortest-path DAGs.
//!
//! A [`Network`] is validated on construction: dense vertex ids, positive
//! integer weights, no self-loops or parallel arcs, `C ⊆ F`, and strong
//! connectivity. Everything downstream relies on those invariants.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: u64,
}

impl Arc {
    pub fn new(tail: Vertex, head: Vertex, weight: u64) -> Self {
        Self { tail, head, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("network must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: Vertex, count: usize },
    #[error("self-loop arc at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(Vertex, Vertex),
    #[error("non-positive weight on arc ({tail}, {head})")]
    NonPositiveWeight { tail: Vertex, head: Vertex },
    #[error("duplicate vertex {0} in customer or facility list")]
    DuplicateRole(Vertex),
    #[error("customer {0} is not a facility")]
    CustomerNotFacility(Vertex),
    #[error("network is not strongly connected: vertex {0} is cut off from vertex 0")]
    NotStronglyConnected(Vertex),
}

impl NetworkError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        NetworkError::Parse { line, msg: msg.into() }
    }
}

/// Arc-weighted, strongly connected digraph with customer set `C` and
/// facility set `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    /// Sorted by `(tail, head)`.
    arcs: Vec<Arc>,
    out_start: Vec<usize>,
    /// Arc indices sorted by `(head, tail)`.
    in_arcs: Vec<usize>,
    in_start: Vec<usize>,
    customers: Vec<Vertex>,
    facilities: Vec<Vertex>,
    customer_mask: Vec<bool>,
    facility_mask: Vec<bool>,
}

impl Network {
    /// Builds and validates a network. Role lists may be given in any order;
    /// they are stored sorted.
    pub fn new(
        vertex_count: usize,
        mut arcs: Vec<Arc>,
        customers: Vec<Vertex>,
        facilities: Vec<Vertex>,
    ) -> Result<Self, NetworkError> {
        if vertex_count == 0 {
            return Err(NetworkError::Empty);
        }
        let n = vertex_count;
        for a in &arcs {
            for v in [a.tail, a.head] {
                if v >= n {
                    return Err(NetworkError::VertexOutOfRange { vertex: v, count: n });
                }
            }
            if a.tail == a.head {
                return Err(NetworkError::SelfLoop(a.tail));
            }
            if a.weight == 0 {
                return Err(NetworkError::NonPositiveWeight { tail: a.tail, head: a.head });
            }
        }
        arcs.sort_unstable();
        if let Some(w) = arcs
            .windows(2)
            .find(|w| (w[0].tail, w[0].head) == (w[1].tail, w[1].head))
        {
            return Err(NetworkError::DuplicateArc(w[0].tail, w[0].head));
        }

        let customers = sorted_roles(customers, n)?;
        let facilities = sorted_roles(facilities, n)?;
        let mut facility_mask = vec![false; n];
        for &f in &facilities {
            facility_mask[f] = true;
        }
        let mut customer_mask = vec![false; n];
        for &c in &customers {
            if !facility_mask[c] {
                return Err(NetworkError::CustomerNotFacility(c));
            }
            customer_mask[c] = true;
        }

        let mut out_start = vec![0usize; n + 1];
        for a in &arcs {
            out_start[a.tail + 1] += 1;
        }
        for v in 0..n {
            out_start[v + 1] += out_start[v];
        }
        let mut in_arcs: Vec<usize> = (0..arcs.len()).collect();
        in_arcs.sort_unstable_by_key(|&i| (arcs[i].head, arcs[i].tail));
        let mut in_start = vec![0usize; n + 1];
        for a in &arcs {
            in_start[a.head + 1] += 1;
        }
        for v in 0..n {
            in_start[v + 1] += in_start[v];
        }

        let net = Network {
            n,
            arcs,
            out_start,
            in_arcs,
            in_start,
            customers,
            facilities,
            customer_mask,
            facility_mask,
        };
        net.check_strongly_connected()?;
        Ok(net)
    }

    /// Symmetric network from undirected edges `(u, v, w)`.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(Vertex, Vertex, u64)],
        customers: Vec<Vertex>,
        facilities: Vec<Vertex>,
    ) -> Result<Self, NetworkError> {
        let arcs = edges
            .iter()
            .flat_map(|&(u, v, w)| [Arc::new(u, v, w), Arc::new(v, u, w)])
            .collect();
        Self::new(vertex_count, arcs, customers, facilities)
    }

    /// Same topology with new customer and facility sets.
    pub fn with_roles(
        &self,
        customers: Vec<Vertex>,
        facilities: Vec<Vertex>,
    ) -> Result<Self, NetworkError> {
        Self::new(self.n, self.arcs.clone(), customers, facilities)
    }

    fn check_strongly_connected(&self) -> Result<(), NetworkError> {
        let forward = self.reach(0, |v| self.out_arcs(v).iter().map(|a| a.head).collect());
        if let Some(v) = forward.zeroes().next() {
            return Err(NetworkError::NotStronglyConnected(v));
        }
        let backward = self.reach(0, |v| self.in_arcs(v).map(|a| a.tail).collect());
        if let Some(v) = backward.zeroes().next() {
            return Err(NetworkError::NotStronglyConnected(v));
        }
        Ok(())
    }

    fn reach(&self, root: Vertex, next: impl Fn(Vertex) -> Vec<Vertex>) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut stack = vec![root];
        seen.insert(root);
        while let Some(v) = stack.pop() {
            for w in next(v) {
                if !seen.put(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> Arc {
        self.arcs[index]
    }

    /// Index range into [`Network::arcs`] of the arcs leaving `v`.
    pub fn out_range(&self, v: Vertex) -> std::ops::Range<usize> {
        self.out_start[v]..self.out_start[v + 1]
    }

    pub fn out_arcs(&self, v: Vertex) -> &[Arc] {
        &self.arcs[self.out_range(v)]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out_start[v + 1] - self.out_start[v]
    }

    /// Indices of the arcs entering `v`, ordered by tail.
    pub fn in_arc_indices(&self, v: Vertex) -> &[usize] {
        &self.in_arcs[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn in_arcs(&self, v: Vertex) -> impl Iterator<Item = Arc> + '_ {
        self.in_arc_indices(v).iter().map(|&i| self.arcs[i])
    }

    pub fn weight(&self, tail: Vertex, head: Vertex) -> Option<u64> {
        let out = self.out_arcs(tail);
        out.binary_search_by_key(&head, |a| a.head)
            .ok()
            .map(|i| out[i].weight)
    }

    pub fn customers(&self) -> &[Vertex] {
        &self.customers
    }

    pub fn facilities(&self) -> &[Vertex] {
        &self.facilities
    }

    pub fn is_customer(&self, v: Vertex) -> bool {
        self.customer_mask[v]
    }

    pub fn is_facility(&self, v: Vertex) -> bool {
        self.facility_mask[v]
    }

    /// Position of `f` in [`Network::facilities`].
    pub fn facility_index(&self, f: Vertex) -> Option<usize> {
        self.facilities.binary_search(&f).ok()
    }

    /// Parses the line-oriented instance format.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut header: Option<(usize, usize)> = None;
        let mut arcs = Vec::new();
        let mut customers: Option<Vec<Vertex>> = None;
        let mut facilities: Option<Vec<Vertex>> = None;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let nums = |fields: std::str::SplitWhitespace<'_>| -> Result<Vec<i64>, NetworkError> {
                fields
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| NetworkError::parse(line_no, format!("not an integer: {t:?}")))
                    })
                    .collect()
            };
            if header.is_none() && tag != "p" {
                return Err(NetworkError::parse(line_no, "expected `p dpfl <vertices> <arcs>` header"));
            }
            match tag {
                "p" => {
                    if header.is_some() {
                        return Err(NetworkError::parse(line_no, "duplicate header"));
                    }
                    if fields.next() != Some("dpfl") {
                        return Err(NetworkError::parse(line_no, "header must be `p dpfl ...`"));
                    }
                    let v = nums(fields)?;
                    if v.len() != 2 || v[0] < 0 || v[1] < 0 {
                        return Err(NetworkError::parse(line_no, "header needs two non-negative counts"));
                    }
                    header = Some((v[0] as usize, v[1] as usize));
                }
                "a" => {
                    let v = nums(fields)?;
                    if v.len() != 3 {
                        return Err(NetworkError::parse(line_no, "arc line needs `a <tail> <head> <weight>`"));
                    }
                    if v[0] < 0 || v[1] < 0 {
                        return Err(NetworkError::parse(line_no, "negative vertex id"));
                    }
                    if v[2] <= 0 {
                        return Err(NetworkError::NonPositiveWeight {
                            tail: v[0] as usize,
                            head: v[1] as usize,
                        });
                    }
                    arcs.push(Arc::new(v[0] as usize, v[1] as usize, v[2] as u64));
                }
                "c" | "f" => {
                    let v = nums(fields)?;
                    if v.iter().any(|&x| x < 0) {
                        return Err(NetworkError::parse(line_no, "negative vertex id"));
                    }
                    let ids = v.into_iter().map(|x| x as usize).collect();
                    let slot = if tag == "c" { &mut customers } else { &mut facilities };
                    if slot.replace(ids).is_some() {
                        return Err(NetworkError::parse(line_no, format!("duplicate `{tag}` line")));
                    }
                }
                other => {
                    return Err(NetworkError::parse(line_no, format!("unknown line type {other:?}")));
                }
            }
        }

        let (n, m) = header.ok_or_else(|| NetworkError::parse(last_line.max(1), "missing header"))?;
        if arcs.len() != m {
            return Err(NetworkError::parse(
                last_line,
                format!("header declares {m} arcs, found {}", arcs.len()),
            ));
        }
        Self::new(n, arcs, customers.unwrap_or_default(), facilities.unwrap_or_default())
    }

    /// Canonical instance text: arcs sorted by `(tail, head)`, then the `c`
    /// and `f` lines. `parse(to_instance_string())` reproduces `self`.
    pub fn to_instance_string(&self) -> String {
        let mut out = String::with_capacity(16 * (self.arcs.len() + 4));
        writeln!(out, "p dpfl {} {}", self.n, self.arcs.len()).unwrap();
        for a in &self.arcs {
            writeln!(out, "a {} {} {}", a.tail, a.head, a.weight).unwrap();
        }
        write_role_line(&mut out, 'c', &self.customers);
        write_role_line(&mut out, 'f', &self.facilities);
        out
    }

    /// Single-source shortest distances plus the tight-arc DAG.
    pub fn shortest_path_dag(&self, source: Vertex) -> ShortestPathDag {
        let mut dist = vec![u64::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            order.push(v);
            for a in self.out_arcs(v) {
                let nd = d + a.weight;
                if nd < dist[a.head] {
                    dist[a.head] = nd;
                    heap.push(Reverse((nd, a.head)));
                }
            }
        }
        let mut tight = FixedBitSet::with_capacity(self.arcs.len());
        for (i, a) in self.arcs.iter().enumerate() {
            if dist[a.tail] != u64::MAX && dist[a.tail] + a.weight == dist[a.head] {
                tight.insert(i);
            }
        }
        ShortestPathDag { source, dist, tight, order }
    }

    /// `N(c, f)` for every facility `f`, one backward sweep per facility.
    pub fn neighbor_sets(&self, c: Vertex) -> NeighborSets {
        let dag = self.shortest_path_dag(c);
        self.neighbor_sets_from(&dag)
    }

    pub fn neighbor_sets_from(&self, dag: &ShortestPathDag) -> NeighborSets {
        let c = dag.source;
        let out = self.out_range(c);
        let neighbors: Vec<Vertex> = self.out_arcs(c).iter().map(|a| a.head).collect();
        let first_hops: Vec<bool> = out.clone().map(|i| dag.is_dag_arc(i)).collect();
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut stack = Vec::new();
        let sets = self
            .facilities
            .iter()
            .map(|&f| {
                let mut set = FixedBitSet::with_capacity(neighbors.len());
                if f == c {
                    return set;
                }
                dag.backward_reach_into(self, f, &mut seen, &mut stack);
                for (j, &x) in neighbors.iter().enumerate() {
                    if first_hops[j] && seen.contains(x) {
                        set.insert(j);
                    }
                }
                set
            })
            .collect();
        NeighborSets { customer: c, neighbors, sets }
    }

    /// Returns `(symmetric, violations)` where a violation is an arc whose
    /// reverse is missing or carries a different weight.
    pub fn check_symmetric(&self) -> (bool, Vec<Arc>) {
        let violations: Vec<Arc> = self
            .arcs
            .iter()
            .filter(|a| self.weight(a.head, a.tail) != Some(a.weight))
            .copied()
            .collect();
        (violations.is_empty(), violations)
    }

    /// Undirected adjacency lists (sorted, deduplicated) of the arc set.
    pub fn undirected_adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            adj[a.tail].push(a.head);
            adj[a.head].push(a.tail);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

impl std::str::FromStr for Network {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Network::parse(s)
    }
}

fn sorted_roles(mut ids: Vec<Vertex>, n: usize) -> Result<Vec<Vertex>, NetworkError> {
    ids.sort_unstable();
    if let Some(&v) = ids.iter().find(|&&v| v >= n) {
        return Err(NetworkError::VertexOutOfRange { vertex: v, count: n });
    }
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(NetworkError::DuplicateRole(w[0]));
    }
    Ok(ids)
}

fn write_role_line(out: &mut String, tag: char, ids: &[Vertex]) {
    out.push(tag);
    for id in ids {
        write!(out, " {id}").unwrap();
    }
    out.push('\n');
}

/// Distances from `source` and the set of arcs lying on some shortest path
/// from it (`dist(u) + w(u, v) = dist(v)`).
#[derive(Debug, Clone)]
pub struct ShortestPathDag {
    source: Vertex,
    dist: Vec<u64>,
    tight: FixedBitSet,
    order: Vec<Vertex>,
}

impl ShortestPathDag {
    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn dist(&self, v: Vertex) -> u64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[u64] {
        &self.dist
    }

    pub fn is_dag_arc(&self, arc_index: usize) -> bool {
        self.tight.contains(arc_index)
    }

    pub fn dag_arcs(&self) -> impl Iterator<Item = usize> + '_ {
        self.tight.ones()
    }

    /// Vertices in the order Dijkstra settled them; a topological order of
    /// the DAG.
    pub fn settle_order(&self) -> &[Vertex] {
        &self.order
    }

    /// Marks in `seen` every vertex with a DAG path to `target`.
    pub fn backward_reach_into(
        &self,
        net: &Network,
        target: Vertex,
        seen: &mut FixedBitSet,
        stack: &mut Vec<Vertex>,
    ) {
        seen.clear();
        stack.clear();
        seen.insert(target);
        stack.push(target);
        while let Some(v) = stack.pop() {
            for &i in net.in_arc_indices(v) {
                if self.tight.contains(i) {
                    let u = net.arc(i).tail;
                    if !seen.put(u) {
                        stack.push(u);
                    }
                }
            }
        }
    }

    pub fn backward_reach(&self, net: &Network, target: Vertex) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(net.vertex_count());
        self.backward_reach_into(net, target, &mut seen, &mut Vec::new());
        seen
    }
}

/// For one customer `c`: its out-neighbors and, per facility, the subset of
/// them that begin some shortest `c → f` path. Bit `j` refers to
/// `neighbors()[j]`.
#[derive(Debug, Clone)]
pub struct NeighborSets {
    customer: Vertex,
    neighbors: Vec<Vertex>,
    sets: Vec<FixedBitSet>,
}

impl NeighborSets {
    pub fn customer(&self) -> Vertex {
        self.customer
    }

    pub fn neighbors(&self) -> &[Vertex] {
        &self.neighbors
    }

    /// Set for the facility at position `facility_index` of
    /// [`Network::facilities`]. Empty for `f == c`.
    pub fn by_index(&self, facility_index: usize) -> &FixedBitSet {
        &self.sets[facility_index]
    }

    /// `N(c, f)` as vertex ids.
    pub fn vertices(&self, facility_index: usize) -> Vec<Vertex> {
        self.sets[facility_index].ones().map(|j| self.neighbors[j]).collect()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Network {
        Network::new(
            3,
            vec![Arc::new(0, 1, 1), Arc::new(1, 2, 1), Arc::new(2, 0, 1)],
            vec![0, 1, 2],
            vec![0, 1, 2],
        )
        .unwrap()
    }

    #[test]
    fn loads_directed_cycle() {
        let text = "p dpfl 3 3\na 0 1 1\na 1 2 1\na 2 0 1\nc 0 1 2\nf 0 1 2\n";
        let net = Network::parse(text).unwrap();
        assert_eq!(net.arc_count(), 3);
        assert_eq!(net, cycle3());
        assert_eq!(net.to_instance_string(), text);
    }

    #[test]
    fn rejects_zero_weight() {
        let text = "p dpfl 3 3\na 0 1 0\na 1 2 1\na 2 0 1\nc 0 1 2\nf 0 1 2\n";
        assert!(matches!(
            Network::parse(text),
            Err(NetworkError::NonPositiveWeight { tail: 0, head: 1 })
        ));
    }

    #[test]
    fn reports_distinct_errors() {
        let not_sc = "p dpfl 3 2\na 0 1 1\na 1 2 1\nc\nf\n";
        assert!(matches!(Network::parse(not_sc), Err(NetworkError::NotStronglyConnected(_))));
        let bad_roles = "p dpfl 3 3\na 0 1 1\na 1 2 1\na 2 0 1\nc 0 1\nf 0\n";
        assert_eq!(Network::parse(bad_roles), Err(NetworkError::CustomerNotFacility(1)));
        let garbage = "p dpfl 3 3\na 0 1 x\n";
        assert!(matches!(Network::parse(garbage), Err(NetworkError::Parse { line: 2, .. })));
        let count = "# header next\np dpfl 3 4\na 0 1 1\na 1 2 1\na 2 0 1\n";
        assert!(matches!(Network::parse(count), Err(NetworkError::Parse { .. })));
        let dup = "p dpfl 2 3\na 0 1 1\na 1 0 1\na 0 1 2\n";
        assert_eq!(Network::parse(dup), Err(NetworkError::DuplicateArc(0, 1)));
        let self_loop = "p dpfl 2 3\na 0 1 1\na 1 0 1\na 1 1 2\n";
        assert_eq!(Network::parse(self_loop), Err(NetworkError::SelfLoop(1)));
    }

    #[test]
    fn reader_accepts_any_arc_order_and_comments() {
        let text = "# a comment\np dpfl 3 3\na 2 0 1\n\na 0 1 1\n# mid\na 1 2 1\nf 2 1 0\nc 1\n";
        let net = Network::parse(text).unwrap();
        assert_eq!(
            net.to_instance_string(),
            "p dpfl 3 3\na 0 1 1\na 1 2 1\na 2 0 1\nc 1\nf 0 1 2\n"
        );
    }

    #[test]
    fn path_distances() {
        // a -> b -> c with weights 2, 3 (plus a return arc for strong connectivity)
        let net = Network::new(
            3,
            vec![Arc::new(0, 1, 2), Arc::new(1, 2, 3), Arc::new(2, 0, 1)],
            vec![],
            vec![],
        )
        .unwrap();
        let dag = net.shortest_path_dag(0);
        assert_eq!(dag.dist(2), 5);
        let dag_arcs: Vec<Arc> = dag.dag_arcs().map(|i| net.arc(i)).collect();
        assert_eq!(dag_arcs, vec![Arc::new(0, 1, 2), Arc::new(1, 2, 3)]);
    }

    fn diamond() -> Network {
        // 0 -> {1, 2} -> 3, unit weights, symmetric
        Network::from_edges(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)], vec![0], vec![0, 3]).unwrap()
    }

    #[test]
    fn diamond_tie_keeps_all_arcs() {
        let net = diamond();
        let dag = net.shortest_path_dag(0);
        assert_eq!(dag.dist(3), 2);
        let arcs: Vec<(usize, usize)> = dag.dag_arcs().map(|i| (net.arc(i).tail, net.arc(i).head)).collect();
        assert_eq!(arcs, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let ns = net.neighbor_sets(0);
        assert_eq!(ns.vertices(net.facility_index(3).unwrap()), vec![1, 2]);
        assert!(ns.by_index(net.facility_index(0).unwrap()).is_clear());
    }

    #[test]
    fn unique_path_neighbor() {
        // c=0 -> x=1 -> f=2
        let net = Network::from_edges(3, &[(0, 1, 1), (1, 2, 1)], vec![0], vec![0, 2]).unwrap();
        let ns = net.neighbor_sets(0);
        assert_eq!(ns.vertices(1), vec![1]);
    }

    #[test]
    fn non_tight_neighbor_is_excluded() {
        // 0-1 heavy, 0-2-1 light: neighbor 1 never begins a shortest path.
        let net = Network::from_edges(3, &[(0, 1, 5), (0, 2, 1), (2, 1, 1)], vec![0], vec![0, 1, 2]).unwrap();
        let ns = net.neighbor_sets(0);
        assert_eq!(ns.neighbors(), &[1, 2]);
        assert_eq!(ns.vertices(1), vec![2]);
        assert_eq!(ns.vertices(2), vec![2]);
    }

    #[test]
    fn symmetry_check() {
        let net = diamond();
        assert_eq!(net.check_symmetric(), (true, vec![]));
        let mut arcs = net.arcs().to_vec();
        arcs.retain(|a| !(a.tail == 3 && a.head == 2));
        let cut = Network::new(4, arcs, vec![], vec![]).unwrap();
        let (ok, bad) = cut.check_symmetric();
        assert!(!ok);
        assert_eq!(bad, vec![Arc::new(2, 3, 1)]);
        assert!(!cycle3().check_symmetric().0);
    }
}
