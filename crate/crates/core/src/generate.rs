//! Synthetic instances: a transit-stub topology generator, gravitational
//! traffic demands, `(Cx, Fy)` customer/facility sampling, and small random
//! networks for exhaustive cross-checks.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::distr::Open01;
use rand::seq::index::sample;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{Network, NetworkError, Vertex};
use crate::rng::Rng;
use crate::scp::ScpInstance;
use crate::triples::{Triple, TripleSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("could not build a connected {what} after {attempts} attempts")]
    RetryExhausted { what: &'static str, attempts: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Unit,
    /// Integers drawn uniformly from `1..=30`.
    Uniform1To30,
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(WeightMode::Unit),
            "uniform" | "uniform_1_30" => Ok(WeightMode::Uniform1To30),
            other => Err(format!("unknown weight mode {other:?} (expected unit or uniform)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Number of transit domains.
    pub transit_domains: usize,
    /// Transit vertices per domain.
    pub transit_size: usize,
    /// Stub domains per transit vertex.
    pub stubs_per_transit: usize,
    /// Vertices per stub domain.
    pub stub_size: usize,
    pub transit_edge_prob: f64,
    pub stub_edge_prob: f64,
    /// Mean number of edges from a transit domain to other domains.
    pub inter_domain_edges: f64,
    pub weights: WeightMode,
    pub seed: u64,
}

impl GenParams {
    pub fn new(transit_domains: usize, transit_size: usize, stubs_per_transit: usize, stub_size: usize) -> Self {
        GenParams {
            transit_domains,
            transit_size,
            stubs_per_transit,
            stub_size,
            transit_edge_prob: 0.6,
            stub_edge_prob: 0.42,
            inter_domain_edges: 2.0,
            weights: WeightMode::Uniform1To30,
            seed: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        let transit = self.transit_domains * self.transit_size;
        transit + transit * self.stubs_per_transit * self.stub_size
    }

    fn validate(&self) -> Result<(), GenError> {
        let sizes = [self.transit_domains, self.transit_size, self.stubs_per_transit, self.stub_size];
        if sizes.contains(&0) {
            return Err(GenError::Params("T, N_T, S and N_S must all be at least 1".into()));
        }
        for p in [self.transit_edge_prob, self.stub_edge_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::Params(format!("edge probability {p} outside [0, 1]")));
            }
        }
        if self.inter_domain_edges.is_nan() || self.inter_domain_edges < 0.0 {
            return Err(GenError::Params("inter-domain edge mean must be non-negative".into()));
        }
        Ok(())
    }
}

const MAX_ATTEMPTS: usize = 10_000;

/// Transit-stub topology as a symmetric digraph with empty `C` and `F`.
///
/// Vertex ids: transit vertices first, then the stub domains of transit
/// vertex 0, 1, ... in order, `stub_size` vertices each.
pub fn gen_transit_stub(params: &GenParams) -> Result<Network, GenError> {
    params.validate()?;
    let mut rng = crate::rng::from_seed(params.seed);
    let t = params.transit_domains;
    let transit_count = t * params.transit_size;
    let n = params.vertex_count();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();

    // one transit vertex seeds each domain, the rest land anywhere
    let mut domains: Vec<Vec<Vertex>> = (0..t).map(|d| vec![d]).collect();
    for v in t..transit_count {
        domains[rng.random_range(0..t)].push(v);
    }

    if t > 1 {
        let p = (params.inter_domain_edges / (t - 1) as f64).min(1.0);
        let mut attempts = 0;
        loop {
            attempts += 1;
            let mut inter = Vec::new();
            for a in 0..t {
                for b in a + 1..t {
                    if rng.random_bool(p) {
                        let u = domains[a][rng.random_range(0..domains[a].len())];
                        let v = domains[b][rng.random_range(0..domains[b].len())];
                        inter.push((a, b, u, v));
                    }
                }
            }
            let domain_edges: Vec<(usize, usize)> = inter.iter().map(|e| (e.0, e.1)).collect();
            if is_connected(t, &domain_edges) {
                edges.extend(inter.iter().map(|e| (e.2, e.3)));
                break;
            }
            if attempts >= MAX_ATTEMPTS {
                return Err(GenError::RetryExhausted { what: "transit backbone", attempts });
            }
        }
    }

    for members in &domains {
        edges.extend(random_connected_block(members, params.transit_edge_prob, &mut rng, "transit domain")?);
    }

    let mut next = transit_count;
    for tv in 0..transit_count {
        for _ in 0..params.stubs_per_transit {
            let members: Vec<Vertex> = (next..next + params.stub_size).collect();
            next += params.stub_size;
            edges.extend(random_connected_block(&members, params.stub_edge_prob, &mut rng, "stub domain")?);
            edges.push((tv, members[rng.random_range(0..members.len())]));
        }
    }
    debug_assert_eq!(next, n);

    let weighted: Vec<(Vertex, Vertex, u64)> = edges
        .into_iter()
        .map(|(u, v)| {
            let w = match params.weights {
                WeightMode::Unit => 1,
                WeightMode::Uniform1To30 => rng.random_range(1..=30),
            };
            (u, v, w)
        })
        .collect();
    Ok(Network::from_edges(n, &weighted, Vec::new(), Vec::new())?)
}

/// G(k, p) on `members`, redrawn until connected.
fn random_connected_block(
    members: &[Vertex],
    p: f64,
    rng: &mut Rng,
    what: &'static str,
) -> Result<Vec<(Vertex, Vertex)>, GenError> {
    let k = members.len();
    for _ in 0..MAX_ATTEMPTS {
        let mut local = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                if rng.random_bool(p) {
                    local.push((i, j));
                }
            }
        }
        if is_connected(k, &local) {
            return Ok(local.into_iter().map(|(i, j)| (members[i], members[j])).collect());
        }
    }
    Err(GenError::RetryExhausted { what, attempts: MAX_ATTEMPTS })
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Hop-count distances from `source` along arcs.
pub fn hop_distances(net: &Network, source: Vertex) -> Vec<usize> {
    let mut dist = vec![usize::MAX; net.vertex_count()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(u) = queue.pop_front() {
        for a in net.out_arcs(u) {
            if dist[a.head] == usize::MAX {
                dist[a.head] = dist[u] + 1;
                queue.push_back(a.head);
            }
        }
    }
    dist
}

/// Traffic demand per ordered vertex pair, zero on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix {
    n: usize,
    values: Vec<f64>,
    max_hops: usize,
}

impl DemandMatrix {
    pub fn get(&self, u: Vertex, v: Vertex) -> f64 {
        self.values[u * self.n + v]
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// The hop diameter used for normalization.
    pub fn max_hops(&self) -> usize {
        self.max_hops
    }

    /// One `d <u> <v> <value>` line per ordered pair, 9 significant digits.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n {
            for v in (0..self.n).filter(|&v| v != u) {
                writeln!(out, "d {u} {v} {:.8e}", self.get(u, v)).unwrap();
            }
        }
        out
    }
}

/// Gravitational demands `r(u,v) · o(u) · d(v) · exp(-D(u,v)/Dmax)` with
/// `o`, `d`, `r` uniform on `(0, 1)` and `D` the hop distance.
pub fn gravitational_demands(net: &Network, rng: &mut Rng) -> DemandMatrix {
    let n = net.vertex_count();
    let origin: Vec<f64> = (0..n).map(|_| rng.sample(Open01)).collect();
    let dest: Vec<f64> = (0..n).map(|_| rng.sample(Open01)).collect();
    let mut r = vec![0.0; n * n];
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            r[u * n + v] = rng.sample(Open01);
        }
    }
    gravitational_demands_with(net, |v| origin[v], |v| dest[v], |u, v| r[u * n + v])
}

/// [`gravitational_demands`] with caller-supplied factors.
pub fn gravitational_demands_with(
    net: &Network,
    origin: impl Fn(Vertex) -> f64,
    dest: impl Fn(Vertex) -> f64,
    r: impl Fn(Vertex, Vertex) -> f64,
) -> DemandMatrix {
    let n = net.vertex_count();
    let hops: Vec<Vec<usize>> = (0..n).map(|s| hop_distances(net, s)).collect();
    let max_hops = hops.iter().flatten().copied().max().unwrap_or(0);
    let mut values = vec![0.0; n * n];
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            let decay = (-(hops[u][v] as f64) / max_hops as f64).exp();
            values[u * n + v] = r(u, v) * origin(u) * dest(v) * decay;
        }
    }
    DemandMatrix { n, values, max_hops }
}

/// Instance class `(Cx, Fy)`: `|C| = ⌈|V|/x⌉`, `|F| = ⌈|V|/y⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceClass {
    pub customer_divisor: usize,
    pub facility_divisor: usize,
}

impl InstanceClass {
    pub fn new(customer_divisor: usize, facility_divisor: usize) -> Self {
        InstanceClass { customer_divisor, facility_divisor }
    }

    /// Compact form used in file names, e.g. `C8F1`.
    pub fn tag(&self) -> String {
        format!("C{}F{}", self.customer_divisor, self.facility_divisor)
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{},F{}", self.customer_divisor, self.facility_divisor)
    }
}

impl FromStr for InstanceClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad instance class {s:?} (expected e.g. C2,F1)");
        let s = s.trim();
        let rest = s.strip_prefix('C').ok_or_else(bad)?;
        let (x, y) = rest.split_once(['F', ',']).ok_or_else(bad)?;
        let y = y.trim_start_matches('F');
        let x = x.trim_end_matches(',').parse().map_err(|_| bad())?;
        let y = y.parse().map_err(|_| bad())?;
        Ok(InstanceClass::new(x, y))
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Samples `F` uniformly from `V` and `C` uniformly from `F`.
pub fn sample_cf(net: &Network, x: usize, y: usize, rng: &mut Rng) -> Result<Network, GenError> {
    if y == 0 || x < y {
        return Err(GenError::Params(format!(
            "need x >= y >= 1 so that C can be drawn from F (got x={x}, y={y})"
        )));
    }
    let n = net.vertex_count();
    let facility_count = ceil_div(n, y);
    let customer_count = ceil_div(n, x);
    let mut facilities: Vec<Vertex> = sample(rng, n, facility_count).into_vec();
    facilities.sort_unstable();
    let mut customers: Vec<Vertex> = sample(rng, facility_count, customer_count)
        .into_iter()
        .map(|i| facilities[i])
        .collect();
    customers.sort_unstable();
    Ok(net.with_roles(customers, facilities)?)
}

/// Random connected symmetric network on `n` vertices: a random spanning
/// tree plus each remaining edge with probability `extra_edge_prob`,
/// weights uniform in `1..=max_weight`. Roles are empty.
pub fn random_network(n: usize, extra_edge_prob: f64, max_weight: u64, rng: &mut Rng) -> Network {
    let mut edges = random_tree_edges(n, rng);
    let mut present = vec![false; n * n];
    for &(u, v) in &edges {
        present[u * n + v] = true;
        present[v * n + u] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u * n + v] && rng.random_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    let weighted: Vec<_> = edges.into_iter().map(|(u, v)| (u, v, rng.random_range(1..=max_weight))).collect();
    Network::from_edges(n, &weighted, Vec::new(), Vec::new()).expect("connected by construction")
}

/// Edges of a random labelled tree (each vertex attaches to an earlier one
/// of a random permutation).
pub fn random_tree_edges(n: usize, rng: &mut Rng) -> Vec<(Vertex, Vertex)> {
    use rand::seq::SliceRandom;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|i| {
            let parent = order[rng.random_range(0..i)];
            (parent.min(order[i]), parent.max(order[i]))
        })
        .collect()
}

/// Random `C ⊆ F`: each vertex a facility with probability `facility_prob`
/// (at least one), each facility a customer with probability
/// `customer_prob` (at least one).
pub fn random_roles(net: &Network, facility_prob: f64, customer_prob: f64, rng: &mut Rng) -> Network {
    let n = net.vertex_count();
    let mut facilities: Vec<Vertex> = (0..n).filter(|_| rng.random_bool(facility_prob)).collect();
    if facilities.is_empty() {
        facilities.push(rng.random_range(0..n));
    }
    let mut customers: Vec<Vertex> = facilities.iter().copied().filter(|_| rng.random_bool(customer_prob)).collect();
    if customers.is_empty() {
        customers.push(facilities[rng.random_range(0..facilities.len())]);
    }
    net.with_roles(customers, facilities).expect("C ⊆ F by construction")
}

/// Random feasible Set Cover by Pairs instance: customers `0..u`,
/// facilities the last `s` ids of `0..u + s - overlap` (the first `overlap`
/// facilities are also customers), each candidate triple kept with
/// probability `density`. Customers that could not be covered get one
/// random pair. Infeasible only when some customer has fewer than two other
/// facilities and no self-cover.
pub fn random_scp(u: usize, s: usize, overlap: usize, density: f64, self_cover: bool, rng: &mut Rng) -> ScpInstance {
    assert!(overlap <= u.min(s) && s >= 2);
    let id_space = u + s - overlap;
    let customers: Vec<Vertex> = (0..u).collect();
    let facilities: Vec<Vertex> = (u - overlap..id_space).collect();
    let mut triples = Vec::new();
    for &c in &customers {
        let pool: Vec<Vertex> = facilities.iter().copied().filter(|&f| f != c).collect();
        let before = triples.len();
        for (i, &a) in pool.iter().enumerate() {
            for &b in &pool[i + 1..] {
                if rng.random_bool(density) {
                    triples.push(Triple::new(c, a, b));
                }
            }
        }
        let self_ok = self_cover && c >= u - overlap;
        if triples.len() == before && !self_ok && pool.len() >= 2 {
            let picked = sample(rng, pool.len(), 2);
            triples.push(Triple::new(c, pool[picked.index(0)], pool[picked.index(1)]));
        }
    }
    let ts = TripleSet::from_triples(id_space, None, triples);
    ScpInstance::new(id_space, customers, facilities, ts, self_cover).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;

    #[test]
    fn table_sizes() {
        let p = GenParams::new(1, 2, 3, 8);
        assert_eq!(gen_transit_stub(&p).unwrap().vertex_count(), 50);
        let p = GenParams { seed: 5, ..GenParams::new(2, 5, 3, 6) };
        assert_eq!(gen_transit_stub(&p).unwrap().vertex_count(), 190);
    }

    #[test]
    fn output_is_symmetric_and_deterministic() {
        for seed in 0..10 {
            let p = GenParams { seed, ..GenParams::new(2, 3, 2, 4) };
            let a = gen_transit_stub(&p).unwrap();
            assert!(a.check_symmetric().0);
            assert_eq!(a, gen_transit_stub(&p).unwrap());
            let reparsed = Network::parse(&a.to_instance_string()).unwrap();
            assert_eq!(reparsed, a);
        }
        let a = gen_transit_stub(&GenParams { seed: 1, ..GenParams::new(1, 2, 3, 8) }).unwrap();
        let b = gen_transit_stub(&GenParams { seed: 2, ..GenParams::new(1, 2, 3, 8) }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn unit_weights() {
        let p = GenParams { weights: WeightMode::Unit, ..GenParams::new(1, 2, 2, 3) };
        assert!(gen_transit_stub(&p).unwrap().arcs().iter().all(|a| a.weight == 1));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(gen_transit_stub(&GenParams::new(0, 2, 3, 8)), Err(GenError::Params(_))));
        let p = GenParams { stub_edge_prob: 1.5, ..GenParams::new(1, 2, 3, 8) };
        assert!(matches!(gen_transit_stub(&p), Err(GenError::Params(_))));
        // a disconnected stub domain can never be drawn with p = 0
        let p = GenParams { stub_edge_prob: 0.0, ..GenParams::new(1, 1, 1, 3) };
        assert!(matches!(gen_transit_stub(&p), Err(GenError::RetryExhausted { .. })));
    }

    #[test]
    fn demand_formula_instance() {
        let net = Network::from_edges(3, &[(0, 1, 1), (1, 2, 1)], vec![], vec![]).unwrap();
        let dm = gravitational_demands_with(&net, |_| 1.0, |_| 1.0, |_, _| 1.0);
        assert_eq!(dm.max_hops(), 2);
        assert!((dm.get(0, 2) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((dm.get(0, 2) - 0.3678794).abs() < 1e-7);
        assert_eq!(dm.get(1, 1), 0.0);
    }

    #[test]
    fn demands_are_in_open_unit_interval() {
        let net = gen_transit_stub(&GenParams::new(1, 2, 1, 4)).unwrap();
        let dm = gravitational_demands(&net, &mut from_seed(9));
        let n = net.vertex_count();
        for u in 0..n {
            for v in 0..n {
                let t = dm.get(u, v);
                if u == v {
                    assert_eq!(t, 0.0);
                } else {
                    assert!(t > 0.0 && t < 1.0);
                }
            }
        }
        let line = dm.to_file_string().lines().next().unwrap().to_string();
        assert!(line.starts_with("d 0 1 "));
        let mantissa = line.split_whitespace().nth(3).unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 9);
    }

    #[test]
    fn class_sampling_sizes() {
        let base = random_network(100, 0.02, 5, &mut from_seed(1));
        let net = sample_cf(&base, 8, 1, &mut from_seed(2)).unwrap();
        assert_eq!((net.customers().len(), net.facilities().len()), (13, 100));
        let net = sample_cf(&base, 1, 1, &mut from_seed(2)).unwrap();
        assert_eq!(net.customers(), (0..100).collect::<Vec<_>>().as_slice());
        assert!(sample_cf(&base, 1, 2, &mut from_seed(2)).is_err());
        let net = sample_cf(&base, 4, 4, &mut from_seed(3)).unwrap();
        assert!(net.customers().iter().all(|&c| net.is_facility(c)));
        assert_eq!(net.customers().len(), 25);
    }

    #[test]
    fn class_parsing() {
        assert_eq!("C2,F1".parse::<InstanceClass>().unwrap(), InstanceClass::new(2, 1));
        assert_eq!("C8F8".parse::<InstanceClass>().unwrap(), InstanceClass::new(8, 8));
        assert_eq!(InstanceClass::new(4, 1).to_string(), "C4,F1");
        assert!("X2,F1".parse::<InstanceClass>().is_err());
    }
}
