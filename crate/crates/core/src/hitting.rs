//! Hitting-set machinery for the set-disjoint case: the lower-bound
//! program over (customer, neighbor) elements, greedy and exact hitting
//! sets, the goodness table, and the SHS / DHS heuristics.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{NeighborSets, Network, Vertex};
use crate::rng::{self, ArgmaxReservoir, Rng};
use crate::scp::{complete_and_minimalize, DeleteMode, MultiResult, ScpError, ScpInstance};

/// One constraint of the lower-bound program: customer `c` routes through
/// out-neighbor `x`, and a cover must contain `c` or some facility whose
/// shortest paths from `c` all avoid `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub customer: Vertex,
    pub neighbor: Vertex,
}

/// A family of sets over a facility universe, stored as local facility
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetInstance {
    facilities: Vec<Vertex>,
    elements: Vec<Element>,
    start: Vec<usize>,
    hitters: Vec<u32>,
}

impl HittingSetInstance {
    /// General family; each set lists facility ids, which must belong to
    /// `facilities`.
    pub fn from_sets(facilities: Vec<Vertex>, sets: Vec<(Element, Vec<Vertex>)>) -> Self {
        let max = facilities.iter().copied().max().map_or(0, |m| m + 1);
        let mut local = vec![u32::MAX; max];
        for (i, &f) in facilities.iter().enumerate() {
            local[f] = i as u32;
        }
        let mut elements = Vec::with_capacity(sets.len());
        let mut start = vec![0];
        let mut hitters = Vec::new();
        for (e, set) in sets {
            elements.push(e);
            let mut ids: Vec<u32> = set
                .iter()
                .map(|&f| {
                    let l = local.get(f).copied().unwrap_or(u32::MAX);
                    assert!(l != u32::MAX, "hitter {f} is not in the facility universe");
                    l
                })
                .collect();
            ids.sort_unstable();
            ids.dedup();
            hitters.extend(ids);
            start.push(hitters.len());
        }
        HittingSetInstance { facilities, elements, start, hitters }
    }

    pub fn facilities(&self) -> &[Vertex] {
        &self.facilities
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Local facility indices hitting element `i`.
    pub fn hitters_local(&self, i: usize) -> &[u32] {
        &self.hitters[self.start[i]..self.start[i + 1]]
    }

    /// Facility ids hitting element `i`.
    pub fn hitters(&self, i: usize) -> Vec<Vertex> {
        self.hitters_local(i).iter().map(|&l| self.facilities[l as usize]).collect()
    }

    /// Whether `set` (facility ids) hits every element.
    pub fn is_hitting_set(&self, set: &[Vertex]) -> bool {
        let chosen: Vec<bool> = self.facilities.iter().map(|f| set.contains(f)).collect();
        (0..self.len()).all(|i| self.hitters_local(i).iter().any(|&l| chosen[l as usize]))
    }

    fn to_global(&self, local: impl IntoIterator<Item = usize>) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = local.into_iter().map(|l| self.facilities[l]).collect();
        out.sort_unstable();
        out
    }
}

/// Neighbor sets `N(c, f)` of every customer, computed once.
pub struct NeighborTable {
    per_customer: Vec<NeighborSets>,
    customer_index: Vec<Option<usize>>,
}

impl NeighborTable {
    pub fn new(net: &Network) -> Self {
        let per_customer: Vec<NeighborSets> = net.customers().par_iter().map(|&c| net.neighbor_sets(c)).collect();
        let mut customer_index = vec![None; net.vertex_count()];
        for (i, &c) in net.customers().iter().enumerate() {
            customer_index[c] = Some(i);
        }
        NeighborTable { per_customer, customer_index }
    }

    pub fn get(&self, c: Vertex) -> &NeighborSets {
        &self.per_customer[self.customer_index[c].expect("not a customer")]
    }
}

/// Elements `(c, x)` for every customer and out-neighbor; `f` hits `(c, x)`
/// when `f = c` or `x ∉ N(c, f)`.
pub fn build_hslb_instance(net: &Network) -> HittingSetInstance {
    build_hslb_from(net, &NeighborTable::new(net))
}

pub fn build_hslb_from(net: &Network, table: &NeighborTable) -> HittingSetInstance {
    let facilities = net.facilities().to_vec();
    let mut sets = Vec::new();
    for &c in net.customers() {
        let ns = table.get(c);
        for (j, &x) in ns.neighbors().iter().enumerate() {
            let hit: Vec<Vertex> = facilities
                .iter()
                .enumerate()
                .filter(|&(fi, &f)| f == c || !ns.by_index(fi).contains(j))
                .map(|(_, &f)| f)
                .collect();
            sets.push((Element { customer: c, neighbor: x }, hit));
        }
    }
    HittingSetInstance::from_sets(facilities, sets)
}

/// Greedy hitting set: repeatedly the facility hitting the most unhit
/// elements, ties uniformly at random. Returns local indices in order of
/// choice.
pub fn greedy_hitting_local(hs: &HittingSetInstance, rng: &mut Rng) -> Vec<usize> {
    let k = hs.facilities.len();
    let m = hs.len();
    let mut count = vec![0u64; k];
    let mut inc_start = vec![0usize; k + 1];
    for i in 0..m {
        for &l in hs.hitters_local(i) {
            count[l as usize] += 1;
            inc_start[l as usize + 1] += 1;
        }
    }
    for j in 0..k {
        inc_start[j + 1] += inc_start[j];
    }
    let mut fill = inc_start.clone();
    let mut incidence = vec![0usize; inc_start[k]];
    for i in 0..m {
        for &l in hs.hitters_local(i) {
            incidence[fill[l as usize]] = i;
            fill[l as usize] += 1;
        }
    }
    let mut hit = vec![false; m];
    let mut unhit = (0..m).filter(|&i| !hs.hitters_local(i).is_empty()).count();
    let mut chosen = vec![false; k];
    let mut out = Vec::new();
    while unhit > 0 {
        let mut r = ArgmaxReservoir::default();
        for g in (0..k).filter(|&g| !chosen[g] && count[g] > 0) {
            r.offer(count[g], g, rng);
        }
        let Some((_, g)) = r.into_inner() else { break };
        chosen[g] = true;
        out.push(g);
        for &i in &incidence[inc_start[g]..inc_start[g + 1]] {
            if !hit[i] {
                hit[i] = true;
                unhit -= 1;
                for &l in hs.hitters_local(i) {
                    count[l as usize] -= 1;
                }
            }
        }
    }
    out
}

/// [`greedy_hitting_local`] as sorted facility ids.
pub fn greedy_hitting_set(hs: &HittingSetInstance, rng: &mut Rng) -> Vec<Vertex> {
    hs.to_global(greedy_hitting_local(hs, rng))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HittingError {
    #[error("{facilities} facilities exceeds the exact solver cap of {cap}; export the LP and use an external solver")]
    TooLarge { facilities: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactHittingOptions {
    pub max_facilities: usize,
    pub max_nodes: u64,
}

impl Default for ExactHittingOptions {
    fn default() -> Self {
        ExactHittingOptions { max_facilities: 400, max_nodes: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingResult {
    pub set: Vec<Vertex>,
    /// False when the node budget ran out before the search finished.
    pub proven: bool,
    pub nodes: u64,
}

impl HittingResult {
    pub fn value(&self) -> usize {
        self.set.len()
    }
}

struct HsSearch {
    sets: Vec<FixedBitSet>,
    k: usize,
    best: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    aborted: bool,
}

impl HsSearch {
    fn dfs(&mut self, chosen: &mut Vec<usize>, excluded: &mut FixedBitSet, unhit: &[usize]) {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return;
        }
        if unhit.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= self.best.len() {
            return;
        }
        let avail: Vec<FixedBitSet> = unhit
            .iter()
            .map(|&e| {
                let mut a = self.sets[e].clone();
                a.difference_with(excluded);
                a
            })
            .collect();
        if avail.iter().any(|a| a.is_clear()) {
            return;
        }
        if chosen.len() + disjoint_packing(&avail, self.k) >= self.best.len() {
            return;
        }
        let pivot = (0..avail.len()).min_by_key(|&i| (avail[i].count_ones(..), i)).unwrap();
        let mut candidates: Vec<(usize, usize)> = avail[pivot]
            .ones()
            .map(|h| (avail.iter().filter(|a| a.contains(h)).count(), h))
            .collect();
        candidates.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut newly_excluded = Vec::new();
        for (_, h) in candidates {
            chosen.push(h);
            let rest: Vec<usize> = unhit.iter().copied().filter(|&e| !self.sets[e].contains(h)).collect();
            self.dfs(chosen, excluded, &rest);
            chosen.pop();
            if self.aborted {
                break;
            }
            excluded.insert(h);
            newly_excluded.push(h);
        }
        for h in newly_excluded {
            excluded.set(h, false);
        }
    }
}

/// Size of a greedily packed family of pairwise-disjoint sets, smallest
/// first: a lower bound on any hitting set of `sets`.
pub fn disjoint_packing(sets: &[FixedBitSet], universe: usize) -> usize {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (sets[i].count_ones(..), i));
    let mut used = FixedBitSet::with_capacity(universe);
    let mut packed = 0;
    for i in order {
        if used.is_disjoint(&sets[i]) {
            used.union_with(&sets[i]);
            packed += 1;
        }
    }
    packed
}

/// Minimum hitting set by branch and bound.
pub fn exact_hitting_set(hs: &HittingSetInstance, opts: ExactHittingOptions) -> Result<HittingResult, HittingError> {
    let k = hs.facilities.len();
    if k > opts.max_facilities {
        return Err(HittingError::TooLarge { facilities: k, cap: opts.max_facilities });
    }
    let mut sets: Vec<FixedBitSet> = (0..hs.len())
        .map(|i| {
            let mut b = FixedBitSet::with_capacity(k);
            b.extend(hs.hitters_local(i).iter().map(|&l| l as usize));
            b
        })
        .filter(|b| !b.is_clear())
        .collect();
    // a superset of another element's hitters is hit whenever that one is
    sets.sort_by(|a, b| a.count_ones(..).cmp(&b.count_ones(..)).then_with(|| a.as_slice().cmp(b.as_slice())));
    sets.dedup();
    let mut kept: Vec<FixedBitSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|t| t.is_subset(&s)) {
            kept.push(s);
        }
    }

    let mut incumbent: Vec<usize> = (0..k).collect();
    for seed in 0..8 {
        let g = greedy_hitting_local(hs, &mut rng::from_seed(seed));
        if g.len() < incumbent.len() {
            incumbent = g;
        }
    }
    let mut search = HsSearch {
        sets: kept,
        k,
        best: incumbent,
        nodes: 0,
        max_nodes: opts.max_nodes,
        aborted: false,
    };
    let all: Vec<usize> = (0..search.sets.len()).collect();
    search.dfs(&mut Vec::new(), &mut FixedBitSet::with_capacity(k), &all);
    Ok(HittingResult { set: hs.to_global(search.best), proven: !search.aborted, nodes: search.nodes })
}

/// Whether `cover` covers every customer in the set-disjoint sense, checked
/// straight from neighbor sets.
pub fn is_set_disjoint_cover(net: &Network, table: &NeighborTable, cover: &[Vertex]) -> bool {
    let in_cover: Vec<usize> = cover.iter().filter_map(|&f| net.facility_index(f)).collect();
    net.customers().iter().all(|&c| {
        if cover.contains(&c) {
            return true;
        }
        let ns = table.get(c);
        let members: Vec<&FixedBitSet> =
            in_cover.iter().filter(|&&fi| net.facilities()[fi] != c).map(|&fi| ns.by_index(fi)).collect();
        members.iter().enumerate().any(|(i, a)| members[i + 1..].iter().any(|b| a.is_disjoint(b)))
    })
}

/// The report line `hslb <value> feasible={yes|no}`.
pub fn hslb_report_line(value: usize, feasible: bool) -> String {
    format!("hslb {value} feasible={}", if feasible { "yes" } else { "no" })
}

/// Good facilities per customer: `f ≠ c` with `|N(c, f)| = 1`, paired with
/// that single neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessTable {
    customers: Vec<Vertex>,
    good: Vec<Vec<(Vertex, Vertex)>>,
    facility_count: usize,
}

impl GoodnessTable {
    pub fn new(net: &Network, table: &NeighborTable) -> Self {
        let good = net
            .customers()
            .iter()
            .map(|&c| {
                let ns = table.get(c);
                net.facilities()
                    .iter()
                    .enumerate()
                    .filter(|&(fi, &f)| f != c && ns.by_index(fi).count_ones(..) == 1)
                    .map(|(fi, &f)| (f, ns.neighbors()[ns.by_index(fi).ones().next().unwrap()]))
                    .collect()
            })
            .collect();
        GoodnessTable { customers: net.customers().to_vec(), good, facility_count: net.facilities().len() }
    }

    pub fn customers(&self) -> &[Vertex] {
        &self.customers
    }

    /// `(facility, neighbor)` pairs of the `i`-th customer.
    pub fn good(&self, i: usize) -> &[(Vertex, Vertex)] {
        &self.good[i]
    }

    pub fn is_t_good(&self, i: usize, t: usize) -> bool {
        self.good[i].len() >= t
    }

    /// Entry `t` is the number of `t`-good customers, for `t = 0..=|F|`.
    pub fn counts_by_t(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.facility_count + 2];
        for g in &self.good {
            hist[g.len()] += 1;
        }
        let mut out = vec![0usize; self.facility_count + 1];
        let mut acc = 0;
        for t in (0..=self.facility_count).rev() {
            acc += hist[t];
            out[t] = acc;
        }
        out
    }
}

/// Per-iteration record of a hitting-set heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingRun {
    /// Size of the hitting set(s) before completion: `|X|` for SHS,
    /// `|X ∪ Y|` for DHS.
    pub hitting_size: usize,
    pub cover_size: usize,
    /// `|X|` of the first stage (equal to `hitting_size` for SHS).
    pub x_size: usize,
    /// Number of `t`-good customers (all customers for SHS).
    pub target_customers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingHeuristicResult {
    pub multi: MultiResult,
    pub runs: Vec<HittingRun>,
}

fn alternating_delete(i: usize) -> DeleteMode {
    if i.is_multiple_of(2) {
        DeleteMode::Reverse
    } else {
        DeleteMode::Random
    }
}

/// SHS: greedy hitting set, greedy completion if needed, minimalization.
pub fn shs(
    hs: &HittingSetInstance,
    inst: &ScpInstance,
    iterations: usize,
    base_seed: u64,
) -> Result<HittingHeuristicResult, ScpError> {
    assert!(iterations >= 1);
    inst.check_feasible()?;
    let runs = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::from_seed(base_seed.wrapping_add(i as u64));
            let x = greedy_hitting_set(hs, &mut rng);
            let cover = complete_and_minimalize(inst, &x, alternating_delete(i), &mut rng)?;
            let run = HittingRun {
                hitting_size: x.len(),
                cover_size: cover.len(),
                x_size: x.len(),
                target_customers: inst.customers().len(),
            };
            Ok((cover, run))
        })
        .collect::<Result<Vec<_>, ScpError>>()?;
    let (covers, runs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(HittingHeuristicResult { multi: MultiResult::from_runs(covers), runs })
}

/// Inputs shared by all DHS iterations.
pub struct DhsContext<'a> {
    pub net: &'a Network,
    pub neighbors: &'a NeighborTable,
    pub goodness: &'a GoodnessTable,
    pub inst: &'a ScpInstance,
}

fn customer_covered(inst: &ScpInstance, chosen: &[bool], c: Vertex) -> bool {
    (inst.self_cover() && chosen[c])
        || inst.triples().for_customer(c).iter().any(|t| chosen[t.f1 as usize] && chosen[t.f2 as usize])
}

/// One DHS_t iteration: hitting sets `X` over good-facility sets and `Y`
/// over avoidance sets, then greedy completion and minimalization.
pub fn dhs_once(ctx: &DhsContext<'_>, t: usize, delete_mode: DeleteMode, rng: &mut Rng) -> Result<(Vec<Vertex>, HittingRun), ScpError> {
    let net = ctx.net;
    let facilities = net.facilities().to_vec();
    let good_idx: Vec<usize> = (0..ctx.goodness.customers().len()).filter(|&i| ctx.goodness.is_t_good(i, t)).collect();

    let sx: Vec<(Element, Vec<Vertex>)> = good_idx
        .iter()
        .map(|&i| {
            let c = ctx.goodness.customers()[i];
            let mut s: Vec<Vertex> = ctx.goodness.good(i).iter().map(|g| g.0).collect();
            s.push(c);
            (Element { customer: c, neighbor: c }, s)
        })
        .collect();
    let x = greedy_hitting_set(&HittingSetInstance::from_sets(facilities.clone(), sx), rng);

    let mut chosen = vec![false; net.vertex_count()];
    for &f in &x {
        chosen[f] = true;
    }
    let mut sy = Vec::new();
    for &i in &good_idx {
        let c = ctx.goodness.customers()[i];
        if customer_covered(ctx.inst, &chosen, c) {
            continue;
        }
        // lowest-index member of X ∩ S_c; c itself is not in X here
        let &(_, xc) = ctx
            .goodness
            .good(i)
            .iter()
            .filter(|g| chosen[g.0])
            .min_by_key(|g| g.0)
            .expect("X hits every good-facility set");
        let ns = ctx.neighbors.get(c);
        let j = ns.neighbors().iter().position(|&v| v == xc).unwrap();
        let avoid: Vec<Vertex> = facilities
            .iter()
            .enumerate()
            .filter(|&(fi, &f)| f == c || !ns.by_index(fi).contains(j))
            .map(|(_, &f)| f)
            .collect();
        sy.push((Element { customer: c, neighbor: xc }, avoid));
    }
    let y = greedy_hitting_set(&HittingSetInstance::from_sets(facilities, sy), rng);
    for &f in &y {
        chosen[f] = true;
    }
    let mut xy = x.clone();
    xy.extend(y.iter().filter(|f| !x.contains(f)));
    for &i in &good_idx {
        let c = ctx.goodness.customers()[i];
        assert!(customer_covered(ctx.inst, &chosen, c), "X ∪ Y leaves t-good customer {c} uncovered");
    }
    let cover = complete_and_minimalize(ctx.inst, &xy, delete_mode, rng)?;
    let run = HittingRun { hitting_size: xy.len(), cover_size: cover.len(), x_size: x.len(), target_customers: good_idx.len() };
    Ok((cover, run))
}

/// DHS_t over `iterations` runs, iteration `i` seeded `base_seed + i`.
pub fn dhs(ctx: &DhsContext<'_>, t: usize, iterations: usize, base_seed: u64) -> Result<HittingHeuristicResult, ScpError> {
    assert!(iterations >= 1);
    ctx.inst.check_feasible()?;
    let runs = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::from_seed(base_seed.wrapping_add(i as u64));
            dhs_once(ctx, t, alternating_delete(i), &mut rng)
        })
        .collect::<Result<Vec<_>, ScpError>>()?;
    let (covers, runs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(HittingHeuristicResult { multi: MultiResult::from_runs(covers), runs })
}

/// The `t` of DHS_H.
pub fn dhs_high_t(net: &Network) -> usize {
    (net.facilities().len() / 2).max(1)
}
