//! Exact optima: best-first branch and bound over facility inclusion, an
//! exhaustive oracle for tiny instances, and LP-format export of the pair
//! model and the hitting-set bound.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use thiserror::Error;

use crate::graph::Vertex;
use crate::hitting::{disjoint_packing, HittingSetInstance};
use crate::scp::{greedy_multi, CoverState, ScpError, ScpInstance, Tie};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{facilities} facilities exceeds the exhaustive search cap of {cap}")]
    TooLarge { facilities: usize, cap: usize },
    #[error(transparent)]
    Scp(#[from] ScpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactStatus {
    Optimal,
    BudgetExceeded,
}

impl ExactStatus {
    pub fn name(self) -> &'static str {
        match self {
            ExactStatus::Optimal => "optimal",
            ExactStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExactOptions<'a> {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Hitting-set elements every cover must hit; only sound for the
    /// set-disjoint instance of the same network.
    pub hitting: Option<&'a HittingSetInstance>,
    /// Greedy runs for the root incumbent.
    pub root_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub cover: Vec<Vertex>,
    pub status: ExactStatus,
    pub nodes: u64,
    /// Proven lower bound on the optimum (equal to the cover size when
    /// optimal).
    pub lower_bound: usize,
}

/// Branch-and-bound node. Self-contained so that nodes can be handed to
/// other workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbNode {
    pub forced_in: FixedBitSet,
    pub forced_out: FixedBitSet,
    pub lower_bound: usize,
    pub depth: usize,
}

enum Eval {
    Infeasible,
    Covered,
    Open { lower_bound: usize, branch: usize },
}

struct Bnb<'a> {
    inst: &'a ScpInstance,
    k: usize,
    /// Hitter sets of the bound elements as local facility bitsets.
    elements: Vec<FixedBitSet>,
}

impl<'a> Bnb<'a> {
    fn new(inst: &'a ScpInstance, hitting: Option<&HittingSetInstance>) -> Self {
        let k = inst.facilities().len();
        let elements = hitting
            .map(|hs| {
                (0..hs.len())
                    .map(|i| {
                        let mut b = FixedBitSet::with_capacity(k);
                        for f in hs.hitters(i) {
                            if let Some(l) = inst.facility_local(f) {
                                b.insert(l);
                            }
                        }
                        b
                    })
                    .collect()
            })
            .unwrap_or_default();
        Bnb { inst, k, elements }
    }

    fn evaluate(&self, node: &BnbNode) -> Eval {
        let inst = self.inst;
        let (fin, fout) = (&node.forced_in, &node.forced_out);
        let mut needs = Vec::new();
        let mut candidate_sets = Vec::new();
        for c in 0..inst.customers().len() {
            let own = inst.self_facility(c);
            if own.is_some_and(|f| fin.contains(f)) {
                continue;
            }
            let pairs = inst.customer_pairs(c);
            if pairs.iter().any(|&(a, b)| fin.contains(a as usize) && fin.contains(b as usize)) {
                continue;
            }
            let mut set = FixedBitSet::with_capacity(self.k);
            let mut need = 2;
            if let Some(f) = own.filter(|&f| !fout.contains(f)) {
                set.insert(f);
                need = 1;
            }
            for &(a, b) in pairs {
                let (a, b) = (a as usize, b as usize);
                if fout.contains(a) || fout.contains(b) {
                    continue;
                }
                match (fin.contains(a), fin.contains(b)) {
                    (true, _) => {
                        set.insert(b);
                        need = 1;
                    }
                    (_, true) => {
                        set.insert(a);
                        need = 1;
                    }
                    _ => {
                        set.insert(a);
                        set.insert(b);
                    }
                }
            }
            if set.is_clear() {
                return Eval::Infeasible;
            }
            needs.push(need);
            candidate_sets.push(set);
        }
        if candidate_sets.is_empty() {
            return Eval::Covered;
        }

        // disjoint customers each need their own new facilities
        let mut order: Vec<usize> = (0..candidate_sets.len()).collect();
        order.sort_by_key(|&i| (candidate_sets[i].count_ones(..), Reverse(needs[i]), i));
        let mut used = FixedBitSet::with_capacity(self.k);
        let mut customer_bound = 0;
        for i in order {
            if used.is_disjoint(&candidate_sets[i]) {
                used.union_with(&candidate_sets[i]);
                customer_bound += needs[i];
            }
        }

        let mut avail = Vec::new();
        for e in &self.elements {
            if !e.is_disjoint(fin) {
                continue;
            }
            let mut a = e.clone();
            a.difference_with(fout);
            if a.is_clear() {
                return Eval::Infeasible;
            }
            avail.push(a);
        }
        let element_bound = disjoint_packing(&avail, self.k);

        let mut score = vec![0usize; self.k];
        for set in &candidate_sets {
            for f in set.ones() {
                score[f] += 1;
            }
        }
        let branch = (0..self.k)
            .filter(|&f| !fin.contains(f) && !fout.contains(f))
            .max_by_key(|&f| (score[f], Reverse(f)))
            .expect("an open node has a free facility");
        Eval::Open { lower_bound: fin.count_ones(..) + customer_bound.max(element_bound), branch }
    }

    /// Deterministic greedy completion of the node, then minimalization.
    fn complete(&self, node: &BnbNode) -> Option<Vec<Vertex>> {
        let mut st = CoverState::new(self.inst);
        for f in node.forced_out.ones() {
            st.block(f);
        }
        for f in node.forced_in.ones() {
            st.add(f);
        }
        st.complete(Tie::LowestIndex).ok()?;
        let mut order = st.order().to_vec();
        order.reverse();
        st.minimalize(&order);
        Some(st.cover())
    }
}

/// Exact minimum cover by best-first branch and bound (ties deeper first).
pub fn solve_exact(inst: &ScpInstance, opts: &ExactOptions<'_>) -> Result<ExactResult, ScpError> {
    inst.check_feasible()?;
    let started = Instant::now();
    let k = inst.facilities().len();
    let bnb = Bnb::new(inst, opts.hitting);
    let mut incumbent = greedy_multi(inst, opts.root_iterations.max(1), 0)?.best;

    let root = BnbNode {
        forced_in: FixedBitSet::with_capacity(k),
        forced_out: FixedBitSet::with_capacity(k),
        lower_bound: 0,
        depth: 0,
    };
    let mut heap = BinaryHeap::new();
    let mut nodes_store: Vec<Option<BnbNode>> = Vec::new();
    let push = |node: BnbNode, heap: &mut BinaryHeap<_>, store: &mut Vec<Option<BnbNode>>| {
        let id = store.len();
        heap.push(Reverse((node.lower_bound, Reverse(node.depth), id)));
        store.push(Some(node));
    };
    push(root, &mut heap, &mut nodes_store);
    let mut nodes = 0u64;
    let mut exhausted = false;

    while let Some(Reverse((lb, _, id))) = heap.pop() {
        if lb >= incumbent.len() {
            // best-first: every remaining node is at least as bad
            heap.clear();
            break;
        }
        let over_nodes = opts.max_nodes.is_some_and(|m| nodes >= m);
        let over_time = opts.time_limit.is_some_and(|t| started.elapsed() >= t);
        if over_nodes || over_time {
            heap.push(Reverse((lb, Reverse(0), id)));
            exhausted = true;
            break;
        }
        let node = nodes_store[id].take().unwrap();
        nodes += 1;
        match bnb.evaluate(&node) {
            Eval::Infeasible => {}
            Eval::Covered => {
                let cover: Vec<Vertex> = node.forced_in.ones().map(|f| inst.facilities()[f]).collect();
                if cover.len() < incumbent.len() {
                    incumbent = cover;
                }
            }
            Eval::Open { lower_bound, branch } => {
                if lower_bound >= incumbent.len() {
                    continue;
                }
                if let Some(c) = bnb.complete(&node) {
                    if c.len() < incumbent.len() {
                        incumbent = c;
                    }
                }
                if lower_bound >= incumbent.len() {
                    continue;
                }
                let mut with = node.clone();
                with.forced_in.insert(branch);
                with.depth += 1;
                with.lower_bound = lower_bound;
                let mut without = node;
                without.forced_out.insert(branch);
                without.depth += 1;
                without.lower_bound = lower_bound;
                push(with, &mut heap, &mut nodes_store);
                push(without, &mut heap, &mut nodes_store);
            }
        }
    }

    let (status, lower_bound) = if exhausted {
        let open = heap.iter().map(|Reverse((lb, ..))| *lb).min().unwrap_or(incumbent.len());
        (ExactStatus::BudgetExceeded, open.min(incumbent.len()))
    } else {
        (ExactStatus::Optimal, incumbent.len())
    };
    Ok(ExactResult { cover: incumbent, status, nodes, lower_bound })
}

/// Largest `|S|` accepted by [`brute_force_optimum`].
pub const BRUTE_FORCE_MAX_FACILITIES: usize = 20;

/// Exhaustive search by increasing size; the first valid cover in
/// lexicographic order of local indices.
pub fn brute_force_optimum(inst: &ScpInstance) -> Result<Vec<Vertex>, ExactError> {
    let k = inst.facilities().len();
    if k > BRUTE_FORCE_MAX_FACILITIES {
        return Err(ExactError::TooLarge { facilities: k, cap: BRUTE_FORCE_MAX_FACILITIES });
    }
    inst.check_feasible()?;
    let u = inst.customers().len();
    let covers = |mask: u32| {
        (0..u).all(|c| {
            inst.self_facility(c).is_some_and(|f| mask >> f & 1 == 1)
                || inst.customer_pairs(c).iter().any(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
        })
    };
    for size in 0..=k {
        for combo in (0..k).combinations(size) {
            let mask = combo.iter().fold(0u32, |m, &f| m | 1 << f);
            if covers(mask) {
                return Ok(combo.iter().map(|&f| inst.facilities()[f]).collect());
            }
        }
    }
    unreachable!("feasible instances are covered by all of S")
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[String]) {
    for (i, chunk) in terms.chunks(TERMS_PER_LINE).enumerate() {
        if i > 0 {
            out.push_str("\n   ");
        }
        let joined = chunk.join(" + ");
        if i > 0 {
            out.push_str("+ ");
        }
        out.push_str(&joined);
    }
}

fn write_row(out: &mut String, name: &str, terms: &[String], rhs: &str) {
    write!(out, " {name}: ").unwrap();
    write_terms(out, terms);
    writeln!(out, " {rhs}").unwrap();
}

fn write_objective_and_binaries(facilities: &[Vertex]) -> (String, String) {
    let xs: Vec<String> = facilities.iter().map(|f| format!("x_{f}")).collect();
    let mut head = String::from("Minimize\n");
    if xs.is_empty() {
        head.push_str(" obj: 0\n");
    } else {
        write_row(&mut head, "obj", &xs, "");
        head.pop();
        head.pop();
        head.push('\n');
    }
    let mut tail = String::from("Binary\n");
    for x in &xs {
        writeln!(tail, " {x}").unwrap();
    }
    tail.push_str("End\n");
    (head, tail)
}

/// The pair model: binary `x_f`, continuous `y_a_b` for each facility pair
/// occurring in `T`, rows `y ≤ x_a`, `y ≤ x_b`, and one covering row per
/// customer.
pub fn export_mip_lp(inst: &ScpInstance) -> String {
    let triples = inst.triples().as_slice();
    let mut pairs: Vec<(u32, u32)> = triples.iter().map(|t| (t.f1, t.f2)).collect();
    pairs.sort_unstable();
    pairs.dedup();

    let (head, tail) = write_objective_and_binaries(inst.facilities());
    let mut out = head;
    out.push_str("Subject To\n");
    for &(a, b) in &pairs {
        writeln!(out, " p_{a}_{b}_1: y_{a}_{b} - x_{a} <= 0").unwrap();
        writeln!(out, " p_{a}_{b}_2: y_{a}_{b} - x_{b} <= 0").unwrap();
    }
    for &c in inst.customers() {
        let mut terms = Vec::new();
        if inst.self_cover() && inst.facility_local(c).is_some() {
            terms.push(format!("x_{c}"));
        }
        terms.extend(inst.triples().for_customer(c).iter().map(|t| format!("y_{}_{}", t.f1, t.f2)));
        if terms.is_empty() {
            // uncoverable: keep the row so the model is infeasible
            terms.push(format!("0 x_{}", inst.facilities().first().copied().unwrap_or(c)));
        }
        write_row(&mut out, &format!("c_{c}"), &terms, ">= 1");
    }
    out.push_str("Bounds\n");
    for &(a, b) in &pairs {
        writeln!(out, " y_{a}_{b} >= 0").unwrap();
    }
    out.push_str(&tail);
    out
}

/// The hitting-set bound: binary `x_f` and one row `h_<c>_<x>` per element.
pub fn export_hslb_lp(hs: &HittingSetInstance) -> String {
    let (head, tail) = write_objective_and_binaries(hs.facilities());
    let mut out = head;
    out.push_str("Subject To\n");
    for (i, e) in hs.elements().iter().enumerate() {
        let terms: Vec<String> = hs.hitters(i).iter().map(|f| format!("x_{f}")).collect();
        write_row(&mut out, &format!("h_{}_{}", e.customer, e.neighbor), &terms, ">= 1");
    }
    out.push_str(&tail);
    out
}

/// Column and row counts of an exported LP file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpCounts {
    pub binaries: usize,
    pub continuous: usize,
    pub rows: usize,
}

pub fn lp_counts(text: &str) -> LpCounts {
    let mut section = "";
    let mut counts = LpCounts { binaries: 0, continuous: 0, rows: 0 };
    for line in text.lines() {
        match line {
            "Minimize" | "Subject To" | "Bounds" | "Binary" | "End" => section = line,
            _ if line.starts_with("   ") => {}
            _ => match section {
                "Subject To" => counts.rows += 1,
                "Bounds" => counts.continuous += 1,
                "Binary" => counts.binaries += 1,
                _ => {}
            },
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_scp;
    use crate::rng::from_seed;
    use crate::scp::validate_cover;
    use crate::triples::{Triple, TripleSet};

    fn forced_pair() -> ScpInstance {
        let ts = TripleSet::from_triples(3, None, vec![Triple::new(0, 1, 2)]);
        ScpInstance::new(3, vec![0], vec![1, 2], ts, true).unwrap()
    }

    #[test]
    fn self_cover_dominates() {
        let ts = TripleSet::from_triples(3, None, vec![Triple::new(0, 1, 2)]);
        let inst = ScpInstance::new(3, vec![0], vec![0, 1, 2], ts, true).unwrap();
        let r = solve_exact(&inst, &ExactOptions::default()).unwrap();
        assert_eq!((r.cover, r.status), (vec![0], ExactStatus::Optimal));
        assert_eq!(brute_force_optimum(&inst).unwrap(), vec![0]);
    }

    #[test]
    fn brute_force_degenerate_cases() {
        let empty = ScpInstance::new(2, vec![], vec![0, 1], TripleSet::from_triples(2, None, vec![]), true).unwrap();
        assert_eq!(brute_force_optimum(&empty).unwrap(), Vec::<Vertex>::new());
        let selfs = ScpInstance::new(3, vec![0, 1, 2], vec![0, 1, 2], TripleSet::from_triples(3, None, vec![]), true).unwrap();
        assert_eq!(brute_force_optimum(&selfs).unwrap(), vec![0, 1, 2]);
        assert_eq!(solve_exact(&selfs, &ExactOptions::default()).unwrap().cover, vec![0, 1, 2]);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        for seed in 0..60 {
            let mut rng = from_seed(seed);
            let u = 3 + seed as usize % 8;
            let s = 4 + seed as usize % 9;
            let overlap = (seed as usize % 4).min(u).min(s);
            let inst = random_scp(u, s, overlap, 0.15, true, &mut rng);
            let brute = brute_force_optimum(&inst).unwrap();
            let r = solve_exact(&inst, &ExactOptions { root_iterations: 4, ..Default::default() }).unwrap();
            assert_eq!(r.status, ExactStatus::Optimal);
            assert!(validate_cover(&inst, &r.cover).valid);
            assert_eq!(r.cover.len(), brute.len(), "seed {seed}");
        }
    }

    #[test]
    fn node_budget_is_reported() {
        let inst = random_scp(12, 16, 0, 0.05, true, &mut from_seed(3));
        let r = solve_exact(&inst, &ExactOptions { max_nodes: Some(0), root_iterations: 1, ..Default::default() }).unwrap();
        assert_eq!(r.status, ExactStatus::BudgetExceeded);
        assert!(validate_cover(&inst, &r.cover).valid);
        assert!(r.lower_bound <= r.cover.len());
    }

    #[test]
    fn mip_export_counts() {
        let text = export_mip_lp(&forced_pair());
        assert_eq!(lp_counts(&text), LpCounts { binaries: 2, continuous: 1, rows: 3 });
        assert_eq!(
            text,
            "Minimize\n obj: x_1 + x_2\nSubject To\n p_1_2_1: y_1_2 - x_1 <= 0\n p_1_2_2: y_1_2 - x_2 <= 0\n c_0: y_1_2 >= 1\nBounds\n y_1_2 >= 0\nBinary\n x_1\n x_2\nEnd\n"
        );
        assert_eq!(text, export_mip_lp(&forced_pair()));
    }

    #[test]
    fn mip_export_closed_form_counts() {
        let inst = random_scp(9, 14, 3, 0.2, true, &mut from_seed(8));
        let mut pairs: Vec<_> = inst.triples().as_slice().iter().map(|t| (t.f1, t.f2)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        let c = lp_counts(&export_mip_lp(&inst));
        assert_eq!(c, LpCounts { binaries: 14, continuous: pairs.len(), rows: 2 * pairs.len() + 9 });
    }

    #[test]
    fn hslb_export_single_row() {
        use crate::hitting::Element;
        let hs = HittingSetInstance::from_sets(vec![0, 1], vec![(Element { customer: 0, neighbor: 1 }, vec![0])]);
        let text = export_hslb_lp(&hs);
        assert_eq!(lp_counts(&text), LpCounts { binaries: 2, continuous: 0, rows: 1 });
        assert!(text.contains(" h_0_1: x_0 >= 1\n"));
    }

    #[test]
    fn long_rows_wrap() {
        use crate::hitting::Element;
        let hs = HittingSetInstance::from_sets((0..20).collect(), vec![(Element { customer: 0, neighbor: 1 }, (0..20).collect())]);
        let text = export_hslb_lp(&hs);
        assert!(text.lines().all(|l| l.len() < 255));
        assert_eq!(lp_counts(&text).rows, 1);
        assert!(text.contains("\n   + x_8 + "));
    }
}
