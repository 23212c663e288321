//! Set Cover by Pairs: the instance model, randomized greedy construction,
//! counting-based minimalization and best-of-many runs.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Network, Vertex};
use crate::rng::{self, ArgmaxReservoir, Rng};
use crate::triples::{CoverMode, Triple, TripleSet};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScpError {
    #[error("customer {customer} cannot be covered even by the full facility set")]
    Infeasible { customer: Vertex },
    #[error("triple ({0}, {1}, {2}) references a non-customer or non-facility")]
    BadTriple(Vertex, Vertex, Vertex),
    #[error("vertex {vertex} outside id space {id_space}")]
    OutOfRange { vertex: Vertex, id_space: usize },
}

/// Ground set `U`, cover objects `S` and the triple relation, with facilities
/// and customers renumbered to dense local indices.
#[derive(Debug, Clone)]
pub struct ScpInstance {
    id_space: usize,
    customers: Vec<Vertex>,
    facilities: Vec<Vertex>,
    triples: TripleSet,
    self_cover: bool,
    customer_local: Vec<u32>,
    facility_local: Vec<u32>,
    /// Per local customer: its own local facility index when it self-covers.
    self_facility: Vec<u32>,
    /// Per local facility: the local customer it is, if any.
    facility_customer: Vec<u32>,
    /// Per local facility: `(local customer, local partner)` for each triple.
    fac_start: Vec<usize>,
    fac_entries: Vec<(u32, u32)>,
    /// Per local customer: local facility pairs.
    cust_start: Vec<usize>,
    cust_pairs: Vec<(u32, u32)>,
    best_pairs: Vec<(u32, u32)>,
    best_pair_value: usize,
    infeasible: Option<Vertex>,
}

impl ScpInstance {
    /// General instance over ids `0..id_space`.
    pub fn new(
        id_space: usize,
        mut customers: Vec<Vertex>,
        mut facilities: Vec<Vertex>,
        triples: TripleSet,
        self_cover: bool,
    ) -> Result<Self, ScpError> {
        customers.sort_unstable();
        customers.dedup();
        facilities.sort_unstable();
        facilities.dedup();
        for &v in customers.iter().chain(&facilities) {
            if v >= id_space {
                return Err(ScpError::OutOfRange { vertex: v, id_space });
            }
        }
        let mut customer_local = vec![NIL; id_space];
        for (i, &c) in customers.iter().enumerate() {
            customer_local[c] = i as u32;
        }
        let mut facility_local = vec![NIL; id_space];
        for (i, &f) in facilities.iter().enumerate() {
            facility_local[f] = i as u32;
        }
        let k = facilities.len();
        let u = customers.len();
        let self_facility: Vec<u32> = customers
            .iter()
            .map(|&c| if self_cover { facility_local[c] } else { NIL })
            .collect();
        let mut facility_customer = vec![NIL; k];
        for (i, &sf) in self_facility.iter().enumerate() {
            if sf != NIL {
                facility_customer[sf as usize] = i as u32;
            }
        }

        let mut cust_start = vec![0usize; u + 1];
        let mut cust_pairs = Vec::with_capacity(triples.len());
        let mut fac_count = vec![0usize; k + 1];
        for (i, &c) in customers.iter().enumerate() {
            for t in triples.for_customer(c) {
                let (a, b) = (facility_local[t.f1 as usize], facility_local[t.f2 as usize]);
                if a == NIL || b == NIL || t.f1 as usize == c || t.f2 as usize == c {
                    return Err(ScpError::BadTriple(c, t.f1 as usize, t.f2 as usize));
                }
                cust_pairs.push((a, b));
                fac_count[a as usize + 1] += 1;
                fac_count[b as usize + 1] += 1;
            }
            cust_start[i + 1] = cust_pairs.len();
        }
        if cust_pairs.len() != triples.len() {
            let t = triples
                .as_slice()
                .iter()
                .find(|t| customer_local.get(t.customer()).is_none_or(|&l| l == NIL))
                .expect("some triple has a non-customer");
            return Err(ScpError::BadTriple(t.customer(), t.f1 as usize, t.f2 as usize));
        }
        for j in 0..k {
            fac_count[j + 1] += fac_count[j];
        }
        let fac_start = fac_count.clone();
        let mut fill = fac_count;
        let mut fac_entries = vec![(0u32, 0u32); 2 * cust_pairs.len()];
        for i in 0..u {
            for &(a, b) in &cust_pairs[cust_start[i]..cust_start[i + 1]] {
                fac_entries[fill[a as usize]] = (i as u32, b);
                fill[a as usize] += 1;
                fac_entries[fill[b as usize]] = (i as u32, a);
                fill[b as usize] += 1;
            }
        }

        // coverage of every pair occurring in T, counting self-covered members
        let mut pair_value: Vec<((u32, u32), usize)> = Vec::new();
        {
            let mut sorted = cust_pairs.clone();
            sorted.sort_unstable();
            for group in sorted.chunk_by(|x, y| x == y) {
                let (a, b) = group[0];
                let selfs = [a, b].iter().filter(|&&f| facility_customer[f as usize] != NIL).count();
                pair_value.push(((a, b), group.len() + selfs));
            }
        }
        let best_pair_value = pair_value.iter().map(|p| p.1).max().unwrap_or(0);
        let best_pairs = pair_value.iter().filter(|p| p.1 == best_pair_value).map(|p| p.0).collect();

        let infeasible = (0..u)
            .find(|&i| self_facility[i] == NIL && cust_start[i] == cust_start[i + 1])
            .map(|i| customers[i]);

        Ok(ScpInstance {
            id_space,
            customers,
            facilities,
            triples,
            self_cover,
            customer_local,
            facility_local,
            self_facility,
            facility_customer,
            fac_start,
            fac_entries,
            cust_start,
            cust_pairs,
            best_pairs,
            best_pair_value,
            infeasible,
        })
    }

    /// The SDFL/PDFL instance `U = C`, `S = F` with self-cover.
    pub fn from_network(net: &Network, triples: TripleSet) -> Result<Self, ScpError> {
        Self::new(net.vertex_count(), net.customers().to_vec(), net.facilities().to_vec(), triples, true)
    }

    pub fn id_space(&self) -> usize {
        self.id_space
    }

    pub fn customers(&self) -> &[Vertex] {
        &self.customers
    }

    pub fn facilities(&self) -> &[Vertex] {
        &self.facilities
    }

    pub fn triples(&self) -> &TripleSet {
        &self.triples
    }

    pub fn self_cover(&self) -> bool {
        self.self_cover
    }

    /// Mode of the triple set this instance was built from, if any.
    pub fn mode(&self) -> Option<CoverMode> {
        self.triples.mode()
    }

    pub fn facility_local(&self, v: Vertex) -> Option<usize> {
        self.facility_local.get(v).filter(|&&l| l != NIL).map(|&l| l as usize)
    }

    pub fn customer_local(&self, v: Vertex) -> Option<usize> {
        self.customer_local.get(v).filter(|&&l| l != NIL).map(|&l| l as usize)
    }

    /// Local facility index of customer `i` when it can cover itself.
    pub fn self_facility(&self, i: usize) -> Option<usize> {
        let f = self.self_facility[i];
        (f != NIL).then_some(f as usize)
    }

    /// Local facility pairs covering local customer `i`.
    pub fn customer_pairs(&self, i: usize) -> &[(u32, u32)] {
        &self.cust_pairs[self.cust_start[i]..self.cust_start[i + 1]]
    }

    /// `(local customer, local partner)` entries of local facility `j`.
    pub fn facility_entries(&self, j: usize) -> &[(u32, u32)] {
        &self.fac_entries[self.fac_start[j]..self.fac_start[j + 1]]
    }

    pub fn is_feasible(&self) -> bool {
        self.infeasible.is_none()
    }

    pub fn check_feasible(&self) -> Result<(), ScpError> {
        match self.infeasible {
            Some(customer) => Err(ScpError::Infeasible { customer }),
            None => Ok(()),
        }
    }

    /// Number of customers covered by the best pairs occurring in `T`.
    pub fn best_pair_value(&self) -> usize {
        self.best_pair_value
    }

    fn to_local(&self, cover: &[Vertex]) -> Vec<usize> {
        cover.iter().filter_map(|&v| self.facility_local(v)).collect()
    }

    fn to_global(&self, local: impl IntoIterator<Item = usize>) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = local.into_iter().map(|j| self.facilities[j]).collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverCheck {
    pub valid: bool,
    pub first_uncovered: Option<Vertex>,
}

/// Direct check: every customer is chosen or has a triple with both
/// facilities chosen. Ids outside `S` never cover anything.
pub fn validate_cover(inst: &ScpInstance, candidate: &[Vertex]) -> CoverCheck {
    let mut chosen = vec![false; inst.id_space];
    for &v in candidate {
        if inst.facility_local(v).is_some() {
            chosen[v] = true;
        }
    }
    let first_uncovered = inst.customers.iter().copied().find(|&c| {
        let self_ok = inst.self_cover && chosen[c];
        !self_ok && !inst.triples.for_customer(c).iter().any(|t: &Triple| chosen[t.f1 as usize] && chosen[t.f2 as usize])
    });
    CoverCheck { valid: first_uncovered.is_none(), first_uncovered }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StartMode {
    BestPair,
    RandomCustomer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeleteMode {
    Reverse,
    Random,
}

impl fmt::Display for StartMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartMode::BestPair => "best_pair",
            StartMode::RandomCustomer => "random_customer",
        })
    }
}

impl fmt::Display for DeleteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeleteMode::Reverse => "reverse",
            DeleteMode::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    pub start_mode: StartMode,
    pub delete_mode: DeleteMode,
    pub rng_seed: u64,
}

/// How greedy breaks ties between facilities of equal gain.
pub enum Tie<'a> {
    Random(&'a mut Rng),
    LowestIndex,
}

/// Incremental counts for a partial cover.
///
/// `partner[c][f]` counts chosen `f'` with `(c, f, f')` in `T`;
/// `covercount[c][f]` counts valid pairs containing chosen `f`. Matrices are
/// dense `|U| × |S|`.
pub struct CoverState<'a> {
    inst: &'a ScpInstance,
    k: usize,
    chosen: Vec<bool>,
    blocked: Vec<bool>,
    order: Vec<usize>,
    covered: Vec<bool>,
    uncovered: usize,
    mycount: Vec<u32>,
    covercount: Vec<u32>,
    partner: Vec<u32>,
    gain: Vec<u32>,
    // minimalization: lists of chosen facilities by (customer, covercount)
    buckets_on: bool,
    head: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    required: Vec<u32>,
    touched: Vec<u32>,
    stamp: u32,
    triple_reads: u64,
    verify: bool,
}

impl<'a> CoverState<'a> {
    pub fn new(inst: &'a ScpInstance) -> Self {
        let k = inst.facilities.len();
        let u = inst.customers.len();
        let gain = (0..k).map(|j| u32::from(inst.facility_customer[j] != NIL)).collect();
        CoverState {
            inst,
            k,
            chosen: vec![false; k],
            blocked: vec![false; k],
            order: Vec::new(),
            covered: vec![false; u],
            uncovered: u,
            mycount: vec![0; u],
            covercount: vec![0; u * k],
            partner: vec![0; u * k],
            gain,
            buckets_on: false,
            head: Vec::new(),
            next: Vec::new(),
            prev: Vec::new(),
            required: Vec::new(),
            touched: vec![0; u],
            stamp: 0,
            triple_reads: 0,
            verify: false,
        }
    }

    /// Recompute every count from scratch after each change and compare.
    pub fn with_verification(mut self, on: bool) -> Self {
        self.verify = on;
        self
    }

    /// Excludes local facility `f` from greedy completion.
    pub fn block(&mut self, f: usize) {
        self.blocked[f] = true;
    }

    /// Triple entries read so far by adds and deletes.
    pub fn triple_reads(&self) -> u64 {
        self.triple_reads
    }

    pub fn is_cover(&self) -> bool {
        self.uncovered == 0
    }

    pub fn uncovered_count(&self) -> usize {
        self.uncovered
    }

    /// Chosen facilities (local indices) in order of addition.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn cover(&self) -> Vec<Vertex> {
        self.inst.to_global(self.order.iter().copied())
    }

    pub fn mycount(&self, c: usize) -> u32 {
        self.mycount[c]
    }

    pub fn covercount(&self, c: usize, f: usize) -> u32 {
        self.covercount[c * self.k + f]
    }

    pub fn is_chosen(&self, f: usize) -> bool {
        self.chosen[f]
    }

    fn self_chosen(&self, c: usize) -> bool {
        let f = self.inst.self_facility[c];
        f != NIL && self.chosen[f as usize]
    }

    fn mark_covered(&mut self, c: usize) {
        if self.covered[c] {
            return;
        }
        self.covered[c] = true;
        self.uncovered -= 1;
        // c no longer counts towards any facility's gain
        let sf = self.inst.self_facility[c];
        let row = c * self.k;
        for g in 0..self.k {
            if !self.chosen[g] && (self.partner[row + g] > 0 || sf == g as u32) {
                self.gain[g] -= 1;
            }
        }
    }

    /// Adds local facility `f`; a no-op when already chosen.
    pub fn add(&mut self, f: usize) {
        if self.chosen[f] {
            return;
        }
        assert!(!self.buckets_on, "add during minimalization");
        self.chosen[f] = true;
        self.order.push(f);
        let inst = self.inst;
        let k = self.k;
        let mut newly = Vec::new();
        for &(c, p) in inst.facility_entries(f) {
            let (c, p) = (c as usize, p as usize);
            self.triple_reads += 1;
            self.partner[c * k + p] += 1;
            if self.chosen[p] {
                self.mycount[c] += 1;
                self.covercount[c * k + f] += 1;
                self.covercount[c * k + p] += 1;
                if self.mycount[c] == 1 && !self.covered[c] {
                    newly.push(c);
                }
            } else if !self.covered[c] && self.partner[c * k + p] == 1 {
                self.gain[p] += 1;
            }
        }
        let fc = inst.facility_customer[f];
        if fc != NIL {
            newly.push(fc as usize);
        }
        for c in newly {
            self.mark_covered(c);
        }
        self.check();
    }

    /// Unchosen facility with maximal gain, or a fallback score when no
    /// single addition covers anything.
    fn pick(&mut self, tie: &mut Tie<'_>) -> Option<usize> {
        let mut best = pick_max((0..self.k).filter(|&g| !self.chosen[g] && !self.blocked[g]).map(|g| (self.gain[g], g)), tie);
        if best.is_some_and(|(gain, _)| gain == 0) {
            // need two more facilities for every uncovered customer: score
            // facilities by the number of uncovered customers they pair up for
            let inst = self.inst;
            let mut score = vec![0u32; self.k];
            let mut seen = vec![NIL; self.k];
            for c in (0..inst.customers.len()).filter(|&c| !self.covered[c]) {
                for &(a, b) in inst.customer_pairs(c) {
                    self.triple_reads += 1;
                    for g in [a as usize, b as usize] {
                        if !self.chosen[g] && !self.blocked[g] && seen[g] != c as u32 {
                            seen[g] = c as u32;
                            score[g] += 1;
                        }
                    }
                }
            }
            best = pick_max((0..self.k).filter(|&g| !self.chosen[g] && !self.blocked[g]).map(|g| (score[g], g)), tie);
            if best.is_some_and(|(s, _)| s == 0) {
                best = None;
            }
        }
        best.map(|(_, g)| g)
    }

    /// Greedily adds facilities until every customer is covered.
    pub fn complete(&mut self, mut tie: Tie<'_>) -> Result<(), ScpError> {
        self.inst.check_feasible()?;
        while self.uncovered > 0 {
            match self.pick(&mut tie) {
                Some(g) => self.add(g),
                None => {
                    let c = (0..self.covered.len()).find(|&c| !self.covered[c]).unwrap();
                    return Err(ScpError::Infeasible { customer: self.inst.customers[c] });
                }
            }
        }
        Ok(())
    }

    fn start(&mut self, mode: StartMode, rng: &mut Rng) {
        let inst = self.inst;
        match mode {
            StartMode::BestPair if !inst.best_pairs.is_empty() => {
                let (a, b) = inst.best_pairs[rng.random_range(0..inst.best_pairs.len())];
                self.add(a as usize);
                self.add(b as usize);
            }
            _ => {
                let selfs: Vec<usize> = inst.self_facility.iter().filter(|&&f| f != NIL).map(|&f| f as usize).collect();
                if !selfs.is_empty() {
                    self.add(selfs[rng.random_range(0..selfs.len())]);
                }
            }
        }
    }

    fn bucket_head(&self, c: usize, v: u32) -> usize {
        c * (self.k + 1) + v as usize
    }

    fn bucket_insert(&mut self, c: usize, f: usize, v: u32) {
        let id = (c * self.k + f) as u32;
        let h = self.bucket_head(c, v);
        let first = self.head[h];
        self.next[id as usize] = first;
        self.prev[id as usize] = NIL;
        if first != NIL {
            self.prev[first as usize] = id;
        }
        self.head[h] = id;
    }

    fn bucket_remove(&mut self, c: usize, f: usize, v: u32) {
        let id = c * self.k + f;
        let (p, n) = (self.prev[id], self.next[id]);
        if p == NIL {
            let h = self.bucket_head(c, v);
            self.head[h] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
    }

    fn bucket_members(&self, c: usize, v: u32) -> impl Iterator<Item = usize> + '_ {
        let mut id = self.head[self.bucket_head(c, v)];
        std::iter::from_fn(move || {
            (id != NIL).then(|| {
                let f = id as usize % self.k;
                id = self.next[id as usize];
                f
            })
        })
    }

    /// Adds `sign` to the requirement count of each facility that customer
    /// `c` cannot lose.
    fn contribute(&mut self, c: usize, sign: i32) {
        let m = self.mycount[c];
        let apply = |r: &mut u32| *r = r.wrapping_add_signed(sign);
        if self.self_chosen(c) {
            if m == 0 {
                apply(&mut self.required[self.inst.self_facility[c] as usize]);
            }
        } else if m > 0 && m as usize <= self.k {
            // covercount never exceeds k - 1, so larger mycounts have no
            // essential facility (and would index past this customer's row)
            let members: Vec<usize> = self.bucket_members(c, m).collect();
            debug_assert!(members.len() <= 2);
            for f in members {
                apply(&mut self.required[f]);
            }
        }
    }

    fn start_minimalization(&mut self) {
        let (u, k) = (self.inst.customers.len(), self.k);
        self.head = vec![NIL; u * (k + 1)];
        self.next = vec![NIL; u * k];
        self.prev = vec![NIL; u * k];
        self.required = vec![0; k];
        self.buckets_on = true;
        for c in 0..u {
            for f in 0..k {
                let v = self.covercount[c * k + f];
                if v > 0 {
                    self.bucket_insert(c, f, v);
                }
            }
        }
        for c in 0..u {
            self.contribute(c, 1);
        }
    }

    fn touch(&mut self, c: usize) {
        if self.touched[c] != self.stamp {
            self.touched[c] = self.stamp;
            self.contribute(c, -1);
        }
    }

    fn move_count(&mut self, c: usize, f: usize) {
        let i = c * self.k + f;
        let v = self.covercount[i];
        self.bucket_remove(c, f, v);
        self.covercount[i] = v - 1;
        if v > 1 {
            self.bucket_insert(c, f, v - 1);
        }
    }

    fn delete(&mut self, f: usize) {
        self.stamp += 1;
        let mut touched = Vec::new();
        let fc = self.inst.facility_customer[f];
        if fc != NIL {
            self.touch(fc as usize);
            touched.push(fc as usize);
        }
        let inst = self.inst;
        let k = self.k;
        for &(c, p) in inst.facility_entries(f) {
            let (c, p) = (c as usize, p as usize);
            self.triple_reads += 1;
            self.partner[c * k + p] -= 1;
            if self.chosen[p] {
                if self.touched[c] != self.stamp {
                    self.touch(c);
                    touched.push(c);
                }
                self.mycount[c] -= 1;
                self.move_count(c, f);
                self.move_count(c, p);
            }
        }
        self.chosen[f] = false;
        self.order.retain(|&g| g != f);
        for c in touched {
            self.contribute(c, 1);
        }
        self.check();
    }

    /// Deletes facilities in the given order whenever the rest still covers.
    pub fn minimalize(&mut self, order: &[usize]) {
        assert!(self.is_cover(), "minimalization needs a cover");
        self.start_minimalization();
        self.check();
        for &f in order {
            if self.chosen[f] && self.required[f] == 0 {
                self.delete(f);
            }
        }
    }

    /// Deletion order for `mode` over the current cover.
    pub fn delete_order(&self, mode: DeleteMode, rng: &mut Rng) -> Vec<usize> {
        let mut order = self.order.clone();
        match mode {
            DeleteMode::Reverse => order.reverse(),
            DeleteMode::Random => order.shuffle(rng),
        }
        order
    }

    fn check(&self) {
        if self.verify {
            if let Err(msg) = self.consistency() {
                panic!("cover state inconsistent: {msg}");
            }
        }
    }

    /// Recomputes every count from the chosen set and compares.
    pub fn consistency(&self) -> Result<(), String> {
        let inst = self.inst;
        let (u, k) = (inst.customers.len(), self.k);
        let mut partner = vec![0u32; u * k];
        let mut covercount = vec![0u32; u * k];
        let mut mycount = vec![0u32; u];
        for c in 0..u {
            for &(a, b) in inst.customer_pairs(c) {
                let (a, b) = (a as usize, b as usize);
                if self.chosen[a] {
                    partner[c * k + b] += 1;
                }
                if self.chosen[b] {
                    partner[c * k + a] += 1;
                }
                if self.chosen[a] && self.chosen[b] {
                    mycount[c] += 1;
                    covercount[c * k + a] += 1;
                    covercount[c * k + b] += 1;
                }
            }
        }
        if partner != self.partner || covercount != self.covercount || mycount != self.mycount {
            return Err("pair counts differ from recomputation".into());
        }
        for c in 0..u {
            let sum: u32 = covercount[c * k..(c + 1) * k].iter().sum();
            if sum != 2 * mycount[c] {
                return Err(format!("customer {c}: covercount sum {sum} != 2 * mycount"));
            }
        }
        if !self.buckets_on {
            for c in 0..u {
                let covered = self.self_chosen(c) || mycount[c] > 0;
                if covered != self.covered[c] {
                    return Err(format!("customer {c}: covered flag stale"));
                }
            }
            for g in (0..k).filter(|&g| !self.chosen[g]) {
                let want = (0..u)
                    .filter(|&c| !self.covered[c])
                    .filter(|&c| partner[c * k + g] > 0 || inst.self_facility[c] == g as u32)
                    .count() as u32;
                if want != self.gain[g] {
                    return Err(format!("facility {g}: gain {} != {want}", self.gain[g]));
                }
            }
        } else {
            let mut required = vec![0u32; k];
            for c in 0..u {
                let mut listed: Vec<usize> = (1..=k as u32).flat_map(|v| self.bucket_members(c, v).map(move |f| (v, f))).map(|(v, f)| {
                    assert_eq!(covercount[c * k + f], v);
                    f
                }).collect();
                listed.sort_unstable();
                let expect: Vec<usize> = (0..k).filter(|&f| covercount[c * k + f] > 0).collect();
                if listed != expect {
                    return Err(format!("customer {c}: bucket lists disagree with counts"));
                }
                if self.self_chosen(c) {
                    if mycount[c] == 0 {
                        required[inst.self_facility[c] as usize] += 1;
                    }
                } else if mycount[c] > 0 {
                    for f in (0..k).filter(|&f| covercount[c * k + f] == mycount[c]) {
                        required[f] += 1;
                    }
                }
            }
            if required != self.required {
                return Err("requirement counts stale".into());
            }
        }
        Ok(())
    }
}

fn pick_max(candidates: impl Iterator<Item = (u32, usize)>, tie: &mut Tie<'_>) -> Option<(u32, usize)> {
    match tie {
        Tie::LowestIndex => candidates.fold(None, |best, (key, g)| match best {
            Some((bk, _)) if bk >= key => best,
            _ => Some((key, g)),
        }),
        Tie::Random(rng) => {
            let mut r = ArgmaxReservoir::default();
            for (key, g) in candidates {
                r.offer(u64::from(key), g, rng);
            }
            r.into_inner().map(|(key, g)| (key as u32, g))
        }
    }
}

/// One randomized greedy construction, without minimalization.
pub fn greedy_construct(inst: &ScpInstance, opts: &GreedyOptions) -> Result<Vec<Vertex>, ScpError> {
    inst.check_feasible()?;
    let mut rng = rng::from_seed(opts.rng_seed);
    let mut st = CoverState::new(inst);
    st.start(opts.start_mode, &mut rng);
    st.complete(Tie::Random(&mut rng))?;
    Ok(st.cover())
}

/// Drops facilities from a valid cover until it is 1-minimal. `Reverse`
/// tries them in reverse of the order given.
pub fn minimalize(inst: &ScpInstance, cover: &[Vertex], mode: DeleteMode, rng: &mut Rng) -> Vec<Vertex> {
    let mut st = CoverState::new(inst);
    for f in inst.to_local(cover) {
        st.add(f);
    }
    let order = st.delete_order(mode, rng);
    st.minimalize(&order);
    st.cover()
}

/// Greedy completion of `partial` followed by minimalization, sharing one
/// counting state.
pub fn complete_and_minimalize(
    inst: &ScpInstance,
    partial: &[Vertex],
    delete_mode: DeleteMode,
    rng: &mut Rng,
) -> Result<Vec<Vertex>, ScpError> {
    let mut st = CoverState::new(inst);
    for f in inst.to_local(partial) {
        st.add(f);
    }
    st.complete(Tie::Random(rng))?;
    let order = st.delete_order(delete_mode, rng);
    st.minimalize(&order);
    Ok(st.cover())
}

/// Completes `partial` greedily; ties go to the lowest facility index.
pub fn complete_deterministic(inst: &ScpInstance, partial: &[Vertex]) -> Result<Vec<Vertex>, ScpError> {
    let mut st = CoverState::new(inst);
    for f in inst.to_local(partial) {
        st.add(f);
    }
    st.complete(Tie::LowestIndex)?;
    Ok(st.cover())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub cover: Vec<Vertex>,
    pub constructed_size: usize,
    pub triple_reads: u64,
}

/// Construction plus minimalization in one state.
pub fn greedy_run(inst: &ScpInstance, opts: &GreedyOptions) -> Result<GreedyRun, ScpError> {
    greedy_run_checked(inst, opts, false)
}

/// [`greedy_run`] recomputing all counts after every step.
pub fn greedy_run_checked(inst: &ScpInstance, opts: &GreedyOptions, verify: bool) -> Result<GreedyRun, ScpError> {
    inst.check_feasible()?;
    let mut rng = rng::from_seed(opts.rng_seed);
    let mut st = CoverState::new(inst).with_verification(verify);
    st.start(opts.start_mode, &mut rng);
    st.complete(Tie::Random(&mut rng))?;
    let constructed_size = st.order().len();
    let order = st.delete_order(opts.delete_mode, &mut rng);
    st.minimalize(&order);
    Ok(GreedyRun { cover: st.cover(), constructed_size, triple_reads: st.triple_reads() })
}

/// Option combinations cycled by [`greedy_multi`], in block order.
pub const GREEDY_BLOCKS: [(StartMode, DeleteMode); 4] = [
    (StartMode::BestPair, DeleteMode::Reverse),
    (StartMode::BestPair, DeleteMode::Random),
    (StartMode::RandomCustomer, DeleteMode::Reverse),
    (StartMode::RandomCustomer, DeleteMode::Random),
];

/// Options of iteration `i` out of `iterations`: four equal blocks, the
/// remainder going to earlier blocks.
pub fn multi_options(i: usize, iterations: usize, base_seed: u64) -> GreedyOptions {
    let (q, r) = (iterations / 4, iterations % 4);
    let mut end = 0;
    let mut block = 3;
    for b in 0..4 {
        end += q + usize::from(b < r);
        if i < end {
            block = b;
            break;
        }
    }
    let (start_mode, delete_mode) = GREEDY_BLOCKS[block];
    GreedyOptions { start_mode, delete_mode, rng_seed: base_seed.wrapping_add(i as u64) }
}

/// Outcome of a best-of-many heuristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiResult {
    pub best: Vec<Vertex>,
    pub best_iteration: usize,
    pub sizes: Vec<usize>,
}

impl MultiResult {
    /// Smallest cover, ties to the earliest iteration.
    pub fn from_runs(covers: Vec<Vec<Vertex>>) -> Self {
        let sizes: Vec<usize> = covers.iter().map(Vec::len).collect();
        let best_iteration = (0..sizes.len()).min_by_key(|&i| (sizes[i], i)).expect("at least one run");
        let best = covers.into_iter().nth(best_iteration).unwrap();
        MultiResult { best, best_iteration, sizes }
    }
}

/// Best of `iterations` greedy runs; iteration `i` uses seed `base_seed + i`.
pub fn greedy_multi(inst: &ScpInstance, iterations: usize, base_seed: u64) -> Result<MultiResult, ScpError> {
    assert!(iterations >= 1, "need at least one iteration");
    inst.check_feasible()?;
    let covers = (0..iterations)
        .into_par_iter()
        .map(|i| greedy_run(inst, &multi_options(i, iterations, base_seed)).map(|r| r.cover))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiResult::from_runs(covers))
}

/// Cover file: `#` comment lines of `key value`, `s <size>`, then one
/// `v <facility>` line per member.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub comments: Vec<(String, String)>,
    pub cover: Vec<Vertex>,
}

impl Solution {
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.comments {
            writeln!(out, "# {k} {v}").unwrap();
        }
        writeln!(out, "s {}", self.cover.len()).unwrap();
        for v in &self.cover {
            writeln!(out, "v {v}").unwrap();
        }
        out
    }
}

impl FromStr for Solution {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut sol = Solution::default();
        let mut size = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                sol.comments.push((k.to_string(), v.trim().to_string()));
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = |what: &str| format!("line {}: {what}", n + 1);
            match (parts.next(), parts.next(), parts.next()) {
                (None, ..) => {}
                (Some("s"), Some(x), None) => size = Some(x.parse::<usize>().map_err(|_| bad("bad size"))?),
                (Some("v"), Some(x), None) => sol.cover.push(x.parse().map_err(|_| bad("bad vertex"))?),
                _ => return Err(bad("expected `s <size>` or `v <id>`")),
            }
        }
        match size {
            Some(s) if s == sol.cover.len() => Ok(sol),
            Some(s) => Err(format!("size line says {s} but {} members listed", sol.cover.len())),
            None => Err("missing `s <size>` line".into()),
        }
    }
}
