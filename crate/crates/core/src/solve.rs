//! Algorithm dispatch shared by the CLI and the acceptance suite.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::exact::{solve_exact, ExactOptions, ExactStatus};
use crate::genetic::{evolve, GaParams};
use crate::graph::{Network, Vertex};
use crate::hitting::{build_hslb_from, dhs, dhs_high_t, shs, DhsContext, GoodnessTable, HittingSetInstance, NeighborTable};
use crate::rng::{derive, derive_indexed};
use crate::scp::{greedy_multi, validate_cover, MultiResult, ScpError, ScpInstance};
use crate::triples::{generate, CoverMode};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scp(#[from] ScpError),
}

/// One heuristic that can take part in a portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Greedy,
    Shs,
    /// DHS with `t = 1`.
    Dhs1,
    /// DHS with `t = max(1, |F|/2)`.
    DhsHigh,
}

impl Heuristic {
    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Greedy => "greedy",
            Heuristic::Shs => "shs",
            Heuristic::Dhs1 => "dhs1",
            Heuristic::DhsHigh => "dhsh",
        }
    }

    fn needs_set_mode(self) -> bool {
        self != Heuristic::Greedy
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "greedy" => Heuristic::Greedy,
            "shs" => Heuristic::Shs,
            "dhs1" => Heuristic::Dhs1,
            "dhsh" => Heuristic::DhsHigh,
            _ => return Err(format!("unknown portfolio component `{s}` (greedy, shs, dhs1, dhsh)")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algorithm {
    Greedy,
    Genetic,
    Shs,
    Dhs,
    Exact,
    /// Components run in order; `shs:200+greedy:200`.
    Portfolio(Vec<(Heuristic, usize)>),
}

impl Algorithm {
    pub fn needs_set_mode(&self) -> bool {
        match self {
            Algorithm::Shs | Algorithm::Dhs => true,
            Algorithm::Portfolio(parts) => parts.iter().any(|(h, _)| h.needs_set_mode()),
            _ => false,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Greedy => f.write_str("greedy"),
            Algorithm::Genetic => f.write_str("genetic"),
            Algorithm::Shs => f.write_str("shs"),
            Algorithm::Dhs => f.write_str("dhs"),
            Algorithm::Exact => f.write_str("exact"),
            Algorithm::Portfolio(parts) => {
                let s: Vec<String> = parts.iter().map(|(h, n)| format!("{}:{n}", h.name())).collect();
                write!(f, "portfolio({})", s.join("+"))
            }
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Plain names, or a portfolio either bare (`shs:200+greedy:200`) or
    /// wrapped as `portfolio(...)`.
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "greedy" => Algorithm::Greedy,
            "genetic" => Algorithm::Genetic,
            "shs" => Algorithm::Shs,
            "dhs" => Algorithm::Dhs,
            "exact" => Algorithm::Exact,
            _ => {
                let body = s.strip_prefix("portfolio(").and_then(|r| r.strip_suffix(')')).unwrap_or(s);
                if !body.contains(':') {
                    return Err(format!("unknown algorithm `{s}`"));
                }
                Algorithm::Portfolio(parse_portfolio(body)?)
            }
        })
    }
}

pub fn parse_portfolio(s: &str) -> Result<Vec<(Heuristic, usize)>, String> {
    s.split('+')
        .map(|part| {
            let (name, n) = part.split_once(':').ok_or_else(|| format!("portfolio part `{part}` needs name:iterations"))?;
            let n: usize = n.parse().map_err(|_| format!("bad iteration count in `{part}`"))?;
            if n == 0 {
                return Err(format!("portfolio part `{part}` has zero iterations"));
            }
            Ok((name.parse()?, n))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolveParams {
    pub iterations: usize,
    pub seed: u64,
    /// DHS threshold; defaults to `dhs_high_t`.
    pub t: Option<usize>,
    pub population: Option<usize>,
    pub stall: Option<usize>,
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams { iterations: 400, seed: 0, t: None, population: None, stall: None, max_nodes: None, time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub cover: Vec<Vertex>,
    /// Per-run cover sizes (per-generation best for the genetic algorithm).
    pub sizes: Vec<usize>,
    pub best_iteration: usize,
    /// `None` for heuristics.
    pub exact_status: Option<ExactStatus>,
    pub lower_bound: Option<usize>,
    /// Generation log of the genetic algorithm.
    pub log: Option<String>,
}

impl SolveOutcome {
    fn from_multi(m: MultiResult) -> Self {
        SolveOutcome { cover: m.best, sizes: m.sizes, best_iteration: m.best_iteration, exact_status: None, lower_bound: None, log: None }
    }
}

/// Network, triples and the derived set-disjoint structures.
pub struct Prepared<'a> {
    pub net: &'a Network,
    pub mode: CoverMode,
    pub inst: ScpInstance,
    set_parts: Option<(NeighborTable, HittingSetInstance)>,
}

impl<'a> Prepared<'a> {
    pub fn new(net: &'a Network, mode: CoverMode) -> Result<Self, ScpError> {
        let inst = ScpInstance::from_network(net, generate(net, mode))?;
        let set_parts = (mode == CoverMode::SetDisjoint).then(|| {
            let table = NeighborTable::new(net);
            let hs = build_hslb_from(net, &table);
            (table, hs)
        });
        Ok(Prepared { net, mode, inst, set_parts })
    }

    pub fn hitting(&self) -> Option<&HittingSetInstance> {
        self.set_parts.as_ref().map(|(_, hs)| hs)
    }

    fn require_set(&self, what: &str) -> Result<&(NeighborTable, HittingSetInstance), SolveError> {
        self.set_parts.as_ref().ok_or_else(|| SolveError::Usage(format!("{what} requires mode=set")))
    }

    fn run_heuristic(&self, h: Heuristic, iterations: usize, seed: u64, t: Option<usize>) -> Result<MultiResult, SolveError> {
        Ok(match h {
            Heuristic::Greedy => greedy_multi(&self.inst, iterations, seed)?,
            Heuristic::Shs => shs(&self.require_set("shs")?.1, &self.inst, iterations, seed)?.multi,
            Heuristic::Dhs1 | Heuristic::DhsHigh => {
                let (table, _) = self.require_set("dhs")?;
                let goodness = GoodnessTable::new(self.net, table);
                let ctx = DhsContext { net: self.net, neighbors: table, goodness: &goodness, inst: &self.inst };
                let t = match h {
                    Heuristic::Dhs1 => 1,
                    _ => t.unwrap_or_else(|| dhs_high_t(self.net)),
                };
                dhs(&ctx, t, iterations, seed)?.multi
            }
        })
    }

    /// Runs `algo`; every stream comes from `params.seed` through a fixed
    /// label, so results do not depend on the thread count.
    pub fn solve(&self, algo: &Algorithm, params: &SolveParams) -> Result<SolveOutcome, SolveError> {
        if params.iterations == 0 {
            return Err(SolveError::Usage("iterations must be at least 1".into()));
        }
        let seed = params.seed;
        let out = match algo {
            Algorithm::Greedy => SolveOutcome::from_multi(self.run_heuristic(Heuristic::Greedy, params.iterations, derive(seed, "greedy"), None)?),
            Algorithm::Shs => SolveOutcome::from_multi(self.run_heuristic(Heuristic::Shs, params.iterations, derive(seed, "shs"), None)?),
            Algorithm::Dhs => {
                SolveOutcome::from_multi(self.run_heuristic(Heuristic::DhsHigh, params.iterations, derive(seed, "dhs"), params.t)?)
            }
            Algorithm::Genetic => {
                let mut ga = GaParams::defaults(self.inst.facilities().len(), self.net.vertex_count(), derive(seed, "genetic"));
                if let Some(p) = params.population {
                    ga.population = p;
                }
                if let Some(q) = params.stall {
                    ga.stall_limit = q;
                }
                ga.validate().map_err(SolveError::Usage)?;
                let r = evolve(&self.inst, &ga)?;
                let sizes: Vec<usize> = r.log.iter().map(|l| l.best).collect();
                let best_iteration = sizes.iter().position(|&s| s == r.best.len()).unwrap_or(0);
                let log = Some(r.log_csv());
                SolveOutcome { cover: r.best, sizes, best_iteration, exact_status: None, lower_bound: None, log }
            }
            Algorithm::Exact => {
                let opts = ExactOptions {
                    max_nodes: params.max_nodes,
                    time_limit: params.time_limit,
                    hitting: self.hitting(),
                    root_iterations: params.iterations,
                };
                let r = solve_exact(&self.inst, &opts)?;
                SolveOutcome {
                    sizes: vec![r.cover.len()],
                    cover: r.cover,
                    best_iteration: 0,
                    exact_status: Some(r.status),
                    lower_bound: Some(r.lower_bound),
                    log: None,
                }
            }
            Algorithm::Portfolio(parts) => {
                if let Some((h, _)) = parts.iter().find(|(h, _)| h.needs_set_mode() && self.set_parts.is_none()) {
                    return Err(SolveError::Usage(format!("{} requires mode=set", h.name())));
                }
                let mut sizes = Vec::new();
                let mut best: Option<(usize, Vec<Vertex>)> = None;
                for (idx, &(h, n)) in parts.iter().enumerate() {
                    let m = self.run_heuristic(h, n, derive_indexed(seed, "portfolio", idx as u64), params.t)?;
                    let global = sizes.len() + m.best_iteration;
                    if best.as_ref().is_none_or(|(_, b)| m.best.len() < b.len()) {
                        best = Some((global, m.best));
                    }
                    sizes.extend(m.sizes);
                }
                let (best_iteration, cover) = best.expect("portfolio has at least one part");
                SolveOutcome { cover, sizes, best_iteration, exact_status: None, lower_bound: None, log: None }
            }
        };
        debug_assert!(validate_cover(&self.inst, &out.cover).valid);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::build_fig4_fixture;

    #[test]
    fn algorithm_strings() {
        assert_eq!("shs:200+greedy:200".parse::<Algorithm>().unwrap(), Algorithm::Portfolio(vec![(Heuristic::Shs, 200), (Heuristic::Greedy, 200)]));
        let a: Algorithm = "portfolio(dhs1:5+dhsh:7)".parse().unwrap();
        assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        assert!("greedy:0".parse::<Algorithm>().is_err());
        assert!("foo".parse::<Algorithm>().is_err());
        assert!("shs:10".parse::<Algorithm>().unwrap().needs_set_mode());
        assert!(!"greedy:10".parse::<Algorithm>().unwrap().needs_set_mode());
    }

    #[test]
    fn fig4_every_algorithm_finds_n() {
        let net = build_fig4_fixture(9).unwrap();
        let prep = Prepared::new(&net, CoverMode::SetDisjoint).unwrap();
        let params = SolveParams { iterations: 40, seed: 5, ..SolveParams::default() };
        for algo in ["greedy", "shs", "dhs", "genetic", "exact", "shs:20+greedy:20"] {
            let out = prep.solve(&algo.parse().unwrap(), &params).unwrap();
            assert_eq!(out.cover.len(), 9, "{algo}");
            assert_eq!(out.sizes[out.best_iteration], 9, "{algo}");
        }
    }

    #[test]
    fn hitting_heuristics_refuse_path_modes() {
        let net = build_fig4_fixture(4).unwrap();
        let prep = Prepared::new(&net, CoverMode::PathVertexDisjoint).unwrap();
        let params = SolveParams { iterations: 4, ..SolveParams::default() };
        for algo in ["shs", "dhs", "greedy:2+dhs1:2"] {
            assert!(matches!(prep.solve(&algo.parse().unwrap(), &params), Err(SolveError::Usage(_))), "{algo}");
        }
        assert!(prep.solve(&Algorithm::Greedy, &params).is_ok());
    }

    #[test]
    fn portfolio_best_is_earliest_smallest() {
        let net = build_fig4_fixture(4).unwrap();
        let prep = Prepared::new(&net, CoverMode::SetDisjoint).unwrap();
        let params = SolveParams { seed: 11, ..SolveParams::default() };
        let out = prep.solve(&"greedy:6+shs:6".parse().unwrap(), &params).unwrap();
        assert_eq!(out.sizes.len(), 12);
        let min = *out.sizes.iter().min().unwrap();
        assert_eq!(out.best_iteration, out.sizes.iter().position(|&s| s == min).unwrap());
    }
}
