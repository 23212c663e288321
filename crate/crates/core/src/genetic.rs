//! Biased random-key genetic algorithm over 0-1 facility chromosomes,
//! decoded by deterministic greedy completion.

use rand::Rng as _;
use rayon::prelude::*;

use crate::graph::Vertex;
use crate::rng::{self, Rng};
use crate::scp::{complete_deterministic, minimalize, DeleteMode, ScpError, ScpInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    /// Generations without improvement before stopping.
    pub stall_limit: usize,
    pub elite_fraction: f64,
    pub immigrant_fraction: f64,
    /// Probability a child takes the elite parent's gene.
    pub inheritance: f64,
    pub seed: u64,
    pub minimalize_final: bool,
}

impl GaParams {
    /// `p = min(300, |F|)` (at least 2) and `q = |V|`.
    pub fn defaults(facility_count: usize, vertex_count: usize, seed: u64) -> Self {
        GaParams {
            population: facility_count.clamp(2, 300),
            stall_limit: vertex_count,
            elite_fraction: 0.15,
            immigrant_fraction: 0.10,
            inheritance: 0.70,
            seed,
            minimalize_final: false,
        }
    }

    /// Sizes of the elite, immigrant and crossover segments.
    pub fn segments(&self) -> (usize, usize, usize) {
        let p = self.population as f64;
        let elite = (self.elite_fraction * p).ceil() as usize;
        let immigrants = (self.immigrant_fraction * p).ceil() as usize;
        (elite, immigrants, self.population.saturating_sub(elite + immigrants))
    }

    pub fn validate(&self) -> Result<(), String> {
        let frac = |x: f64| x > 0.0 && x < 1.0;
        if self.population < 2 {
            return Err("population must be at least 2".into());
        }
        if !frac(self.elite_fraction) || !frac(self.immigrant_fraction) || !frac(self.inheritance) {
            return Err("fractions must lie strictly between 0 and 1".into());
        }
        if self.elite_fraction + self.immigrant_fraction >= 1.0 {
            return Err("elite and immigrant fractions must sum to less than 1".into());
        }
        let (e, i, _) = self.segments();
        if e + i > self.population || e >= self.population {
            return Err(format!("population {} too small for its segments", self.population));
        }
        Ok(())
    }
}

/// Genes over the instance's facilities in index order, plus the decoded
/// fitness once evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chromosome {
    pub genes: Vec<bool>,
    pub fitness: Option<usize>,
}

impl Chromosome {
    fn random(k: usize, rng: &mut Rng) -> Self {
        Chromosome { genes: (0..k).map(|_| rng.random_bool(0.5)).collect(), fitness: None }
    }
}

/// Facilities switched on, completed to a cover by greedy with lowest-index
/// ties. No minimalization.
pub fn decode(inst: &ScpInstance, genes: &[bool]) -> Result<Vec<Vertex>, ScpError> {
    assert_eq!(genes.len(), inst.facilities().len(), "one gene per facility");
    let on: Vec<Vertex> = inst.facilities().iter().zip(genes).filter(|(_, &g)| g).map(|(&f, _)| f).collect();
    complete_deterministic(inst, &on)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    /// Best fitness seen so far.
    pub best: usize,
    pub mean: f64,
    pub stall: usize,
}

impl GenerationLog {
    pub fn csv_line(&self) -> String {
        format!("{},{},{:.3},{}", self.generation, self.best, self.mean, self.stall)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Vec<Vertex>,
    pub log: Vec<GenerationLog>,
}

impl GaResult {
    pub fn log_csv(&self) -> String {
        let mut out = String::from("generation,best,mean,stall\n");
        for l in &self.log {
            out.push_str(&l.csv_line());
            out.push('\n');
        }
        out
    }
}

/// Runs generations until `stall_limit` pass without improvement.
pub fn evolve(inst: &ScpInstance, params: &GaParams) -> Result<GaResult, ScpError> {
    params.validate().expect("invalid genetic parameters");
    inst.check_feasible()?;
    let k = inst.facilities().len();
    let p = params.population;
    let (elite, immigrants, _) = params.segments();
    let mut evo = rng::from_seed(rng::derive(params.seed, "evolve"));
    let mut newcomers = 0u64;
    let mut fresh = |n: usize| -> Vec<Chromosome> {
        (0..n)
            .map(|_| {
                let mut r = rng::from_seed(rng::derive_indexed(params.seed, "immigrant", newcomers));
                newcomers += 1;
                Chromosome::random(k, &mut r)
            })
            .collect()
    };

    let mut population = fresh(p);
    let mut best: Option<Vec<Vertex>> = None;
    let mut stall = 0;
    let mut log = Vec::new();
    for generation in 0.. {
        let decoded: Vec<Option<Vec<Vertex>>> = population
            .par_iter()
            .map(|c| match c.fitness {
                Some(_) => Ok(None),
                None => decode(inst, &c.genes).map(Some),
            })
            .collect::<Result<_, _>>()?;
        let mut improved = false;
        for (c, cover) in population.iter_mut().zip(decoded) {
            if let Some(cover) = cover {
                c.fitness = Some(cover.len());
                if best.as_ref().is_none_or(|b| cover.len() < b.len()) {
                    best = Some(cover);
                    improved = true;
                }
            }
        }
        stall = if improved { 0 } else { stall + 1 };
        population.sort_by_key(|c| c.fitness.unwrap());
        let best_size = best.as_ref().unwrap().len();
        let mean = population.iter().map(|c| c.fitness.unwrap() as f64).sum::<f64>() / p as f64;
        log.push(GenerationLog { generation, best: best_size, mean, stall });
        if stall >= params.stall_limit {
            break;
        }

        let mut next: Vec<Chromosome> = population[..elite].to_vec();
        next.extend(fresh(immigrants));
        while next.len() < p {
            let a = &population[evo.random_range(0..elite)];
            let b = &population[evo.random_range(elite..p)];
            let genes = (0..k).map(|j| if evo.random_bool(params.inheritance) { a.genes[j] } else { b.genes[j] }).collect();
            next.push(Chromosome { genes, fitness: None });
        }
        population = next;
    }

    let mut best = best.unwrap();
    if params.minimalize_final {
        best = minimalize(inst, &best, DeleteMode::Reverse, &mut rng::from_seed(params.seed));
    }
    Ok(GaResult { best, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_optimum;
    use crate::generate::random_scp;
    use crate::rng::from_seed;
    use crate::scp::{greedy_construct, validate_cover, GreedyOptions, StartMode};
    use crate::triples::TripleSet;

    #[test]
    fn segment_arithmetic() {
        let p = GaParams { population: 300, ..GaParams::defaults(300, 50, 0) };
        assert_eq!(p.segments(), (45, 30, 225));
        let p = GaParams { population: 7, ..p };
        assert_eq!(p.segments(), (2, 1, 4));
        let p = GaParams { population: 2, ..p };
        assert_eq!(p.segments(), (1, 1, 0));
        assert!(p.validate().is_ok());
        assert_eq!(GaParams::defaults(1000, 190, 0).population, 300);
        assert_eq!(GaParams::defaults(1, 190, 0).population, 2);
    }

    #[test]
    fn decode_extremes() {
        let inst = random_scp(6, 8, 2, 0.2, true, &mut from_seed(1));
        let all = decode(&inst, &[true; 8]).unwrap();
        assert_eq!(all, inst.facilities());
        let none = decode(&inst, &[false; 8]).unwrap();
        assert!(validate_cover(&inst, &none).valid);
        let opt = brute_force_optimum(&inst).unwrap();
        let planted: Vec<bool> = inst.facilities().iter().map(|f| opt.contains(f)).collect();
        assert_eq!(decode(&inst, &planted).unwrap(), opt);
    }

    #[test]
    fn full_set_optimum_stops_after_stall_limit() {
        let inst = ScpInstance::new(3, vec![0, 1, 2], vec![0, 1, 2], TripleSet::from_triples(3, None, vec![]), true).unwrap();
        let params = GaParams { stall_limit: 5, ..GaParams::defaults(3, 3, 9) };
        let r = evolve(&inst, &params).unwrap();
        assert_eq!(r.best.len(), 3);
        assert_eq!(r.log.len(), 6);
        assert_eq!(r.log.last().unwrap().stall, 5);
    }

    #[test]
    fn best_never_worsens_and_runs_repeat() {
        let inst = random_scp(10, 12, 4, 0.1, true, &mut from_seed(4));
        let params = GaParams::defaults(12, 15, 3);
        let a = evolve(&inst, &params).unwrap();
        assert!(a.log.windows(2).all(|w| w[1].best <= w[0].best));
        assert!(validate_cover(&inst, &a.best).valid);
        assert_eq!(a, evolve(&inst, &params).unwrap());
        assert!(a.log_csv().starts_with("generation,best,mean,stall\n0,"));
        let g = greedy_construct(&inst, &GreedyOptions { start_mode: StartMode::RandomCustomer, delete_mode: DeleteMode::Reverse, rng_seed: 3 }).unwrap();
        assert!(a.best.len() >= brute_force_optimum(&inst).unwrap().len());
        assert!(a.best.len() <= decode(&inst, &[false; 12]).unwrap().len().max(g.len()));
    }
}
