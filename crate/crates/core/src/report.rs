//! Machine-readable solve reports, the failure-probability table and the
//! per-class cost summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::generate::InstanceClass;
use crate::graph::{Network, Vertex};
use crate::scp::{validate_cover, ScpInstance};
use crate::triples::{generate, CoverMode};

/// SHA-256 of the canonical instance text, so comments and whitespace in
/// the source file do not matter.
pub fn instance_hash(net: &Network) -> String {
    let digest = Sha256::digest(net.to_instance_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub instance: String,
    pub instance_hash: String,
    pub mode: CoverMode,
    pub algorithm: String,
    pub seed: u64,
    pub vertices: usize,
    pub customers: usize,
    pub facilities: usize,
    pub triples: usize,
    pub cover: Vec<Vertex>,
    pub hslb: Option<usize>,
    pub updfl: Option<usize>,
    /// Proven lower bound from the exact solver.
    pub exact_bound: Option<usize>,
    /// `heuristic`, `optimal` or `budget_exceeded`.
    pub status: String,
    pub iterations: usize,
    pub best_iteration: usize,
    /// Cover size to number of runs with that size.
    pub histogram: BTreeMap<usize, usize>,
    pub wall_ms: Option<u64>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

impl SolveReport {
    pub fn cover_size(&self) -> usize {
        self.cover.len()
    }

    pub fn histogram_from(sizes: &[usize]) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &s in sizes {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    pub fn to_kv_string(&self) -> String {
        let join = |v: &[Vertex]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let hist: Vec<String> = self.histogram.iter().map(|(s, n)| format!("{s}:{n}")).collect();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
        kv("instance", self.instance.clone());
        kv("instance_hash", self.instance_hash.clone());
        kv("mode", self.mode.name().to_string());
        kv("algorithm", self.algorithm.clone());
        kv("seed", self.seed.to_string());
        kv("vertices", self.vertices.to_string());
        kv("customers", self.customers.to_string());
        kv("facilities", self.facilities.to_string());
        kv("triples", self.triples.to_string());
        kv("cover_size", self.cover.len().to_string());
        kv("cover", join(&self.cover));
        kv("hslb", opt(&self.hslb));
        kv("updfl", opt(&self.updfl));
        kv("exact_bound", opt(&self.exact_bound));
        kv("status", self.status.clone());
        kv("iterations", self.iterations.to_string());
        kv("best_iteration", self.best_iteration.to_string());
        kv("histogram", hist.join(","));
        if let Some(ms) = self.wall_ms {
            kv("wall_ms", ms.to_string());
        }
        out
    }

    /// Checks the stored hash against `net`, rebuilds the triples and
    /// validates the cover.
    pub fn verify(&self, net: &Network) -> Result<(), String> {
        if instance_hash(net) != self.instance_hash {
            return Err("instance hash mismatch".into());
        }
        let inst = ScpInstance::from_network(net, generate(net, self.mode)).map_err(|e| e.to_string())?;
        let check = validate_cover(&inst, &self.cover);
        if !check.valid {
            return Err(format!("cover leaves customer {:?} uncovered", check.first_uncovered));
        }
        for (name, b) in [("hslb", self.hslb), ("updfl", self.updfl), ("exact_bound", self.exact_bound)] {
            if b.is_some_and(|b| b > self.cover.len()) {
                return Err(format!("{name} exceeds the cover size"));
            }
        }
        Ok(())
    }
}

impl FromStr for SolveReport {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("duplicate key `{k}`"));
            }
        }
        let get = |k: &str| map.get(k).cloned().ok_or_else(|| format!("missing key `{k}`"));
        let num = |k: &str| -> Result<usize, String> { get(k)?.parse().map_err(|_| format!("bad number for `{k}`")) };
        let maybe = |k: &str| -> Result<Option<usize>, String> {
            match get(k)?.as_str() {
                "-" => Ok(None),
                s => s.parse().map(Some).map_err(|_| format!("bad number for `{k}`")),
            }
        };
        let mode_name = get("mode")?;
        let mode = CoverMode::ALL.into_iter().find(|m| m.name() == mode_name).ok_or_else(|| format!("unknown mode `{mode_name}`"))?;
        let cover: Vec<Vertex> = get("cover")?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| format!("bad cover member `{x}`")))
            .collect::<Result<_, _>>()?;
        if cover.len() != num("cover_size")? {
            return Err("cover_size disagrees with cover".into());
        }
        let mut histogram = BTreeMap::new();
        for part in get("histogram")?.split(',').filter(|p| !p.is_empty()) {
            let (s, n) = part.split_once(':').ok_or("bad histogram entry")?;
            histogram.insert(s.parse().map_err(|_| "bad histogram size")?, n.parse().map_err(|_| "bad histogram count")?);
        }
        Ok(SolveReport {
            instance: get("instance")?,
            instance_hash: get("instance_hash")?,
            mode,
            algorithm: get("algorithm")?,
            seed: get("seed")?.parse().map_err(|_| "bad seed")?,
            vertices: num("vertices")?,
            customers: num("customers")?,
            facilities: num("facilities")?,
            triples: num("triples")?,
            cover,
            hslb: maybe("hslb")?,
            updfl: maybe("updfl")?,
            exact_bound: maybe("exact_bound")?,
            status: get("status")?,
            iterations: num("iterations")?,
            best_iteration: num("best_iteration")?,
            histogram,
            wall_ms: map.get("wall_ms").map(|v| v.parse().map_err(|_| "bad wall_ms")).transpose()?,
        })
    }
}

/// Chance that `n` further independent runs all miss, when `k` of `r`
/// runs succeeded: `((r - k) / r)^n`.
pub fn failure_probability(k: u64, r: u64, n: u64) -> Result<f64, String> {
    if r == 0 || k > r {
        return Err(format!("need 0 <= k <= R and R >= 1 (k={k}, R={r})"));
    }
    let n = i32::try_from(n).map_err(|_| "N too large".to_string())?;
    Ok(((r - k) as f64 / r as f64).powi(n))
}

pub fn format_probability(p: f64) -> String {
    format!("{p:.8}")
}

/// Rows `k = 1..=ks` by the given `N` columns, for `R` runs.
pub fn probability_table(r: u64, ks: u64, ns: &[u64]) -> String {
    let mut out = String::from("k");
    for n in ns {
        write!(out, " N={n}").unwrap();
    }
    out.push('\n');
    for k in 1..=ks {
        write!(out, "{k}").unwrap();
        for &n in ns {
            write!(out, " {}", format_probability(failure_probability(k, r, n).unwrap())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Class tag such as `C2F1` found among the `_`-separated parts of an
/// instance name.
pub fn class_from_name(name: &str) -> Option<InstanceClass> {
    name.split(['_', '.', '/']).filter(|p| p.starts_with('C') && p.contains('F')).find_map(|p| p.parse().ok())
}

/// Column of the cost table; the last one holds the UPDFL bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CostColumn {
    Set,
    PathVertex,
    PathArc,
    Updfl,
}

impl CostColumn {
    pub const ALL: [CostColumn; 4] = [CostColumn::Set, CostColumn::PathVertex, CostColumn::PathArc, CostColumn::Updfl];

    fn of_mode(mode: CoverMode) -> Self {
        match mode {
            CoverMode::SetDisjoint => CostColumn::Set,
            CoverMode::PathVertexDisjoint => CostColumn::PathVertex,
            CoverMode::PathArcDisjoint => CostColumn::PathArc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub vertices: usize,
    pub class: Option<InstanceClass>,
    pub instances: usize,
    pub mean_customers: f64,
    /// Mean of `100 |cover| / |C|` per column.
    pub percent: [Option<f64>; 4],
    /// Set column: `100 - percent`. Others: mean per-instance reduction
    /// relative to the column on the left.
    pub reduction: [Option<f64>; 4],
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Groups reports by (vertex count, class) and instance. Several reports
/// for the same instance and mode keep the smallest cover.
pub fn cost_table(reports: &[SolveReport]) -> Result<Vec<CostRow>, String> {
    if reports.is_empty() {
        return Err("no reports".into());
    }
    type Key = (usize, Option<(usize, usize)>);
    let mut groups: BTreeMap<Key, BTreeMap<&str, (usize, [Option<usize>; 4])>> = BTreeMap::new();
    for r in reports {
        if r.customers == 0 {
            return Err(format!("report for {} has no customers", r.instance));
        }
        let class = class_from_name(&r.instance).map(|c| (c.customer_divisor, c.facility_divisor));
        let entry = groups.entry((r.vertices, class)).or_default().entry(&r.instance_hash).or_insert((r.customers, [None; 4]));
        let mut put = |col: CostColumn, v: usize| {
            let slot = &mut entry.1[col as usize];
            *slot = Some(slot.map_or(v, |old| old.min(v)));
        };
        put(CostColumn::of_mode(r.mode), r.cover.len());
        if let Some(u) = r.updfl {
            put(CostColumn::Updfl, u);
        }
    }
    Ok(groups
        .into_iter()
        .map(|((vertices, class), insts)| {
            let pct = |c: usize, i: usize| 100.0 * i as f64 / c as f64;
            let mut percent = [None; 4];
            let mut reduction = [None; 4];
            for col in 0..4 {
                let vals: Vec<f64> = insts.values().filter_map(|(c, s)| s[col].map(|x| pct(*c, x))).collect();
                percent[col] = mean(&vals);
                if col == 0 {
                    reduction[0] = percent[0].map(|p| 100.0 - p);
                } else {
                    let red: Vec<f64> = insts
                        .values()
                        .filter_map(|(_, s)| match (s[col - 1], s[col]) {
                            (Some(a), Some(b)) if a > 0 => Some(100.0 * (a as f64 - b as f64) / a as f64),
                            _ => None,
                        })
                        .collect();
                    reduction[col] = mean(&red);
                }
            }
            let cs: Vec<f64> = insts.values().map(|(c, _)| *c as f64).collect();
            CostRow {
                vertices,
                class: class.map(|(x, y)| InstanceClass::new(x, y)),
                instances: insts.len(),
                mean_customers: mean(&cs).unwrap(),
                percent,
                reduction,
            }
        })
        .collect())
}

pub fn render_cost_table(rows: &[CostRow]) -> String {
    let mut out = String::from("|V|\tclass\t|C|\tn\tset\t(red)\tpath-vertex\t(red)\tpath-arc\t(red)\tupdfl\t(red)\n");
    let f = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
    for r in rows {
        let class = r.class.map_or_else(|| "-".to_string(), |c| format!("({c})"));
        write!(out, "{}\t{}\t{:.0}\t{}", r.vertices, class, r.mean_customers, r.instances).unwrap();
        for col in 0..4 {
            write!(out, "\t{}\t({})", f(r.percent[col]), f(r.reduction[col])).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(mode: CoverMode, size: usize, customers: usize, name: &str, hash: &str) -> SolveReport {
        SolveReport {
            instance: name.into(),
            instance_hash: hash.into(),
            mode,
            algorithm: "greedy".into(),
            seed: 3,
            vertices: 50,
            customers,
            facilities: 50,
            triples: 10,
            cover: (0..size).collect(),
            hslb: None,
            updfl: Some(2),
            exact_bound: None,
            status: "heuristic".into(),
            iterations: 4,
            best_iteration: 1,
            histogram: SolveReport::histogram_from(&[size + 1, size, size, size + 1]),
            wall_ms: None,
        }
    }

    #[test]
    fn robustness_table_cells() {
        assert_eq!(format_probability(failure_probability(1, 400, 100).unwrap()), "0.77855704");
        assert_eq!(format_probability(failure_probability(5, 400, 400).unwrap()), "0.00652893");
        assert_eq!(failure_probability(400, 400, 3).unwrap(), 0.0);
        assert_eq!(failure_probability(3, 400, 0).unwrap(), 1.0);
        assert!(failure_probability(401, 400, 1).is_err());
        assert!(failure_probability(0, 0, 1).is_err());
        let t = probability_table(400, 15, &[100, 200, 400, 800, 1600]);
        assert_eq!(t.lines().count(), 16);
    }

    #[test]
    fn report_round_trip() {
        let mut r = sample(CoverMode::PathArcDisjoint, 5, 50, "x_C1F1_seed1", "ab");
        assert_eq!(r.to_kv_string().parse::<SolveReport>().unwrap(), r);
        r.wall_ms = Some(12);
        r.hslb = Some(3);
        r.cover.clear();
        r.histogram.clear();
        let text = r.to_kv_string();
        assert!(text.contains("wall_ms=12\n"));
        assert_eq!(text.parse::<SolveReport>().unwrap(), r);
        assert!(text.replace("cover_size=0", "cover_size=1").parse::<SolveReport>().is_err());
    }

    #[test]
    fn class_names() {
        assert_eq!(class_from_name("net_T1_NT2_S3_NS8_C2F1_seed7"), Some(InstanceClass::new(2, 1)));
        assert_eq!(class_from_name("plain"), None);
    }

    #[test]
    fn single_report_percent() {
        let mut r = sample(CoverMode::SetDisjoint, 16, 100, "a_C1F1_", "h1");
        r.updfl = None;
        let rows = cost_table(&[r]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].percent[0].unwrap() - 16.0).abs() < 1e-12);
        assert!((rows[0].reduction[0].unwrap() - 84.0).abs() < 1e-12);
        assert!(render_cost_table(&rows).contains("\t16.0\t(84.0)"));
        assert!(cost_table(&[]).is_err());
    }

    #[test]
    fn reduction_is_mean_of_paired_instances() {
        // 20 -> 18 is 10%, 10 -> 10 is 0%: mean 5%, while the ratio of
        // means would give 6.67%.
        let reports = [
            sample(CoverMode::SetDisjoint, 20, 100, "a_C1F1_s1", "h1"),
            sample(CoverMode::PathVertexDisjoint, 18, 100, "a_C1F1_s1", "h1"),
            sample(CoverMode::SetDisjoint, 10, 100, "a_C1F1_s2", "h2"),
            sample(CoverMode::PathVertexDisjoint, 10, 100, "a_C1F1_s2", "h2"),
            sample(CoverMode::PathVertexDisjoint, 12, 100, "a_C1F1_s2", "h2"),
        ];
        let rows = cost_table(&reports).unwrap();
        assert_eq!(rows[0].instances, 2);
        assert!((rows[0].percent[1].unwrap() - 14.0).abs() < 1e-12);
        assert!((rows[0].reduction[1].unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(rows[0].percent[2], None);
        assert!((rows[0].percent[3].unwrap() - 2.0).abs() < 1e-12);
    }
}
