//! `dpfl`: generate instances, build triples, solve, bound and tabulate.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid instance, 3 infeasible or
//! budget exhausted.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpfl_core::exact::{export_hslb_lp, export_mip_lp, ExactStatus};
use dpfl_core::generate::{gen_transit_stub, gravitational_demands, sample_cf, GenParams, InstanceClass, WeightMode};
use dpfl_core::hitting::{
    build_hslb_from, exact_hitting_set, hslb_report_line, is_set_disjoint_cover, ExactHittingOptions, NeighborTable,
};
use dpfl_core::report::{
    cost_table, failure_probability, format_probability, instance_hash, probability_table, render_cost_table, SolveReport,
};
use dpfl_core::rng::{derive, from_seed};
use dpfl_core::scp::{validate_cover, Solution};
use dpfl_core::solve::{Algorithm, Prepared, SolveError, SolveParams};
use dpfl_core::special::{build_fig4_fixture, build_fig5_fixture, updfl_lower_bound, SpecialError};
use dpfl_core::triples::{generate, triple_stats};
use dpfl_core::{CoverMode, Network};

#[derive(Debug)]
enum Failure {
    Usage(String),
    Invalid(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Usage(m) => Failure::Usage(m),
            SolveError::Scp(e) => Failure::Infeasible(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Writes to stdout, treating a closed pipe (`dpfl ... | head`) as success.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

#[derive(Parser)]
#[command(name = "dpfl", version, about = "Disjoint-path facility location toolkit")]
struct Cli {
    /// Worker threads; results are identical for any value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic transit-stub instances or a gadget fixture.
    Generate(GenerateArgs),
    /// Build the triples of an instance and print counts.
    Triples(TriplesArgs),
    /// Solve an instance and print a key=value report.
    Solve(SolveArgs),
    /// Compute the HSLB or UPDFL lower bound.
    Bound(BoundArgs),
    /// Tabulate cover sizes from report files.
    Report(ReportArgs),
    /// Probability that N more runs all miss, given k hits in R runs.
    Prob(ProbArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Set,
    PathVertex,
    PathArc,
}

impl From<ModeArg> for CoverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Set => CoverMode::SetDisjoint,
            ModeArg::PathVertex => CoverMode::PathVertexDisjoint,
            ModeArg::PathArc => CoverMode::PathArcDisjoint,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long = "NT")]
    nt: Option<usize>,
    #[arg(long = "S")]
    s: Option<usize>,
    #[arg(long = "NS")]
    ns: Option<usize>,
    /// Instance classes such as C1,F1; repeatable.
    #[arg(long = "class", default_value = "C1,F1")]
    classes: Vec<InstanceClass>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// unit or uniform (integers 1..=30).
    #[arg(long, default_value = "uniform")]
    weights: WeightMode,
    #[arg(long, default_value_t = 0.6)]
    transit_prob: f64,
    #[arg(long, default_value_t = 0.42)]
    stub_prob: f64,
    #[arg(long, default_value = "net")]
    stem: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write a gravitational demand matrix next to each network.
    #[arg(long)]
    demands: bool,
    /// Write a gadget instead: fig4:<n> or fig5:<N>.
    #[arg(long, conflicts_with_all = ["t", "nt", "s", "ns"])]
    fixture: Option<String>,
}

#[derive(Args)]
struct TriplesArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "set")]
    mode: ModeArg,
    /// Write the triple dump here.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Write the MIP in LP format here.
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "set")]
    mode: ModeArg,
    /// greedy, genetic, shs, dhs, exact, or a portfolio like shs:200+greedy:200.
    #[arg(long, default_value = "greedy")]
    algorithm: String,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// DHS threshold (default max(1, |F|/2)).
    #[arg(long)]
    t: Option<usize>,
    /// Genetic population (default min(300, |F|)).
    #[arg(long)]
    population: Option<usize>,
    /// Genetic stall limit (default |V|).
    #[arg(long)]
    stall: Option<usize>,
    /// Branch-and-bound node budget.
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Branch-and-bound time limit in seconds; results then depend on speed.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Skip the HSLB and UPDFL bounds.
    #[arg(long)]
    no_bounds: bool,
    /// Record wall time in the report (makes output time-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Genetic generation log (CSV).
    #[arg(long)]
    ga_log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Hslb,
    Updfl,
}

#[derive(Args)]
struct BoundArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    bound: BoundKind,
    /// Write the hitting-set program in LP format here (hslb only).
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report files, or directories searched for *.report files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ProbArgs {
    /// Successful runs out of --runs.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, default_value_t = 400)]
    runs: u64,
    /// Future runs.
    #[arg(long)]
    n: Option<u64>,
    /// Print the k = 1..15 table for N = 100, 200, 400, 800, 1600.
    #[arg(long)]
    table: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Generate(a) => cmd_generate(a),
        Command::Triples(a) => cmd_triples(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Report(a) => cmd_report(a),
        Command::Prob(a) => cmd_prob(a),
    }
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Network, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    Network::parse(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn summary(path: &Path, net: &Network) -> String {
    format!(
        "wrote {} vertices={} arcs={} customers={} facilities={}",
        path.display(),
        net.vertex_count(),
        net.arc_count(),
        net.customers().len(),
        net.facilities().len()
    )
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    fs::create_dir_all(&a.out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", a.out.display())))?;
    if let Some(spec) = &a.fixture {
        let (kind, n) = spec.split_once(':').ok_or_else(|| Failure::Usage("fixture must be fig4:<n> or fig5:<N>".into()))?;
        let n: usize = n.parse().map_err(|_| Failure::Usage(format!("bad fixture size in {spec}")))?;
        let net = match kind {
            "fig4" => build_fig4_fixture(n),
            "fig5" => build_fig5_fixture(n),
            _ => return Err(Failure::Usage(format!("unknown fixture {kind}"))),
        }
        .map_err(|e| Failure::Usage(e.to_string()))?;
        let path = a.out.join(format!("{}_{kind}_{n}.inst", a.stem));
        write(&path, &net.to_instance_string())?;
        emit(&format!("{}\n", summary(&path, &net)));
        return Ok(());
    }
    let (Some(t), Some(nt), Some(s), Some(ns)) = (a.t, a.nt, a.s, a.ns) else {
        return Err(Failure::Usage("generate needs --T, --NT, --S and --NS (or --fixture)".into()));
    };
    if a.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    for seed in a.seed..a.seed + a.count {
        let params = GenParams {
            transit_edge_prob: a.transit_prob,
            stub_edge_prob: a.stub_prob,
            weights: a.weights,
            seed: derive(seed, "network"),
            ..GenParams::new(t, nt, s, ns)
        };
        let base = gen_transit_stub(&params).map_err(|e| Failure::Usage(e.to_string()))?;
        for class in &a.classes {
            let mut rng = from_seed(derive(seed, &format!("roles {}", class.tag())));
            let net = sample_cf(&base, class.customer_divisor, class.facility_divisor, &mut rng).map_err(|e| Failure::Usage(e.to_string()))?;
            let name = format!("{}_T{t}_NT{nt}_S{s}_NS{ns}_{}_seed{seed}", a.stem, class.tag());
            let path = a.out.join(format!("{name}.inst"));
            write(&path, &net.to_instance_string())?;
            emit(&format!("{}\n", summary(&path, &net)));
            if a.demands {
                let d = gravitational_demands(&net, &mut from_seed(derive(seed, "demands")));
                write(&a.out.join(format!("{name}.demands")), &d.to_file_string())?;
            }
        }
    }
    Ok(())
}

fn cmd_triples(a: TriplesArgs) -> Outcome {
    let net = load(&a.instance)?;
    let mode = CoverMode::from(a.mode);
    let ts = generate(&net, mode);
    let stats = triple_stats(&ts, &net);
    emit(&format!("triples mode={} count={} possible={} percent={:.3}\n", mode.name(), stats.count, stats.possible, stats.percent));
    if let Some(p) = &a.dump {
        write(p, &ts.to_dump_string())?;
    }
    if let Some(p) = &a.lp {
        let inst = dpfl_core::scp::ScpInstance::from_network(&net, ts).map_err(|e| Failure::Infeasible(e.to_string()))?;
        write(p, &export_mip_lp(&inst))?;
    }
    Ok(())
}

fn hslb_value(net: &Network, table: &NeighborTable) -> Result<Option<(Vec<usize>, bool)>, Failure> {
    let hs = build_hslb_from(net, table);
    match exact_hitting_set(&hs, ExactHittingOptions::default()) {
        Ok(r) if r.proven => {
            let feasible = is_set_disjoint_cover(net, table, &r.set);
            Ok(Some((r.set, feasible)))
        }
        Ok(_) | Err(_) => Ok(None),
    }
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let algo: Algorithm = a.algorithm.parse().map_err(Failure::Usage)?;
    let mode = CoverMode::from(a.mode);
    if algo.needs_set_mode() && mode != CoverMode::SetDisjoint {
        return Err(Failure::Usage(format!("{algo} requires --mode set")));
    }
    let time_limit = match a.time_limit {
        Some(s) if !(s > 0.0 && s.is_finite()) => return Err(Failure::Usage("--time-limit must be positive".into())),
        s => s.map(Duration::from_secs_f64),
    };
    let net = load(&a.instance)?;
    let started = Instant::now();
    let prep = Prepared::new(&net, mode).map_err(|e| Failure::Infeasible(e.to_string()))?;
    let params = SolveParams {
        iterations: a.iterations,
        seed: a.seed,
        t: a.t,
        population: a.population,
        stall: a.stall,
        max_nodes: a.max_nodes,
        time_limit,
    };
    let out = prep.solve(&algo, &params)?;
    if !validate_cover(&prep.inst, &out.cover).valid {
        return Err(Failure::Infeasible("produced cover failed validation".into()));
    }
    let (mut hslb, mut updfl) = (None, None);
    if !a.no_bounds {
        if mode == CoverMode::SetDisjoint {
            hslb = hslb_value(&net, &NeighborTable::new(&net))?.map(|(s, _)| s.len());
        }
        updfl = updfl_lower_bound(&net).ok().map(|w| w.len());
    }
    let status = out.exact_status.map_or("heuristic", ExactStatus::name);
    let report = SolveReport {
        instance: instance_name(&a.instance),
        instance_hash: instance_hash(&net),
        mode,
        algorithm: algo.to_string(),
        seed: a.seed,
        vertices: net.vertex_count(),
        customers: net.customers().len(),
        facilities: net.facilities().len(),
        triples: prep.inst.triples().len(),
        cover: out.cover.clone(),
        hslb,
        updfl,
        exact_bound: out.lower_bound,
        status: status.to_string(),
        iterations: out.sizes.len(),
        best_iteration: out.best_iteration,
        histogram: SolveReport::histogram_from(&out.sizes),
        wall_ms: a.timing.then(|| started.elapsed().as_millis() as u64),
    };
    let text = report.to_kv_string();
    emit(&text);
    if let Some(p) = &a.report {
        write(p, &text)?;
    }
    if let Some(p) = &a.solution {
        let sol = Solution {
            comments: vec![
                ("seed".into(), a.seed.to_string()),
                ("mode".into(), mode.name().into()),
                ("algorithm".into(), algo.to_string()),
                ("best_iteration".into(), out.best_iteration.to_string()),
            ],
            cover: out.cover.clone(),
        };
        write(p, &sol.to_file_string())?;
    }
    if let (Some(p), Some(log)) = (&a.ga_log, &out.log) {
        write(p, log)?;
    }
    if out.exact_status == Some(ExactStatus::BudgetExceeded) {
        return Err(Failure::Infeasible("exact search budget exhausted before proving optimality".into()));
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_bound(a: BoundArgs) -> Outcome {
    let net = load(&a.instance)?;
    match a.bound {
        BoundKind::Hslb => {
            let table = NeighborTable::new(&net);
            if let Some(p) = &a.lp {
                write(p, &export_hslb_lp(&build_hslb_from(&net, &table)))?;
            }
            let Some((set, feasible)) = hslb_value(&net, &table)? else {
                return Err(Failure::Infeasible("hitting set too large to solve exactly; use --lp".into()));
            };
            emit(&format!("{}\n", hslb_report_line(set.len(), feasible)));
            emit(&format!("witness {}\n", join(&set)));
        }
        BoundKind::Updfl => {
            if a.lp.is_some() {
                return Err(Failure::Usage("--lp applies to hslb only".into()));
            }
            let w = updfl_lower_bound(&net).map_err(|e| match e {
                SpecialError::NotSymmetric(..) => Failure::Invalid(e.to_string()),
                _ => Failure::Infeasible(e.to_string()),
            })?;
            emit(&format!("updfl {}\n", w.len()));
            emit(&format!("witness {}\n", join(&w)));
        }
    }
    Ok(())
}

fn collect_reports(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> =
                entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|f| f.extension().is_some_and(|x| x == "report")).collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_report(a: ReportArgs) -> Outcome {
    let mut reports = Vec::new();
    for f in collect_reports(&a.inputs)? {
        let text = fs::read_to_string(&f).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", f.display())))?;
        reports.push(text.parse::<SolveReport>().map_err(|e| Failure::Invalid(format!("{}: {e}", f.display())))?);
    }
    let rows = cost_table(&reports).map_err(Failure::Usage)?;
    emit(&render_cost_table(&rows));
    Ok(())
}

fn cmd_prob(a: ProbArgs) -> Outcome {
    if a.table {
        emit(&probability_table(a.runs, 15.min(a.runs), &[100, 200, 400, 800, 1600]));
        return Ok(());
    }
    let (Some(k), Some(n)) = (a.k, a.n) else {
        return Err(Failure::Usage("prob needs --k and --n, or --table".into()));
    };
    let p = failure_probability(k, a.runs, n).map_err(Failure::Usage)?;
    emit(&format!("{}\n", format_probability(p)));
    Ok(())
}
