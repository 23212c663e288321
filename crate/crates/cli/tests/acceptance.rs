//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Runs without the libtest harness so the lines are
//! always printed.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use dpfl_core::exact::{brute_force_optimum, solve_exact, ExactOptions, ExactStatus};
use dpfl_core::generate::{gen_transit_stub, random_network, random_roles, random_scp, random_tree_edges, sample_cf, GenParams};
use dpfl_core::genetic::{evolve, GaParams};
use dpfl_core::hitting::{
    build_hslb_from, dhs, dhs_high_t, exact_hitting_set, is_set_disjoint_cover, shs, DhsContext, ExactHittingOptions,
    GoodnessTable, NeighborTable,
};
use dpfl_core::report::{failure_probability, format_probability};
use dpfl_core::rng::{derive_indexed, from_seed};
use dpfl_core::scp::{greedy_multi, validate_cover, ScpInstance};
use dpfl_core::solve::{Algorithm, Prepared, SolveParams};
use dpfl_core::special::{build_fig4_fixture, build_fig5_fixture, tree_optimum, updfl_lower_bound};
use dpfl_core::triples::{all_shortest_paths, brute_force_triples, floyd_warshall, gen_path_disjoint, gen_set_disjoint, generate, Disjointness};
use dpfl_core::{CoverMode, Network, Vertex};
use rand::Rng as _;

/// Published failure probabilities, rows k = 1..15, columns
/// N = 100, 200, 400, 800, 1600.
const PUBLISHED: [[&str; 5]; 15] = [
    ["0.77855704", "0.60615106", "0.36741911", "0.13499680", "0.01822414"],
    ["0.60577044", "0.36695782", "0.13465804", "0.01813279", "0.00032880"],
    ["0.47103323", "0.22187230", "0.04922732", "0.00242333", "0.00000587"],
    ["0.36603234", "0.13397967", "0.01795055", "0.00032222", "0.00000010"],
    ["0.28425652", "0.08080177", "0.00652893", "0.00004263", "0.00000000"],
    ["0.22060891", "0.04866829", "0.00236860", "0.00000561", "0.00000000"],
    ["0.17110232", "0.02927600", "0.00085708", "0.00000073", "0.00000000"],
    ["0.13261956", "0.01758795", "0.00030934", "0.00000010", "0.00000000"],
    ["0.10272511", "0.01055245", "0.00011135", "0.00000001", "0.00000000"],
    ["0.07951729", "0.00632300", "0.00003998", "0.00000000", "0.00000000"],
    ["0.06151216", "0.00378375", "0.00001432", "0.00000000", "0.00000000"],
    ["0.04755251", "0.00226124", "0.00000511", "0.00000000", "0.00000000"],
    ["0.03673647", "0.00134957", "0.00000182", "0.00000000", "0.00000000"],
    ["0.02836164", "0.00080438", "0.00000065", "0.00000000", "0.00000000"],
    ["0.02188134", "0.00047879", "0.00000023", "0.00000000", "0.00000000"],
];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let ns = [100u64, 200, 400, 800, 1600];
    let mut matched = 0;
    for (row, k) in PUBLISHED.iter().zip(1u64..) {
        for (cell, &n) in row.iter().zip(&ns) {
            let got = format_probability(failure_probability(k, 400, n)?);
            ensure(got == *cell, || format!("k={k} N={n}: got {got}, published {cell}"))?;
            matched += 1;
        }
    }
    Ok(format!("{matched}/75 cells equal at 8 decimals"))
}

fn exact_optimum(inst: &ScpInstance, net: Option<&Network>) -> Result<Vec<Vertex>, String> {
    let hs = net.filter(|_| inst.mode() == Some(CoverMode::SetDisjoint)).map(|n| build_hslb_from(n, &NeighborTable::new(n)));
    let opts = ExactOptions { root_iterations: 16, hitting: hs.as_ref(), ..ExactOptions::default() };
    let r = solve_exact(inst, &opts).map_err(|e| e.to_string())?;
    ensure(r.status == ExactStatus::Optimal, || "exact solver did not prove optimality".into())?;
    Ok(r.cover)
}

fn criterion_2() -> Check {
    for n in [4, 9, 30] {
        let net = build_fig4_fixture(n).map_err(|e| e.to_string())?;
        let table = NeighborTable::new(&net);
        let h = exact_hitting_set(&build_hslb_from(&net, &table), ExactHittingOptions::default()).map_err(|e| e.to_string())?;
        ensure(h.proven && h.value() == 3, || format!("n={n}: HSLB {} (proven {})", h.value(), h.proven))?;
        ensure(!is_set_disjoint_cover(&net, &table, &h.set), || format!("n={n}: HSLB witness is a cover"))?;
        let inst = ScpInstance::from_network(&net, gen_set_disjoint(&net)).map_err(|e| e.to_string())?;
        let opt = exact_optimum(&inst, Some(&net))?;
        ensure(opt.len() == n, || format!("n={n}: optimum {}", opt.len()))?;
    }
    Ok("n=4,9,30: HSLB 3, witness infeasible, optimum n".into())
}

fn criterion_3() -> Check {
    for big_n in [2, 3, 4] {
        let net = build_fig5_fixture(big_n).map_err(|e| e.to_string())?;
        ensure(net.vertex_count() == 7 * big_n + 2, || format!("N={big_n}: {} vertices", net.vertex_count()))?;
        let u = updfl_lower_bound(&net).map_err(|e| e.to_string())?;
        ensure(u.len() == 2, || format!("N={big_n}: UPDFL {}", u.len()))?;
        for mode in [CoverMode::PathVertexDisjoint, CoverMode::PathArcDisjoint] {
            let inst = ScpInstance::from_network(&net, generate(&net, mode)).map_err(|e| e.to_string())?;
            let opt = exact_optimum(&inst, None)?;
            ensure(opt.len() >= big_n, || format!("N={big_n} {}: optimum {}", mode.name(), opt.len()))?;
        }
    }
    Ok("N=2,3,4: 7N+2 vertices, UPDFL 2, PDFL optimum >= N in both path modes".into())
}

/// Small random symmetric instance with random roles.
fn small_instance(seed: u64, max_n: usize) -> Network {
    let mut rng = from_seed(seed);
    let n = rng.random_range(3..=max_n);
    let p = rng.random_range(0.1..0.6);
    let w = if rng.random_bool(0.5) { 1 } else { 4 };
    let net = random_network(n, p, w, &mut rng);
    random_roles(&net, rng.random_range(0.5..1.0), rng.random_range(0.3..1.0), &mut rng)
}

fn criterion_4() -> Check {
    let instances = 200;
    let mut total = 0;
    for seed in 0..instances {
        let net = small_instance(derive_indexed(4, "oracle triples", seed), 12);
        let got = [
            gen_set_disjoint(&net),
            gen_path_disjoint(&net, Disjointness::Vertex),
            gen_path_disjoint(&net, Disjointness::Arc),
        ];
        for (ts, mode) in got.iter().zip(CoverMode::ALL) {
            let oracle = brute_force_triples(&net, mode).map_err(|e| e.to_string())?;
            ensure(ts.as_slice() == oracle.as_slice(), || format!("seed {seed} {}: differs from enumeration", mode.name()))?;
        }
        let [s, v, a] = &got;
        let subset = |x: &dpfl_core::TripleSet, y: &dpfl_core::TripleSet| x.as_slice().iter().all(|t| y.contains(t.customer as Vertex, t.f1 as Vertex, t.f2 as Vertex));
        ensure(subset(s, v) && subset(v, a), || format!("seed {seed}: subset chain broken"))?;
        total += a.len();
    }
    Ok(format!("{instances} instances, {total} arc-mode triples, all three generators equal enumeration"))
}

struct OptimaStats {
    instances: usize,
    sdfl: usize,
    bound_runs: usize,
}

fn criteria_5_and_10() -> (Check, Check) {
    let mut bound_failure: Option<String> = None;
    let result = (|| -> Result<OptimaStats, String> {
        let mut stats = OptimaStats { instances: 0, sdfl: 0, bound_runs: 0 };
        let check = |inst: &ScpInstance, cover: &[Vertex], opt: usize, what: &str, seed: u64| {
            ensure(validate_cover(inst, cover).valid, || format!("seed {seed}: {what} cover invalid"))?;
            ensure(cover.len() >= opt, || format!("seed {seed}: {what} {} below optimum {opt}", cover.len()))
        };
        // General SCP instances.
        for seed in 0..100u64 {
            let mut rng = from_seed(derive_indexed(5, "scp", seed));
            let u = rng.random_range(4..=14);
            let s = rng.random_range(4..=16);
            let overlap = rng.random_range(0..=u.min(s));
            let inst = random_scp(u, s, overlap, rng.random_range(0.03..0.3), rng.random_bool(0.5), &mut rng);
            let brute = brute_force_optimum(&inst).map_err(|e| e.to_string())?.len();
            let exact = exact_optimum(&inst, None)?;
            ensure(exact.len() == brute, || format!("scp seed {seed}: exact {} vs brute force {brute}", exact.len()))?;
            check(&inst, &greedy_multi(&inst, 400, seed).map_err(|e| e.to_string())?.best, brute, "greedy", seed)?;
            let ga = evolve(&inst, &GaParams::defaults(inst.facilities().len(), inst.id_space(), seed)).map_err(|e| e.to_string())?;
            check(&inst, &ga.best, brute, "genetic", seed)?;
            stats.instances += 1;
        }
        // Set-disjoint instances from networks.
        let mut seed = 0u64;
        while stats.sdfl < 100 {
            seed += 1;
            let net = small_instance(derive_indexed(5, "sdfl", seed), 12);
            if net.facilities().len() > 16 {
                continue;
            }
            let table = NeighborTable::new(&net);
            let hs = build_hslb_from(&net, &table);
            let inst = ScpInstance::from_network(&net, gen_set_disjoint(&net)).map_err(|e| e.to_string())?;
            let brute = brute_force_optimum(&inst).map_err(|e| e.to_string())?.len();
            let exact = exact_optimum(&inst, Some(&net))?;
            ensure(exact.len() == brute, || format!("sdfl seed {seed}: exact {} vs brute force {brute}", exact.len()))?;
            let hslb = exact_hitting_set(&hs, ExactHittingOptions::default()).map_err(|e| e.to_string())?;
            ensure(hslb.proven && hslb.value() <= brute, || format!("sdfl seed {seed}: HSLB {} above optimum {brute}", hslb.value()))?;

            check(&inst, &greedy_multi(&inst, 400, seed).map_err(|e| e.to_string())?.best, brute, "greedy", seed)?;
            let ga = evolve(&inst, &GaParams::defaults(inst.facilities().len(), net.vertex_count(), seed)).map_err(|e| e.to_string())?;
            check(&inst, &ga.best, brute, "genetic", seed)?;

            let s = shs(&hs, &inst, 400, seed).map_err(|e| e.to_string())?;
            check(&inst, &s.multi.best, brute, "SHS", seed)?;
            let ln_a = (net.arc_count() as f64).ln();
            for r in &s.runs {
                stats.bound_runs += 1;
                if r.x_size as f64 > (ln_a + 1.0) * brute as f64 + 1e-9 && bound_failure.is_none() {
                    bound_failure = Some(format!("sdfl seed {seed}: SHS |X| = {} exceeds (ln|A|+1)OPT", r.x_size));
                }
            }

            let goodness = GoodnessTable::new(&net, &table);
            let ctx = DhsContext { net: &net, neighbors: &table, goodness: &goodness, inst: &inst };
            let high = dhs_high_t(&net);
            for t in [1, high] {
                let d = dhs(&ctx, t, 400, seed).map_err(|e| e.to_string())?;
                check(&inst, &d.multi.best, brute, &format!("DHS_{t}"), seed)?;
                if 3 * t < net.facilities().len() {
                    continue;
                }
                for r in &d.runs {
                    stats.bound_runs += 1;
                    let ok = if r.target_customers == 0 {
                        r.hitting_size == 0
                    } else {
                        r.hitting_size as f64 <= (3.47 * (r.target_customers as f64).ln() + 2.0) * brute as f64 + 1e-9
                    };
                    if !ok && bound_failure.is_none() {
                        bound_failure = Some(format!("sdfl seed {seed}: DHS_{t} |X u Y| = {} over bound", r.hitting_size));
                    }
                }
            }
            stats.sdfl += 1;
            stats.instances += 1;
        }
        Ok(stats)
    })();
    match result {
        Ok(s) => {
            let c5 = Ok(format!("{} instances ({} set-disjoint): exact = brute force, all heuristics valid and >= optimum, HSLB <= optimum", s.instances, s.sdfl));
            let c10 = match bound_failure {
                None => Ok(format!("{} SHS/DHS runs within the hitting-set approximation bounds", s.bound_runs)),
                Some(e) => Err(e),
            };
            (c5, c10)
        }
        Err(e) => (Err(e), Err("not evaluated: criterion 5 failed first".into())),
    }
}

fn criterion_6() -> Check {
    for seed in 0..100u64 {
        let mut rng = from_seed(derive_indexed(6, "tree", seed));
        let n = rng.random_range(2..=12);
        let edges: Vec<_> = random_tree_edges(n, &mut rng).into_iter().map(|(u, v)| (u, v, rng.random_range(1..=5))).collect();
        let net = Network::from_edges(n, &edges, Vec::new(), Vec::new()).map_err(|e| e.to_string())?;
        let cp = rng.random_range(0.2..1.0);
        let net = random_roles(&net, 1.0, cp, &mut rng);
        let set = gen_set_disjoint(&net);
        for mode in [CoverMode::PathVertexDisjoint, CoverMode::PathArcDisjoint] {
            ensure(generate(&net, mode).as_slice() == set.as_slice(), || format!("seed {seed}: {} triples differ from set", mode.name()))?;
        }
        let inst = ScpInstance::from_network(&net, set).map_err(|e| e.to_string())?;
        let brute = brute_force_optimum(&inst).map_err(|e| e.to_string())?;
        let tree = tree_optimum(&net).map_err(|e| e.to_string())?;
        ensure(validate_cover(&inst, &tree).valid, || format!("seed {seed}: tree cover invalid"))?;
        ensure(tree.len() == brute.len(), || format!("seed {seed}: tree {} vs brute force {}", tree.len(), brute.len()))?;
    }
    Ok("100 trees: tree optimum = brute force, path triples = set triples".into())
}

fn arcs_of(path: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    path.windows(2).map(|w| (w[0], w[1])).collect()
}

fn criterion_7() -> Check {
    let probes = 1000;
    let (mut l1, mut l2, mut sharing) = (0, 0, 0);
    for probe in 0..probes {
        let net = small_instance(derive_indexed(7, "path net", probe / 10), 12);
        let n = net.vertex_count();
        let dist = floyd_warshall(&net);
        let mut rng = from_seed(derive_indexed(7, "path probe", probe));
        let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        let first = all_shortest_paths(&net, &dist, a, b);
        let second = all_shortest_paths(&net, &dist, b, c);
        for p in &first {
            let pa = arcs_of(p);
            for q in &second {
                ensure(arcs_of(q).iter().all(|e| !pa.contains(e)), || format!("probe {probe}: shortest-path splice fails for {a},{b},{c}"))?;
                l1 += 1;
            }
        }
        let (f, g) = (rng.random_range(0..n), rng.random_range(0..n));
        if f == c || g == c || f == g {
            continue;
        }
        let union = |to: Vertex| {
            let ps = all_shortest_paths(&net, &dist, c, to);
            let arcs: Vec<_> = ps.iter().flat_map(|p| arcs_of(p)).collect();
            let verts: Vec<Vertex> = ps.iter().flat_map(|p| p[1..].to_vec()).collect();
            (arcs, verts)
        };
        let ((af, vf), (ag, vg)) = (union(f), union(g));
        let share_arc = af.iter().any(|e| ag.contains(e));
        let share_vertex = vf.iter().any(|v| vg.contains(v));
        ensure(share_arc == share_vertex, || format!("probe {probe}: arc/vertex sharing differs for c={c}, f={f}, f'={g}"))?;
        l2 += 1;
        sharing += usize::from(share_arc);
    }
    Ok(format!("{probes} probes: {l1} path pairs spliced, {l2} facility pairs compared ({sharing} sharing), zero violations"))
}

fn criterion_8() -> Check {
    let portfolio: Algorithm = "shs:200+greedy:200".parse()?;
    let (mut proven, mut total) = (0, 0);
    for (nt, label) in [(2, 50), (4, 100)] {
        for seed in 0..10u64 {
            let params = GenParams { seed, ..GenParams::new(1, nt, 3, 8) };
            let base = gen_transit_stub(&params).map_err(|e| e.to_string())?;
            let net = sample_cf(&base, 1, 1, &mut from_seed(seed)).map_err(|e| e.to_string())?;
            let prep = Prepared::new(&net, CoverMode::SetDisjoint).map_err(|e| e.to_string())?;
            let exact = solve_exact(
                &prep.inst,
                &ExactOptions { max_nodes: Some(2_000_000), hitting: prep.hitting(), root_iterations: 400, ..ExactOptions::default() },
            )
            .map_err(|e| e.to_string())?;
            total += 1;
            if exact.status != ExactStatus::Optimal {
                continue;
            }
            proven += 1;
            let sp = SolveParams { iterations: 400, seed, ..SolveParams::default() };
            for algo in [Algorithm::Shs, portfolio.clone()] {
                let got = prep.solve(&algo, &sp).map_err(|e| e.to_string())?.cover.len();
                ensure(got == exact.cover.len(), || format!("{label}-vertex seed {seed}: {algo} {got} vs optimum {}", exact.cover.len()))?;
            }
        }
    }
    Ok(format!("{proven}/{total} instances proven optimal; SHS(400) and shs:200+greedy:200 match on all of them"))
}

fn dpfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpfl")).args(args).output().expect("run dpfl")
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for (rep, jobs) in [(0, "1"), (1, "8"), (2, "8")] {
        let dir = tmp.path().join(format!("run{rep}"));
        let d = dir.to_str().unwrap();
        let gen = dpfl(&["--jobs", jobs, "generate", "--T", "1", "--NT", "2", "--S", "3", "--NS", "8", "--class", "C1,F1", "--class", "C4,F1", "--seed", "3", "--count", "2", "--out", d, "--demands"]);
        ensure(gen.status.success(), || format!("generate failed: {}", String::from_utf8_lossy(&gen.stderr)))?;
        let inst = dir.join("net_T1_NT2_S3_NS8_C1F1_seed3.inst");
        let inst = inst.to_str().unwrap();
        let mut outputs = Vec::new();
        for (i, (mode, algo)) in [
            ("set", "greedy"),
            ("set", "genetic"),
            ("set", "shs"),
            ("set", "dhs"),
            ("set", "exact"),
            ("set", "shs:200+greedy:200"),
            ("path-vertex", "greedy"),
            ("path-arc", "genetic"),
        ]
        .into_iter()
        .enumerate()
        {
            let sol = dir.join(format!("solve{i}.sol"));
            let rep = dir.join(format!("solve{i}.report"));
            let out = dpfl(&[
                "--jobs", jobs, "solve", inst, "--mode", mode, "--algorithm", algo, "--seed", "17", "--stall", "20",
                "--solution", sol.to_str().unwrap(), "--report", rep.to_str().unwrap(),
            ]);
            ensure(out.status.success(), || format!("solve {mode} {algo} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
            outputs.push((format!("stdout {i}"), out.stdout));
        }
        let tri = dpfl(&["--jobs", jobs, "triples", inst, "--mode", "path-vertex", "--dump", dir.join("t.dump").to_str().unwrap()]);
        outputs.push(("triples".into(), tri.stdout));
        let mut files = read_all(&dir);
        files.extend(outputs);
        runs.push(files);
    }
    for (r, other) in runs.iter().enumerate().skip(1) {
        ensure(runs[0].len() == other.len(), || "different file sets".into())?;
        for (x, y) in runs[0].iter().zip(other) {
            ensure(x == y, || format!("run {r}: {} differs", x.0))?;
        }
    }
    Ok(format!("{} outputs byte-identical across --jobs 1, --jobs 8 and a repeat", runs[0].len()))
}

fn main() {
    let criteria: Vec<(&str, Duration, Box<dyn FnOnce() -> Vec<Check>>)> = vec![
        ("1 robustness table", Duration::from_secs(1), Box::new(|| vec![criterion_1()])),
        ("2 hub gadget family", Duration::from_secs(10), Box::new(|| vec![criterion_2()])),
        ("3 chain gadget family", Duration::from_secs(30), Box::new(|| vec![criterion_3()])),
        ("4 triple oracle", Duration::from_secs(120), Box::new(|| vec![criterion_4()])),
        ("5+10 optima oracle, approximation bounds", Duration::from_secs(600), Box::new(|| {
            let (a, b) = criteria_5_and_10();
            vec![a, b]
        })),
        ("6 trees", Duration::from_secs(60), Box::new(|| vec![criterion_6()])),
        ("7 path probes", Duration::from_secs(60), Box::new(|| vec![criterion_7()])),
        ("8 heuristic quality", Duration::from_secs(1800), Box::new(|| vec![criterion_8()])),
        ("9 determinism", Duration::from_secs(300), Box::new(|| vec![criterion_9()])),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let results = run();
        let elapsed = start.elapsed();
        let names: Vec<String> = if results.len() == 2 {
            vec!["5 optima oracle".into(), "10 approximation bounds".into()]
        } else {
            vec![name.to_string()]
        };
        for (label, res) in names.iter().zip(results) {
            let res = res.and_then(|msg| {
                ensure(elapsed <= limit, || format!("took {elapsed:.1?}, limit {limit:?}"))?;
                Ok(msg)
            });
            match res {
                Ok(msg) => println!("acceptance criterion {label}: PASS ({msg}; {elapsed:.2?})"),
                Err(msg) => {
                    failed += 1;
                    println!("acceptance criterion {label}: FAIL ({msg}; {elapsed:.2?})");
                }
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
