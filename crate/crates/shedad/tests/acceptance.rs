//! Acceptance suite. Every criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p shedad --test acceptance`.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use shedad::cli::simulate_dataset;
use shedad::config::Config;
use shedad::eval::{evaluate_sets, quality_summary, random_assignment};
use shedad::ingest::{read_csv, validate_and_align, ColumnMap};
use shedad::pipeline::{run_pipeline, PipelineOutput};
use shedad::sim::{write_data_csv, GroundTruth};
use shedad_core::dtw::dtw_distance;
use shedad_core::hier::{cut, ward_agglomerative};
use shedad_core::knn::{delta_k, neighbor_budget};
use shedad_core::merge::{edge_kappa, merge_graphs};
use shedad_core::mst::cluster_mst;
use shedad_core::rng::SplitMix64;
use shedad_core::robust::modified_z_scores;
use shedad_core::snn::snn_similarity;
use shedad_core::{DistanceMatrix, Edge, NeighborGraph};

// Tolerances and budgets.
const DTW_REAL_TOL: f64 = 1e-9;
const DTW_PAIRS: usize = 1000;
const DTW_BUDGET: Duration = Duration::from_secs(10);
const MONOTONE_PAIRS: usize = 200;
const SNN_GRAPHS: usize = 100;
const WARD_MATRICES: usize = 50;
const WARD_TOL: f64 = 1e-9;
const MST_SMALL: usize = 100;
const MST_TOL: f64 = 1e-9;
const Z_EXAMPLE: f64 = 65.43;
const Z_TOL: f64 = 1e-2;
const Z_GROUPS: usize = 100;
const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const MIN_MEDIAN_SENSITIVITY: f64 = 0.80;
const MIN_MEDIAN_SPECIFICITY: f64 = 0.95;
const END_TO_END_BUDGET: Duration = Duration::from_secs(300);
const QUALITY_KS: [usize; 3] = [14, 20, 30];

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(u32, &str, Check); 12] = [
        (1, "DTW matches full-matrix oracle", c1_dtw_oracle),
        (2, "DTW shrinks as the band widens", c2_band_monotone),
        (3, "neighbour budget table and clamping", c3_budget_table),
        (4, "SNN matches triple-loop evaluation", c4_snn_brute_force),
        (5, "agreement merge rules", c5_merge),
        (6, "Ward matches brute-force objective", c6_ward_oracle),
        (7, "MST matches exhaustive and Prim", c7_mst),
        (8, "modified z-score example and invariance", c8_z_score),
        (9, "end-to-end synthetic detection", c9_detection),
        (10, "cluster quality beats random labels", c10_quality),
        (11, "identical runs give identical reports", c11_determinism),
        (12, "28 gap-bearing substations excluded", c12_ingest),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i:02}")).collect()
}

fn random_matrix(rng: &mut SplitMix64, n: usize) -> DistanceMatrix {
    let upper = (0..n * (n - 1) / 2).map(|_| 0.01 + 10.0 * rng.unit_f64()).collect();
    DistanceMatrix::from_upper_triangle(ids(n), upper).unwrap()
}

fn random_graph(rng: &mut SplitMix64, n: usize, density: f64) -> NeighborGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.unit_f64() < density {
                // some zero weights exercise the denominator floor
                let weight = if rng.below(10) == 0 { 0.0 } else { 5.0 * rng.unit_f64() };
                edges.push(Edge { a, b, weight, fallback: false });
            }
        }
    }
    NeighborGraph::from_edges(ids(n), edges).unwrap()
}

/// Textbook `(n+1) x (n+1)` DTW recursion with no band.
fn dtw_full(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut c = vec![vec![f64::INFINITY; m + 1]; n + 1];
    c[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let best = c[i - 1][j].min(c[i][j - 1]).min(c[i - 1][j - 1]);
            c[i][j] = (a[i - 1] - b[j - 1]).abs() + best;
        }
    }
    c[n][m]
}

fn c1_dtw_oracle() -> Result<String, String> {
    let mut rng = SplitMix64::new(0xD7);
    let t = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..DTW_PAIRS {
        let n = 1 + rng.below(32) as usize;
        let integer = k % 2 == 0;
        let mut draw = || if integer { rng.below(21) as f64 - 10.0 } else { 20.0 * rng.unit_f64() - 10.0 };
        let a: Vec<f64> = (0..n).map(|_| draw()).collect();
        let b: Vec<f64> = (0..n).map(|_| draw()).collect();
        let got = dtw_distance(&a, &b, n).unwrap();
        let want = dtw_full(&a, &b);
        if integer {
            ensure(got == want, || format!("integer pair {k}: {got} != {want}"))?;
        } else {
            worst = worst.max((got - want).abs());
            ensure((got - want).abs() <= DTW_REAL_TOL, || format!("real pair {k}: |{got} - {want}| > {DTW_REAL_TOL}"))?;
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < DTW_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{DTW_PAIRS} pairs, worst real error {worst:.1e}, {elapsed:.2?}"))
}

fn c2_band_monotone() -> Result<String, String> {
    let mut rng = SplitMix64::new(0xBA);
    let mut violations = 0;
    for _ in 0..MONOTONE_PAIRS {
        let n = 3 + rng.below(30) as usize;
        let a: Vec<f64> = (0..n).map(|_| rng.unit_f64() * 10.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.unit_f64() * 10.0).collect();
        let r1 = 1 + rng.below(n as u64 - 2) as usize;
        let r2 = r1 + 1 + rng.below((n - r1) as u64) as usize;
        if dtw_distance(&a, &b, r1).unwrap() < dtw_distance(&a, &b, r2).unwrap() {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{MONOTONE_PAIRS} pairs, 0 violations"))
}

fn c3_budget_table() -> Result<String, String> {
    for (low, high, expected) in [(10, 0, 0.0), (20, 0, 5.0), (3, 16, -3.0)] {
        let got = delta_k(low, high, 10);
        ensure(got == expected, || format!("delta_k({low}, {high}, 10) = {got}, want {expected}"))?;
    }
    ensure(neighbor_budget(0, 200, 10, 248) == 1, || "budget not clamped at 1".into())?;
    ensure(neighbor_budget(200, 0, 10, 20) == 19, || "budget not clamped at n - 1".into())?;
    ensure(neighbor_budget(20, 0, 10, 248) == 15, || "unclamped budget wrong".into())?;
    Ok("dk 0, +5, -3; clamps at 1 and n - 1".into())
}

fn c4_snn_brute_force() -> Result<String, String> {
    let mut rng = SplitMix64::new(0x5E);
    for t in 0..SNN_GRAPHS {
        let n = 2 + rng.below(11) as usize;
        let g = random_graph(&mut rng, n, 0.5);
        let s = snn_similarity(&g).similarity;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (mut shared, mut denom) = (0usize, 0.0);
                for k in 0..n {
                    if let (Some(a), Some(b)) = (g.edge(i, k), g.edge(j, k)) {
                        shared += 1;
                        denom += a.weight + b.weight;
                    }
                }
                let want = match shared {
                    0 => 0.0,
                    _ => (shared * shared) as f64 / if denom > 0.0 { denom } else { 1e-9 },
                };
                ensure(s.get(i, j) == want, || format!("graph {t} pair ({i},{j}): {} != {want}", s.get(i, j)))?;
            }
        }
    }
    Ok(format!("{SNN_GRAPHS} graphs, exact"))
}

fn c5_merge() -> Result<String, String> {
    let mut rng = SplitMix64::new(0x3E);
    for t in 0..100 {
        let n = 3 + rng.below(8) as usize;
        let d = 2 + rng.below(6) as usize;
        let graphs: Vec<NeighborGraph> = (0..d).map(|_| random_graph(&mut rng, n, 0.4)).collect();
        let merged = merge_graphs(&graphs, 0.6).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                let present = graphs.iter().filter(|g| g.edge(a, b).is_some()).count();
                let kept = merged.graph.edge(a, b).is_some();
                ensure(present < d || kept, || format!("set {t}: unanimous edge ({a},{b}) dropped"))?;
                ensure(present > 0 || !kept, || format!("set {t}: absent edge ({a},{b}) retained"))?;
            }
        }
    }
    // Edge x in 3 of 5 graphs, edge y in 2: chance level 5 / 10 = 0.5.
    let x = Edge { a: 0, b: 1, weight: 1.0, fallback: false };
    let y = Edge { a: 1, b: 2, weight: 1.0, fallback: false };
    let graphs: Vec<NeighborGraph> = [vec![x, y], vec![x, y], vec![x], vec![], vec![]]
        .into_iter()
        .map(|e| NeighborGraph::from_edges(ids(3), e).unwrap())
        .collect();
    let merged = merge_graphs(&graphs, 0.6).unwrap();
    ensure(merged.chance_agreement == 0.5, || format!("chance level {}", merged.chance_agreement))?;
    let kappa = edge_kappa(3, 5, 0.5);
    ensure((kappa - 0.2).abs() < 1e-12, || format!("kappa {kappa}"))?;
    ensure(merged.graph.edge(0, 1).is_none(), || "kappa 0.2 edge retained".into())?;
    Ok("100 random sets; kappa 0.2 example dropped".into())
}

/// Twice the increase in `W(C) = sum_{i,j in C} d_ij^2 / (2|C|)` caused by
/// merging `a` and `b`, recomputed from the original matrix.
fn ward_cost(d: &DistanceMatrix, a: &[usize], b: &[usize]) -> f64 {
    let w = |c: &[usize]| {
        let s: f64 = c.iter().flat_map(|&i| c.iter().map(move |&j| (i, j))).map(|(i, j)| d.get(i, j).powi(2)).sum();
        s / (2.0 * c.len() as f64)
    };
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    2.0 * (w(&ab) - w(a) - w(b))
}

fn c6_ward_oracle() -> Result<String, String> {
    let mut rng = SplitMix64::new(0x3A);
    let mut steps = 0;
    for t in 0..WARD_MATRICES {
        let n = 2 + rng.below(7) as usize;
        let d = random_matrix(&mut rng, n);
        let dendro = ward_agglomerative(&d);
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for (s, step) in dendro.steps().iter().enumerate() {
            let mut best = (f64::INFINITY, 0, 0);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let c = ward_cost(&d, &clusters[i], &clusters[j]);
                    if c < best.0 {
                        best = (c, i, j);
                    }
                }
            }
            let (cost, i, j) = best;
            let mut want: Vec<usize> = clusters[i].iter().chain(&clusters[j]).copied().collect();
            want.sort_unstable();
            let got = dendro.members(n + s);
            ensure(got == want, || format!("matrix {t} step {s}: merged {got:?}, oracle {want:?}"))?;
            ensure((step.height - cost.sqrt()).abs() <= WARD_TOL, || {
                format!("matrix {t} step {s}: height {} vs {}", step.height, cost.sqrt())
            })?;
            clusters.remove(j);
            clusters[i] = want;
            steps += 1;
        }
    }
    Ok(format!("{WARD_MATRICES} matrices, {steps} merge steps"))
}

/// Minimum over every labelled tree on `n` nodes, enumerated by Prüfer code.
fn exhaustive_mst(d: &DistanceMatrix) -> f64 {
    let n = d.len();
    if n == 1 {
        return 0.0;
    }
    if n == 2 {
        return d.get(0, 1);
    }
    let mut code = vec![0usize; n - 2];
    let mut best = f64::INFINITY;
    loop {
        let mut degree = vec![1usize; n];
        for &c in &code {
            degree[c] += 1;
        }
        let mut total = 0.0;
        for &c in &code {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            total += d.get(leaf, c);
            degree[leaf] -= 1;
            degree[c] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        total += d.get(rest[0], rest[1]);
        best = best.min(total);
        // next code in base n
        let mut k = 0;
        while k < code.len() {
            code[k] += 1;
            if code[k] < n {
                break;
            }
            code[k] = 0;
            k += 1;
        }
        if k == code.len() {
            return best;
        }
    }
}

fn prim(d: &DistanceMatrix) -> f64 {
    let n = d.len();
    let mut done = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let u = (0..n).filter(|&i| !done[i]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        done[u] = true;
        total += best[u];
        for v in 0..n {
            if !done[v] && d.get(u, v) < best[v] {
                best[v] = d.get(u, v);
            }
        }
    }
    total
}

fn c7_mst() -> Result<String, String> {
    let mut rng = SplitMix64::new(0x57);
    for t in 0..MST_SMALL {
        let n = 1 + rng.below(8) as usize;
        let d = random_matrix(&mut rng, n);
        let tree = cluster_mst(&(0..n).collect::<Vec<_>>(), &d).unwrap();
        ensure(tree.edges().len() == n - 1, || format!("matrix {t}: {} edges for {n} nodes", tree.edges().len()))?;
        let (got, want) = (tree.total_weight(), exhaustive_mst(&d));
        ensure((got - want).abs() <= MST_TOL, || format!("matrix {t}: {got} vs exhaustive {want}"))?;
    }
    for (t, n) in [2, 17, 50, 120, 200].into_iter().enumerate() {
        let d = random_matrix(&mut rng, n);
        let got = cluster_mst(&(0..n).collect::<Vec<_>>(), &d).unwrap().total_weight();
        let want = prim(&d);
        ensure((got - want).abs() <= MST_TOL * n as f64, || format!("large matrix {t} (n={n}): {got} vs Prim {want}"))?;
    }
    Ok(format!("{MST_SMALL} exhaustive checks; Kruskal = Prim up to n = 200"))
}

fn c8_z_score() -> Result<String, String> {
    let z = modified_z_scores(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
    ensure((z[4] - Z_EXAMPLE).abs() <= Z_TOL, || format!("outlier score {}", z[4]))?;
    let mut rng = SplitMix64::new(0x28);
    for t in 0..Z_GROUPS {
        let n = 3 + rng.below(10) as usize;
        let values: Vec<f64> = (0..n).map(|_| 20.0 + 15.0 * rng.unit_f64()).collect();
        let shift = 200.0 * rng.unit_f64() - 100.0;
        let scale = 0.1 + 10.0 * rng.unit_f64();
        let moved: Vec<f64> = values.iter().map(|v| v * scale + shift).collect();
        let flags = |v: &[f64]| modified_z_scores(v).unwrap().iter().map(|&z| z < -2.0).collect::<Vec<_>>();
        ensure(flags(&values) == flags(&moved), || format!("group {t}: flags changed under affine map"))?;
    }
    Ok(format!("M = {:.4}; flags invariant on {Z_GROUPS} groups", z[4]))
}

struct SeedRun {
    seed: u64,
    truth: GroundTruth,
    out: PipelineOutput,
    elapsed: Duration,
}

/// The ten default-config runs shared by criteria 9 and 10.
fn seed_runs() -> &'static Vec<SeedRun> {
    static RUNS: OnceLock<Vec<SeedRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SEEDS
            .map(|seed| {
                let t = Instant::now();
                let mut cfg = Config::default();
                cfg.run.seed = seed;
                let (series, truth) = simulate_dataset(&cfg).expect("simulate");
                let out = run_pipeline(&series, &cfg.run).expect("pipeline");
                SeedRun { seed, truth, out, elapsed: t.elapsed() }
            })
            .collect()
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    (v[(n - 1) / 2] + v[n / 2]) / 2.0
}

fn c9_detection() -> Result<String, String> {
    let cfg = Config::default();
    ensure(cfg.sim.network.n_substations == 248 && cfg.sim.days == 31, || "default scale changed".into())?;
    ensure(cfg.sim.faults.supply == 16 && cfg.sim.faults.performance == 14, || "default fault counts changed".into())?;
    let runs = seed_runs();
    let mut sens = Vec::new();
    let mut spec = Vec::new();
    let mut total = Duration::ZERO;
    for run in runs {
        let supply: BTreeSet<String> = run.out.scorecard.supply_anomalies().map(|e| e.id.clone()).collect();
        let perf: BTreeSet<String> =
            run.out.scorecard.performance_anomalies(cfg.run.flag_threshold).map(|e| e.id.clone()).collect();
        let summary = evaluate_sets(&supply, &perf, &run.truth, &run.out.ids).map_err(|e| e.to_string())?;
        ensure(run.truth.supply_anomalies.len() == 16, || format!("seed {}: supply truth size", run.seed))?;
        ensure(run.truth.performance_anomalies.len() == 14, || format!("seed {}: performance truth size", run.seed))?;
        sens.push(summary.pooled.sensitivity.unwrap_or(0.0));
        spec.push(summary.pooled.specificity.unwrap_or(0.0));
        total += run.elapsed;
    }
    let per_seed: Vec<String> = sens.iter().zip(&spec).map(|(a, b)| format!("{a:.2}/{b:.3}")).collect();
    let (ms, mp) = (median(&mut sens), median(&mut spec));
    let detail = format!("median sensitivity {ms:.3}, specificity {mp:.3}, {total:.0?} total; per seed {}", per_seed.join(" "));
    ensure(ms >= MIN_MEDIAN_SENSITIVITY && mp >= MIN_MEDIAN_SPECIFICITY, || detail.clone())?;
    ensure(total < END_TO_END_BUDGET, || format!("too slow: {detail}"))?;
    Ok(detail)
}

fn c10_quality() -> Result<String, String> {
    let mut checked = 0;
    let mut ratio_mi = Vec::new();
    for run in seed_runs() {
        let days = run.out.daily.len() as f64;
        let dtw = DistanceMatrix::from_fn(run.out.ids.clone(), |i, j| {
            Ok(run.out.daily.iter().map(|m| m.get(i, j)).sum::<f64>() / days)
        })
        .unwrap();
        for k in QUALITY_KS {
            let ours = cut(&run.out.dendrogram, k, 1).unwrap();
            let random = random_assignment(&run.out.ids, k, run.seed, 1).unwrap();
            for (name, d) in [("euclidean", &run.out.euclid), ("dtw", &dtw)] {
                let a = quality_summary("shedad", name, &ours, d).unwrap();
                let b = quality_summary("random", name, &random, d).unwrap();
                ensure(a.mean_mst_distance < b.mean_mst_distance && a.mean_variance < b.mean_variance, || {
                    format!(
                        "seed {} k {k} {name}: MI {:.2} vs {:.2}, MV {:.2} vs {:.2}",
                        run.seed, a.mean_mst_distance, b.mean_mst_distance, a.mean_variance, b.mean_variance
                    )
                })?;
                ratio_mi.push(a.mean_mst_distance / b.mean_mst_distance);
                checked += 1;
            }
        }
    }
    let worst = ratio_mi.iter().cloned().fold(0.0, f64::max);
    Ok(format!("{checked} seed/k/distance cases, worst MI ratio {worst:.2}"))
}

fn shedad(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_shedad")).args(args).output().expect("binary runs")
}

fn c11_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let sim = root.join("sim");
    let s = sim.to_str().unwrap();
    let out = shedad(&[
        "simulate", "--quiet", "--seed", "11", "--out", s, "--set", "sim.n_substations=60", "--set", "sim.days=8",
        "--set", "sim.supply_faults=4", "--set", "sim.performance_faults=3",
    ]);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let data = sim.join("data.csv");
    let dir = root.join("run");
    // The same command twice; --force lets the second run replace the first.
    let run = || {
        shedad(&[
            "run", "--quiet", "--force", "--seed", "11", "--input", data.to_str().unwrap(), "--out",
            dir.to_str().unwrap(), "--set", "r=5", "--set", "k_b=5", "--set", "n_clusters=10",
        ])
    };
    let files = ["report.json", "report.csv", "assignment.csv", "exclusions.json", "cluster_metrics.json", "config.txt"];
    let mut first = Vec::new();
    for pass in 0..2 {
        let out = run();
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        let bytes: Vec<Vec<u8>> = files.iter().map(|f| fs::read(dir.join(f)).unwrap()).collect();
        if pass == 0 {
            first = bytes;
        } else {
            for (f, (x, y)) in files.iter().zip(first.iter().zip(&bytes)) {
                ensure(x == y, || format!("{f} differs"))?;
            }
        }
    }
    Ok(format!("{} output files byte-identical", files.len()))
}

fn c12_ingest() -> Result<String, String> {
    let mut cfg = Config::default();
    cfg.run.seed = 12;
    cfg.sim.days = 1;
    let (series, _) = simulate_dataset(&cfg).map_err(|e| e.to_string())?;
    ensure(series.len() == 248, || format!("{} substations simulated", series.len()))?;
    let mut buf = Vec::new();
    write_data_csv(&series, &[], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();

    // Every ninth substation loses one mid-day sample: 28 of 248.
    let victims: BTreeSet<&str> = series.iter().step_by(9).take(28).map(|s| s.id.as_str()).collect();
    let mut kept = String::new();
    for line in text.lines() {
        let mut cols = line.split(',');
        let (ts, id) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        if victims.contains(id) && ts.starts_with("2024-01-01T12:00:00") {
            continue;
        }
        kept.push_str(line);
        kept.push('\n');
    }
    let aligned = validate_and_align(&read_csv(kept.as_bytes(), &ColumnMap::default()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let excluded: BTreeSet<&str> = aligned.excluded.iter().map(|e| e.substation_id.as_str()).collect();
    ensure(aligned.series.len() == 220, || format!("{} retained", aligned.series.len()))?;
    ensure(excluded == victims, || "excluded set differs from the gap-bearing set".into())?;
    Ok("248 in, 220 retained, 28 excluded".into())
}
