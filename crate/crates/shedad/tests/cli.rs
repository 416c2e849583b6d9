use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 12] = [
    "--set", "sim.n_substations=40",
    "--set", "sim.days=6",
    "--set", "sim.supply_faults=3",
    "--set", "sim.performance_faults=2",
    "--set", "sim.street_size_min=6",
    "--set", "sim.street_size_max=10",
];

const RUN: [&str; 8] = ["--set", "r=4", "--set", "k_b=4", "--set", "n_clusters=8", "--set", "comparison_k=3"];

fn shedad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shedad")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn simulate(dir: &Path) {
    let mut args = vec!["simulate", "--quiet", "--seed", "3", "--out", dir.to_str().unwrap()];
    args.extend(SMALL);
    let out = shedad(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn run(data: &Path, out_dir: &Path, extra: &[&str]) -> Output {
    let mut args =
        vec!["run", "--quiet", "--seed", "3", "--input", data.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
    args.extend(RUN);
    args.extend(extra);
    shedad(&args)
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&shedad(&["--help"])), 0);
    assert_eq!(code(&shedad(&["--version"])), 0);
    assert_eq!(code(&shedad(&["run", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&shedad(&[])), 1);
    assert_eq!(code(&shedad(&["frobnicate"])), 1);
    assert_eq!(code(&shedad(&["run", "--no-such-flag"])), 1);
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&shedad(&["simulate", "--out", out, "--set", "bogus_key=1"])), 1);
    assert_eq!(code(&shedad(&["simulate", "--out", out, "--set", "kappa_min=lots"])), 1);
    assert_eq!(code(&shedad(&["simulate", "--out", out, "--set", "snn_weights=cubic"])), 1);
    assert_eq!(code(&shedad(&["run", "--out", out])), 1, "missing --input");
}

#[test]
fn data_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("absent.csv");
    assert_eq!(code(&run(&missing, &out, &[])), 2);

    let bad = tmp.path().join("bad.csv");
    fs::write(
        &bad,
        "timestamp,substation_id,supply_temp,return_temp,flow,outdoor_temp\n\
         2024-01-01T00:00:00Z,S1,80,50,1,0\n\
         2024-01-01T00:05:00Z,S1,warm,50,1,0\n",
    )
    .unwrap();
    let result = run(&bad, &out, &[]);
    assert_eq!(code(&result), 2);
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 3"));

    let schema = tmp.path().join("schema.csv");
    fs::write(&schema, "timestamp,substation_id,supply_temp\n2024-01-01T00:00:00Z,S1,80\n").unwrap();
    assert_eq!(code(&run(&schema, &out, &[])), 2);
}

#[test]
fn simulate_refuses_to_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path());
    let before = fs::read(tmp.path().join("data.csv")).unwrap();
    let mut args = vec!["simulate", "--quiet", "--seed", "4", "--out", tmp.path().to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(code(&shedad(&args)), 1);
    assert_eq!(fs::read(tmp.path().join("data.csv")).unwrap(), before);
    args.push("--force");
    assert_eq!(code(&shedad(&args)), 0);
    assert_ne!(fs::read(tmp.path().join("data.csv")).unwrap(), before);
}

#[test]
fn simulate_run_eval_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    simulate(&sim);
    for f in ["data.csv", "ground_truth.json", "manifest.json"] {
        assert!(sim.join(f).is_file(), "{f}");
    }
    let head = fs::read_to_string(sim.join("data.csv")).unwrap();
    assert!(head.starts_with("# seed = 3\n# config_sha256 = "));

    let out = tmp.path().join("run");
    let result = run(&sim.join("data.csv"), &out, &["--debug-dump"]);
    assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
    for f in ["report.json", "report.csv", "assignment.csv", "exclusions.json", "cluster_metrics.json", "config.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["n_clusters"], 8);
    assert_eq!(report["population"].as_array().unwrap().len(), 40);
    assert_eq!(report["config_echo"]["k_b"], "4");
    assert_eq!(report["sampled_days"].as_array().unwrap().len(), 4);

    let dbg = out.join("debug");
    let dtw = fs::read_dir(&dbg).unwrap().filter(|e| {
        e.as_ref().unwrap().file_name().to_string_lossy().starts_with("dtw-")
    });
    assert_eq!(dtw.count(), 4);
    for f in ["merged_graph.csv", "similarity.csv", "euclidean.csv", "dendrogram.json"] {
        assert!(dbg.join(f).is_file(), "{f}");
    }
    let merged = fs::read_to_string(dbg.join("merged_graph.csv")).unwrap();
    assert!(merged.starts_with("id_a,id_b,weight,retained_kappa\n"));

    let eval = shedad(&[
        "eval",
        "--quiet",
        "--report",
        out.join("report.json").to_str().unwrap(),
        "--truth",
        sim.join("ground_truth.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&eval), 0, "{}", String::from_utf8_lossy(&eval.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&eval.stdout).unwrap();
    assert_eq!(summary["population"], 40);
    assert!(out.join("eval.json").is_file());

    // A second run into the same directory needs --force.
    assert_eq!(code(&run(&sim.join("data.csv"), &out, &[])), 1);
    assert_eq!(code(&run(&sim.join("data.csv"), &out, &["--force"])), 0);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    simulate(&sim);
    let data = sim.join("data.csv");
    let one = tmp.path().join("one");
    let four = tmp.path().join("four");
    assert_eq!(code(&run(&data, &one, &["--workers", "1"])), 0);
    assert_eq!(code(&run(&data, &four, &["--workers", "4"])), 0);
    for f in ["report.json", "report.csv", "assignment.csv", "cluster_metrics.json"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(four.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn metrics_scores_labelings_and_random_baselines() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    simulate(&sim);
    let data = sim.join("data.csv");
    let out = tmp.path().join("run");
    assert_eq!(code(&run(&data, &out, &[])), 0);
    let labels = format!("shedad={}", out.join("assignment.csv").display());
    let m = tmp.path().join("metrics");
    let result = shedad(&[
        "metrics",
        "--quiet",
        "--input",
        data.to_str().unwrap(),
        "--labels",
        &labels,
        "--random-k",
        "8,5",
        "--distance",
        "dtw",
        "--set",
        "r=4",
        "--out",
        m.to_str().unwrap(),
    ]);
    assert_eq!(code(&result), 0, "{}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("shedad k=8"));
    assert!(stdout.contains("random k=5"));
    let long = fs::read_to_string(m.join("metrics_long.csv")).unwrap();
    assert!(long.starts_with("method,k,metric,value\n"));
    assert_eq!(long.lines().count(), 1 + 3 * 2);

    let unknown = tmp.path().join("unknown.csv");
    fs::write(&unknown, "substation_id,cluster_id\nNOPE,1\n").unwrap();
    let labels = format!("x={}", unknown.display());
    let result = shedad(&[
        "metrics", "--quiet", "--input", data.to_str().unwrap(), "--labels", &labels, "--out", m.to_str().unwrap(),
        "--force",
    ]);
    assert_eq!(code(&result), 2);
}
