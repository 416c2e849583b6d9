//! Command-line front end: `simulate`, `run`, `eval` and `metrics`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::TimeZone;
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use shedad_core::DistanceMatrix;

use crate::config::Config;
use crate::error::{Error, Result, StageExt};
use crate::eval::{evaluate_report, long_rows, quality_summary, random_assignment, QualitySummary};
use crate::formats::{self, ensure_writable, read_json, write_json, Report};
use crate::ingest::{load_csv, segment_days, validate_and_align, ColumnMap, DailyProfile};
use crate::matrices::{daily_distance_matrices, euclidean_matrix, write_matrix_csv};
use crate::pipeline::{run_pipeline, thread_pool};
use crate::sim::{self, FaultSpec, GroundTruth, Window};

#[derive(Debug, Parser)]
#[command(name = "shedad", version, about = "Topology approximation and anomaly detection for district-heating substations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Shared {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also write intermediate matrices, graphs and the dendrogram.
    #[arg(long, global = true)]
    pub debug_dump: bool,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Override any config key, e.g. `--set n_clusters=20`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic network, its meter data and ground truth.
    Simulate {
        #[command(flatten)]
        shared: Shared,
    },
    /// Run the detection pipeline on a meter CSV.
    Run {
        #[command(flatten)]
        shared: Shared,
        /// Meter CSV; overrides the `input` config key.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Compare a report against ground truth.
    Eval {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Clustering-quality metrics for one or more labelings.
    Metrics {
        #[command(flatten)]
        shared: Shared,
        /// Meter CSV the labelings refer to.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Labeling CSV as `method=path` (columns substation_id, cluster_id).
        #[arg(long = "labels", value_name = "METHOD=PATH")]
        labels: Vec<String>,
        /// Also score random labelings with these cluster counts.
        #[arg(long = "random-k", value_delimiter = ',')]
        random_k: Vec<usize>,
        /// Distance used by the metrics.
        #[arg(long, value_enum, default_value_t = MetricDistance::Euclidean)]
        distance: MetricDistance,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricDistance {
    /// Full-window supply vectors.
    Euclidean,
    /// Mean daily DTW over the sampled days.
    Dtw,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let quiet = match &cli.command {
        Command::Simulate { shared } | Command::Run { shared, .. } => shared.quiet,
        Command::Eval { shared, .. } | Command::Metrics { shared, .. } => shared.quiet,
    };
    let level = if quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().format_timestamp(None).try_init();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { shared } => cmd_simulate(&shared),
        Command::Run { shared, input } => cmd_run(&shared, input),
        Command::Eval { shared, report, truth } => cmd_eval(&shared, &report, &truth),
        Command::Metrics { shared, input, labels, random_k, distance } => {
            cmd_metrics(&shared, input, &labels, &random_k, distance)
        }
    }
}

/// Config file, then `--set` overrides, then dedicated flags.
pub fn resolve_config(shared: &Shared) -> Result<Config> {
    let mut cfg = match &shared.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for pair in &shared.overrides {
        cfg.set_pair(pair)?;
    }
    if let Some(seed) = shared.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &shared.out {
        cfg.run.out = Some(out.clone());
    }
    if let Some(w) = shared.workers {
        cfg.run.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &Config) -> Result<PathBuf> {
    let dir = cfg.run.out.clone().ok_or_else(|| Error::Usage("no output directory: pass --out".into()))?;
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path).map_err(|e| Error::io(path, e))?))
}

fn echo_map(cfg: &Config) -> BTreeMap<String, String> {
    cfg.echo().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Builds the simulated dataset described by `cfg` in memory.
pub fn simulate_dataset(cfg: &Config) -> Result<(Vec<shedad_core::SubstationSeries>, GroundTruth)> {
    let seed = cfg.run.seed;
    let spec = sim::NetworkSpec { seed, ..cfg.sim.network.clone() };
    let network = sim::generate_network(&spec)?;
    let start = chrono::Utc.from_utc_datetime(&cfg.sim.start.and_hms_opt(0, 0, 0).unwrap());
    let window = Window::days(start, cfg.sim.days);
    let faults: Vec<FaultSpec> = match &cfg.sim.faults_file {
        Some(p) => read_json(p).map_err(|e| Error::Data(format!("fault list: {e}")))?,
        None => sim::plan_faults(&network, &window, &cfg.sim.faults, seed)?,
    };
    sim::validate_faults(&network, &window, &faults)?;
    let lead = network.delay_samples.iter().copied().max().unwrap_or(0) + 1;
    let source = sim::source_profile(&window, lead, seed);
    sim::simulate(&network, &source, &faults, &window, &cfg.sim.noise, seed)
}

fn cmd_simulate(shared: &Shared) -> Result<()> {
    let cfg = resolve_config(shared)?;
    let dir = cfg.run.out.clone().ok_or_else(|| Error::Usage("no output directory: pass --out".into()))?;
    let manifest = dir.join("manifest.json");
    for name in [sim::DATA_FILE, sim::TRUTH_FILE] {
        ensure_writable(&dir.join(name), shared.force)?;
    }
    ensure_writable(&manifest, shared.force)?;
    // Fault lists and the network are validated before anything is written.
    let (series, truth) = simulate_dataset(&cfg).stage("simulate")?;
    let config_text = cfg.to_text();
    let preamble: Vec<String> = vec![
        format!("seed = {}", cfg.run.seed),
        format!("config_sha256 = {}", sha256_hex(config_text.as_bytes())),
    ];
    let files = sim::emit_csv(&series, &truth, &dir, &preamble, shared.force).stage("emit")?;
    let mut listed = BTreeMap::new();
    for f in &files {
        let name = f.file_name().unwrap_or_default().to_string_lossy().into_owned();
        listed.insert(name, file_digest(f)?);
    }
    let sim_config: BTreeMap<String, String> =
        cfg.entries().into_iter().filter(|(k, _)| k.starts_with("sim.")).map(|(k, v)| (k.to_string(), v)).collect();
    write_json(
        &manifest,
        &serde_json::json!({
            "seed": cfg.run.seed,
            "config_sha256": sha256_hex(config_text.as_bytes()),
            "config": sim_config,
            "substations": series.len(),
            "samples_per_substation": series.first().map_or(0, |s| s.len()),
            "supply_anomalies": truth.supply_anomalies.len(),
            "performance_anomalies": truth.performance_anomalies.len(),
            "files": listed,
        }),
    )?;
    log::info!("wrote {} substations to {}", series.len(), dir.display());
    Ok(())
}

const RUN_OUTPUTS: [&str; 6] =
    ["report.json", "report.csv", "assignment.csv", "exclusions.json", "cluster_metrics.json", "config.txt"];

fn cmd_run(shared: &Shared, input: Option<PathBuf>) -> Result<()> {
    let mut cfg = resolve_config(shared)?;
    if input.is_some() {
        cfg.run.input = input;
    }
    let input = cfg.run.input.clone().ok_or_else(|| Error::Usage("no input: pass --input".into()))?;
    let dir = out_dir(&cfg)?;
    for name in RUN_OUTPUTS {
        ensure_writable(&dir.join(name), shared.force)?;
    }

    let digest = file_digest(&input).stage("ingest")?;
    let readings = load_csv(&input, &ColumnMap::default()).stage("ingest")?;
    let aligned = validate_and_align(&readings).stage("validate")?;
    log::info!(
        "validate: {} retained, {} excluded of {} substations",
        aligned.series.len(),
        aligned.excluded.len(),
        readings.len()
    );
    drop(readings);
    let out = run_pipeline(&aligned.series, &cfg.run)?;

    let report = Report::build(
        &out.scorecard,
        cfg.run.flag_threshold,
        out.assignment.n_clusters(),
        out.dates.iter().map(|d| d.to_string()).collect(),
        aligned.excluded.clone(),
        Some(digest),
        echo_map(&cfg),
        cfg.run.seed,
    );
    write_json(&dir.join("report.json"), &report)?;
    formats::write_report_csv(&dir.join("report.csv"), &out.scorecard, cfg.run.flag_threshold)?;
    formats::write_assignment_csv(&dir.join("assignment.csv"), &out.assignment)?;
    write_json(&dir.join("exclusions.json"), &aligned.excluded)?;
    let quality = quality_summary("shedad", "euclidean", &out.assignment, &out.euclid)?;
    write_json(
        &dir.join("cluster_metrics.json"),
        &serde_json::json!({ "metrics": quality, "config_echo": echo_map(&cfg), "seed": cfg.run.seed }),
    )?;
    formats::write_text(&dir.join("config.txt"), &cfg.to_text())?;

    if shared.debug_dump {
        let dbg = dir.join("debug");
        fs::create_dir_all(&dbg).map_err(|e| Error::io(&dbg, e))?;
        for (date, (m, g)) in out.dates.iter().zip(out.daily.iter().zip(&out.daily_graphs)) {
            write_matrix_csv(&dbg.join(format!("dtw-{date}.csv")), m)?;
            formats::write_graph_csv(&dbg.join(format!("knn-{date}.csv")), g)?;
        }
        formats::write_merged_graph_csv(&dbg.join("merged_graph.csv"), &out.merged)?;
        write_matrix_csv(&dbg.join("similarity.csv"), &out.similarity.similarity)?;
        write_matrix_csv(&dbg.join("euclidean.csv"), &out.euclid)?;
        write_json(&dbg.join("dendrogram.json"), &formats::dendrogram_records(&out.dendrogram))?;
    }
    println!(
        "{} substations analysed, {} excluded, {} supply anomalies, {} performance anomalies",
        report.population.len(),
        report.excluded.len(),
        report.supply_anomalies.len(),
        report.performance.len()
    );
    Ok(())
}

fn cmd_eval(shared: &Shared, report: &Path, truth: &Path) -> Result<()> {
    let cfg = resolve_config(shared)?;
    let rep: Report = read_json(report)?;
    let gt = GroundTruth::load(truth)?;
    let summary = evaluate_report(&rep, &gt).stage("eval")?;
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    if cfg.run.out.is_some() {
        let path = out_dir(&cfg)?.join("eval.json");
        ensure_writable(&path, shared.force)?;
        write_json(&path, &summary)?;
    }
    println!("{text}");
    Ok(())
}

fn cmd_metrics(
    shared: &Shared,
    input: Option<PathBuf>,
    labels: &[String],
    random_k: &[usize],
    distance: MetricDistance,
) -> Result<()> {
    let mut cfg = resolve_config(shared)?;
    if input.is_some() {
        cfg.run.input = input;
    }
    let input = cfg.run.input.clone().ok_or_else(|| Error::Usage("no input: pass --input".into()))?;
    if labels.is_empty() && random_k.is_empty() {
        return Err(Error::Usage("nothing to score: pass --labels and/or --random-k".into()));
    }
    let dir = out_dir(&cfg)?;
    for name in ["metrics.json", "metrics.csv", "metrics_long.csv"] {
        ensure_writable(&dir.join(name), shared.force)?;
    }
    let aligned = validate_and_align(&load_csv(&input, &ColumnMap::default())?)?;
    let (dist, distance_name) = thread_pool(cfg.run.workers)?.install(|| -> Result<_> {
        Ok(match distance {
            MetricDistance::Euclidean => (euclidean_matrix(&aligned.series)?, "euclidean"),
            MetricDistance::Dtw => (mean_dtw_matrix(&aligned.series, &cfg)?, "dtw"),
        })
    })?;

    let mut summaries: Vec<QualitySummary> = Vec::new();
    for spec in labels {
        let (method, path) = spec
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--labels expects METHOD=PATH, got {spec:?}")))?;
        let assignment = formats::read_assignment_csv(Path::new(path), cfg.run.singleton_threshold)?;
        summaries.push(quality_summary(method, distance_name, &assignment, &dist).stage("metrics")?);
    }
    for &k in random_k {
        let a = random_assignment(dist.ids(), k, cfg.run.seed, cfg.run.singleton_threshold)?;
        summaries.push(quality_summary("random", distance_name, &a, &dist)?);
    }

    write_json(
        &dir.join("metrics.json"),
        &serde_json::json!({ "metrics": summaries, "config_echo": echo_map(&cfg), "seed": cfg.run.seed }),
    )?;
    let path = dir.join("metrics.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|source| Error::Csv { path: path.clone(), source })?;
    let err = |source| Error::Csv { path: path.clone(), source };
    w.write_record(["method", "distance", "k", "cluster", "size", "mean_mst_distance", "variance"]).map_err(err)?;
    for s in &summaries {
        for c in &s.clusters {
            w.write_record([
                s.method.clone(),
                s.distance.clone(),
                s.k.to_string(),
                c.cluster.to_string(),
                c.size.to_string(),
                c.mean_mst_distance.to_string(),
                c.variance.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let path = dir.join("metrics_long.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|source| Error::Csv { path: path.clone(), source })?;
    let err = |source| Error::Csv { path: path.clone(), source };
    w.write_record(["method", "k", "metric", "value"]).map_err(err)?;
    for (method, k, metric, value) in long_rows(&summaries) {
        w.write_record([method, k.to_string(), metric.to_string(), value.to_string()]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    for s in &summaries {
        println!("{} k={} MI={:.6} MV={:.6}", s.method, s.k, s.mean_mst_distance, s.mean_variance);
    }
    Ok(())
}

/// Elementwise mean of the daily DTW matrices over the configured sample of
/// days.
pub fn mean_dtw_matrix(series: &[shedad_core::SubstationSeries], cfg: &Config) -> Result<DistanceMatrix> {
    let ids: Vec<String> = series.iter().map(|s| s.id.clone()).collect();
    let profiles: Vec<DailyProfile> = series.iter().flat_map(|s| segment_days(s, cfg.run.timezone)).collect();
    let mut dates: Vec<_> = profiles.iter().map(|p| p.date).collect();
    dates.sort();
    dates.dedup();
    let dates = crate::ingest::sample_days(&dates, cfg.run.r.min(dates.len()), cfg.run.seed)?;
    let daily =
        daily_distance_matrices(&ids, &profiles, &dates, cfg.run.band_radius, cfg.run.cache_dir.as_deref())?;
    let d = daily.len() as f64;
    Ok(DistanceMatrix::from_fn(ids, |i, j| Ok(daily.iter().map(|m| m.get(i, j)).sum::<f64>() / d))?)
}
