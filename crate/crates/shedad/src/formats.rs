//! On-disk formats: reports, assignments, graphs, dendrograms and metrics.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use shedad_core::anomaly::AnomalyScorecard;
use shedad_core::merge::MergedGraph;
use shedad_core::{ClusterAssignment, Dendrogram, NeighborGraph};

use crate::error::{Error, Result};
use crate::ingest::Exclusion;

/// Refuses to replace an existing file unless `force` is set.
pub fn ensure_writable(path: &Path, force: bool) -> Result<()> {
    if !force && path.exists() {
        return Err(Error::Usage(format!("{} already exists; pass --force to overwrite", path.display())));
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyEntry {
    pub id: String,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceEntry {
    pub id: String,
    pub cluster: usize,
    pub score: f64,
    pub comparisons: usize,
    pub flags: usize,
    pub mean_delta_t: f64,
    /// Score of exactly 1: flagged in every comparison.
    pub highlighted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub supply_anomalies: Vec<SupplyEntry>,
    pub performance: Vec<PerformanceEntry>,
    /// Substations that passed validation and were analysed.
    pub population: Vec<String>,
    pub excluded: Vec<Exclusion>,
    pub n_clusters: usize,
    pub sampled_days: Vec<String>,
    pub input_digest: Option<String>,
    pub config_echo: BTreeMap<String, String>,
    pub seed: u64,
}

impl Report {
    pub fn build(
        scorecard: &AnomalyScorecard,
        flag_threshold: f64,
        n_clusters: usize,
        sampled_days: Vec<String>,
        excluded: Vec<Exclusion>,
        input_digest: Option<String>,
        config_echo: BTreeMap<String, String>,
        seed: u64,
    ) -> Self {
        Self {
            supply_anomalies: scorecard
                .supply_anomalies()
                .map(|e| SupplyEntry { id: e.id.clone(), cluster: e.cluster })
                .collect(),
            performance: scorecard
                .performance_anomalies(flag_threshold)
                .map(|e| PerformanceEntry {
                    id: e.id.clone(),
                    cluster: e.cluster,
                    score: e.score(),
                    comparisons: e.comparisons,
                    flags: e.flags,
                    mean_delta_t: e.mean_delta_t,
                    highlighted: e.score() == 1.0,
                })
                .collect(),
            population: scorecard.entries.iter().map(|e| e.id.clone()).collect(),
            excluded,
            n_clusters,
            sampled_days,
            input_digest,
            config_echo,
            seed,
        }
    }

    pub fn supply_ids(&self) -> std::collections::BTreeSet<String> {
        self.supply_anomalies.iter().map(|e| e.id.clone()).collect()
    }

    pub fn performance_ids(&self) -> std::collections::BTreeSet<String> {
        self.performance.iter().map(|e| e.id.clone()).collect()
    }
}

/// One row per analysed substation, for spreadsheets.
pub fn write_report_csv(path: &Path, scorecard: &AnomalyScorecard, flag_threshold: f64) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record([
        "substation_id",
        "cluster_id",
        "supply_anomaly",
        "score",
        "comparisons",
        "flags",
        "mean_delta_t",
        "performance_anomaly",
    ])
    .map_err(&err)?;
    for e in &scorecard.entries {
        let flagged = !e.supply_anomaly && e.score() > 0.0 && e.score() >= flag_threshold;
        w.write_record([
            e.id.clone(),
            e.cluster.to_string(),
            e.supply_anomaly.to_string(),
            e.score().to_string(),
            e.comparisons.to_string(),
            e.flags.to_string(),
            e.mean_delta_t.to_string(),
            flagged.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_assignment_csv(path: &Path, assignment: &ClusterAssignment) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["substation_id", "cluster_id", "singleton_flag"]).map_err(&err)?;
    for (id, &c) in assignment.ids().iter().zip(assignment.labels()) {
        w.write_record([id.clone(), c.to_string(), assignment.is_singleton(c).to_string()]).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads any labeling with `substation_id` and `cluster_id` columns. Cluster
/// labels may be arbitrary strings; they are renumbered by smallest member.
pub fn read_assignment_csv(path: &Path, singleton_threshold: usize) -> Result<ClusterAssignment> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))?;
    let headers = r.headers().map_err(csv_err(path))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("{}: missing column `{name}`", path.display())))
    };
    let (id_col, label_col) = (col("substation_id")?, col("cluster_id")?);
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        ids.push(rec.get(id_col).unwrap_or("").to_string());
        labels.push(rec.get(label_col).unwrap_or("").to_string());
    }
    Ok(ClusterAssignment::from_labels(ids, &labels, singleton_threshold)?)
}

/// Edge list of the merged graph with each retained edge's agreement score.
pub fn write_merged_graph_csv(path: &Path, merged: &MergedGraph) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    let ids = merged.graph.ids();
    w.write_record(["id_a", "id_b", "weight", "retained_kappa"]).map_err(&err)?;
    for (e, kappa) in merged.graph.edges().iter().zip(&merged.kappas) {
        w.write_record([ids[e.a].clone(), ids[e.b].clone(), e.weight.to_string(), kappa.to_string()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_graph_csv(path: &Path, graph: &NeighborGraph) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    let ids = graph.ids();
    w.write_record(["id_a", "id_b", "weight", "fallback"]).map_err(&err)?;
    for e in graph.edges() {
        w.write_record([ids[e.a].clone(), ids[e.b].clone(), e.weight.to_string(), e.fallback.to_string()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub height: f64,
}

pub fn dendrogram_records(d: &Dendrogram) -> Vec<MergeRecord> {
    d.steps()
        .iter()
        .map(|s| MergeRecord { left: d.member_ids(s.left), right: d.member_ids(s.right), height: s.height })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
