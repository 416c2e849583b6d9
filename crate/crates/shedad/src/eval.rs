//! Detection and clustering-quality evaluation against ground truth or
//! external labelings.

use std::collections::BTreeSet;

use serde::Serialize;
use shedad_core::metrics::{cluster_quality, detection_quality, ClusterQuality, ConfusionCounts, DetectionQuality};
use shedad_core::rng::SplitMix64;
use shedad_core::{ClusterAssignment, DistanceMatrix};

use crate::error::{Error, Result};
use crate::formats::Report;
use crate::sim::GroundTruth;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSummary {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    /// `null` when the class has no actual positives.
    pub sensitivity: Option<f64>,
    /// `null` when the class has no actual negatives.
    pub specificity: Option<f64>,
}

impl From<ConfusionCounts> for RateSummary {
    fn from(c: ConfusionCounts) -> Self {
        Self {
            true_positives: c.true_positives,
            false_negatives: c.false_negatives,
            true_negatives: c.true_negatives,
            false_positives: c.false_positives,
            sensitivity: c.sensitivity(),
            specificity: c.specificity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionSummary {
    pub population: usize,
    pub supply: RateSummary,
    pub performance: RateSummary,
    pub pooled: RateSummary,
}

impl From<(usize, DetectionQuality)> for DetectionSummary {
    fn from((population, q): (usize, DetectionQuality)) -> Self {
        Self { population, supply: q.supply.into(), performance: q.performance.into(), pooled: q.pooled.into() }
    }
}

/// Scores a report against ground truth. Every reported id must be a known
/// substation in the ground truth.
pub fn evaluate_report(report: &Report, truth: &GroundTruth) -> Result<DetectionSummary> {
    let known: BTreeSet<&str> = truth.substations.iter().map(|s| s.id.as_str()).collect();
    let mut offenders: BTreeSet<&str> = report
        .population
        .iter()
        .map(String::as_str)
        .chain(report.supply_anomalies.iter().map(|e| e.id.as_str()))
        .chain(report.performance.iter().map(|e| e.id.as_str()))
        .filter(|id| !known.contains(id))
        .collect();
    if !offenders.is_empty() {
        let list: Vec<&str> = std::mem::take(&mut offenders).into_iter().collect();
        return Err(Error::Data(format!(
            "{} report id(s) missing from the ground truth: {}",
            list.len(),
            list.join(", ")
        )));
    }
    evaluate_sets(&report.supply_ids(), &report.performance_ids(), truth, &report.population)
}

pub fn evaluate_sets(
    supply: &BTreeSet<String>,
    performance: &BTreeSet<String>,
    truth: &GroundTruth,
    population: &[String],
) -> Result<DetectionSummary> {
    let q = detection_quality(supply, performance, &truth.supply_set(), &truth.performance_set(), population)?;
    Ok((population.len(), q).into())
}

/// Clustering quality for a labeling, with `distance` naming the matrix
/// used (the metrics accept any dissimilarity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualitySummary {
    pub method: String,
    pub distance: String,
    pub k: usize,
    pub mean_mst_distance: f64,
    pub mean_variance: f64,
    pub clusters: Vec<ClusterRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRow {
    pub cluster: usize,
    pub size: usize,
    pub mean_mst_distance: f64,
    pub variance: f64,
}

pub fn quality_summary(
    method: &str,
    distance: &str,
    assignment: &ClusterAssignment,
    dist: &DistanceMatrix,
) -> Result<QualitySummary> {
    let q: ClusterQuality = cluster_quality(assignment, dist)?;
    Ok(QualitySummary {
        method: method.to_string(),
        distance: distance.to_string(),
        k: assignment.n_clusters(),
        mean_mst_distance: q.mean_mst_distance,
        mean_variance: q.mean_variance,
        clusters: q
            .clusters
            .iter()
            .map(|c| ClusterRow {
                cluster: c.cluster,
                size: c.size,
                mean_mst_distance: c.mean_mst_distance,
                variance: c.variance,
            })
            .collect(),
    })
}

/// Uniformly random labels with exactly `k` nonempty clusters: each cluster
/// gets one seed member and the rest are assigned uniformly.
pub fn random_assignment(ids: &[String], k: usize, seed: u64, singleton_threshold: usize) -> Result<ClusterAssignment> {
    if k == 0 || k > ids.len() {
        return Err(Error::Usage(format!("cannot split {} substations into {k} clusters", ids.len())));
    }
    let order = shedad_core::rng::sample_indices(ids.len(), ids.len(), seed).expect("full permutation");
    let mut rng = SplitMix64::new(seed.rotate_left(17) ^ 0xA5A5);
    let mut labels = vec![0usize; ids.len()];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = if rank < k { rank } else { rng.below(k as u64) as usize };
    }
    Ok(ClusterAssignment::from_labels(ids.to_vec(), &labels, singleton_threshold)?)
}

/// Long-format rows `(method, k, metric, value)` for plotting.
pub fn long_rows(summaries: &[QualitySummary]) -> Vec<(String, usize, &'static str, f64)> {
    summaries
        .iter()
        .flat_map(|s| {
            [
                (s.method.clone(), s.k, "mean_mst_distance", s.mean_mst_distance),
                (s.method.clone(), s.k, "mean_variance", s.mean_variance),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SubstationTruth;

    fn truth(n: usize, supply: &[usize], perf: &[usize]) -> GroundTruth {
        let id = |i: &usize| format!("S{i:04}");
        GroundTruth {
            substations: (0..n).map(|i| SubstationTruth { id: id(&i), x: 0.0, y: 0.0, branch: 0 }).collect(),
            supply_anomalies: supply.iter().map(id).collect(),
            performance_anomalies: perf.iter().map(id).collect(),
            faults: Vec::new(),
        }
    }

    fn ids(v: &[usize]) -> BTreeSet<String> {
        v.iter().map(|i| format!("S{i:04}")).collect()
    }

    #[test]
    fn exact_prediction_scores_one() {
        let t = truth(10, &[1, 2], &[5]);
        let pop: Vec<String> = (0..10).map(|i| format!("S{i:04}")).collect();
        let s = evaluate_sets(&ids(&[1, 2]), &ids(&[5]), &t, &pop).unwrap();
        assert_eq!(s.pooled.sensitivity, Some(1.0));
        assert_eq!(s.pooled.specificity, Some(1.0));
        let empty = evaluate_sets(&BTreeSet::new(), &BTreeSet::new(), &t, &pop).unwrap();
        assert_eq!(empty.pooled.sensitivity, Some(0.0));
        let none = evaluate_sets(&BTreeSet::new(), &BTreeSet::new(), &truth(10, &[], &[]), &pop).unwrap();
        assert_eq!(none.pooled.sensitivity, None);
        assert_eq!(none.pooled.specificity, Some(1.0));
    }

    #[test]
    fn random_labels_cover_k() {
        let names: Vec<String> = (0..50).map(|i| format!("s{i}")).collect();
        for k in [1, 7, 30, 50] {
            let a = random_assignment(&names, k, 3, 1).unwrap();
            assert_eq!(a.n_clusters(), k);
        }
        assert_eq!(random_assignment(&names, 9, 4, 1).unwrap(), random_assignment(&names, 9, 4, 1).unwrap());
        assert!(random_assignment(&names, 51, 1, 1).is_err());
    }
}
