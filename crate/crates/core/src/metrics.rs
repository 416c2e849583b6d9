//! Cluster compactness (mean MST edge distance, pairwise-distance variance)
//! and detection quality (sensitivity, specificity).

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hier::ClusterAssignment;
use crate::matrix::DistanceMatrix;
use crate::mst::cluster_mst;

/// Mean edge weight of the cluster's MST over its `n - 1` edges; 0 for a
/// singleton.
pub fn mean_mst_distance(members: &[usize], dist: &DistanceMatrix) -> Result<f64> {
    if members.len() < 2 {
        return if members.is_empty() { Err(Error::TooFewValues { needed: 1, got: 0 }) } else { Ok(0.0) };
    }
    let tree = cluster_mst(members, dist)?;
    Ok(tree.total_weight() / tree.edges().len() as f64)
}

/// Population variance of all pairwise distances within the cluster; 0 for
/// clusters of fewer than three members.
pub fn intra_cluster_variance(members: &[usize], dist: &DistanceMatrix) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    if members.len() < 3 {
        return Ok(0.0);
    }
    let mut pairs = Vec::with_capacity(members.len() * (members.len() - 1) / 2);
    for (x, &i) in members.iter().enumerate() {
        for &j in &members[x + 1..] {
            pairs.push(dist.get(i, j));
        }
    }
    let mean = pairs.iter().sum::<f64>() / pairs.len() as f64;
    Ok(pairs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / pairs.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMetrics {
    pub cluster: usize,
    pub size: usize,
    pub mean_mst_distance: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterQuality {
    pub clusters: Vec<ClusterMetrics>,
    /// Mean over clusters (singletons included, contributing zeros).
    pub mean_mst_distance: f64,
    pub mean_variance: f64,
}

/// Per-cluster and aggregate compactness for any labeling whose ids are
/// present in `dist`.
pub fn cluster_quality(assignment: &ClusterAssignment, dist: &DistanceMatrix) -> Result<ClusterQuality> {
    let positions: Vec<usize> =
        assignment.ids().iter().map(|id| dist.require_index(id)).collect::<Result<_>>()?;
    let mut clusters = Vec::with_capacity(assignment.n_clusters());
    for c in 0..assignment.n_clusters() {
        let members: Vec<usize> = assignment.members(c).into_iter().map(|i| positions[i]).collect();
        clusters.push(ClusterMetrics {
            cluster: c,
            size: members.len(),
            mean_mst_distance: mean_mst_distance(&members, dist)?,
            variance: intra_cluster_variance(&members, dist)?,
        });
    }
    let k = clusters.len().max(1) as f64;
    let mean_mst_distance = clusters.iter().map(|c| c.mean_mst_distance).sum::<f64>() / k;
    let mean_variance = clusters.iter().map(|c| c.variance).sum::<f64>() / k;
    Ok(ClusterQuality { clusters, mean_mst_distance, mean_variance })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_negatives + self.true_negatives + self.false_positives
    }

    /// `TP / (TP + FN)`; `None` when there are no actual positives.
    pub fn sensitivity(&self) -> Option<f64> {
        let p = self.true_positives + self.false_negatives;
        (p > 0).then(|| self.true_positives as f64 / p as f64)
    }

    /// `TN / (TN + FP)`; `None` when there are no actual negatives.
    pub fn specificity(&self) -> Option<f64> {
        let n = self.true_negatives + self.false_positives;
        (n > 0).then(|| self.true_negatives as f64 / n as f64)
    }
}

/// Confusion counts of `predicted` against `truth` over `population`.
///
/// Every predicted id must belong to the population. Truth ids outside the
/// population are ignored: they cannot be predicted or missed.
pub fn sensitivity_specificity(
    predicted: &BTreeSet<String>,
    truth: &BTreeSet<String>,
    population: &[String],
) -> Result<ConfusionCounts> {
    let pop: BTreeSet<&str> = population.iter().map(String::as_str).collect();
    if let Some(bad) = predicted.iter().find(|id| !pop.contains(id.as_str())) {
        return Err(Error::UnknownId(bad.clone()));
    }
    let mut c = ConfusionCounts::default();
    for id in pop {
        match (predicted.contains(id), truth.contains(id)) {
            (true, true) => c.true_positives += 1,
            (false, true) => c.false_negatives += 1,
            (false, false) => c.true_negatives += 1,
            (true, false) => c.false_positives += 1,
        }
    }
    Ok(c)
}

/// Separate confusion matrices per anomaly class plus the pooled one
/// (union of predictions against union of truths).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionQuality {
    pub supply: ConfusionCounts,
    pub performance: ConfusionCounts,
    pub pooled: ConfusionCounts,
}

pub fn detection_quality(
    predicted_supply: &BTreeSet<String>,
    predicted_performance: &BTreeSet<String>,
    truth_supply: &BTreeSet<String>,
    truth_performance: &BTreeSet<String>,
    population: &[String],
) -> Result<DetectionQuality> {
    let predicted_any: BTreeSet<String> = predicted_supply.union(predicted_performance).cloned().collect();
    let truth_any: BTreeSet<String> = truth_supply.union(truth_performance).cloned().collect();
    Ok(DetectionQuality {
        supply: sensitivity_specificity(predicted_supply, truth_supply, population)?,
        performance: sensitivity_specificity(predicted_performance, truth_performance, population)?,
        pooled: sensitivity_specificity(&predicted_any, &truth_any, population)?,
    })
}
