//! Local performance scoring inside each approximate-topology cluster.
//!
//! Every cluster with at least two members gets a minimum spanning tree over
//! full-window Euclidean supply distances. Each substation then anchors one
//! comparison group: itself plus its `k` nearest tree neighbours, ordered by
//! `(hop count, path weight, id)`. Within a group, members whose modified
//! z-score of mean ΔT falls below `-2` receive a vote. A substation's score is
//! votes divided by the number of groups it took part in.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::NeighborGraph;
use crate::hier::ClusterAssignment;
use crate::matrix::DistanceMatrix;
use crate::mst::cluster_mst_by_id;
use crate::robust::modified_z_scores;
use crate::series::SubstationSeries;

/// Single-sided flag threshold on the modified z-score (low ΔT is poor).
pub const Z_FLAG_THRESHOLD: f64 = -2.0;

/// Mean of `supply - return` over the window.
pub fn delta_t_statistic(series: &SubstationSeries) -> f64 {
    mean_delta_t(&series.supply, &series.return_temp)
}

pub fn mean_delta_t(supply: &[f64], return_temp: &[f64]) -> f64 {
    let n = supply.len().min(return_temp.len());
    if n == 0 {
        return 0.0;
    }
    supply.iter().zip(return_temp).map(|(s, r)| s - r).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonGroup {
    /// Tree node index of the anchoring substation.
    pub center: usize,
    /// Tree node indices, center first.
    pub members: Vec<usize>,
    /// Mean ΔT of each member, aligned with `members`.
    pub values: Vec<f64>,
}

/// The `k` tree nodes nearest to `center` by `(hops, path weight, id)`,
/// preceded by `center` itself.
pub fn comparison_members(tree: &NeighborGraph, center: usize, k: usize) -> Vec<usize> {
    let n = tree.node_count();
    let adj = tree.adjacency();
    let mut hops = alloc::vec![usize::MAX; n];
    let mut path = alloc::vec![0.0f64; n];
    hops[center] = 0;
    let mut queue = VecDeque::from([center]);
    while let Some(x) = queue.pop_front() {
        for &(y, w) in &adj[x] {
            if hops[y] == usize::MAX {
                hops[y] = hops[x] + 1;
                path[y] = path[x] + w;
                queue.push_back(y);
            }
        }
    }
    let ids = tree.ids();
    let mut others: Vec<usize> = (0..n).filter(|&i| i != center && hops[i] != usize::MAX).collect();
    others.sort_by(|&a, &b| {
        hops[a]
            .cmp(&hops[b])
            .then_with(|| path[a].total_cmp(&path[b]))
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    let mut members = Vec::with_capacity(k + 1);
    members.push(center);
    members.extend(others.into_iter().take(k));
    members
}

/// Per-substation vote tally from one or more clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub id: String,
    pub comparisons: usize,
    pub flags: usize,
}

/// Scores one cluster's tree. Trees with fewer than two nodes are skipped
/// and yield no tallies.
pub fn score_cluster(tree: &NeighborGraph, k: usize, stats: &BTreeMap<String, f64>) -> Result<Vec<Tally>> {
    if k < 1 {
        return Err(Error::InvalidParameter("comparison k must be at least 1".to_string()));
    }
    let n = tree.node_count();
    if n < 2 {
        return Ok(Vec::new());
    }
    let values: Vec<f64> = tree
        .ids()
        .iter()
        .map(|id| stats.get(id).copied().ok_or_else(|| Error::UnknownId(id.clone())))
        .collect::<Result<_>>()?;
    let mut comparisons = alloc::vec![0usize; n];
    let mut flags = alloc::vec![0usize; n];
    for group in comparison_groups(tree, k, &values) {
        let z = modified_z_scores(&group.values)?;
        for (&m, &score) in group.members.iter().zip(&z) {
            comparisons[m] += 1;
            if score < Z_FLAG_THRESHOLD {
                flags[m] += 1;
            }
        }
    }
    Ok(tree
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| Tally { id: id.clone(), comparisons: comparisons[i], flags: flags[i] })
        .collect())
}

/// One comparison group per tree node.
pub fn comparison_groups(tree: &NeighborGraph, k: usize, values: &[f64]) -> Vec<ComparisonGroup> {
    (0..tree.node_count())
        .map(|c| {
            let members = comparison_members(tree, c, k);
            let vals = members.iter().map(|&m| values[m]).collect();
            ComparisonGroup { center: c, members, values: vals }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstationScore {
    pub id: String,
    pub cluster: usize,
    pub supply_anomaly: bool,
    pub comparisons: usize,
    pub flags: usize,
    pub mean_delta_t: f64,
}

impl SubstationScore {
    /// `flags / comparisons`, or 0 for substations that were never compared.
    pub fn score(&self) -> f64 {
        if self.comparisons == 0 {
            0.0
        } else {
            self.flags as f64 / self.comparisons as f64
        }
    }
}

/// Per-substation outcome of anomaly detection, in assignment order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyScorecard {
    pub entries: Vec<SubstationScore>,
}

impl AnomalyScorecard {
    /// Combines per-cluster tallies. Tallies for the same id are summed, so
    /// the result does not depend on the order clusters were scored in.
    pub fn assemble<I>(assignment: &ClusterAssignment, stats: &BTreeMap<String, f64>, tallies: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tally>,
    {
        let mut merged: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for t in tallies {
            let e = merged.entry(t.id).or_insert((0, 0));
            e.0 += t.comparisons;
            e.1 += t.flags;
        }
        let entries = assignment
            .ids()
            .iter()
            .zip(assignment.labels())
            .map(|(id, &cluster)| {
                let (comparisons, flags) = merged.get(id).copied().unwrap_or((0, 0));
                let mean_delta_t = stats.get(id).copied().ok_or_else(|| Error::UnknownId(id.clone()))?;
                Ok(SubstationScore {
                    id: id.clone(),
                    cluster,
                    supply_anomaly: assignment.is_singleton(cluster),
                    comparisons,
                    flags,
                    mean_delta_t,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn supply_anomalies(&self) -> impl Iterator<Item = &SubstationScore> {
        self.entries.iter().filter(|e| e.supply_anomaly)
    }

    /// Scored substations with `score > 0` and `score >= threshold`.
    pub fn performance_anomalies(&self, threshold: f64) -> impl Iterator<Item = &SubstationScore> {
        self.entries
            .iter()
            .filter(move |e| !e.supply_anomaly && e.score() > 0.0 && e.score() >= threshold)
    }

    pub fn get(&self, id: &str) -> Option<&SubstationScore> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Mean ΔT per substation id.
pub fn delta_t_by_id(series: &[SubstationSeries]) -> BTreeMap<String, f64> {
    series.iter().map(|s| (s.id.clone(), delta_t_statistic(s))).collect()
}

/// Builds the tree for one non-singleton cluster and scores it.
pub fn score_assigned_cluster(
    assignment: &ClusterAssignment,
    cluster: usize,
    euclid: &DistanceMatrix,
    k: usize,
    stats: &BTreeMap<String, f64>,
) -> Result<Vec<Tally>> {
    if assignment.is_singleton(cluster) {
        return Ok(Vec::new());
    }
    let ids = assignment.member_ids(cluster);
    if ids.len() < 2 {
        return Ok(Vec::new());
    }
    let tree = cluster_mst_by_id(&ids, euclid)?;
    score_cluster(&tree, k, stats)
}

/// Supply-anomaly flags from singleton clusters and performance scores for
/// every other cluster.
pub fn detect(
    assignment: &ClusterAssignment,
    series: &[SubstationSeries],
    euclid: &DistanceMatrix,
    k: usize,
) -> Result<AnomalyScorecard> {
    let stats = delta_t_by_id(series);
    let mut tallies = Vec::new();
    for cluster in 0..assignment.n_clusters() {
        tallies.extend(score_assigned_cluster(assignment, cluster, euclid, k, &stats)?);
    }
    AnomalyScorecard::assemble(assignment, &stats, tallies)
}
