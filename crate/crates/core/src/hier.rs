//! Ward agglomerative clustering over SNN-derived dissimilarities.
//!
//! Merge costs follow the Lance-Williams recurrence on squared
//! dissimilarities,
//!
//! ```text
//! d2(k, i+j) = ((n_i + n_k) d2(k, i) + (n_j + n_k) d2(k, j) - n_k d2(i, j)) / (n_i + n_j + n_k)
//! ```
//!
//! and merge heights are `sqrt(d2)`, so two leaves at dissimilarity `d` merge
//! at height `d`. Equal costs are broken by the lexicographically smallest
//! pair of cluster representatives, where a representative is the smallest
//! member id.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, SimilarityMatrix};

/// `d = 1 / (1 + S)`; zero similarity maps to the maximal dissimilarity 1.
pub fn similarity_to_dissimilarity(s: &SimilarityMatrix) -> DistanceMatrix {
    s.map_off_diagonal(|v| 1.0 / (1.0 + v))
        .expect("1 / (1 + s) is finite and positive for s >= 0")
}

/// One agglomeration step. `left` and `right` are node indices: leaves are
/// `0..n`, and the cluster formed by step `t` is node `n + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: Vec<String>,
    steps: Vec<MergeStep>,
}

impl Dendrogram {
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn steps(&self) -> &[MergeStep] {
        &self.steps
    }

    /// Leaf indices under `node`, ascending.
    pub fn members(&self, node: usize) -> Vec<usize> {
        let n = self.leaves.len();
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < n {
                out.push(x);
            } else {
                let s = &self.steps[x - n];
                stack.push(s.left);
                stack.push(s.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Member ids under `node`, sorted.
    pub fn member_ids(&self, node: usize) -> Vec<String> {
        let mut ids: Vec<String> = self.members(node).into_iter().map(|i| self.leaves[i].clone()).collect();
        ids.sort();
        ids
    }
}

struct Slot {
    node: usize,
    size: usize,
    rep: usize,
}

/// Agglomerative clustering with Ward linkage. `O(n^3)` time, `O(n^2)` memory.
pub fn ward_agglomerative(d: &DistanceMatrix) -> Dendrogram {
    let n = d.len();
    let ids = d.ids();
    let mut d2: Vec<f64> = d.values().iter().map(|v| v * v).collect();
    let mut slots: Vec<Option<Slot>> = (0..n).map(|i| Some(Slot { node: i, size: 1, rep: i })).collect();
    let mut steps = Vec::with_capacity(n.saturating_sub(1));

    let rep_key = |a: usize, b: usize| -> (&str, &str) {
        let (x, y) = (ids[a].as_str(), ids[b].as_str());
        if x <= y { (x, y) } else { (y, x) }
    };

    for t in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            let Some(si) = &slots[i] else { continue };
            for j in i + 1..n {
                let Some(sj) = &slots[j] else { continue };
                let cost = d2[i * n + j];
                let better = match best {
                    None => true,
                    Some((bi, bj, bc)) => {
                        cost < bc
                            || (cost == bc && {
                                let (ri, rj) = (slots[bi].as_ref().unwrap().rep, slots[bj].as_ref().unwrap().rep);
                                rep_key(si.rep, sj.rep) < rep_key(ri, rj)
                            })
                    }
                };
                if better {
                    best = Some((i, j, cost));
                }
            }
        }
        let (i, j, cost) = best.expect("at least two active clusters");
        let a = slots[i].take().unwrap();
        let b = slots[j].take().unwrap();
        let (ni, nj) = (a.size as f64, b.size as f64);
        for k in 0..n {
            let Some(sk) = &slots[k] else { continue };
            let nk = sk.size as f64;
            let v = ((ni + nk) * d2[k * n + i] + (nj + nk) * d2[k * n + j] - nk * cost) / (ni + nj + nk);
            d2[k * n + i] = v;
            d2[i * n + k] = v;
        }
        let (left, right) = if ids[a.rep] <= ids[b.rep] { (a.node, b.node) } else { (b.node, a.node) };
        let rep = if ids[a.rep] <= ids[b.rep] { a.rep } else { b.rep };
        steps.push(MergeStep { left, right, height: libm::sqrt(cost.max(0.0)), size: a.size + b.size });
        slots[i] = Some(Slot { node: n + t, size: a.size + b.size, rep });
    }

    Dendrogram { leaves: ids.to_vec(), steps }
}

/// Flat clustering with contiguous labels and singleton flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    ids: Vec<String>,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    singleton: Vec<bool>,
}

impl ClusterAssignment {
    /// Relabels an arbitrary labeling so that clusters are numbered from 0 in
    /// order of their smallest member id, and flags clusters with at most
    /// `singleton_threshold` members.
    pub fn from_labels<L: Ord + Clone>(ids: Vec<String>, labels: &[L], singleton_threshold: usize) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::LengthMismatch { left: ids.len(), right: labels.len() });
        }
        let mut seen = alloc::collections::BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        // smallest member id per original label
        let mut first: alloc::collections::BTreeMap<L, &str> = alloc::collections::BTreeMap::new();
        for (id, l) in ids.iter().zip(labels) {
            first
                .entry(l.clone())
                .and_modify(|m| {
                    if id.as_str() < *m {
                        *m = id.as_str()
                    }
                })
                .or_insert(id.as_str());
        }
        let mut order: Vec<(&str, L)> = first.into_iter().map(|(l, m)| (m, l)).collect();
        order.sort_by(|x, y| x.0.cmp(y.0));
        let remap: alloc::collections::BTreeMap<L, usize> =
            order.into_iter().enumerate().map(|(new, (_, old))| (old, new)).collect();
        let new_labels: Vec<usize> = labels.iter().map(|l| remap[l]).collect();
        let mut sizes = vec![0; remap.len()];
        for &l in &new_labels {
            sizes[l] += 1;
        }
        let singleton = sizes.iter().map(|&s| s <= singleton_threshold).collect();
        Ok(Self { ids, labels: new_labels, sizes, singleton })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn is_singleton(&self, cluster: usize) -> bool {
        self.singleton[cluster]
    }

    pub fn singleton_flags(&self) -> &[bool] {
        &self.singleton
    }

    pub fn label_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id).map(|i| self.labels[i])
    }

    /// Positions (into `ids()`) of the members of `cluster`.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l == cluster).map(|(i, _)| i).collect()
    }

    pub fn member_ids(&self, cluster: usize) -> Vec<&str> {
        self.members(cluster).into_iter().map(|i| self.ids[i].as_str()).collect()
    }
}

/// Undoes the last merges until exactly `n_clusters` clusters remain.
pub fn cut(dendrogram: &Dendrogram, n_clusters: usize, singleton_threshold: usize) -> Result<ClusterAssignment> {
    let n = dendrogram.leaves.len();
    if n_clusters < 1 || n_clusters > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "n_clusters must lie in [1, {n}], got {n_clusters}"
        )));
    }
    // node -> root label by replaying merges with a parent table
    let mut parent: Vec<usize> = (0..n + dendrogram.steps.len()).collect();
    for (t, s) in dendrogram.steps.iter().take(n - n_clusters).enumerate() {
        parent[s.left] = n + t;
        parent[s.right] = n + t;
    }
    let root = |mut x: usize| {
        while parent[x] != x {
            x = parent[x];
        }
        x
    };
    let labels: Vec<usize> = (0..n).map(root).collect();
    ClusterAssignment::from_labels(dendrogram.leaves.clone(), &labels, singleton_threshold)
}
