//! Minimum spanning trees over a cluster's distance submatrix (Kruskal).

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Edge, NeighborGraph};
use crate::matrix::DistanceMatrix;

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: alloc::vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Minimum spanning tree of the cluster whose members are given as indices
/// into `dist`. The tree's node `k` is `members[k]`.
///
/// Edges are considered in `(weight, id_a, id_b)` order with `id_a < id_b`,
/// so the tree does not depend on member order.
pub fn cluster_mst(members: &[usize], dist: &DistanceMatrix) -> Result<NeighborGraph> {
    if members.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let ids: Vec<String> = members.iter().map(|&m| dist.ids()[m].clone()).collect();
    let m = members.len();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for a in 0..m {
        for b in a + 1..m {
            let (x, y) = if ids[a] <= ids[b] { (a, b) } else { (b, a) };
            candidates.push((dist.get(members[a], members[b]), x, y));
        }
    }
    candidates.sort_by(|p, q| {
        p.0.total_cmp(&q.0)
            .then_with(|| ids[p.1].cmp(&ids[q.1]))
            .then_with(|| ids[p.2].cmp(&ids[q.2]))
    });
    let mut sets = DisjointSets::new(m);
    let mut edges = Vec::with_capacity(m - 1);
    for (weight, a, b) in candidates {
        if sets.union(a, b) {
            edges.push(Edge { a, b, weight, fallback: false });
            if edges.len() == m - 1 {
                break;
            }
        }
    }
    NeighborGraph::from_edges(ids, edges)
}

/// Cluster members by id, resolved against `dist`.
pub fn cluster_mst_by_id(ids: &[&str], dist: &DistanceMatrix) -> Result<NeighborGraph> {
    let members = ids.iter().map(|id| dist.require_index(id)).collect::<Result<Vec<_>>>()?;
    cluster_mst(&members, dist)
}
