use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Undirected weighted edge between node indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    /// Set when the edge exists only to keep a node from being isolated.
    pub fallback: bool,
}

/// Weighted undirected graph over substations: no self-loops, no duplicate
/// edges, finite weights. Edges are kept sorted by `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    ids: Vec<String>,
    edges: Vec<Edge>,
}

impl NeighborGraph {
    pub fn from_edges(ids: Vec<String>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let n = ids.len();
        let mut out: Vec<Edge> = Vec::new();
        for mut e in edges {
            if e.a > e.b {
                core::mem::swap(&mut e.a, &mut e.b);
            }
            if e.a == e.b {
                return Err(Error::InvalidEdge { a: e.a, b: e.b, reason: "self-loop" });
            }
            if e.b >= n {
                return Err(Error::InvalidEdge { a: e.a, b: e.b, reason: "node out of range" });
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::InvalidEdge { a: e.a, b: e.b, reason: "weight not finite and nonnegative" });
            }
            out.push(e);
        }
        out.sort_by_key(|e| (e.a, e.b));
        if let Some(w) = out.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::InvalidEdge { a: w[0].a, b: w[0].b, reason: "duplicate edge" });
        }
        Ok(Self { ids, edges: out })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&key, |e| (e.a, e.b))
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Adjacency lists of `(neighbour, weight)`, sorted by neighbour index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = alloc::vec![Vec::new(); self.ids.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0; self.ids.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("n{i}")).collect()
    }

    fn e(a: usize, b: usize, w: f64) -> Edge {
        Edge { a, b, weight: w, fallback: false }
    }

    #[test]
    fn normalises_and_sorts() {
        let g = NeighborGraph::from_edges(ids(3), vec![e(2, 1, 1.0), e(0, 2, 2.0)]).unwrap();
        assert_eq!(g.edges()[0].a, 0);
        assert_eq!(g.edges()[1].a, 1);
        assert_eq!(g.edge(2, 1).unwrap().weight, 1.0);
        assert!(g.edge(0, 1).is_none());
        assert_eq!(g.degrees(), vec![1, 1, 2]);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(NeighborGraph::from_edges(ids(3), vec![e(1, 1, 1.0)]).is_err());
        assert!(NeighborGraph::from_edges(ids(3), vec![e(0, 3, 1.0)]).is_err());
        assert!(NeighborGraph::from_edges(ids(3), vec![e(0, 1, f64::INFINITY)]).is_err());
        assert!(NeighborGraph::from_edges(ids(3), vec![e(0, 1, 1.0), e(1, 0, 2.0)]).is_err());
    }
}
