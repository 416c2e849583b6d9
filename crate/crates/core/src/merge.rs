//! Agreement-based merge of per-day neighbour graphs.
//!
//! Each day's graph is treated as a rater voting on whether a candidate edge
//! exists. For an edge present in `m_e` of `d` graphs, with `p_e = m_e / d`
//! and the chance level `p_bar = sum(m_e) / (d * |candidates|)`, the
//! per-edge agreement is
//!
//! ```text
//! kappa_e = (p_e - p_bar) / (1 - p_bar)
//! ```
//!
//! and the edge is retained when `kappa_e >= kappa_min`. A retained edge
//! carries the mean of its weights over the graphs that contain it.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Edge, NeighborGraph};

/// "Substantial agreement" on the conventional kappa scale.
pub const DEFAULT_KAPPA_MIN: f64 = 0.6;

/// Vote tally for one candidate edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeAgreement {
    pub a: usize,
    pub b: usize,
    /// Number of graphs containing the edge.
    pub count: usize,
    pub mean_weight: f64,
    pub kappa: f64,
}

/// The merged graph together with the agreement bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedGraph {
    pub graph: NeighborGraph,
    /// Agreement score of each retained edge, aligned with `graph.edges()`.
    pub kappas: Vec<f64>,
    /// Every candidate edge with its tally, sorted by `(a, b)`.
    pub candidates: Vec<EdgeAgreement>,
    /// Chance agreement level `p_bar`.
    pub chance_agreement: f64,
    /// `p_bar == 1`: every graph contains every candidate. All candidates are
    /// retained in that case.
    pub degenerate: bool,
}

/// Agreement score for an edge seen in `count` of `graphs` graphs.
pub fn edge_kappa(count: usize, graphs: usize, chance: f64) -> f64 {
    let p = count as f64 / graphs as f64;
    (p - chance) / (1.0 - chance)
}

pub fn merge_graphs(graphs: &[NeighborGraph], kappa_min: f64) -> Result<MergedGraph> {
    if graphs.len() < 2 {
        return Err(Error::TooFewValues { needed: 2, got: graphs.len() });
    }
    if !kappa_min.is_finite() {
        return Err(Error::InvalidParameter("kappa_min must be finite".to_string()));
    }
    let ids = graphs[0].ids();
    if graphs.iter().any(|g| g.ids() != ids) {
        return Err(Error::IdSetMismatch);
    }
    let d = graphs.len();

    // (a, b) -> (count, weight sum)
    let mut tally: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
    for g in graphs {
        for e in g.edges() {
            let entry = tally.entry((e.a, e.b)).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += e.weight;
        }
    }

    let total_votes: usize = tally.values().map(|&(m, _)| m).sum();
    let chance = if tally.is_empty() {
        0.0
    } else {
        total_votes as f64 / (d * tally.len()) as f64
    };
    let degenerate = !tally.is_empty() && total_votes == d * tally.len();

    let candidates: Vec<EdgeAgreement> = tally
        .into_iter()
        .map(|((a, b), (count, sum))| EdgeAgreement {
            a,
            b,
            count,
            mean_weight: sum / count as f64,
            kappa: if degenerate { 1.0 } else { edge_kappa(count, d, chance) },
        })
        .collect();

    let retained: Vec<&EdgeAgreement> = candidates
        .iter()
        .filter(|c| degenerate || c.kappa >= kappa_min)
        .collect();
    let kappas = retained.iter().map(|c| c.kappa).collect();
    let graph = NeighborGraph::from_edges(
        ids.to_vec(),
        retained
            .iter()
            .map(|c| Edge { a: c.a, b: c.b, weight: c.mean_weight, fallback: false }),
    )?;

    Ok(MergedGraph { graph, kappas, candidates, chance_agreement: chance, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("n{i}")).collect()
    }

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> NeighborGraph {
        NeighborGraph::from_edges(
            ids(n),
            edges.iter().map(|&(a, b, w)| Edge { a, b, weight: w, fallback: false }),
        )
        .unwrap()
    }

    #[test]
    fn worked_kappa_value() {
        // d = 5, m_e = 3, p_bar = 0.5 -> (0.6 - 0.5) / 0.5 = 0.2
        assert!((edge_kappa(3, 5, 0.5) - 0.2).abs() < 1e-12);
        assert!((edge_kappa(5, 5, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unanimous_kept_rare_dropped() {
        let g1 = graph(4, &[(0, 1, 1.0), (2, 3, 5.0)]);
        let g2 = graph(4, &[(0, 1, 3.0)]);
        let g3 = graph(4, &[(0, 1, 2.0), (1, 2, 1.0)]);
        let merged = merge_graphs(&[g1, g2, g3], DEFAULT_KAPPA_MIN).unwrap();
        // votes: (0,1)=3, (1,2)=1, (2,3)=1 -> p_bar = 5 / 9
        assert!((merged.chance_agreement - 5.0 / 9.0).abs() < 1e-12);
        assert_eq!(merged.graph.edges().len(), 1);
        let e = merged.graph.edge(0, 1).unwrap();
        assert!((e.weight - 2.0).abs() < 1e-12);
        assert!((merged.kappas[0] - 1.0).abs() < 1e-12);
        assert!(merged.graph.edge(0, 2).is_none());
        assert!(!merged.degenerate);
    }

    #[test]
    fn identical_graphs_are_degenerate() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 2.0)]);
        let merged = merge_graphs(&[g.clone(), g], 0.99).unwrap();
        assert!(merged.degenerate);
        assert_eq!(merged.graph.edges().len(), 2);
    }

    #[test]
    fn input_errors() {
        let g = graph(3, &[(0, 1, 1.0)]);
        assert!(merge_graphs(&[g.clone()], 0.6).is_err());
        let other = graph(4, &[(0, 1, 1.0)]);
        assert_eq!(merge_graphs(&[g, other], 0.6), Err(Error::IdSetMismatch));
    }
}
