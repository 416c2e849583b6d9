//! Weighted shared-nearest-neighbour similarity.
//!
//! ```text
//! S(i, j) = |N(i) ∩ N(j)|^2 / sum_{k in N(i) ∩ N(j)} (w_ik + w_jk)
//! ```
//!
//! with `S(i, j) = 0` when `i` and `j` share no neighbour. Many shared
//! neighbours raise the similarity; heavy connecting edges lower it.

use alloc::vec::Vec;

use crate::graph::{Edge, NeighborGraph};
use crate::matrix::{upper_len, SimilarityMatrix};
use crate::robust::median;

/// Floor applied to a zero denominator (shared neighbours joined only by
/// zero-weight edges).
pub const DENOMINATOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SnnSimilarity {
    pub similarity: SimilarityMatrix,
    /// Pairs whose denominator was floored at [`DENOMINATOR_FLOOR`].
    pub floored_pairs: usize,
}

pub fn snn_similarity(g: &NeighborGraph) -> SnnSimilarity {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut upper = Vec::with_capacity(upper_len(n));
    let mut floored_pairs = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (shared, denom) = shared_neighbours(&adj[i], &adj[j], i, j);
            let s = if shared == 0 {
                0.0
            } else {
                let denom = if denom > 0.0 {
                    denom
                } else {
                    floored_pairs += 1;
                    DENOMINATOR_FLOOR
                };
                (shared * shared) as f64 / denom
            };
            upper.push(s);
        }
    }
    let similarity = SimilarityMatrix::from_upper_triangle(g.ids().to_vec(), upper)
        .expect("similarities are finite and nonnegative");
    SnnSimilarity { similarity, floored_pairs }
}

/// Copy of `g` with every weight divided by the median edge weight, which
/// makes the similarity independent of the distance unit. Edgeless graphs
/// and graphs with a zero median are returned unchanged.
pub fn median_normalized(g: &NeighborGraph) -> NeighborGraph {
    let weights: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
    let m = median(&weights);
    if !(m > 0.0) {
        return g.clone();
    }
    let edges = g.edges().iter().map(|e| Edge { weight: e.weight / m, ..*e });
    NeighborGraph::from_edges(g.ids().to_vec(), edges).expect("scaling keeps weights finite and nonnegative")
}

/// Count and weight sum over the intersection of two sorted adjacency lists.
fn shared_neighbours(a: &[(usize, f64)], b: &[(usize, f64)], i: usize, j: usize) -> (usize, f64) {
    let (mut x, mut y) = (0, 0);
    let mut count = 0;
    let mut sum = 0.0;
    while x < a.len() && y < b.len() {
        let (ka, wa) = a[x];
        let (kb, wb) = b[y];
        match ka.cmp(&kb) {
            core::cmp::Ordering::Less => x += 1,
            core::cmp::Ordering::Greater => y += 1,
            core::cmp::Ordering::Equal => {
                if ka != i && ka != j {
                    count += 1;
                    sum += wa + wb;
                }
                x += 1;
                y += 1;
            }
        }
    }
    (count, sum)
}
