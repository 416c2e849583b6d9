//! Per-day adaptive k-nearest-neighbour graphs.
//!
//! Each node `i` gets its own neighbour budget `k_i = k_b + dk_i`, where
//! `low_i` and `high_i` count the distances below `theta_min` and above
//! `theta_max`:
//!
//! ```text
//! dk_i =  (low_i  / k_b - 1) * k_b / 2    if low_i  >= k_b
//! dk_i = -(high_i / k_b - 1) * k_b / 2    else if high_i >= k_b
//! dk_i =  0                               otherwise
//! ```
//!
//! Well-connected nodes get more neighbours and outlying nodes fewer. Only
//! distances `<= theta_max` are eligible, but every node keeps at least its
//! nearest neighbour (a flagged fallback edge).

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Edge, NeighborGraph};
use crate::matrix::DistanceMatrix;
use crate::robust::quantile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveKnnParams {
    /// Base neighbour count.
    pub k_b: usize,
    /// Low-weight threshold; a quantile in `[0, 1]` when
    /// `thresholds_as_quantiles` is set, otherwise an absolute distance.
    pub theta_min: f64,
    /// High-weight threshold, same units as `theta_min`.
    pub theta_max: f64,
    pub thresholds_as_quantiles: bool,
}

impl Default for AdaptiveKnnParams {
    fn default() -> Self {
        Self { k_b: 10, theta_min: 0.1, theta_max: 0.9, thresholds_as_quantiles: true }
    }
}

impl AdaptiveKnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_b < 1 {
            return Err(Error::InvalidParameter("k_b must be at least 1".to_string()));
        }
        if !(self.theta_min < self.theta_max) {
            return Err(Error::InvalidParameter("theta_min must be below theta_max".to_string()));
        }
        if self.thresholds_as_quantiles && (self.theta_min < 0.0 || self.theta_max > 1.0) {
            return Err(Error::InvalidParameter("threshold quantiles must lie in [0, 1]".to_string()));
        }
        Ok(())
    }

    /// Absolute `(theta_min, theta_max)` for this matrix.
    pub fn resolve_thresholds(&self, matrix: &DistanceMatrix) -> (f64, f64) {
        if self.thresholds_as_quantiles {
            let upper = matrix.upper_triangle();
            (quantile(&upper, self.theta_min), quantile(&upper, self.theta_max))
        } else {
            (self.theta_min, self.theta_max)
        }
    }
}

/// Neighbour-budget adjustment `dk_i`. The low branch takes precedence when
/// both counts reach `k_b`.
pub fn delta_k(low: usize, high: usize, k_b: usize) -> f64 {
    // (c / k_b - 1) * k_b / 2 == (c - k_b) / 2, which is exact in floating point.
    if low >= k_b {
        (low - k_b) as f64 / 2.0
    } else if high >= k_b {
        -((high - k_b) as f64) / 2.0
    } else {
        0.0
    }
}

/// `k_i = clamp(round_half_even(k_b + dk_i), 1, n - 1)`.
pub fn neighbor_budget(low: usize, high: usize, k_b: usize, n: usize) -> usize {
    let raw = libm::rint(k_b as f64 + delta_k(low, high, k_b));
    let upper = n.saturating_sub(1).max(1) as f64;
    raw.clamp(1.0, upper) as usize
}

/// Builds the adaptive k-NN graph for one distance matrix.
pub fn adaptive_knn(matrix: &DistanceMatrix, params: &AdaptiveKnnParams) -> Result<NeighborGraph> {
    params.validate()?;
    let n = matrix.len();
    if params.k_b >= n {
        return Err(Error::InvalidParameter(alloc::format!(
            "k_b = {} needs at least {} nodes, got {n}",
            params.k_b,
            params.k_b + 1
        )));
    }
    let (theta_min, theta_max) = params.resolve_thresholds(matrix);
    let ids = matrix.ids();

    // (a, b) -> (weight, fallback-only)
    let mut selected: BTreeMap<(usize, usize), (f64, bool)> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let row = matrix.row(i);
        let low = (0..n).filter(|&j| j != i && row[j] < theta_min).count();
        let high = (0..n).filter(|&j| j != i && row[j] > theta_max).count();
        let k_i = neighbor_budget(low, high, params.k_b, n);

        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&x, &y| row[x].total_cmp(&row[y]).then_with(|| ids[x].cmp(&ids[y])));

        let mut picked = 0;
        for &j in order.iter().take_while(|&&j| row[j] <= theta_max) {
            if picked == k_i {
                break;
            }
            let key = if i < j { (i, j) } else { (j, i) };
            selected.entry(key).and_modify(|v| v.1 = false).or_insert((row[j], false));
            picked += 1;
        }
        if picked == 0 {
            let j = order[0];
            let key = if i < j { (i, j) } else { (j, i) };
            selected.entry(key).or_insert((row[j], true));
        }
    }

    let edges = selected
        .into_iter()
        .map(|((a, b), (weight, fallback))| Edge { a, b, weight, fallback });
    NeighborGraph::from_edges(ids.to_vec(), edges)
}
