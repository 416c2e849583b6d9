//! Banded dynamic time warping and Euclidean distances between profiles.
//!
//! Local cost is `|a_i - b_j|`; steps are `(1,0)`, `(0,1)` and `(1,1)` with
//! unit weights; the Sakoe-Chiba band admits cells with `|i - j| <= radius`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

/// One hour at five-minute sampling.
pub const DEFAULT_BAND_RADIUS: usize = 12;

/// Minimal cumulative absolute-difference cost over monotone alignments that
/// stay within `band_radius` of the diagonal.
///
/// Uses two rolling rows of width `2 * radius + 1`, so memory is
/// `O(radius)` and time `O(n * radius)`. A radius of zero is the L1 distance.
pub fn dtw_distance(a: &[f64], b: &[f64], band_radius: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let r = band_radius.min(n - 1);
    if r == 0 {
        return Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum());
    }
    let width = 2 * r + 1;
    // Row i stores column j at slot j + r - i.
    let mut prev = vec![f64::INFINITY; width];
    let mut cur = vec![f64::INFINITY; width];
    for i in 0..n {
        cur.fill(f64::INFINITY);
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        let ai = a[i];
        for j in lo..=hi {
            let slot = j + r - i;
            let cost = (ai - b[j]).abs();
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut m = f64::INFINITY;
                if i > 0 {
                    m = prev[slot];
                    if slot + 1 < width {
                        m = m.min(prev[slot + 1]);
                    }
                }
                if slot > 0 {
                    m = m.min(cur[slot - 1]);
                }
                m
            };
            cur[slot] = cost + best;
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[r])
}

/// L2 norm of the elementwise difference.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(libm::sqrt(sum))
}

/// Pairwise banded DTW over equal-length profiles.
pub fn dtw_matrix(ids: Vec<String>, profiles: &[&[f64]], band_radius: usize) -> Result<DistanceMatrix> {
    if ids.len() != profiles.len() {
        return Err(Error::LengthMismatch { left: ids.len(), right: profiles.len() });
    }
    DistanceMatrix::from_fn(ids, |i, j| dtw_distance(profiles[i], profiles[j], band_radius))
}

/// Pairwise Euclidean distances over equal-length vectors.
pub fn euclidean_matrix(ids: Vec<String>, vectors: &[&[f64]]) -> Result<DistanceMatrix> {
    if ids.len() != vectors.len() {
        return Err(Error::LengthMismatch { left: ids.len(), right: vectors.len() });
    }
    DistanceMatrix::from_fn(ids, |i, j| euclidean_distance(vectors[i], vectors[j]))
}
