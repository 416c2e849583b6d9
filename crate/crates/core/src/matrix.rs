//! Symmetric, id-indexed square matrices.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A symmetric `n x n` matrix of finite nonnegative values with a zero
/// diagonal, indexed by substation id.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    values: Vec<f64>,
}

/// Pairwise dissimilarities (DTW, Euclidean, or transformed similarities).
pub type DistanceMatrix = SymmetricMatrix;

/// Pairwise similarities produced by the shared-nearest-neighbour step.
pub type SimilarityMatrix = SymmetricMatrix;

fn build_index(ids: &[String]) -> Result<BTreeMap<String, usize>> {
    let mut index = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}

fn check_entry(row: usize, col: usize, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEntry { row, col, value })
    }
}

/// Number of strictly-upper-triangular cells of an `n x n` matrix.
pub const fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl SymmetricMatrix {
    /// Builds a matrix by evaluating `f(i, j)` once for every `i < j`.
    pub fn from_fn<F>(ids: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<f64>,
    {
        let n = ids.len();
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j)?);
            }
        }
        Self::from_upper_triangle(ids, upper)
    }

    /// Builds a matrix from its strictly upper triangle in row-major order
    /// (`(0,1), (0,2), ..., (1,2), ...`).
    pub fn from_upper_triangle(ids: Vec<String>, upper: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if upper.len() != upper_len(n) {
            return Err(Error::LengthMismatch { left: upper_len(n), right: upper.len() });
        }
        let index = build_index(&ids)?;
        let mut values = alloc::vec![0.0; n * n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap_or_default();
                check_entry(i, j, v)?;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self { ids, index, values })
    }

    /// Builds a matrix from a full row-major value array, validating symmetry,
    /// the zero diagonal, and finiteness.
    pub fn from_rows(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::NotSquare { expected: n, got: values.len() });
        }
        let index = build_index(&ids)?;
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::NonZeroDiagonal { index: i });
            }
            for j in i + 1..n {
                let v = values[i * n + j];
                check_entry(i, j, v)?;
                if v != values[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { ids, index, values })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require_index(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Row-major values, `n * n` long.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Strictly upper-triangular values in row-major order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            out.extend_from_slice(&self.row(i)[i + 1..]);
        }
        out
    }

    /// The principal submatrix for the given row/column indices, in that order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let ids: Vec<String> = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let m = indices.len();
        let mut values = alloc::vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                values[a * m + b] = self.get(i, j);
            }
        }
        let index = build_index(&ids).expect("source ids are unique");
        Self { ids, index, values }
    }

    /// Returns a copy with every entry transformed by `f`, keeping a zero
    /// diagonal.
    pub fn map_off_diagonal<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        let n = self.len();
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(self.get(i, j)));
            }
        }
        Self::from_upper_triangle(self.ids.clone(), upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("s{i}")).collect()
    }

    #[test]
    fn upper_triangle_round_trip() {
        let m = SymmetricMatrix::from_upper_triangle(ids(3), vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(2, 0), 2.0);
        assert_eq!(m.get(2, 1), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.upper_triangle(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            SymmetricMatrix::from_upper_triangle(ids(3), vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::from_upper_triangle(ids(2), vec![f64::NAN]),
            Err(Error::InvalidEntry { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::from_rows(ids(2), vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            SymmetricMatrix::from_rows(ids(2), vec![1.0, 1.0, 1.0, 0.0]),
            Err(Error::NonZeroDiagonal { .. })
        ));
        let dup = vec![String::from("a"), String::from("a")];
        assert!(matches!(
            SymmetricMatrix::from_upper_triangle(dup, vec![1.0]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn submatrix_keeps_ids() {
        let m = SymmetricMatrix::from_upper_triangle(ids(3), vec![1.0, 2.0, 3.0]).unwrap();
        let s = m.submatrix(&[2, 0]);
        assert_eq!(s.ids(), &["s2".to_string(), "s0".to_string()]);
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.index_of("s0"), Some(1));
    }
}
