//! Sparse vectors with sorted index lists.
//!
//! Wavelet columns and dictionary atoms are supported on single tree pieces,
//! so the whole basis fits in O(N log N) nonzeros. A compressed column is a
//! pair of parallel `indices`/`values` arrays with strictly increasing
//! indices.

/// A sparse N-vector; `indices` strictly increasing, aligned with `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Build from parallel arrays. Indices must be strictly increasing and
    /// within `dim`; zero entries are kept as given.
    pub fn new(dim: usize, indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(indices.len(), values.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().map_or(true, |&i| i < dim));
        Self { dim, indices, values }
    }

    /// Constant value `c` on the given sorted support.
    pub fn constant_on(dim: usize, support: &[usize], c: f64) -> Self {
        Self::new(dim, support.to_vec(), vec![c; support.len()])
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        Self::new(dense.len(), indices, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Number of stored entries with magnitude above `threshold`.
    pub fn nnz(&self, threshold: f64) -> usize {
        self.values.iter().filter(|v| v.abs() > threshold).count()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        debug_assert_eq!(dense.len(), self.dim);
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    /// Sparse-sparse inner product by merge walk.
    pub fn dot_sparse(&self, other: &SparseVector) -> f64 {
        let mut acc = 0.0;
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// `out += scale * self`.
    pub fn axpy_into(&self, scale: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        for (i, v) in self.iter() {
            out[i] += scale * v;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    /// Scale all values in place.
    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }
}
