//! Dense vector helpers and a minimal compressed-sparse-column matrix.

/// Sparse matrix in compressed-sparse-column form. Row indices are strictly
/// increasing within each column and duplicate entries have been summed.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CscMatrix { nrows, ncols, col_ptr: vec![0; ncols + 1], row_idx: Vec::new(), values: Vec::new() }
    }

    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].1, triplets[k].0));
        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (i, j, v) = triplets[k];
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) outside {nrows}x{ncols}");
            if last == Some((j, i)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(i);
                values.push(v);
                last = Some((j, i));
            }
            col_ptr[j + 1] = row_idx.len();
        }
        // forward-fill pointers of empty columns
        for j in 0..ncols {
            if col_ptr[j + 1] < col_ptr[j] {
                col_ptr[j + 1] = col_ptr[j];
            }
        }
        CscMatrix { nrows, ncols, col_ptr, row_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Entries of column `j` as (row, value) pairs.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn to_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                out.push((i, j, v));
            }
        }
        out
    }

    /// y += A x
    pub fn gemv(&self, y: &mut [f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.nrows);
        debug_assert_eq!(x.len(), self.ncols);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj != 0.0 {
                for (i, v) in self.col(j) {
                    y[i] += v * xj;
                }
            }
        }
    }

    /// y += Aᵀ x
    pub fn gemv_t(&self, y: &mut [f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.ncols);
        debug_assert_eq!(x.len(), self.nrows);
        for j in 0..self.ncols {
            let mut acc = 0.0;
            for (i, v) in self.col(j) {
                acc += v * x[i];
            }
            y[j] += acc;
        }
    }

    pub fn transpose(&self) -> CscMatrix {
        let mut count = vec![0usize; self.nrows + 1];
        for &i in &self.row_idx {
            count[i + 1] += 1;
        }
        for i in 0..self.nrows {
            count[i + 1] += count[i];
        }
        let col_ptr = count;
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = col_ptr.clone();
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                let slot = next[i];
                next[i] += 1;
                row_idx[slot] = j;
                values[slot] = v;
            }
        }
        CscMatrix { nrows: self.ncols, ncols: self.nrows, col_ptr, row_idx, values }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// y += a * x
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(v: &mut [f64], a: f64) {
    for x in v.iter_mut() {
        *x *= a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = CscMatrix::from_triplets(3, 2, &[(2, 1, 1.0), (0, 0, 2.0), (2, 1, 0.5), (1, 0, -1.0)]);
        assert_eq!(m.to_triplets(), vec![(0, 0, 2.0), (1, 0, -1.0), (2, 1, 1.5)]);
    }

    #[test]
    fn gemv_matches_dense() {
        let m = CscMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (1, 0, 4.0), (0, 2, -2.0)]);
        let mut y = vec![0.0; 2];
        m.gemv(&mut y, &[1.0, 5.0, 3.0]);
        assert_eq!(y, vec![1.0 - 6.0, 4.0]);
        let mut yt = vec![0.0; 3];
        m.gemv_t(&mut yt, &[1.0, 2.0]);
        assert_eq!(yt, vec![9.0, 0.0, -2.0]);
    }

    #[test]
    fn transpose_round_trip() {
        let m = CscMatrix::from_triplets(4, 3, &[(0, 0, 1.0), (3, 1, 2.0), (2, 2, 3.0), (1, 2, 4.0)]);
        assert_eq!(m.transpose().transpose(), m);
    }
}
