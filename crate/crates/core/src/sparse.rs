//! Compressed sparse row matrices.
//!
//! Every consumer in this crate streams rows (power iteration, resolvent
//! solves, frontier expansion), so CSR with sorted column indices per row is
//! the only layout provided.

/// Square sparse matrix in CSR form with `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Triplets may arrive in any
    /// order; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut current_row = 0u32;
        for (r, c, v) in triplets {
            debug_assert!((r as usize) < dim && (c as usize) < dim);
            while current_row < r {
                row_ptr.push(col_idx.len());
                current_row += 1;
            }
            if col_idx.len() > *row_ptr.last().unwrap() && *col_idx.last().unwrap() == c {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
            }
        }
        while row_ptr.len() <= dim {
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zero(dim: usize) -> Self {
        CsrMatrix::from_triplets(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Sorted (column, value) pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&(c as u32)) {
            Ok(i) => self.values[lo + i],
            Err(_) => 0.0,
        }
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        self.row(r).map(|(_, v)| v).sum()
    }

    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row_sum(r))
            .fold(0.0, f64::max)
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_round_trip_sorted_and_summed() {
        let m = CsrMatrix::from_triplets(3, vec![(2, 1, 1.0), (0, 2, 0.5), (2, 1, 2.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(2, 1), 3.0);
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.get(1, 1), 0.0);
        let all: Vec<_> = m.triplets().collect();
        assert_eq!(all, vec![(0, 2, 0.5), (2, 1, 3.0)]);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 0, 2.0), (0, 2, 1.0), (1, 0, -1.0)]);
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        m.matvec(&x, &mut y);
        assert_eq!(y, [5.0, -1.0, 0.0]);
    }

    #[test]
    fn empty_rows_have_zero_sum() {
        let m = CsrMatrix::zero(4);
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.max_row_sum(), 0.0);
    }
}
