//! Compressed sparse row storage and the handful of kernels the factorization
//! and the Krylov solver need.

mod mtx;
mod perm;

pub use mtx::{read_matrix_market, read_matrix_market_from, write_matrix_market, write_matrix_market_to, MatrixSymmetry};
pub use perm::{PermScale, Permutation};

use crate::error::{Error, Result};

/// Square or rectangular CSR matrix.
///
/// Column indices are strictly increasing within a row, there are no stored
/// zeros and every value is finite. Once built it is never mutated.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; entries that are (or sum to) exactly zero are not stored.
    pub fn from_triplets(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, c, v) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Input(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Input(format!("non-finite value at ({r}, {c})")));
            }
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; entries.len()];
        let mut vals = vec![0.0; entries.len()];
        for &(r, c, v) in entries {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        Ok(Self::compress_rows(n_rows, n_cols, &counts, &cols, &vals))
    }

    /// Validating CSR constructor. Rows may be unsorted and contain
    /// duplicates; the result is normalized the same way as [`from_triplets`].
    ///
    /// [`from_triplets`]: SparseMatrix::from_triplets
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::Input(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Input("row_offsets must start at 0 and be nondecreasing".into()));
        }
        let nnz = row_offsets[n_rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(Error::Input(format!(
                "expected {nnz} column indices and values, got {} and {}",
                col_indices.len(),
                values.len()
            )));
        }
        if let Some(&c) = col_indices.iter().find(|&&c| c >= n_cols) {
            return Err(Error::Input(format!("column index {c} out of range for {n_cols} columns")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite value in CSR data".into()));
        }
        Ok(Self::compress_rows(n_rows, n_cols, &row_offsets, &col_indices, &values))
    }

    /// Internal constructor for data already known to satisfy every invariant.
    pub(crate) fn from_raw_parts(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), n_rows + 1);
        debug_assert!((0..n_rows).all(|i| {
            let cols = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            cols.windows(2).all(|w| w[0] < w[1]) && cols.iter().all(|&c| c < n_cols)
        }));
        debug_assert!(values.iter().all(|v| v.is_finite() && *v != 0.0));
        Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Sorts each row, sums duplicates and drops zeros.
    fn compress_rows(n_rows: usize, n_cols: usize, offsets: &[usize], cols: &[usize], vals: &[f64]) -> Self {
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::with_capacity(cols.len());
        let mut values = Vec::with_capacity(vals.len());
        let mut order: Vec<usize> = Vec::new();
        for i in 0..n_rows {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            order.clear();
            order.extend(lo..hi);
            order.sort_by_key(|&k| cols[k]);
            let mut k = 0;
            while k < order.len() {
                let c = cols[order[k]];
                let mut v = 0.0;
                while k < order.len() && cols[order[k]] == c {
                    v += vals[order[k]];
                    k += 1;
                }
                if v != 0.0 {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw_parts(n, n, (0..=n).collect(), (0..n).collect(), vec![1.0; n])
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_raw_parts(n_rows, n_cols, vec![0; n_rows + 1], Vec::new(), Vec::new())
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        let entries: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), d.len(), &entries)
    }

    /// Builds from a dense row-major array.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Dimension("ragged dense input".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        out
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn row_counts(&self) -> Vec<usize> {
        (0..self.n_rows).map(|i| self.row_nnz(i)).collect()
    }

    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_cols];
        for &c in &self.col_indices {
            counts[c] += 1;
        }
        counts
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut offsets = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            offsets[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            offsets[j + 1] += offsets[j];
        }
        let mut next = offsets.clone();
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        // rows visited in increasing order keep each output row sorted
        for i in 0..self.n_rows {
            let (rc, rv) = self.row(i);
            for (&c, &v) in rc.iter().zip(rv) {
                cols[next[c]] = i;
                vals[next[c]] = v;
                next[c] += 1;
            }
        }
        Self::from_raw_parts(self.n_cols, self.n_rows, offsets, cols, vals)
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for matrix with {} columns",
                x.len(),
                self.n_cols
            )));
        }
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a caller buffer; lengths are the caller's responsibility.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `y -= A x`.
    pub(crate) fn spmv_sub(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
            *yi -= s;
        }
    }

    /// Pattern of `A + A^T` with unit values.
    pub fn symmetrized_pattern(&self) -> Result<SparseMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("symmetrized pattern of a non-square matrix".into()));
        }
        let t = self.transpose();
        let n = self.n_rows;
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(2 * self.nnz());
        for i in 0..n {
            let (a, _) = self.row(i);
            let (b, _) = t.row(i);
            let (mut p, mut q) = (0, 0);
            while p < a.len() || q < b.len() {
                let next = match (a.get(p), b.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        q += 1;
                        y
                    }
                    (Some(&x), None) => {
                        p += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        q += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                cols.push(next);
            }
            offsets.push(cols.len());
        }
        let vals = vec![1.0; cols.len()];
        Ok(Self::from_raw_parts(n, n, offsets, cols, vals))
    }

    /// `D_r P_r^T A P_c D_c`, see [`PermScale`] for the index convention.
    pub fn apply_perm_scale(&self, ps: &PermScale) -> Result<SparseMatrix> {
        if ps.row_perm.len() != self.n_rows || ps.col_perm.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "perm/scale of size {}x{} for {}x{} matrix",
                ps.row_perm.len(),
                ps.col_perm.len(),
                self.n_rows,
                self.n_cols
            )));
        }
        let p = ps.row_perm.forward();
        let qinv = ps.col_perm.inverse();
        let mut offsets = Vec::with_capacity(self.n_rows + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        let mut row_buf: Vec<(usize, f64)> = Vec::new();
        for &old_row in p {
            let r = ps.row_scale[old_row];
            let (rc, rv) = self.row(old_row);
            row_buf.clear();
            row_buf.extend(
                rc.iter()
                    .zip(rv)
                    .map(|(&c, &v)| (qinv[c], r * v * ps.col_scale[c])),
            );
            row_buf.sort_unstable_by_key(|e| e.0);
            for &(c, v) in &row_buf {
                cols.push(c);
                // scaling can underflow to zero; keep the stored pattern intact
                vals.push(if v == 0.0 { f64::MIN_POSITIVE.copysign(v) } else { v });
            }
            offsets.push(cols.len());
        }
        Ok(Self::from_raw_parts(self.n_rows, self.n_cols, offsets, cols, vals))
    }

    /// Extracts `A[rows, cols]`; the output is indexed by position in the
    /// given lists. `cols` must not contain repeats.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut out_cols = Vec::new();
        let mut out_vals = Vec::new();
        let mut buf: Vec<(usize, f64)> = Vec::new();
        for &r in rows {
            let (rc, rv) = self.row(r);
            buf.clear();
            buf.extend(
                rc.iter()
                    .zip(rv)
                    .filter(|(&c, _)| col_map[c] != usize::MAX)
                    .map(|(&c, &v)| (col_map[c], v)),
            );
            buf.sort_unstable_by_key(|e| e.0);
            for &(c, v) in &buf {
                out_cols.push(c);
                out_vals.push(v);
            }
            offsets.push(out_cols.len());
        }
        Self::from_raw_parts(rows.len(), cols.len(), offsets, out_cols, out_vals)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Drops entries with `|a_ij| <= threshold`.
    pub fn filtered(&self, threshold: f64) -> SparseMatrix {
        let mut offsets = Vec::with_capacity(self.n_rows + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            let (rc, rv) = self.row(i);
            for (&c, &v) in rc.iter().zip(rv) {
                if v.abs() > threshold {
                    cols.push(c);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Self::from_raw_parts(self.n_rows, self.n_cols, offsets, cols, vals)
    }

    /// `||A - A^T||_F`, computed by merging each row with the matching
    /// column. Requires a square matrix.
    pub fn asymmetry_norm(&self) -> f64 {
        assert!(self.is_square());
        let t = self.transpose();
        let mut sum = 0.0;
        for i in 0..self.n_rows {
            let (a, av) = self.row(i);
            let (b, bv) = t.row(i);
            let (mut p, mut q) = (0, 0);
            while p < a.len() || q < b.len() {
                let d = match (a.get(p), b.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        av[p - 1] - bv[q - 1]
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        av[p - 1]
                    }
                    (Some(_), None) => {
                        p += 1;
                        av[p - 1]
                    }
                    _ => {
                        q += 1;
                        bv[q - 1]
                    }
                };
                sum += d * d;
            }
        }
        sum.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SparseMatrix {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rng.gen::<f64>() < density {
                    entries.push((i, j, rng.gen_range(-2.0..2.0)));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, &entries).unwrap()
    }

    #[test]
    fn triplets_identity() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a, SparseMatrix::identity(2));
    }

    #[test]
    fn triplets_duplicates_are_summed() {
        let a = SparseMatrix::from_triplets(1, 2, &[(0, 1, 2.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 1]);
        assert_eq!(a.col_indices(), &[1]);
        assert_eq!(a.values(), &[5.0]);
    }

    #[test]
    fn triplets_empty() {
        let a = SparseMatrix::from_triplets(3, 3, &[]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 0, 0, 0]);
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn triplets_out_of_range_and_zeros() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]),
            Err(Error::Input(_))
        ));
        assert!(SparseMatrix::from_triplets(2, 2, &[(0, 0, f64::NAN)]).is_err());
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 0.0), (1, 0, 1.0), (1, 0, -1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn csr_constructor_validates_and_normalizes() {
        let a = SparseMatrix::from_csr(2, 3, vec![0, 2, 3], vec![2, 0, 1], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.col_indices(), &[0, 2, 1]);
        assert_eq!(a.values(), &[2.0, 1.0, 3.0]);
        assert!(SparseMatrix::from_csr(2, 3, vec![0, 2], vec![0, 1], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 3, vec![0, 1], vec![3], vec![1.0]).is_err());
    }

    #[test]
    fn symmetrized_lower_bidiagonal_is_tridiagonal() {
        let n = 5;
        let entries: Vec<_> = (0..n)
            .map(|i| (i, i, 1.0))
            .chain((1..n).map(|i| (i, i - 1, 1.0)))
            .collect();
        let a = SparseMatrix::from_triplets(n, n, &entries).unwrap();
        let p = a.symmetrized_pattern().unwrap();
        for i in 0..n {
            let (cols, _) = p.row(i);
            let expect: Vec<usize> = (i.saturating_sub(1)..=(i + 1).min(n - 1)).collect();
            assert_eq!(cols, &expect[..]);
        }
    }

    #[test]
    fn symmetrized_fixed_point_and_completion() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let p = a.symmetrized_pattern().unwrap();
        assert_eq!(p.col_indices(), a.col_indices());
        assert_eq!(p.row_offsets(), a.row_offsets());

        let b = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(b.symmetrized_pattern().unwrap().nnz(), 4);
    }

    #[test]
    fn perm_scale_identity_and_diag() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![0.0, 9.0]]).unwrap();
        assert_eq!(a.apply_perm_scale(&PermScale::identity(2)).unwrap(), a);

        let d = SparseMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let ps = PermScale::new(
            Permutation::identity(2),
            Permutation::identity(2),
            vec![0.5, 1.0 / 3.0],
            vec![0.5, 1.0 / 3.0],
        )
        .unwrap();
        let s = d.apply_perm_scale(&ps).unwrap();
        assert_eq!(s, SparseMatrix::identity(2));
    }

    #[test]
    fn perm_scale_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 3;
            let a = random_sparse(&mut rng, n, 0.7);
            let mut p: Vec<usize> = (0..n).collect();
            let mut q: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, rng.gen_range(0..=i));
                q.swap(i, rng.gen_range(0..=i));
            }
            let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
            let ps = PermScale::new(
                Permutation::from_forward(p.clone()).unwrap(),
                Permutation::from_forward(q.clone()).unwrap(),
                r.clone(),
                c.clone(),
            )
            .unwrap();

            // explicit permutation matrices: (P_r)_{p[i], i} = 1, (P_c)_{q[j], j} = 1
            let dense = a.to_dense();
            let mut pr = vec![vec![0.0; n]; n];
            let mut pc = vec![vec![0.0; n]; n];
            for i in 0..n {
                pr[p[i]][i] = 1.0;
                pc[q[i]][i] = 1.0;
            }
            let matmul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                (0..n)
                    .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
                    .collect()
            };
            let prt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| pr[j][i]).collect()).collect();
            // scales are indexed by original indices: D_r applies before P_r^T
            let dra: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| r[i] * dense[i][j]).collect()).collect();
            let adc: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dra[i][j] * c[j]).collect()).collect();
            let expect = matmul(&matmul(&prt, &adc), &pc);

            let got = a.apply_perm_scale(&ps).unwrap();
            assert_eq!(got.nnz(), a.nnz());
            let gd = got.to_dense();
            for i in 0..n {
                for j in 0..n {
                    assert!((gd[i][j] - expect[i][j]).abs() <= 1e-14 * expect[i][j].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn spmv_examples() {
        let id = SparseMatrix::identity(3);
        assert_eq!(id.spmv(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        let a = SparseMatrix::from_dense(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![6.0, 5.0]);
        assert!(matches!(a.spmv(&[1.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn spmv_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20;
        let a = random_sparse(&mut rng, n, 0.3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d = a.to_dense();
        let y = a.spmv(&x).unwrap();
        for i in 0..n {
            let mut s = 0.0;
            let mut mag = 0.0;
            for j in 0..n {
                s += d[i][j] * x[j];
                mag += (d[i][j] * x[j]).abs();
            }
            assert!((y[i] - s).abs() <= 1e-14 * mag.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn transpose_and_submatrix() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, 4.0]]).unwrap();
        let t = a.transpose();
        assert_eq!(t.to_dense(), vec![vec![1.0, 0.0], vec![2.0, 3.0], vec![0.0, 4.0]]);
        let s = a.submatrix(&[1, 0], &[2, 1]);
        assert_eq!(s.to_dense(), vec![vec![4.0, 3.0], vec![0.0, 2.0]]);
    }

    #[test]
    fn asymmetry() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap();
        assert!((a.asymmetry_norm() - (0.5f64 * 0.5 * 2.0).sqrt()).abs() < 1e-15);
        let b = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!((b.asymmetry_norm() - 8f64.sqrt()).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn triplets() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
            (1usize..12).prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec((0..n, 0..n, -5.0f64..5.0), 0..40),
                )
            })
        }

        proptest! {
            #[test]
            fn symmetrized_pattern_is_symmetric((n, t) in triplets()) {
                let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
                let p = a.symmetrized_pattern().unwrap();
                let pt = p.transpose();
                prop_assert_eq!(p.row_offsets(), pt.row_offsets());
                prop_assert_eq!(p.col_indices(), pt.col_indices());
            }

            #[test]
            fn perm_scale_preserves_nnz((n, t) in triplets(), seed in any::<u64>()) {
                let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut p: Vec<usize> = (0..n).collect();
                let mut q: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    p.swap(i, rng.gen_range(0..=i));
                    q.swap(i, rng.gen_range(0..=i));
                }
                let ps = PermScale::new(
                    Permutation::from_forward(p).unwrap(),
                    Permutation::from_forward(q).unwrap(),
                    (0..n).map(|_| rng.gen_range(0.5..2.0)).collect(),
                    (0..n).map(|_| rng.gen_range(0.5..2.0)).collect(),
                ).unwrap();
                prop_assert_eq!(a.apply_perm_scale(&ps).unwrap().nnz(), a.nnz());
            }
        }
    }
}
