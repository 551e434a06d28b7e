use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SchurResult {
    pub sc: SparseMatrix,
    /// Multiply-adds performed by the product.
    pub nnz_work: u64,
}

/// `c_hat - le * diag(db) * uf`, row by row with a dense-marker accumulator.
/// `le` is `s x m`, `uf` is `m x s`. Exact cancellations are removed.
pub fn compute_schur(c_hat: &SparseMatrix, le: &SparseMatrix, db: &[f64], uf: &SparseMatrix) -> Result<SchurResult> {
    let s = c_hat.n_rows();
    let m = db.len();
    if c_hat.n_cols() != s || le.n_rows() != s || le.n_cols() != m || uf.n_rows() != m || uf.n_cols() != s {
        return Err(Error::Dimension(format!(
            "schur blocks: C {}x{}, L_E {}x{}, D {}, U_F {}x{}",
            c_hat.n_rows(),
            c_hat.n_cols(),
            le.n_rows(),
            le.n_cols(),
            m,
            uf.n_rows(),
            uf.n_cols()
        )));
    }
    let mut vals = vec![0.0; s];
    let mut used = vec![false; s];
    let mut idx: Vec<usize> = Vec::new();
    let mut row_offsets = Vec::with_capacity(s + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    let mut work = 0u64;
    row_offsets.push(0);
    for i in 0..s {
        let (cc, cv) = c_hat.row(i);
        for (&c, &v) in cc.iter().zip(cv) {
            used[c] = true;
            idx.push(c);
            vals[c] = v;
        }
        let (lk, lv) = le.row(i);
        for (&k, &l) in lk.iter().zip(lv) {
            let f = l * db[k];
            let (uc, uv) = uf.row(k);
            for (&c, &u) in uc.iter().zip(uv) {
                if !used[c] {
                    used[c] = true;
                    idx.push(c);
                }
                vals[c] -= f * u;
            }
            work += uc.len() as u64;
        }
        idx.sort_unstable();
        for &c in &idx {
            if vals[c] != 0.0 {
                col_indices.push(c);
                values.push(vals[c]);
            }
            vals[c] = 0.0;
            used[c] = false;
        }
        idx.clear();
        row_offsets.push(col_indices.len());
    }
    Ok(SchurResult {
        sc: SparseMatrix::from_csr(s, s, row_offsets, col_indices, values)?,
        nnz_work: work,
    })
}
