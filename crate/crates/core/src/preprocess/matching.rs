//! Maximum-product transversal with row/column scaling.
//!
//! Costs are `c_ij = log(max_k |a_kj|) - log|a_ij|`; a minimum-cost perfect
//! matching maximizes the product of matched magnitudes. Each column is
//! matched by a Dijkstra search over rows on the reduced costs
//! `c_ij - u_i - v_j >= 0`, and the final duals give the scalings
//! `r_i = exp(u_i)`, `c_j = exp(v_j) / max_k |a_kj|`, under which every
//! matched entry has magnitude one and no entry exceeds one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::sparse::{PermScale, Permutation, SparseMatrix};

/// Outcome of the matching, including a partial one on singular structure.
#[derive(Debug, Clone)]
pub struct Matching {
    /// `row_of_col[j]` is the row matched to column `j`.
    pub row_of_col: Vec<Option<usize>>,
    pub row_dual: Vec<f64>,
    pub col_dual: Vec<f64>,
    /// `log max_k |a_kj|`, or `-inf` for empty columns.
    pub log_col_max: Vec<f64>,
}

impl Matching {
    pub fn is_perfect(&self) -> bool {
        self.row_of_col.iter().all(Option::is_some)
    }

    pub fn unmatched_rows(&self) -> Vec<usize> {
        let mut matched = vec![false; self.row_of_col.len()];
        for r in self.row_of_col.iter().flatten() {
            matched[*r] = true;
        }
        (0..matched.len()).filter(|&i| !matched[i]).collect()
    }

    /// Product of matched magnitudes as a log-sum; only meaningful when perfect.
    pub fn log_product(&self, a: &SparseMatrix) -> f64 {
        self.row_of_col
            .iter()
            .enumerate()
            .map(|(j, r)| r.map_or(f64::NEG_INFINITY, |i| a.get(i, j).abs().ln()))
            .sum()
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    row: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties broken toward the lower row index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.row.cmp(&self.row))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Computes a maximum-product matching. Columns that cannot be matched are
/// left unmatched; the duals stay feasible for everything that was.
pub fn max_product_matching(a: &SparseMatrix) -> Result<Matching> {
    if !a.is_square() {
        return Err(Error::Dimension("matching requires a square matrix".into()));
    }
    let n = a.n_rows();
    // column-oriented access with costs
    let at = a.transpose();
    let mut log_col_max = vec![f64::NEG_INFINITY; n];
    for (j, m) in log_col_max.iter_mut().enumerate() {
        let (_, vals) = at.row(j);
        if let Some(mx) = vals.iter().map(|v| v.abs()).reduce(f64::max) {
            *m = mx.ln();
        }
    }
    let col_ptr = at.row_offsets();
    let col_rows = at.col_indices();
    let cost: Vec<f64> = (0..n)
        .flat_map(|j| {
            let (_, vals) = at.row(j);
            let lm = log_col_max[j];
            vals.iter().map(move |v| (lm - v.abs().ln()).max(0.0))
        })
        .collect();

    // initial duals: v_j = min_i c_ij = 0, u_i = min_j c_ij
    let mut col_dual = vec![0.0; n];
    let mut row_dual = vec![f64::INFINITY; n];
    for j in 0..n {
        for k in col_ptr[j]..col_ptr[j + 1] {
            let i = col_rows[k];
            row_dual[i] = row_dual[i].min(cost[k]);
        }
    }
    for u in row_dual.iter_mut() {
        if !u.is_finite() {
            *u = 0.0;
        }
    }

    let mut col_of_row: Vec<Option<usize>> = vec![None; n];
    let mut row_of_col: Vec<Option<usize>> = vec![None; n];

    // cheap pass on tight edges
    for j in 0..n {
        for k in col_ptr[j]..col_ptr[j + 1] {
            let i = col_rows[k];
            if col_of_row[i].is_none() && cost[k] - row_dual[i] - col_dual[j] <= 0.0 {
                col_of_row[i] = Some(j);
                row_of_col[j] = Some(i);
                break;
            }
        }
    }

    // shortest augmenting paths for the rest
    let mut dist = vec![f64::INFINITY; n];
    let mut pred_col = vec![usize::MAX; n];
    let mut finalized = vec![false; n];
    let mut touched_rows: Vec<usize> = Vec::new();
    let mut visited_cols: Vec<(usize, f64)> = Vec::new();
    let mut done_rows: Vec<usize> = Vec::new();
    let mut heap = BinaryHeap::new();

    for j0 in 0..n {
        if row_of_col[j0].is_some() {
            continue;
        }
        heap.clear();
        visited_cols.clear();
        done_rows.clear();

        let mut sink: Option<(usize, f64)> = None;
        let mut col = j0;
        let mut col_dist = 0.0;
        loop {
            visited_cols.push((col, col_dist));
            for k in col_ptr[col]..col_ptr[col + 1] {
                let i = col_rows[k];
                if finalized[i] {
                    continue;
                }
                let reduced = (cost[k] - row_dual[i] - col_dual[col]).max(0.0);
                let nd = col_dist + reduced;
                if nd < dist[i] {
                    if dist[i] == f64::INFINITY {
                        touched_rows.push(i);
                    }
                    dist[i] = nd;
                    pred_col[i] = col;
                    heap.push(HeapItem { dist: nd, row: i });
                }
            }
            // next closest unfinalized row
            let mut next = None;
            while let Some(HeapItem { dist: d, row }) = heap.pop() {
                if finalized[row] || d > dist[row] {
                    continue;
                }
                next = Some((row, d));
                break;
            }
            let Some((row, d)) = next else { break };
            finalized[row] = true;
            done_rows.push(row);
            match col_of_row[row] {
                None => {
                    sink = Some((row, d));
                    break;
                }
                Some(c) => {
                    col = c;
                    col_dist = d;
                }
            }
        }

        if let Some((sink_row, lsp)) = sink {
            for &(c, dc) in &visited_cols {
                col_dual[c] += lsp - dc;
            }
            for &r in &done_rows {
                row_dual[r] -= lsp - dist[r];
            }
            // flip the alternating path
            let mut r = sink_row;
            loop {
                let c = pred_col[r];
                let prev = row_of_col[c];
                row_of_col[c] = Some(r);
                col_of_row[r] = Some(c);
                match prev {
                    Some(p) if c != j0 => r = p,
                    _ => break,
                }
            }
        }

        for &r in &touched_rows {
            dist[r] = f64::INFINITY;
            pred_col[r] = usize::MAX;
            finalized[r] = false;
        }
        touched_rows.clear();
    }

    Ok(Matching {
        row_of_col,
        row_dual,
        col_dual,
        log_col_max,
    })
}

/// Row permutation plus scalings from a maximum-product matching: after
/// [`SparseMatrix::apply_perm_scale`] the diagonal holds the matched entries
/// with unit magnitude and every entry is at most one in magnitude.
pub fn equilibrate(a: &SparseMatrix) -> Result<PermScale> {
    let m = max_product_matching(a)?;
    if !m.is_perfect() {
        return Err(Error::StructurallySingular {
            unmatched_rows: m.unmatched_rows(),
        });
    }
    perm_scale_from_matching(&m)
}

pub(crate) fn perm_scale_from_matching(m: &Matching) -> Result<PermScale> {
    let forward: Vec<usize> = m.row_of_col.iter().map(|r| r.expect("perfect matching")).collect();
    let row_perm = Permutation::from_forward(forward)?;
    let n = row_perm.len();
    let row_scale: Vec<f64> = m.row_dual.iter().map(|u| u.exp()).collect();
    let col_scale: Vec<f64> = (0..n).map(|j| (m.col_dual[j] - m.log_col_max[j]).exp()).collect();
    PermScale::new(row_perm, Permutation::identity(n), row_scale, col_scale)
}
