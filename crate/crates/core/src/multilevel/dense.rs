use crate::sparse::SparseMatrix;

/// Dense LU with partial pivoting, row-major, `P S = L U`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    /// `piv[k]` is the row swapped with row `k` at step `k`.
    piv: Vec<usize>,
    replaced_pivots: usize,
}

impl DenseLu {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pivots(&self) -> &[usize] {
        &self.piv
    }

    /// Number of pivots below `1e-14 * max|S|` that were replaced.
    pub fn replaced_pivots(&self) -> usize {
        self.replaced_pivots
    }

    pub fn lower(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match j.cmp(&i) {
                        std::cmp::Ordering::Less => self.lu[i * self.n + j],
                        std::cmp::Ordering::Equal => 1.0,
                        std::cmp::Ordering::Greater => 0.0,
                    })
                    .collect()
            })
            .collect()
    }

    pub fn upper(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if j >= i { self.lu[i * self.n + j] } else { 0.0 }).collect())
            .collect()
    }

    /// Solves `S x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
    }
}

pub fn dense_factorize(s: &SparseMatrix) -> DenseLu {
    let n = s.n_rows();
    let mut lu = vec![0.0; n * n];
    for i in 0..n {
        let (c, v) = s.row(i);
        for (&j, &x) in c.iter().zip(v) {
            lu[i * n + j] = x;
        }
    }
    dense_factorize_rows(n, lu)
}

/// Factorizes a row-major `n x n` array.
pub fn dense_factorize_rows(n: usize, mut lu: Vec<f64>) -> DenseLu {
    let max = lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = if max > 0.0 { 1e-14 * max } else { 1e-14 };
    let mut piv = vec![0; n];
    let mut replaced = 0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&a, &b| lu[a * n + k].abs().total_cmp(&lu[b * n + k].abs()).then(b.cmp(&a)))
            .unwrap_or(k);
        piv[k] = p;
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
        }
        let d = lu[k * n + k];
        if !(d.abs() >= floor) {
            lu[k * n + k] = if d < 0.0 { -floor } else { floor };
            replaced += 1;
        }
        let d = lu[k * n + k];
        let (top, bottom) = lu.split_at_mut((k + 1) * n);
        let pivot_row = &top[k * n + k + 1..(k + 1) * n];
        for row in bottom.chunks_exact_mut(n) {
            let f = row[k] / d;
            row[k] = f;
            if f != 0.0 {
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= f * u;
                }
            }
        }
    }
    DenseLu {
        n,
        lu,
        piv,
        replaced_pivots: replaced,
    }
}
