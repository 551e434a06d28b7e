/// Incremental lower bound on `||T^{-1}||_inf` for a unit triangular `T`
/// grown one row at a time.
///
/// Each step solves one more component of `T x = b` with `b_k = ±1` chosen
/// to maximize `|x_k|`. Since `||b||_inf = 1`, `max_k |x_k|` never exceeds
/// the true norm. For an upper factor `U`, feed the columns of `U` to get a
/// bound on `||U^{-1}||_1`.
#[derive(Debug, Clone)]
pub struct InverseNormEstimator {
    x: Vec<f64>,
    kappa_tilde: f64,
}

impl InverseNormEstimator {
    pub fn new(capacity: usize) -> Self {
        InverseNormEstimator {
            x: vec![0.0; capacity],
            kappa_tilde: 1.0,
        }
    }

    pub fn kappa_tilde(&self) -> f64 {
        self.kappa_tilde
    }

    /// Returns `(x_k, candidate bound)` for a new row with entries
    /// `(j, t_kj)`, `j` indexing previously committed steps. Nothing is
    /// recorded.
    pub fn peek(&self, row: impl IntoIterator<Item = (usize, f64)>) -> (f64, f64) {
        let s: f64 = row.into_iter().map(|(j, v)| v * self.x[j]).sum();
        let xk = if s > 0.0 { -1.0 - s } else { 1.0 - s };
        (xk, self.kappa_tilde.max(xk.abs()))
    }

    pub fn commit(&mut self, k: usize, xk: f64) {
        self.x[k] = xk;
        self.kappa_tilde = self.kappa_tilde.max(xk.abs());
    }
}

/// Extends `est` by step `k` with off-diagonal row entries `row` (unit
/// diagonal implied) and returns the updated bound.
pub fn update_inverse_norm(est: &mut InverseNormEstimator, k: usize, row: &[(usize, f64)]) -> f64 {
    let (xk, _) = est.peek(row.iter().copied());
    est.commit(k, xk);
    est.kappa_tilde()
}
