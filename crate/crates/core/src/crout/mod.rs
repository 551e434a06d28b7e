//! Single-level Crout incomplete LDU with dynamic deferring and dual
//! (count-limited and inverse-based) dropping.

mod estimator;
mod store;

pub use estimator::{update_inverse_norm, InverseNormEstimator};
pub use store::AugmentedCroutStore;

use crate::error::{Error, Result};
use crate::sparse::{PermScale, Permutation, SparseMatrix};

/// Thresholds for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropParams {
    /// nnz factor; `f64::INFINITY` disables the count limit.
    pub alpha: f64,
    /// Drop tolerance.
    pub tau: f64,
    pub kappa_d: f64,
    pub kappa_l: f64,
    pub kappa_u: f64,
}

impl DropParams {
    /// One `kappa` for the pivot and both inverse-norm bounds.
    pub fn new(alpha: f64, tau: f64, kappa: f64) -> Result<Self> {
        let p = DropParams {
            alpha,
            tau,
            kappa_d: kappa,
            kappa_l: kappa,
            kappa_u: kappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// No dropping and deferral only on exactly zero pivots.
    pub fn exact() -> Self {
        DropParams {
            alpha: f64::INFINITY,
            tau: 0.0,
            kappa_d: 1e300,
            kappa_l: 1e300,
            kappa_u: 1e300,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0) {
            return Err(Error::Input(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Input(format!("tau must be finite and >= 0, got {}", self.tau)));
        }
        for (name, k) in [("kappa_d", self.kappa_d), ("kappa_l", self.kappa_l), ("kappa_u", self.kappa_u)] {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(Error::Input(format!("{name} must be finite and >= 1, got {k}")));
            }
        }
        Ok(())
    }
}

/// Per-index nonzero counts of the user's input matrix, carried through the
/// level permutations so every level limits fill against the original.
#[derive(Debug, Clone, PartialEq)]
pub struct NnzReference {
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    /// Average nonzeros per row (and per column) of the original matrix.
    pub mean: f64,
}

impl NnzReference {
    pub fn from_matrix(a: &SparseMatrix) -> Self {
        NnzReference {
            row: a.row_counts(),
            col: a.col_counts(),
            mean: a.nnz() as f64 / a.n_rows().max(1) as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    /// Counts reindexed like the rows and columns of `a.apply_perm_scale(ps)`.
    pub fn permuted(&self, ps: &PermScale) -> Self {
        NnzReference {
            row: ps.row_perm.gather(&self.row),
            col: ps.col_perm.gather(&self.col),
            mean: self.mean,
        }
    }

    /// Counts of the symmetric selection `idx`.
    pub fn restricted(&self, idx: &[usize]) -> Self {
        NnzReference {
            row: idx.iter().map(|&i| self.row[i]).collect(),
            col: idx.iter().map(|&i| self.col[i]).collect(),
            mean: self.mean,
        }
    }

    pub fn row_limit(&self, alpha: f64, i: usize) -> usize {
        nnz_limit(alpha, self.row[i], self.mean)
    }

    pub fn col_limit(&self, alpha: f64, j: usize) -> usize {
        nnz_limit(alpha, self.col[j], self.mean)
    }
}

/// `ceil(alpha * max(nnz_ref, 0.85 * mean))`, at least 1.
pub fn nnz_limit(alpha: f64, nnz_ref: usize, mean: f64) -> usize {
    let bound = (alpha * (nnz_ref as f64).max(0.85 * mean)).ceil();
    if bound >= usize::MAX as f64 {
        usize::MAX
    } else {
        (bound as usize).max(1)
    }
}

/// Keeps the `limit` largest magnitudes (ties to the lower index), sorted by
/// index.
pub fn keep_largest(v: &mut Vec<(usize, f64)>, limit: usize) {
    if v.len() > limit {
        v.select_nth_unstable_by(limit, |a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        v.truncate(limit);
    }
    v.sort_unstable_by_key(|e| e.0);
}

/// Removes entries with `scale * |v_i| <= tau`, then applies
/// [`keep_largest`].
pub fn drop_vector(v: &mut Vec<(usize, f64)>, limit: usize, scale: f64, tau: f64) {
    v.retain(|&(_, x)| x != 0.0 && !(scale * x.abs() <= tau));
    keep_largest(v, limit);
}

/// One level of the multilevel factorization.
///
/// With `P` = `perm_scale`, the level input `A` satisfies
/// `P(A) ≈ [[L_B D_B U_B, L_B D_B U_F], [L_E D_B U_B, C]]`, where the leading
/// block has size `leading_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFactor {
    /// Strictly lower part of `L_B` (unit diagonal implied).
    pub lb: SparseMatrix,
    pub db: Vec<f64>,
    /// Strictly upper part of `U_B` (unit diagonal implied).
    pub ub: SparseMatrix,
    pub le: SparseMatrix,
    pub uf: SparseMatrix,
    pub perm_scale: PermScale,
    pub leading_size: usize,
    /// Level-input indices handed to the next level, statically deferred
    /// first, then dynamically deferred in deferral order.
    pub deferred: Vec<usize>,
    pub n_static: usize,
    pub n_dynamic: usize,
    pub symmetric: bool,
    pub params: DropParams,
    /// Reference counts in factored order.
    pub nnz_ref: NnzReference,
    pub kappa_l_tilde: f64,
    pub kappa_u_tilde: f64,
    /// Multiply-adds spent in the Crout updates.
    pub flops: u64,
}

impl LevelFactor {
    /// Stored nonzeros including `D_B`.
    pub fn nnz(&self) -> usize {
        self.lb.nnz() + self.ub.nnz() + self.le.nnz() + self.uf.nnz() + self.db.len()
    }

    pub fn size(&self) -> usize {
        self.perm_scale.len()
    }
}

struct Accumulator {
    vals: Vec<f64>,
    used: Vec<bool>,
    idx: Vec<usize>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            vals: vec![0.0; n],
            used: vec![false; n],
            idx: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, i: usize, v: f64) {
        if !self.used[i] {
            self.used[i] = true;
            self.idx.push(i);
        }
        self.vals[i] += v;
    }

    fn get(&self, i: usize) -> f64 {
        self.vals[i]
    }

    /// Empties the accumulator, returning `(i, v / div)` for `i != skip`.
    fn take_scaled(&mut self, skip: usize, div: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.idx.len());
        for &i in &self.idx {
            if i != skip {
                out.push((i, self.vals[i] / div));
            }
            self.vals[i] = 0.0;
            self.used[i] = false;
        }
        self.idx.clear();
        out
    }

    fn clear(&mut self) {
        for &i in &self.idx {
            self.vals[i] = 0.0;
            self.used[i] = false;
        }
        self.idx.clear();
    }
}

/// Crout ILDU of the leading `n_lead` candidates of a preprocessed level
/// matrix `a`; indices `n_lead..n` are statically deferred.
///
/// `nnz_ref` is indexed like `a`. In symmetric mode only `L` is computed,
/// from the lower triangle of `a`, and `U = L^T`.
pub fn factorize_level(
    a: &SparseMatrix,
    n_lead: usize,
    params: &DropParams,
    nnz_ref: &NnzReference,
    symmetric: bool,
) -> Result<LevelFactor> {
    params.validate()?;
    if !a.is_square() {
        return Err(Error::Dimension("factorization requires a square matrix".into()));
    }
    let n = a.n_rows();
    if n_lead > n || nnz_ref.len() != n || nnz_ref.col.len() != n {
        return Err(Error::Dimension(format!(
            "level of size {n} with {n_lead} candidates and {} reference counts",
            nnz_ref.len()
        )));
    }
    let at = a.transpose();
    let mut store = AugmentedCroutStore::new(n, n_lead);
    let mut est_l = InverseNormEstimator::new(n_lead);
    let mut est_u = InverseNormEstimator::new(n_lead);
    let mut d = vec![0.0; n_lead];
    let mut acc = Accumulator::new(store.label_capacity());
    let mut flops = 0u64;
    let min_pivot = 1.0 / params.kappa_d;

    for k in 0..n_lead {
        let (xl, kl) = est_l.peek(store.l_row(k));
        let (xu, ku) = if symmetric { (xl, kl) } else { est_u.peek(store.u_col(k)) };
        if kl > params.kappa_l || ku > params.kappa_u {
            store.defer(k);
            continue;
        }

        // column k of L, diagonal included
        let (cols, vals) = at.row(k);
        for (&r, &v) in cols.iter().zip(vals) {
            let lab = store.label_of(r);
            if lab >= k {
                acc.add(lab, v);
            }
        }
        // in symmetric mode U is not stored and column k of U is row k of L
        let u_col = if symmetric { store.l_row(k) } else { store.u_col(k) };
        for (j, ujk) in u_col {
            let f = ujk * d[j];
            let tail = store.l_tail(j);
            for &(lab, l) in tail {
                acc.add(lab, -f * l);
            }
            flops += tail.len() as u64;
        }
        let dk = acc.get(k);
        if !(dk.abs() >= min_pivot) {
            acc.clear();
            store.defer(k);
            continue;
        }
        let mut lcol = acc.take_scaled(k, dk);
        drop_vector(
            &mut lcol,
            nnz_ref.col_limit(params.alpha, k),
            params.kappa_d * kl,
            params.tau,
        );

        let urow = if symmetric {
            Vec::new()
        } else {
            let (cols, vals) = a.row(k);
            for (&c, &v) in cols.iter().zip(vals) {
                let lab = store.label_of(c);
                if lab > k {
                    acc.add(lab, v);
                }
            }
            for (j, lkj) in store.l_row(k) {
                let f = lkj * d[j];
                let tail = store.u_tail(j);
                for &(lab, u) in tail {
                    acc.add(lab, -f * u);
                }
                flops += tail.len() as u64;
            }
            let mut urow = acc.take_scaled(k, dk);
            drop_vector(
                &mut urow,
                nnz_ref.row_limit(params.alpha, k),
                params.kappa_d * ku,
                params.tau,
            );
            urow
        };

        est_l.commit(k, xl);
        if !symmetric {
            est_u.commit(k, xu);
        }
        d[k] = dk;
        store.accept(k, lcol, urow);
    }

    let m = store.accepted.len();
    if m == 0 {
        return Err(Error::LevelCollapse { level: 0, size: n });
    }
    finalize(store, &d, n, params, nnz_ref, symmetric, flops, est_l.kappa_tilde(), est_u.kappa_tilde())
}

#[derive(Default)]
struct CsrBuilder {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrBuilder {
    fn push(&mut self, c: usize, v: f64) {
        self.cols.push(c);
        self.vals.push(v);
    }

    fn end_row(&mut self) {
        self.offsets.push(self.cols.len());
    }

    fn finish(self, n_rows: usize, n_cols: usize) -> SparseMatrix {
        let mut offsets = Vec::with_capacity(self.offsets.len() + 1);
        offsets.push(0);
        offsets.extend(self.offsets);
        debug_assert_eq!(offsets.len(), n_rows + 1);
        SparseMatrix::from_raw_parts(n_rows, n_cols, offsets, self.cols, self.vals)
    }
}

/// Applies [`keep_largest`] to every row of `a`.
fn limit_rows(a: &SparseMatrix, limit: impl Fn(usize) -> usize) -> SparseMatrix {
    let mut out = CsrBuilder::default();
    let mut buf = Vec::new();
    for i in 0..a.n_rows() {
        let (c, v) = a.row(i);
        let lim = limit(i);
        if c.len() > lim {
            buf.clear();
            buf.extend(c.iter().copied().zip(v.iter().copied()));
            keep_largest(&mut buf, lim);
            for &(c, v) in &buf {
                out.push(c, v);
            }
        } else {
            for (&c, &v) in c.iter().zip(v) {
                out.push(c, v);
            }
        }
        out.end_row();
    }
    out.finish(a.n_rows(), a.n_cols())
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    store: AugmentedCroutStore,
    d: &[f64],
    n: usize,
    params: &DropParams,
    nnz_ref: &NnzReference,
    symmetric: bool,
    flops: u64,
    kappa_l: f64,
    kappa_u: f64,
) -> Result<LevelFactor> {
    let m = store.accepted.len();
    let s = n - m;
    let pos = store.final_positions();
    let order = store.final_order();
    let n_dynamic = store.deferred.len();

    // transposes of L_B and L_E and the rows of U_B and U_F come out sorted
    // because label-to-position is monotone
    let mut lb_t = CsrBuilder::default();
    let mut le_t = CsrBuilder::default();
    let mut ub = CsrBuilder::default();
    let mut uf_t = CsrBuilder::default();
    for &j in &store.accepted {
        for &(lab, v) in &store.l_cols[j] {
            match pos[lab] {
                Some(p) if p < m => lb_t.push(p, v),
                Some(p) => le_t.push(p - m, v),
                None => {}
            }
        }
        lb_t.end_row();
        le_t.end_row();
        if !symmetric {
            for &(lab, v) in &store.u_rows[j] {
                match pos[lab] {
                    Some(p) if p < m => ub.push(p, v),
                    Some(p) => uf_t.push(p - m, v),
                    None => {}
                }
            }
            ub.end_row();
            uf_t.end_row();
        }
    }

    let nnz_ref = nnz_ref.restricted(&order);
    let lb_t = lb_t.finish(m, m);
    let lb = lb_t.transpose();
    let le = limit_rows(&le_t.finish(m, s).transpose(), |i| nnz_ref.row_limit(params.alpha, m + i));
    let (ub, uf) = if symmetric {
        (lb_t, le.transpose())
    } else {
        let uf = limit_rows(&uf_t.finish(m, s).transpose(), |i| nnz_ref.col_limit(params.alpha, m + i));
        (ub.finish(m, m), uf.transpose())
    };

    let perm = Permutation::from_forward(order.clone())?;
    let perm_scale = PermScale::identity(n).then_symmetric(&perm);
    Ok(LevelFactor {
        lb,
        db: store.accepted.iter().map(|&k| d[k]).collect(),
        ub,
        le,
        uf,
        perm_scale,
        leading_size: m,
        deferred: order[m..].to_vec(),
        n_static: s - n_dynamic,
        n_dynamic,
        symmetric,
        params: *params,
        nnz_ref,
        kappa_l_tilde: kappa_l,
        kappa_u_tilde: if symmetric { kappa_l } else { kappa_u },
        flops,
    })
}
