//! Recursive driver: preprocessing, Crout factorization and Schur complement
//! per level, ending in a dense LU once the system is small enough.

mod dense;

pub use dense::{dense_factorize, DenseLu};

use std::time::Instant;

use crate::crout::{factorize_level, DropParams, LevelFactor, NnzReference};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess, FillOrdering, PreprocessMode};
use crate::schur::compute_schur;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tau0: f64,
    pub alpha0: f64,
    pub kappa0: f64,
    /// Leading levels that use symmetric preprocessing and factorization;
    /// `None` decides from the input.
    pub symm_pre_levels: Option<usize>,
    /// The recursion stops once the system has at most
    /// `max(n^(1/3), dense_cutoff)` rows.
    pub dense_cutoff: usize,
    pub restart: usize,
    pub rtol: f64,
    pub maxit: usize,
    pub max_levels: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tau0: 1e-4,
            alpha0: 10.0,
            kappa0: 3.0,
            symm_pre_levels: None,
            dense_cutoff: 500,
            restart: 30,
            rtol: 1e-6,
            maxit: 500,
            max_levels: 64,
        }
    }
}

impl SolverOptions {
    /// Thresholds tuned for saddle-point systems.
    pub fn optimized_saddle() -> Self {
        SolverOptions {
            tau0: 1e-2,
            alpha0: 3.0,
            kappa0: 5.0,
            ..Self::default()
        }
    }

    pub fn base_params(&self) -> Result<DropParams> {
        DropParams::new(self.alpha0, self.tau0, self.kappa0)
    }

    pub fn validate(&self) -> Result<()> {
        self.base_params()?;
        if self.restart == 0 {
            return Err(Error::Input("restart must be at least 1".into()));
        }
        if !(self.rtol > 0.0) {
            return Err(Error::Input(format!("rtol must be positive, got {}", self.rtol)));
        }
        if self.dense_cutoff == 0 {
            return Err(Error::Input("dense cutoff must be at least 1".into()));
        }
        if self.max_levels == 0 {
            return Err(Error::Input("max_levels must be at least 1".into()));
        }
        Ok(())
    }
}

/// Thresholds for `level` (1-based): level 2 doubles `alpha`, and from level
/// 2 on `tau` is divided by 10 and `kappa` halved down to no less than 2.
pub fn level_params(base: &DropParams, level: usize) -> DropParams {
    if level <= 1 {
        return *base;
    }
    let alpha = if level == 2 { 2.0 * base.alpha } else { base.alpha };
    let k = |kappa: f64| (kappa / 2.0).max(2.0);
    DropParams {
        alpha,
        tau: base.tau / 10.0,
        kappa_d: k(base.kappa_d),
        kappa_l: k(base.kappa_l),
        kappa_u: k(base.kappa_u),
    }
}

/// Thresholds for the level after `level`.
pub fn next_level_params(base: &DropParams, level: usize) -> DropParams {
    level_params(base, level + 1)
}

/// `||A - A^T||_F <= 1e-8 ||A||_F` once entries at roundoff level are removed.
pub fn is_nearly_symmetric(a: &SparseMatrix) -> bool {
    if !a.is_square() {
        return false;
    }
    let f = a.filtered(1e-15 * a.max_abs());
    f.asymmetry_norm() <= 1e-8 * f.frobenius_norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    /// 1-based; a collapsed level is skipped, so numbers can have gaps.
    pub level: usize,
    pub size: usize,
    pub leading_size: usize,
    pub static_deferrals: usize,
    pub dynamic_deferrals: usize,
    pub nnz: usize,
    pub symmetric: bool,
    pub matching_fallback: bool,
    pub params: DropParams,
    pub crout_flops: u64,
    pub schur_work: u64,
    pub preprocess_seconds: f64,
    pub crout_seconds: f64,
    pub schur_seconds: f64,
    /// Wall time for the whole level.
    pub seconds: f64,
}

/// Multilevel ILDU preconditioner.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    pub levels: Vec<LevelFactor>,
    pub terminal: DenseLu,
    pub original_n: usize,
    pub input_nnz: usize,
    pub stats: Vec<LevelStats>,
    pub terminal_seconds: f64,
    /// Number of levels that ran in symmetric mode as requested or decided.
    pub symm_pre_levels: usize,
}

struct BuiltLevel {
    factor: LevelFactor,
    scaled: SparseMatrix,
    static_deferred: usize,
    matching_fallback: bool,
    preprocess_seconds: f64,
    crout_seconds: f64,
}

fn build_level(a: &SparseMatrix, refs: &NnzReference, params: &DropParams, level: usize, symmetric: bool) -> Result<BuiltLevel> {
    let mode = PreprocessMode {
        symmetric,
        ordering: if symmetric && level == 1 { FillOrdering::Rcm } else { FillOrdering::Amd },
        strict: level == 1,
    };
    let start = Instant::now();
    let rep = preprocess(a, params.kappa_d, mode)?;
    let scaled = a.apply_perm_scale(&rep.perm_scale)?;
    let preprocess_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let mut factor = factorize_level(&scaled, rep.n_lead, params, &refs.permuted(&rep.perm_scale), symmetric)?;
    factor.perm_scale = rep.perm_scale.then_symmetric(&factor.perm_scale.row_perm);
    Ok(BuiltLevel {
        factor,
        scaled,
        static_deferred: rep.statically_deferred.len(),
        matching_fallback: rep.matching_fallback,
        preprocess_seconds,
        crout_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Builds the level hierarchy for `a`. `symmetric_hint` marks the input as
/// symmetric (e.g. from its file header) when `symm_pre_levels` is automatic.
pub fn build_preconditioner(a: &SparseMatrix, opts: &SolverOptions, symmetric_hint: bool) -> Result<Preconditioner> {
    opts.validate()?;
    if !a.is_square() {
        return Err(Error::Dimension(format!("matrix is {}x{}, not square", a.n_rows(), a.n_cols())));
    }
    if a.n_rows() == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    let base = opts.base_params()?;
    let n0 = a.n_rows();
    let cutoff = (n0 as f64).cbrt().max(opts.dense_cutoff as f64);
    let auto = opts.symm_pre_levels.is_none();
    let mut symm_levels = opts
        .symm_pre_levels
        .unwrap_or_else(|| usize::from(symmetric_hint || is_nearly_symmetric(a)));

    let mut levels = Vec::new();
    let mut stats = Vec::new();
    let mut cur = a.clone();
    let mut refs = NnzReference::from_matrix(a);
    let mut level = 0;
    let mut collapsed = false;
    while cur.n_rows() as f64 > cutoff {
        level += 1;
        if level > opts.max_levels {
            return Err(Error::Build(format!("exceeded {} levels", opts.max_levels)));
        }
        let start = Instant::now();
        let params = level_params(&base, level);
        let symmetric = level <= symm_levels;
        let built = match build_level(&cur, &refs, &params, level, symmetric) {
            Err(Error::LevelCollapse { .. }) if symmetric => build_level(&cur, &refs, &params, level, false),
            other => other,
        };
        let built = match built {
            // a collapsed level passes its matrix on to the next thresholds
            Err(Error::LevelCollapse { .. }) if !collapsed => {
                collapsed = true;
                continue;
            }
            Err(Error::LevelCollapse { size, .. }) => return Err(Error::LevelCollapse { level, size }),
            other => other?,
        };
        collapsed = false;
        if auto && level == 1 && built.factor.symmetric && built.static_deferred > 0 {
            symm_levels = symm_levels.max(2);
        }

        let f = built.factor;
        let c_hat = built.scaled.submatrix(&f.deferred, &f.deferred);
        let schur_start = Instant::now();
        let schur = compute_schur(&c_hat, &f.le, &f.db, &f.uf)?;
        let schur_seconds = schur_start.elapsed().as_secs_f64();
        let tail: Vec<usize> = (f.leading_size..f.size()).collect();
        refs = f.nnz_ref.restricted(&tail);
        stats.push(LevelStats {
            level,
            size: f.size(),
            leading_size: f.leading_size,
            static_deferrals: f.n_static,
            dynamic_deferrals: f.n_dynamic,
            nnz: f.nnz(),
            symmetric: f.symmetric,
            matching_fallback: built.matching_fallback,
            params,
            crout_flops: f.flops,
            schur_work: schur.nnz_work,
            preprocess_seconds: built.preprocess_seconds,
            crout_seconds: built.crout_seconds,
            schur_seconds,
            seconds: start.elapsed().as_secs_f64(),
        });
        levels.push(f);
        cur = schur.sc;
    }
    let start = Instant::now();
    let terminal = dense_factorize(&cur);
    Ok(Preconditioner {
        levels,
        terminal,
        original_n: n0,
        input_nnz: a.nnz(),
        stats,
        terminal_seconds: start.elapsed().as_secs_f64(),
        symm_pre_levels: symm_levels,
    })
}

impl Preconditioner {
    pub fn len(&self) -> usize {
        self.original_n
    }

    pub fn is_empty(&self) -> bool {
        self.original_n == 0
    }

    /// Sparse levels plus the dense terminal level when it is non-empty.
    pub fn num_levels(&self) -> usize {
        self.levels.len() + usize::from(!self.terminal.is_empty())
    }

    /// Stored factor nonzeros, dense terminal counted in full.
    pub fn nnz(&self) -> usize {
        self.levels.iter().map(LevelFactor::nnz).sum::<usize>() + self.terminal.len() * self.terminal.len()
    }

    pub fn nnz_ratio(&self) -> f64 {
        self.nnz() as f64 / self.input_nnz.max(1) as f64
    }

    /// Total flops recorded by the Crout updates and Schur products.
    pub fn work(&self) -> u64 {
        self.stats.iter().map(|s| s.crout_flops + s.schur_work).sum()
    }

    /// `M^{-1} u`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.original_n];
        self.apply_into(u, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        if u.len() != self.original_n || out.len() != self.original_n {
            return Err(Error::Dimension(format!(
                "preconditioner of size {} applied to {} into {}",
                self.original_n,
                u.len(),
                out.len()
            )));
        }
        self.apply_level(0, u, out);
        Ok(())
    }

    fn apply_level(&self, idx: usize, u: &[f64], out: &mut [f64]) {
        let Some(f) = self.levels.get(idx) else {
            out.copy_from_slice(u);
            self.terminal.solve_in_place(out);
            return;
        };
        let m = f.leading_size;
        let mut y = vec![0.0; u.len()];
        f.perm_scale.forward_rhs(u, &mut y);
        let (y1, y2) = y.split_at_mut(m);
        lower_solve(&f.lb, y1);
        f.le.spmv_sub(y1, y2);
        let mut t2 = vec![0.0; y2.len()];
        self.apply_level(idx + 1, y2, &mut t2);
        for (v, d) in y1.iter_mut().zip(&f.db) {
            *v /= d;
        }
        f.uf.spmv_sub(&t2, y1);
        upper_solve(&f.ub, y1);
        y2.copy_from_slice(&t2);
        f.perm_scale.backward_solution(&y, out);
    }
}

/// In-place solve with unit lower triangular `I + L`.
fn lower_solve(l: &SparseMatrix, x: &mut [f64]) {
    for i in 0..x.len() {
        let (c, v) = l.row(i);
        let s: f64 = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        x[i] -= s;
    }
}

/// In-place solve with unit upper triangular `I + U`.
fn upper_solve(u: &SparseMatrix, x: &mut [f64]) {
    for i in (0..x.len()).rev() {
        let (c, v) = u.row(i);
        let s: f64 = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        x[i] -= s;
    }
}
