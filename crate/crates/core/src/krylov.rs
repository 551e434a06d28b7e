//! Right-preconditioned flexible GMRES with restarts.

use crate::error::{Error, Result};
use crate::multilevel::Preconditioner;
use crate::sparse::SparseMatrix;

/// An approximate inverse applied on the right.
pub trait RightPreconditioner {
    fn dim(&self) -> usize;
    /// `z = M^{-1} r`.
    fn apply_to(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityPreconditioner(pub usize);

impl RightPreconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_to(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

impl RightPreconditioner for Preconditioner {
    fn dim(&self) -> usize {
        self.len()
    }

    fn apply_to(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.apply_into(r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub restart: usize,
    pub rtol: f64,
    pub maxit: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 30,
            rtol: 1e-6,
            maxit: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    /// Inner iterations summed over restarts.
    pub iterations: usize,
    /// `||b - A x|| / ||b||` of the returned iterate.
    pub relative_residual: f64,
    pub converged: bool,
    /// Least-squares residual estimates relative to `||b||`, starting at 1.
    pub residual_history: Vec<f64>,
    pub matvecs: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Extends the basis `v` by one flexible Arnoldi step. Returns `z = M^{-1}
/// v_j`, `A z`, the unnormalized new direction orthogonalized by modified
/// Gram-Schmidt, and the Hessenberg column (last entry is its norm).
fn arnoldi_step<M: RightPreconditioner + ?Sized>(
    a: &SparseMatrix,
    m: &M,
    v: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let j = v.len() - 1;
    let mut z = vec![0.0; a.n_rows()];
    m.apply_to(&v[j], &mut z)?;
    let az = a.spmv(&z)?;
    let mut w = az.clone();
    let mut col = vec![0.0; j + 2];
    for (i, vi) in v.iter().enumerate() {
        let hij = dot(&w, vi);
        col[i] = hij;
        axpy(-hij, vi, &mut w);
    }
    col[j + 1] = norm(&w);
    Ok((z, az, w, col))
}

/// Solves `A x = b` from `x = 0`.
///
/// Each cycle keeps the preconditioned directions `z_j` and their images
/// `A z_j`, so the residual at the end of a cycle is formed from stored
/// products; it is recomputed with a fresh product before every restart.
pub fn fgmres<M: RightPreconditioner + ?Sized>(
    a: &SparseMatrix,
    b: &[f64],
    m: &M,
    opts: &GmresOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n_rows();
    if !a.is_square() || b.len() != n || m.dim() != n {
        return Err(Error::Dimension(format!(
            "system {}x{}, rhs {}, preconditioner {}",
            a.n_rows(),
            a.n_cols(),
            b.len(),
            m.dim()
        )));
    }
    if opts.restart == 0 || !(opts.rtol > 0.0) {
        return Err(Error::Input("restart must be >= 1 and rtol > 0".into()));
    }
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
                residual_history: vec![0.0],
                matvecs: 0,
            },
        ));
    }
    if !bnorm.is_finite() {
        return Err(Error::Input("right-hand side is not finite".into()));
    }

    let k = opts.restart;
    let target = opts.rtol * bnorm;
    let mut r = b.to_vec();
    let mut beta = bnorm;
    let mut its = 0;
    let mut matvecs = 0;
    let mut history = vec![1.0];
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut az: Vec<Vec<f64>> = Vec::with_capacity(k);
    // Hessenberg columns, rotated in place
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut cs = vec![0.0; k];
    let mut sn = vec![0.0; k];
    let mut g = vec![0.0; k + 1];

    loop {
        v.clear();
        z.clear();
        az.clear();
        h.clear();
        g.iter_mut().for_each(|e| *e = 0.0);
        g[0] = beta;
        v.push(r.iter().map(|e| e / beta).collect());

        let mut j = 0;
        while j < k && its < opts.maxit {
            let (zj, w0, w, mut col) = arnoldi_step(a, m, &v)?;
            matvecs += 1;
            let hn = col[j + 1];
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            if rho == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = col[j] / rho;
                sn[j] = col[j + 1] / rho;
            }
            col[j] = rho;
            col[j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            if !(g[j + 1].is_finite() && rho.is_finite()) {
                return Err(Error::Divergence(format!("non-finite Arnoldi data at iteration {}", its + 1)));
            }
            h.push(col);
            z.push(zj);
            az.push(w0);
            its += 1;
            j += 1;
            history.push(g[j].abs() / bnorm);
            if hn == 0.0 || g[j].abs() <= target {
                break;
            }
            v.push(w.iter().map(|e| e / hn).collect());
        }

        // back substitution on the rotated triangle
        let mut y = vec![0.0; j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..j).map(|l| h[l][i] * y[l]).sum();
            y[i] = if h[i][i] == 0.0 { 0.0 } else { (g[i] - s) / h[i][i] };
        }
        for (yi, (zi, azi)) in y.iter().zip(z.iter().zip(&az)) {
            axpy(*yi, zi, &mut x);
            axpy(-*yi, azi, &mut r);
        }
        if x.iter().any(|e| !e.is_finite()) {
            return Err(Error::Divergence("non-finite iterate".into()));
        }
        beta = norm(&r);
        if beta <= target {
            return Ok((
                x,
                SolveStats {
                    iterations: its,
                    relative_residual: beta / bnorm,
                    converged: true,
                    residual_history: history,
                    matvecs,
                },
            ));
        }
        // refresh the residual so rounding in the recurrence cannot accumulate
        let ax = a.spmv(&x)?;
        matvecs += 1;
        for ((ri, bi), axi) in r.iter_mut().zip(b).zip(&ax) {
            *ri = bi - axi;
        }
        beta = norm(&r);
        if beta <= target || its >= opts.maxit || j == 0 {
            return Ok((
                x,
                SolveStats {
                    iterations: its,
                    relative_residual: beta / bnorm,
                    converged: beta <= target,
                    residual_history: history,
                    matvecs,
                },
            ));
        }
    }
}
