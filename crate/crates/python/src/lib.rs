//! Python bindings: sparse matrices, the multilevel preconditioner and
//! FGMRES.

use hilucsi_core as core;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(_) => PyIOError::new_err(e.to_string()),
        core::Error::Input(_)
        | core::Error::Dimension(_)
        | core::Error::UnsupportedFormat(_)
        | core::Error::Parse { .. }
        | core::Error::StructurallySingular { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Compressed sparse row matrix of `float` values.
#[pyclass(name = "SparseMatrix", module = "hilucsi", frozen)]
pub struct PySparseMatrix {
    inner: core::SparseMatrix,
}

#[pymethods]
impl PySparseMatrix {
    /// Builds from coordinate lists; duplicates are summed.
    #[staticmethod]
    fn from_triplets(n_rows: usize, n_cols: usize, rows: Vec<usize>, cols: Vec<usize>, values: Vec<f64>) -> PyResult<Self> {
        if rows.len() != cols.len() || rows.len() != values.len() {
            return Err(PyValueError::new_err("rows, cols and values differ in length"));
        }
        let t: Vec<(usize, usize, f64)> = rows.into_iter().zip(cols).zip(values).map(|((r, c), v)| (r, c, v)).collect();
        core::SparseMatrix::from_triplets(n_rows, n_cols, &t).map(|inner| Self { inner }).map_err(py_err)
    }

    /// Builds from CSR arrays (`indptr`, `indices`, `data`), as in SciPy.
    #[staticmethod]
    fn from_csr(n_rows: usize, n_cols: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> PyResult<Self> {
        core::SparseMatrix::from_csr(n_rows, n_cols, indptr, indices, data)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_dense(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        core::SparseMatrix::from_dense(&rows).map(|inner| Self { inner }).map_err(py_err)
    }

    /// Reads a coordinate Matrix Market file; returns `(matrix, symmetric)`.
    #[staticmethod]
    fn read_matrix_market(path: &str) -> PyResult<(Self, bool)> {
        let (inner, sym) = core::read_matrix_market(path).map_err(py_err)?;
        Ok((Self { inner }, sym == core::MatrixSymmetry::Symmetric))
    }

    fn write_matrix_market(&self, path: &str) -> PyResult<()> {
        core::write_matrix_market(path, &self.inner).map_err(py_err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n_rows(), self.inner.n_cols())
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.n_rows() || j >= self.inner.n_cols() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.get(i, j))
    }

    /// `A x`.
    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.spmv(&x).map_err(py_err)
    }

    fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    fn to_dense(&self) -> Vec<Vec<f64>> {
        self.inner.to_dense()
    }

    /// `(indptr, indices, data)`.
    fn to_csr(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        (
            self.inner.row_offsets().to_vec(),
            self.inner.col_indices().to_vec(),
            self.inner.values().to_vec(),
        )
    }

    fn __repr__(&self) -> String {
        format!("SparseMatrix({}x{}, nnz={})", self.inner.n_rows(), self.inner.n_cols(), self.inner.nnz())
    }
}

/// Per-level build statistics.
#[pyclass(name = "LevelStats", module = "hilucsi", frozen, get_all)]
pub struct PyLevelStats {
    level: usize,
    size: usize,
    leading_size: usize,
    static_deferrals: usize,
    dynamic_deferrals: usize,
    nnz: usize,
    symmetric: bool,
    alpha: f64,
    tau: f64,
    kappa: f64,
    seconds: f64,
}

#[pymethods]
impl PyLevelStats {
    fn __repr__(&self) -> String {
        format!(
            "LevelStats(level={}, size={}, leading={}, static={}, dynamic={}, nnz={})",
            self.level, self.size, self.leading_size, self.static_deferrals, self.dynamic_deferrals, self.nnz
        )
    }
}

/// Multilevel ILDU preconditioner `M`, applied as `M^{-1} u`.
#[pyclass(name = "Preconditioner", module = "hilucsi", frozen)]
pub struct PyPreconditioner {
    inner: core::Preconditioner,
}

#[pymethods]
impl PyPreconditioner {
    /// `symm_levels=None` picks the number of symmetric levels automatically.
    #[new]
    #[pyo3(signature = (matrix, tau=1e-4, alpha=10.0, kappa=3.0, symm_levels=None, dense_cutoff=500, symmetric=false))]
    fn new(
        py: Python<'_>,
        matrix: &PySparseMatrix,
        tau: f64,
        alpha: f64,
        kappa: f64,
        symm_levels: Option<usize>,
        dense_cutoff: usize,
        symmetric: bool,
    ) -> PyResult<Self> {
        let opts = core::SolverOptions {
            tau0: tau,
            alpha0: alpha,
            kappa0: kappa,
            symm_pre_levels: symm_levels,
            dense_cutoff,
            ..Default::default()
        };
        let a = &matrix.inner;
        py.detach(|| core::build_preconditioner(a, &opts, symmetric))
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    fn apply(&self, u: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&u).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    #[getter]
    fn nnz_ratio(&self) -> f64 {
        self.inner.nnz_ratio()
    }

    /// Sparse levels plus the dense terminal level.
    #[getter]
    fn num_levels(&self) -> usize {
        self.inner.num_levels()
    }

    #[getter]
    fn terminal_size(&self) -> usize {
        self.inner.terminal.len()
    }

    #[getter]
    fn levels(&self) -> Vec<PyLevelStats> {
        self.inner
            .stats
            .iter()
            .map(|s| PyLevelStats {
                level: s.level,
                size: s.size,
                leading_size: s.leading_size,
                static_deferrals: s.static_deferrals,
                dynamic_deferrals: s.dynamic_deferrals,
                nnz: s.nnz,
                symmetric: s.symmetric,
                alpha: s.params.alpha,
                tau: s.params.tau,
                kappa: s.params.kappa_d,
                seconds: s.seconds,
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Preconditioner(n={}, levels={}, nnz_ratio={:.3})",
            self.inner.len(),
            self.inner.num_levels(),
            self.inner.nnz_ratio()
        )
    }
}

#[pyclass(name = "SolveStats", module = "hilucsi", frozen, get_all)]
pub struct PySolveStats {
    iterations: usize,
    relative_residual: f64,
    converged: bool,
    residual_history: Vec<f64>,
    matvecs: usize,
}

#[pymethods]
impl PySolveStats {
    fn __repr__(&self) -> String {
        format!(
            "SolveStats(iterations={}, relative_residual={:.3e}, converged={})",
            self.iterations,
            self.relative_residual,
            if self.converged { "True" } else { "False" }
        )
    }
}

/// Right-preconditioned restarted FGMRES; returns `(x, stats)`.
#[pyfunction]
#[pyo3(signature = (matrix, b, preconditioner=None, restart=30, rtol=1e-6, maxit=500))]
fn fgmres(
    py: Python<'_>,
    matrix: &PySparseMatrix,
    b: Vec<f64>,
    preconditioner: Option<&PyPreconditioner>,
    restart: usize,
    rtol: f64,
    maxit: usize,
) -> PyResult<(Vec<f64>, PySolveStats)> {
    let opts = core::GmresOptions { restart, rtol, maxit };
    let a = &matrix.inner;
    let (x, st) = py
        .detach(|| match preconditioner {
            Some(m) => core::fgmres(a, &b, &m.inner, &opts),
            None => core::fgmres(a, &b, &core::IdentityPreconditioner(a.n_rows()), &opts),
        })
        .map_err(py_err)?;
    Ok((
        x,
        PySolveStats {
            iterations: st.iterations,
            relative_residual: st.relative_residual,
            converged: st.converged,
            residual_history: st.residual_history,
            matvecs: st.matvecs,
        },
    ))
}

/// Thresholds `(alpha, tau, kappa)` for the level after `level`.
#[pyfunction]
fn next_level_params(alpha: f64, tau: f64, kappa: f64, level: usize) -> PyResult<(f64, f64, f64)> {
    let base = core::DropParams::new(alpha, tau, kappa).map_err(py_err)?;
    let p = core::next_level_params(&base, level);
    Ok((p.alpha, p.tau, p.kappa_d))
}

/// 5-point Laplacian on a `k x k` grid.
#[pyfunction]
fn laplacian_2d(k: usize) -> PySparseMatrix {
    PySparseMatrix {
        inner: core::gallery::laplacian_2d(k),
    }
}

/// Taylor-Hood Stokes saddle-point system on a `k x k` mesh.
#[pyfunction]
fn stokes_taylor_hood(k: usize) -> PyResult<PySparseMatrix> {
    if k < 2 {
        return Err(PyValueError::new_err("k must be at least 2"));
    }
    Ok(PySparseMatrix {
        inner: core::gallery::stokes_taylor_hood(k),
    })
}

#[pymodule]
fn hilucsi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySparseMatrix>()?;
    m.add_class::<PyPreconditioner>()?;
    m.add_class::<PyLevelStats>()?;
    m.add_class::<PySolveStats>()?;
    m.add_function(wrap_pyfunction!(fgmres, m)?)?;
    m.add_function(wrap_pyfunction!(next_level_params, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian_2d, m)?)?;
    m.add_function(wrap_pyfunction!(stokes_taylor_hood, m)?)?;
    Ok(())
}
