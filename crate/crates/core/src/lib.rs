//! Multilevel incomplete LDU preconditioning with deferred pivoting and
//! inverse-based dropping, plus a flexible GMRES driver.
//!
//! ```
//! use hilucsi::{build_preconditioner, fgmres, gallery, GmresOptions, SolverOptions};
//!
//! let a = gallery::laplacian_2d(20);
//! let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
//! let m = build_preconditioner(&a, &SolverOptions { dense_cutoff: 50, ..Default::default() }, true).unwrap();
//! let (x, stats) = fgmres(&a, &b, &m, &GmresOptions::default()).unwrap();
//! assert!(stats.converged);
//! assert!((x[0] - 1.0).abs() < 1e-4);
//! ```

pub mod crout;
pub mod error;
pub mod gallery;
pub mod krylov;
pub mod multilevel;
pub mod preprocess;
pub mod schur;
pub mod sparse;

pub use crout::{DropParams, LevelFactor, NnzReference};
pub use error::{Error, Result};
pub use krylov::{fgmres, GmresOptions, IdentityPreconditioner, RightPreconditioner, SolveStats};
pub use multilevel::{build_preconditioner, next_level_params, Preconditioner, SolverOptions};
pub use schur::{compute_schur, SchurResult};
pub use sparse::{read_matrix_market, write_matrix_market, MatrixSymmetry, PermScale, Permutation, SparseMatrix};
