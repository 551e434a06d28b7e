//! Builds and solves the bundled model problems with default settings and
//! prints per-level statistics.

use std::time::Instant;

use hilucsi::{build_preconditioner, fgmres, gallery, GmresOptions, SolverOptions, SparseMatrix};

fn run(name: &str, a: &SparseMatrix, symmetric: bool) {
    let opts = SolverOptions::default();
    let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
    let t = Instant::now();
    let m = build_preconditioner(a, &opts, symmetric).unwrap();
    let factor = t.elapsed().as_secs_f64();
    let (_, s) = fgmres(a, &b, &m, &GmresOptions::default()).unwrap();
    println!(
        "{name}: n={} levels={} nnz_ratio={:.2} factor={:.3}s iters={} converged={} terminal={}",
        a.n_rows(),
        m.num_levels(),
        m.nnz_ratio(),
        factor,
        s.iterations,
        s.converged,
        m.terminal.len()
    );
    for (i, l) in m.stats.iter().enumerate() {
        println!(
            "  level {}: size={} m={} static={} dynamic={} sym={} nnz={} {:.3}s (pre {:.3} crout {:.3} schur {:.3}) flops/n={:.0} schurwork/n={:.0}",
            i + 1,
            l.size,
            l.leading_size,
            l.static_deferrals,
            l.dynamic_deferrals,
            l.symmetric,
            l.nnz,
            l.seconds, l.preprocess_seconds, l.crout_seconds, l.schur_seconds, l.crout_flops as f64 / l.size as f64, l.schur_work as f64 / l.size as f64
        );
    }
}

fn main() {
    for k in [32, 64, 128] {
        run(&format!("laplacian {k}x{k}"), &gallery::laplacian_2d(k), true);
    }
    run("stokes k=19", &gallery::stokes_taylor_hood(19), true);
}
