mod common;

use common::*;
use hilucsi::gallery::{laplacian_2d, stokes_taylor_hood};
use hilucsi::sparse::{read_matrix_market_from, write_matrix_market_to};
use hilucsi::{build_preconditioner, fgmres, Error, GmresOptions, MatrixSymmetry, SolverOptions, SparseMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact(cutoff: usize) -> SolverOptions {
    SolverOptions {
        tau0: 0.0,
        alpha0: f64::INFINITY,
        kappa0: 3.0,
        dense_cutoff: cutoff,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_build_inverts_the_matrix(seed in any::<u64>(), n in 5usize..200, weight in 0.3f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_general(&mut rng, n, 4.0 / n as f64, weight);
        let m = build_preconditioner(&a, &exact(6), false).unwrap();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = m.apply(&a.spmv(&v).unwrap()).unwrap();
        prop_assert!(rel_diff(&back, &v) <= 1e-10, "{}", rel_diff(&back, &v));
    }

    #[test]
    fn terminal_rule_and_shrinking_levels(seed in any::<u64>(), n in 20usize..300, cutoff in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_general(&mut rng, n, 3.0 / n as f64, 0.8);
        let opts = SolverOptions { dense_cutoff: cutoff, ..Default::default() };
        let m = build_preconditioner(&a, &opts, false).unwrap();
        prop_assert!(m.terminal.len() as f64 <= (n as f64).cbrt().max(cutoff as f64));
        let sizes: Vec<usize> = m.stats.iter().map(|s| s.size).collect();
        prop_assert!(sizes.windows(2).all(|w| w[1] < w[0]), "{:?}", sizes);
        let nxt = sizes.iter().skip(1).copied().chain([m.terminal.len()]);
        for (s, next) in m.stats.iter().zip(nxt) {
            prop_assert_eq!(s.size - s.leading_size, next);
            prop_assert_eq!(s.static_deferrals + s.dynamic_deferrals, next);
        }
    }

    #[test]
    fn apply_is_linear_with_defaults(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_general(&mut rng, 120, 0.04, 0.7);
        let m = build_preconditioner(&a, &SolverOptions { dense_cutoff: 10, ..Default::default() }, false).unwrap();
        let u: Vec<f64> = (0..120).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..120).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let combo: Vec<f64> = u.iter().zip(&w).map(|(x, y)| s * x + y).collect();
        let lhs = m.apply(&combo).unwrap();
        let (mu, mw) = (m.apply(&u).unwrap(), m.apply(&w).unwrap());
        let rhs: Vec<f64> = mu.iter().zip(&mw).map(|(x, y)| s * x + y).collect();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-13 * (1.0 + s.abs()));
    }

    #[test]
    fn matrix_market_round_trip(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_general(&mut rng, n, 0.2, 1.0);
        let mut buf = Vec::new();
        write_matrix_market_to(&mut buf, &a).unwrap();
        let (back, sym) = read_matrix_market_from(buf.as_slice()).unwrap();
        prop_assert_eq!(sym, MatrixSymmetry::General);
        prop_assert_eq!(back, a);
    }
}

#[test]
fn symmetric_file_expands_to_both_triangles() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 4\n2 1 -1\n3 2 -1\n3 3 4\n";
    let (a, sym) = read_matrix_market_from(text.as_bytes()).unwrap();
    assert_eq!(sym, MatrixSymmetry::Symmetric);
    assert_eq!(a.get(0, 1), -1.0);
    assert_eq!(a.get(1, 0), -1.0);
    assert_eq!(a.get(1, 2), -1.0);
    assert_eq!(a.nnz(), 6);
}

#[test]
fn saddle_point_systems_converge_with_both_presets() {
    let a = stokes_taylor_hood(8);
    let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
    for opts in [SolverOptions::default(), SolverOptions::optimized_saddle()] {
        let opts = SolverOptions { dense_cutoff: 100, ..opts };
        let m = build_preconditioner(&a, &opts, true).unwrap();
        assert!(m.stats[0].static_deferrals > 0);
        assert!(m.stats[0].symmetric);
        let (x, st) = fgmres(&a, &b, &m, &GmresOptions::default()).unwrap();
        assert!(st.converged, "{st:?}");
        assert!(true_residual(&a, &x, &b) <= 1e-6);
    }
}

#[test]
fn random_saddle_systems_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        let a = random_saddle(&mut rng, 80, 30);
        let b: Vec<f64> = (0..110).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = build_preconditioner(&a, &SolverOptions { dense_cutoff: 10, ..Default::default() }, true).unwrap();
        let (x, st) = fgmres(&a, &b, &m, &GmresOptions::default()).unwrap();
        assert!(st.converged);
        let want = dense_solve(&a.to_dense(), &b).unwrap();
        assert!(rel_diff(&x, &want) <= 1e-4);
    }
}

#[test]
fn laplacian_converges_without_preconditioner_slower() {
    let a = laplacian_2d(24);
    let b = a.spmv(&vec![1.0; a.n_rows()]).unwrap();
    let m = build_preconditioner(&a, &SolverOptions { dense_cutoff: 50, ..Default::default() }, true).unwrap();
    let (_, with) = fgmres(&a, &b, &m, &GmresOptions::default()).unwrap();
    let (_, without) = fgmres(&a, &b, &hilucsi::IdentityPreconditioner(a.n_rows()), &GmresOptions::default()).unwrap();
    assert!(with.converged && without.converged);
    assert!(with.iterations * 5 < without.iterations, "{} vs {}", with.iterations, without.iterations);
}

#[test]
fn non_square_and_empty_inputs_are_rejected() {
    let rect = SparseMatrix::zeros(3, 4);
    assert!(matches!(build_preconditioner(&rect, &SolverOptions::default(), false), Err(Error::Dimension(_))));
    let empty = SparseMatrix::zeros(0, 0);
    assert!(build_preconditioner(&empty, &SolverOptions::default(), false).is_err());
}

#[test]
fn structurally_singular_input_names_rows() {
    // column 2 is empty
    let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![3.0, 4.0, 0.0], vec![5.0, 6.0, 0.0]]).unwrap();
    let opts = SolverOptions { dense_cutoff: 1, ..Default::default() };
    match build_preconditioner(&a, &opts, false) {
        Err(Error::StructurallySingular { unmatched_rows }) => assert_eq!(unmatched_rows.len(), 1),
        other => panic!("{other:?}"),
    }
}
