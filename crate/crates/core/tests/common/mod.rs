#![allow(dead_code)]

use hilucsi::SparseMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting on a dense copy; `None` when a
/// pivot falls below `1e-12` times the largest entry.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut w: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| w[i][k].abs().total_cmp(&w[j][k].abs()))?;
        if w[p][k].abs() <= 1e-12 * scale {
            return None;
        }
        w.swap(k, p);
        for i in k + 1..n {
            let f = w[i][k] / w[k][k];
            if f != 0.0 {
                for j in k..=n {
                    w[i][j] -= f * w[k][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| w[i][j] * x[j]).sum();
        x[i] = (w[i][n] - s) / w[i][i];
    }
    Some(x)
}

pub fn dense_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(dense_solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

pub fn norm_inf(a: &[Vec<f64>]) -> f64 {
    a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn norm_one(a: &[Vec<f64>]) -> f64 {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    norm2(&d) / norm2(y)
}

/// `I + strict` as a dense matrix.
pub fn unit_plus(strict: &SparseMatrix) -> Vec<Vec<f64>> {
    let mut d = strict.to_dense();
    for (i, r) in d.iter_mut().enumerate() {
        r[i] += 1.0;
    }
    d
}

pub fn true_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.spmv(x).unwrap();
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| q - p).collect();
    norm2(&r) / norm2(b)
}

/// Rows of a diagonally weighted random sparse matrix, shuffled so the
/// large entries sit off the diagonal. `weight < 1` gives up dominance.
pub fn random_general(rng: &mut ChaCha8Rng, n: usize, density: f64, weight: f64) -> SparseMatrix {
    loop {
        let mut d = vec![vec![0.0f64; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            let mut sum = 0.0;
            for (j, v) in row.iter_mut().enumerate() {
                if i != j && rng.gen::<f64>() < density {
                    *v = rng.gen_range(-1.0..1.0);
                    sum += v.abs();
                }
            }
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            row[i] = sign * (weight * sum + rng.gen_range(0.1..1.0));
        }
        d.shuffle(rng);
        if dense_solve(&d, &vec![1.0; n]).is_some() {
            return SparseMatrix::from_dense(&d).unwrap();
        }
    }
}

/// `[[K, B^T], [B, 0]]` with `K` symmetric positive definite (`nv x nv`) and
/// `B` of full row rank (`np x nv`, `np < nv`).
pub fn random_saddle(rng: &mut ChaCha8Rng, nv: usize, np: usize) -> SparseMatrix {
    assert!(np < nv);
    let n = nv + np;
    loop {
        let mut d = vec![vec![0.0f64; n]; n];
        for i in 0..nv {
            for j in 0..i {
                if rng.gen::<f64>() < 0.15 {
                    let v = rng.gen_range(-1.0..1.0);
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
        }
        for i in 0..nv {
            let sum: f64 = (0..nv).filter(|&j| j != i).map(|j| d[i][j].abs()).sum();
            d[i][i] = sum + rng.gen_range(0.5..2.0);
        }
        let cols: Vec<usize> = {
            let mut c: Vec<usize> = (0..nv).collect();
            c.shuffle(rng);
            c
        };
        for p in 0..np {
            let r = nv + p;
            d[r][cols[p]] = rng.gen_range(1.0..2.0);
            for j in 0..nv {
                if rng.gen::<f64>() < 0.1 {
                    d[r][j] += rng.gen_range(-0.5..0.5);
                }
            }
            for j in 0..nv {
                d[j][r] = d[r][j];
            }
        }
        if dense_solve(&d, &vec![1.0; n]).is_some() {
            return SparseMatrix::from_dense(&d).unwrap();
        }
    }
}

