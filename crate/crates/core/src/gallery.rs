//! Model problems used by the tests, benchmarks and examples.

use crate::sparse::SparseMatrix;

/// 5-point Laplacian on a `k x k` interior grid with Dirichlet boundary,
/// natural ordering, unscaled (`4` on the diagonal).
pub fn laplacian_2d(k: usize) -> SparseMatrix {
    let n = k * k;
    let mut t = Vec::with_capacity(5 * n);
    for j in 0..k {
        for i in 0..k {
            let p = i + k * j;
            t.push((p, p, 4.0));
            if i > 0 {
                t.push((p, p - 1, -1.0));
            }
            if i + 1 < k {
                t.push((p, p + 1, -1.0));
            }
            if j > 0 {
                t.push((p, p - k, -1.0));
            }
            if j + 1 < k {
                t.push((p, p + k, -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &t).expect("valid stencil")
}

/// Stokes system `[[K, 0, Bx^T], [0, K, By^T], [Bx, By, 0]]` from P2-P1
/// Taylor-Hood elements on a `k x k` triangulated unit square.
///
/// Velocity vanishes on the boundary (those unknowns are eliminated); the
/// first pressure unknown is pinned by an identity row and column. Size is
/// `2 (2k-1)^2 + (k+1)^2`.
pub fn stokes_taylor_hood(k: usize) -> SparseMatrix {
    assert!(k >= 2, "need at least 2 cells per side");
    let side = 2 * k + 1;
    let h = 1.0 / (2 * k) as f64;
    let interior = |i: usize, j: usize| i > 0 && j > 0 && i + 1 < side && j + 1 < side;
    let mut vel = vec![usize::MAX; side * side];
    let mut nv = 0;
    for j in 0..side {
        for i in 0..side {
            if interior(i, j) {
                vel[i + side * j] = nv;
                nv += 1;
            }
        }
    }
    let pside = k + 1;
    let np = pside * pside;
    let n = 2 * nv + np;
    let pdof = |i: usize, j: usize| 2 * nv + i / 2 + pside * (j / 2);

    let mut t = Vec::new();
    for cj in 0..k {
        for ci in 0..k {
            let (x0, y0) = (2 * ci, 2 * cj);
            let corners = [(x0, y0), (x0 + 2, y0), (x0 + 2, y0 + 2), (x0, y0 + 2)];
            // diagonals run through the domain corners so no triangle has
            // all three vertices on the boundary
            let slash = (2 * ci < k) == (2 * cj < k);
            let tris = if slash {
                [[corners[0], corners[1], corners[2]], [corners[0], corners[2], corners[3]]]
            } else {
                [[corners[0], corners[1], corners[3]], [corners[1], corners[2], corners[3]]]
            };
            for tri in tris {
                assemble_triangle(&tri, h, &vel, side, nv, &pdof, &mut t);
            }
        }
    }
    let pin = 2 * nv;
    t.retain(|&(r, c, _)| r != pin && c != pin);
    t.push((pin, pin, 1.0));
    SparseMatrix::from_triplets(n, n, &t).expect("valid assembly")
}

fn assemble_triangle(
    tri: &[(usize, usize); 3],
    h: f64,
    vel: &[usize],
    side: usize,
    nv: usize,
    pdof: &dyn Fn(usize, usize) -> usize,
    t: &mut Vec<(usize, usize, f64)>,
) {
    let xy = |p: (usize, usize)| (p.0 as f64 * h, p.1 as f64 * h);
    let (p0, p1, p2) = (xy(tri[0]), xy(tri[1]), xy(tri[2]));
    let det = (p1.0 - p0.0) * (p2.1 - p0.1) - (p2.0 - p0.0) * (p1.1 - p0.1);
    let area = det.abs() / 2.0;
    let grad_l = [
        ((p1.1 - p2.1) / det, (p2.0 - p1.0) / det),
        ((p2.1 - p0.1) / det, (p0.0 - p2.0) / det),
        ((p0.1 - p1.1) / det, (p1.0 - p0.0) / det),
    ];
    // P2 nodes: vertices, then midpoints of edges (1,2), (0,2), (0,1)
    let mid = |a: (usize, usize), b: (usize, usize)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    let nodes = [tri[0], tri[1], tri[2], mid(tri[1], tri[2]), mid(tri[0], tri[2]), mid(tri[0], tri[1])];
    let edges = [(1, 2), (0, 2), (0, 1)];
    let grad_phi = |a: usize, lam: &[f64; 3]| -> (f64, f64) {
        if a < 3 {
            let s = 4.0 * lam[a] - 1.0;
            (s * grad_l[a].0, s * grad_l[a].1)
        } else {
            let (i, j) = edges[a - 3];
            (
                4.0 * (lam[i] * grad_l[j].0 + lam[j] * grad_l[i].0),
                4.0 * (lam[i] * grad_l[j].1 + lam[j] * grad_l[i].1),
            )
        }
    };
    // edge-midpoint rule, exact for quadratics
    let quad = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];
    let w = area / 3.0;
    for lam in &quad {
        let g: Vec<(f64, f64)> = (0..6).map(|a| grad_phi(a, lam)).collect();
        for a in 0..6 {
            let va = vel[nodes[a].0 + side * nodes[a].1];
            if va == usize::MAX {
                continue;
            }
            for b in 0..6 {
                let vb = vel[nodes[b].0 + side * nodes[b].1];
                if vb == usize::MAX {
                    continue;
                }
                let kab = w * (g[a].0 * g[b].0 + g[a].1 * g[b].1);
                t.push((va, vb, kab));
                t.push((nv + va, nv + vb, kab));
            }
            for (q, lq) in lam.iter().enumerate() {
                let p = pdof(tri[q].0, tri[q].1);
                let bx = -w * lq * g[a].0;
                let by = -w * lq * g[a].1;
                t.push((p, va, bx));
                t.push((va, p, bx));
                t.push((p, nv + va, by));
                t.push((nv + va, p, by));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilevel::dense_factorize;

    #[test]
    fn laplacian_shape() {
        let a = laplacian_2d(4);
        assert_eq!(a.n_rows(), 16);
        assert_eq!(a.nnz(), 16 + 2 * 2 * 4 * 3);
        assert_eq!(a.asymmetry_norm(), 0.0);
        let ones = a.spmv(&[1.0; 16]).unwrap();
        assert_eq!(ones[5], 0.0);
        assert_eq!(ones[0], 2.0);
    }

    #[test]
    fn stokes_structure() {
        let k = 3;
        let a = stokes_taylor_hood(k);
        let nv = (2 * k - 1) * (2 * k - 1);
        let np = (k + 1) * (k + 1);
        assert_eq!(a.n_rows(), 2 * nv + np);
        assert!(a.asymmetry_norm() <= 1e-14 * a.frobenius_norm());
        // zero pressure block apart from the pin
        for p in 2 * nv + 1..a.n_rows() {
            assert_eq!(a.get(p, p), 0.0);
        }
        assert_eq!(stokes_taylor_hood(19).n_rows(), 3138);
    }

    #[test]
    fn stokes_is_nonsingular() {
        let a = stokes_taylor_hood(4);
        let lu = dense_factorize(&a);
        assert_eq!(lu.replaced_pivots(), 0);
        let u = lu.upper();
        let min = (0..a.n_rows()).map(|i| u[i][i].abs()).fold(f64::INFINITY, f64::min);
        assert!(min > 1e-8, "{min}");
    }

    #[test]
    fn stiffness_rows_annihilate_constants_inside() {
        // the centre node's support lies inside the domain, so K 1 = 0 there
        let k = 4;
        let a = stokes_taylor_hood(k);
        let inner = 2 * k - 1;
        let centre = (k - 1) + inner * (k - 1);
        let (c, v) = a.row(centre);
        let sum: f64 = c.iter().zip(v).filter(|e| *e.0 < inner * inner).map(|e| e.1).sum();
        assert!(sum.abs() < 1e-12, "{sum}");
        assert!(a.get(centre, centre) > 0.0);
    }
}
