//! Fill-reducing orderings on structurally symmetric patterns.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::sparse::{Permutation, SparseMatrix};

fn check_pattern(pattern: &SparseMatrix) -> Result<()> {
    if !pattern.is_square() {
        return Err(Error::Dimension("ordering requires a square pattern".into()));
    }
    Ok(())
}

/// Off-diagonal degree of each vertex.
fn degrees(pattern: &SparseMatrix) -> Vec<usize> {
    (0..pattern.n_rows())
        .map(|i| pattern.row(i).0.iter().filter(|&&j| j != i).count())
        .collect()
}

/// BFS level structure from `root` restricted to unvisited vertices.
/// Returns the vertices in BFS order and the index where the last level starts.
fn level_structure(pattern: &SparseMatrix, root: usize, mark: &mut [usize], stamp: usize) -> (Vec<usize>, usize, usize) {
    let mut order = vec![root];
    mark[root] = stamp;
    let mut level_start = 0;
    let mut depth = 0;
    loop {
        let level_end = order.len();
        for k in level_start..level_end {
            let v = order[k];
            for &w in pattern.row(v).0 {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    order.push(w);
                }
            }
        }
        if order.len() == level_end {
            return (order, level_start, depth);
        }
        level_start = level_end;
        depth += 1;
    }
}

/// Reverse Cuthill-McKee. Each connected component starts from a
/// pseudo-peripheral vertex found by repeated BFS; neighbors are queued in
/// increasing degree, ties by index.
pub fn rcm_order(pattern: &SparseMatrix) -> Result<Permutation> {
    check_pattern(pattern)?;
    let n = pattern.n_rows();
    let deg = degrees(pattern);
    let mut visited = vec![false; n];
    let mut mark = vec![0usize; n];
    let mut stamp = 0;
    let mut order = Vec::with_capacity(n);
    let mut nbrs: Vec<usize> = Vec::new();

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start: lowest-degree vertex of the component's
        // last BFS level, repeated while the eccentricity grows
        let mut root = seed;
        stamp += 1;
        let (mut comp, mut last, mut ecc) = level_structure(pattern, root, &mut mark, stamp);
        if let Some(&v) = comp.iter().min_by_key(|&&v| (deg[v], v)) {
            root = v;
            stamp += 1;
            (comp, last, ecc) = level_structure(pattern, root, &mut mark, stamp);
        }
        loop {
            let cand = *comp[last..].iter().min_by_key(|&&v| (deg[v], v)).unwrap();
            stamp += 1;
            let (c2, l2, e2) = level_structure(pattern, cand, &mut mark, stamp);
            if e2 > ecc {
                root = cand;
                comp = c2;
                last = l2;
                ecc = e2;
            } else {
                break;
            }
        }
        let _ = comp;

        let start = order.len();
        let mut queue = VecDeque::new();
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(pattern.row(v).0.iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_unstable_by_key(|&w| (deg[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
        debug_assert!(order.len() > start);
    }
    order.reverse();
    Permutation::from_forward(order)
}

/// Approximate minimum degree ordering (aggressive absorption, dense rows
/// ordered last).
pub fn amd_order(pattern: &SparseMatrix) -> Result<Permutation> {
    check_pattern(pattern)?;
    let n = pattern.n_rows();
    let (p, _, _) = amd::order::<usize>(n, pattern.row_offsets(), pattern.col_indices(), &amd::Control::default())
        .map_err(|s| Error::Input(format!("amd rejected the pattern: {s:?}")))?;
    Permutation::from_forward(p)
}

/// Number of fill edges created by symbolic elimination of a symmetric
/// pattern in the order `perm` (new-to-old).
pub fn symbolic_fill(pattern: &SparseMatrix, perm: &Permutation) -> usize {
    let n = pattern.n_rows();
    let pos = perm.inverse();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| pattern.row(i).0.iter().copied().filter(|&j| j != i).map(|j| pos[j]).collect())
        .collect();
    // re-key by new position
    let mut by_pos: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (old, set) in adj.drain(..).enumerate() {
        by_pos[pos[old]] = set;
    }
    let mut fill = 0;
    for k in 0..n {
        let higher: Vec<usize> = by_pos[k].iter().copied().filter(|&j| j > k).collect();
        for a in 0..higher.len() {
            for b in a + 1..higher.len() {
                let (x, y) = (higher[a], higher[b]);
                if by_pos[x].insert(y) {
                    by_pos[y].insert(x);
                    fill += 1;
                }
            }
        }
    }
    fill
}

/// Half-bandwidth `max |i - j|` of the symmetrically permuted pattern.
pub fn bandwidth(pattern: &SparseMatrix, perm: &Permutation) -> usize {
    let pos = perm.inverse();
    let mut bw = 0;
    for i in 0..pattern.n_rows() {
        for &j in pattern.row(i).0 {
            bw = bw.max(pos[i].abs_diff(pos[j]));
        }
    }
    bw
}
