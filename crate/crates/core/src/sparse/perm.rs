use crate::error::{Error, Result};

/// A bijection on `0..n`.
///
/// `forward[new] = old`: position `new` of the permuted object holds entry
/// `old` of the original. `inverse` is the reverse map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).collect();
        Self {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Builds a permutation from its new-to-old map, validating bijectivity.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (new, &old) in forward.iter().enumerate() {
            if old >= n {
                return Err(Error::Input(format!(
                    "permutation entry {old} out of range for length {n}"
                )));
            }
            if inverse[old] != usize::MAX {
                return Err(Error::Input(format!("permutation repeats index {old}")));
            }
            inverse[old] = new;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Applies `self` first and `then` second: the result maps new positions
    /// of `then` straight to original indices of `self`.
    pub fn then(&self, then: &Permutation) -> Permutation {
        assert_eq!(self.len(), then.len(), "permutation lengths differ");
        let forward: Vec<usize> = then.forward.iter().map(|&k| self.forward[k]).collect();
        let mut inverse = vec![0; forward.len()];
        for (new, &old) in forward.iter().enumerate() {
            inverse[old] = new;
        }
        Permutation { forward, inverse }
    }

    /// `out[new] = v[forward[new]]`.
    pub fn gather<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.forward.iter().map(|&old| v[old]).collect()
    }

    /// `out[forward[new]] = v[new]`.
    pub fn scatter<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (new, &old) in self.forward.iter().enumerate() {
            out[old] = v[new];
        }
        out
    }
}

/// Row/column permutations and diagonal scalings of a square system.
///
/// The transformed matrix is `B[i][j] = r[p(i)] * A[p(i)][q(j)] * c[q(j)]`
/// with `p = row_perm.forward()`, `q = col_perm.forward()`; the scale vectors
/// are indexed by the original row and column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PermScale {
    pub row_perm: Permutation,
    pub col_perm: Permutation,
    pub row_scale: Vec<f64>,
    pub col_scale: Vec<f64>,
}

impl PermScale {
    pub fn identity(n: usize) -> Self {
        Self {
            row_perm: Permutation::identity(n),
            col_perm: Permutation::identity(n),
            row_scale: vec![1.0; n],
            col_scale: vec![1.0; n],
        }
    }

    pub fn new(
        row_perm: Permutation,
        col_perm: Permutation,
        row_scale: Vec<f64>,
        col_scale: Vec<f64>,
    ) -> Result<Self> {
        let n = row_perm.len();
        if col_perm.len() != n || row_scale.len() != n || col_scale.len() != n {
            return Err(Error::Dimension(format!(
                "perm/scale lengths {} {} {} {} disagree",
                n,
                col_perm.len(),
                row_scale.len(),
                col_scale.len()
            )));
        }
        if let Some(s) = row_scale
            .iter()
            .chain(col_scale.iter())
            .find(|s| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::Input(format!("scale factor {s} is not positive and finite")));
        }
        Ok(Self {
            row_perm,
            col_perm,
            row_scale,
            col_scale,
        })
    }

    pub fn len(&self) -> usize {
        self.row_perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_perm.is_empty()
    }

    /// Reorders rows and columns of the already-transformed matrix by the same
    /// permutation `sym` (new-to-current positions), keeping the scalings.
    pub fn then_symmetric(&self, sym: &Permutation) -> PermScale {
        PermScale {
            row_perm: self.row_perm.then(sym),
            col_perm: self.col_perm.then(sym),
            row_scale: self.row_scale.clone(),
            col_scale: self.col_scale.clone(),
        }
    }

    /// Maps a right-hand side into transformed coordinates: `b'[i] = r[p(i)] b[p(i)]`.
    pub fn forward_rhs(&self, b: &[f64], out: &mut [f64]) {
        for (o, &old) in out.iter_mut().zip(self.row_perm.forward()) {
            *o = self.row_scale[old] * b[old];
        }
    }

    /// Maps a transformed solution back: `x[q(j)] = c[q(j)] y[j]`.
    pub fn backward_solution(&self, y: &[f64], out: &mut [f64]) {
        for (&yj, &old) in y.iter().zip(self.col_perm.forward()) {
            out[old] = self.col_scale[old] * yj;
        }
    }
}
