//! Per-level preprocessing: equilibration (optionally symmetrized), static
//! deferring of small diagonals, then fill-reducing reordering of the
//! leading block.

mod matching;
mod ordering;

pub use matching::{equilibrate, max_product_matching, Matching};
pub use ordering::{amd_order, bandwidth, rcm_order, symbolic_fill};

use crate::error::{Error, Result};
use crate::sparse::{PermScale, Permutation, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillOrdering {
    Rcm,
    Amd,
}

/// How a level is preprocessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessMode {
    pub symmetric: bool,
    pub ordering: FillOrdering,
    /// Treat a structurally singular matrix as an error instead of falling
    /// back to identity scaling.
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct PreprocessReport {
    /// Equilibration composed with `fill_order`; applying it to the level
    /// input yields the matrix handed to the factorization.
    pub perm_scale: PermScale,
    /// Statically deferred indices, in equilibrated coordinates.
    pub statically_deferred: Vec<usize>,
    /// Leading-block indices in fill-reducing order followed by the
    /// statically deferred ones (equilibrated coordinates, new-to-old).
    pub fill_order: Permutation,
    pub symmetric_mode: bool,
    /// Size of the leading block (candidates for the Crout pivots).
    pub n_lead: usize,
    /// Set when the matching failed and identity scaling was used.
    pub matching_fallback: bool,
}

/// Replaces the scalings by `sqrt(r_i c_i)` on both sides and applies the row
/// permutation symmetrically.
pub fn symmetrize_equilibration(ps: &PermScale) -> PermScale {
    let s: Vec<f64> = ps
        .row_scale
        .iter()
        .zip(&ps.col_scale)
        .map(|(r, c)| (r * c).sqrt())
        .collect();
    PermScale {
        row_perm: ps.row_perm.clone(),
        col_perm: ps.row_perm.clone(),
        row_scale: s.clone(),
        col_scale: s,
    }
}

/// Indices whose diagonal magnitude is below `1 / kappa_d`; a missing
/// diagonal counts as zero.
pub fn static_defer(a_scaled: &SparseMatrix, kappa_d: f64) -> Vec<usize> {
    let threshold = 1.0 / kappa_d;
    (0..a_scaled.n_rows())
        .filter(|&i| a_scaled.get(i, i).abs() < threshold)
        .collect()
}

/// Runs equilibration, static deferring and reordering, in that order.
pub fn preprocess(a: &SparseMatrix, kappa_d: f64, mode: PreprocessMode) -> Result<PreprocessReport> {
    if !a.is_square() {
        return Err(Error::Dimension("preprocessing requires a square matrix".into()));
    }
    let n = a.n_rows();
    let matching = max_product_matching(a)?;
    let (eq, forced, fallback) = if matching.is_perfect() {
        let ps = matching::perm_scale_from_matching(&matching)?;
        let ps = if mode.symmetric { symmetrize_equilibration(&ps) } else { ps };
        (ps, Vec::new(), false)
    } else if mode.strict {
        return Err(Error::StructurallySingular {
            unmatched_rows: matching.unmatched_rows(),
        });
    } else {
        (PermScale::identity(n), matching.unmatched_rows(), true)
    };

    let scaled = a.apply_perm_scale(&eq)?;
    let mut deferred = static_defer(&scaled, kappa_d);
    if !forced.is_empty() {
        deferred.extend(forced);
        deferred.sort_unstable();
        deferred.dedup();
    }
    let mut is_deferred = vec![false; n];
    for &i in &deferred {
        is_deferred[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !is_deferred[i]).collect();

    let lead_pattern = scaled.submatrix(&kept, &kept).symmetrized_pattern()?;
    let lead_order = match mode.ordering {
        FillOrdering::Rcm => rcm_order(&lead_pattern)?,
        FillOrdering::Amd => amd_order(&lead_pattern)?,
    };
    let mut order: Vec<usize> = lead_order.forward().iter().map(|&k| kept[k]).collect();
    order.extend_from_slice(&deferred);
    let fill_order = Permutation::from_forward(order)?;

    Ok(PreprocessReport {
        perm_scale: eq.then_symmetric(&fill_order),
        n_lead: kept.len(),
        statically_deferred: deferred,
        fill_order,
        symmetric_mode: mode.symmetric,
        matching_fallback: fallback,
    })
}
