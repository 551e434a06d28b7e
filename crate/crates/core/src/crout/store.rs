//! Bi-index storage for the Crout factors.
//!
//! `L` is kept by columns and `U` by rows, each sorted by label. A per-factor
//! `first` cursor points at the smallest label not yet passed, and the
//! factors are threaded into linked lists keyed by that label, so that at
//! step `k` the list for `k` enumerates row `k` of `L` (resp. column `k` of
//! `U`) and the cursors give the active tails of the other columns (rows).
//!
//! Deferring step `k` gives it the label `n + gap`, past every other label.
//! Entries already stored under label `k` are re-appended under the new
//! label; the old slot stays behind the cursor and is dropped on finalize.

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Pending,
    Accepted,
    Deferred,
}

#[derive(Debug)]
pub struct AugmentedCroutStore {
    n: usize,
    n_lead: usize,
    pub(crate) l_cols: Vec<Vec<(usize, f64)>>,
    pub(crate) u_rows: Vec<Vec<(usize, f64)>>,
    l_first: Vec<usize>,
    u_first: Vec<usize>,
    l_head: Vec<usize>,
    l_next: Vec<usize>,
    u_head: Vec<usize>,
    u_next: Vec<usize>,
    /// Current label of every level index.
    label_of: Vec<usize>,
    pub(crate) status: Vec<Status>,
    pub(crate) accepted: Vec<usize>,
    pub(crate) deferred: Vec<usize>,
}

impl AugmentedCroutStore {
    /// Storage for an `n`-by-`n` level whose first `n_lead` indices are
    /// pivot candidates.
    pub fn new(n: usize, n_lead: usize) -> Self {
        let labels = n + n_lead;
        AugmentedCroutStore {
            n,
            n_lead,
            l_cols: vec![Vec::new(); n_lead],
            u_rows: vec![Vec::new(); n_lead],
            l_first: vec![0; n_lead],
            u_first: vec![0; n_lead],
            l_head: vec![NIL; labels],
            l_next: vec![NIL; n_lead],
            u_head: vec![NIL; labels],
            u_next: vec![NIL; n_lead],
            label_of: (0..n).collect(),
            status: vec![Status::Pending; n_lead],
            accepted: Vec::new(),
            deferred: Vec::new(),
        }
    }

    pub fn gap(&self) -> usize {
        self.deferred.len()
    }

    pub fn label_capacity(&self) -> usize {
        self.n + self.n_lead
    }

    pub fn label_of(&self, index: usize) -> usize {
        self.label_of[index]
    }

    /// Entries `(j, L_kj)` of row `k` of `L`.
    pub fn l_row(&self, k: usize) -> ListIter<'_> {
        ListIter {
            head: self.l_head[k],
            next: &self.l_next,
            first: &self.l_first,
            lists: &self.l_cols,
        }
    }

    /// Entries `(j, U_jk)` of column `k` of `U`.
    pub fn u_col(&self, k: usize) -> ListIter<'_> {
        ListIter {
            head: self.u_head[k],
            next: &self.u_next,
            first: &self.u_first,
            lists: &self.u_rows,
        }
    }

    /// Active tail (labels at or past the current step) of column `j` of `L`.
    pub fn l_tail(&self, j: usize) -> &[(usize, f64)] {
        &self.l_cols[j][self.l_first[j]..]
    }

    /// Active tail of row `j` of `U`.
    pub fn u_tail(&self, j: usize) -> &[(usize, f64)] {
        &self.u_rows[j][self.u_first[j]..]
    }

    /// Records step `k` as a pivot with strictly-past-`k` entries `l` (column
    /// of `L`) and `u` (row of `U`), both sorted by label.
    pub fn accept(&mut self, k: usize, l: Vec<(usize, f64)>, u: Vec<(usize, f64)>) {
        debug_assert!(l.iter().all(|e| e.0 > k) && u.iter().all(|e| e.0 > k));
        advance(&mut self.l_head, &mut self.l_next, &mut self.l_first, &self.l_cols, k);
        advance(&mut self.u_head, &mut self.u_next, &mut self.u_first, &self.u_rows, k);
        if let Some(&(lab, _)) = l.first() {
            link(&mut self.l_head, &mut self.l_next, lab, k);
        }
        if let Some(&(lab, _)) = u.first() {
            link(&mut self.u_head, &mut self.u_next, lab, k);
        }
        self.l_cols[k] = l;
        self.u_rows[k] = u;
        self.status[k] = Status::Accepted;
        self.accepted.push(k);
    }

    /// Moves step `k` past the end of the current label range.
    pub fn defer(&mut self, k: usize) {
        let label = self.n + self.gap();
        for (head, next, first, lists) in [
            (&mut self.l_head, &mut self.l_next, &mut self.l_first, &mut self.l_cols),
            (&mut self.u_head, &mut self.u_next, &mut self.u_first, &mut self.u_rows),
        ] {
            let mut j = head[k];
            while j != NIL {
                let v = lists[j][first[j]].1;
                lists[j].push((label, v));
                j = next[j];
            }
            advance(head, next, first, lists, k);
        }
        self.label_of[k] = label;
        self.status[k] = Status::Deferred;
        self.deferred.push(k);
    }

    /// Position of every label in the final ordering (accepted steps, then
    /// static tail, then dynamic deferrals), or `None` for vacated labels.
    pub fn final_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.n + self.gap()];
        for (p, &k) in self.accepted.iter().enumerate() {
            pos[k] = Some(p);
        }
        let m = self.accepted.len();
        for (t, lab) in (self.n_lead..self.n + self.gap()).enumerate() {
            pos[lab] = Some(m + t);
        }
        pos
    }

    /// Level indices in final order.
    pub fn final_order(&self) -> Vec<usize> {
        let mut order = self.accepted.clone();
        order.extend(self.n_lead..self.n);
        order.extend_from_slice(&self.deferred);
        order
    }
}

fn link(head: &mut [usize], next: &mut [usize], label: usize, j: usize) {
    next[j] = head[label];
    head[label] = j;
}

/// Moves every cursor sitting on label `k` to its next entry and relinks.
fn advance(head: &mut [usize], next: &mut [usize], first: &mut [usize], lists: &[Vec<(usize, f64)>], k: usize) {
    let mut j = std::mem::replace(&mut head[k], NIL);
    while j != NIL {
        let after = next[j];
        first[j] += 1;
        if let Some(&(lab, _)) = lists[j].get(first[j]) {
            link(head, next, lab, j);
        } else {
            next[j] = NIL;
        }
        j = after;
    }
}

pub struct ListIter<'a> {
    head: usize,
    next: &'a [usize],
    first: &'a [usize],
    lists: &'a [Vec<(usize, f64)>],
}

impl Iterator for ListIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        if self.head == NIL {
            return None;
        }
        let j = self.head;
        self.head = self.next[j];
        Some((j, self.lists[j][self.first[j]].1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traversal_follows_cursors() {
        let mut s = AugmentedCroutStore::new(4, 4);
        s.accept(0, vec![(1, 0.5), (3, 0.25)], vec![(2, 2.0)]);
        assert_eq!(s.l_row(1).collect::<Vec<_>>(), vec![(0, 0.5)]);
        assert_eq!(s.u_col(1).count(), 0);
        assert_eq!(s.u_col(2).collect::<Vec<_>>(), vec![(0, 2.0)]);
        s.accept(1, vec![(3, 1.0)], vec![]);
        // row 3 of L now has entries from columns 0 and 1
        let mut r3: Vec<_> = s.l_row(3).collect();
        r3.sort_by_key(|e| e.0);
        assert_eq!(r3, vec![(0, 0.25), (1, 1.0)]);
        assert_eq!(s.l_tail(0), &[(3, 0.25)]);
    }

    #[test]
    fn defer_relabels_past_end() {
        let mut s = AugmentedCroutStore::new(4, 4);
        s.accept(0, vec![(1, 0.5), (2, 0.3)], vec![(1, 0.7)]);
        s.defer(1);
        assert_eq!(s.label_of(1), 4);
        // the entry at label 1 reappears at label 4 after column 0's tail
        assert_eq!(s.l_tail(0), &[(2, 0.3), (4, 0.5)]);
        assert_eq!(s.u_tail(0), &[(4, 0.7)]);
        assert_eq!(s.u_col(4).collect::<Vec<_>>(), vec![(0, 0.7)]);
        s.accept(2, vec![], vec![]);
        s.accept(3, vec![], vec![]);
        assert_eq!(s.final_order(), vec![0, 2, 3, 1]);
        let pos = s.final_positions();
        assert_eq!(pos, vec![Some(0), None, Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn interleaved_defers_keep_relative_order() {
        let mut s = AugmentedCroutStore::new(6, 6);
        for k in 0..6 {
            if k == 1 || k == 4 {
                s.defer(k);
            } else {
                s.accept(k, vec![], vec![]);
            }
        }
        assert_eq!(s.final_order(), vec![0, 2, 3, 5, 1, 4]);
    }

    #[test]
    fn static_tail_precedes_dynamic() {
        let mut s = AugmentedCroutStore::new(5, 3);
        s.defer(0);
        s.accept(1, vec![], vec![]);
        s.accept(2, vec![], vec![]);
        assert_eq!(s.final_order(), vec![1, 2, 3, 4, 0]);
    }
}
