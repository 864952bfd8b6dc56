//! Exact sparse Gauss–Jordan elimination over ℚ(i).
//!
//! Rows are sparse maps from column to nonzero coefficient. Reduction
//! produces the reduced row-echelon form, which is unique, so the results
//! do not depend on row order.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::Scalar;

/// A sparse row; absent columns are zero.
pub type SparseRow = BTreeMap<usize, Scalar>;

/// Reduced row-echelon form of a system with `ncols` columns.
#[derive(Debug, Clone)]
pub struct Rref {
    ncols: usize,
    /// Nonzero rows, each with leading coefficient 1 at `pivots[r]`.
    rows: Vec<SparseRow>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn new(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut pending: Vec<SparseRow> = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|_, v| !v.is_zero());
                r
            })
            .filter(|r| !r.is_empty())
            .collect();
        let mut done: Vec<SparseRow> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();

        for col in 0..ncols {
            // sparsest row with an entry in this column keeps fill-in low
            let Some(pos) = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_key(&col))
                .min_by_key(|(_, r)| r.len())
                .map(|(n, _)| n)
            else {
                continue;
            };
            let mut pivot_row = pending.swap_remove(pos);
            let inv = pivot_row[&col].inv();
            for v in pivot_row.values_mut() {
                *v = &*v * &inv;
            }
            for r in pending.iter_mut().chain(done.iter_mut()) {
                if let Some(f) = r.get(&col).cloned() {
                    axpy(r, &-f, &pivot_row);
                }
            }
            pending.retain(|r| !r.is_empty());
            done.push(pivot_row);
            pivots.push(col);
        }
        debug_assert!(pending.is_empty());
        Rref {
            ncols,
            rows: done,
            pivots,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|c| !is_pivot[*c]).collect()
    }

    /// Basis of the right nullspace, one vector per free column, in free-column order.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![Scalar::zero(); self.ncols];
                v[f] = Scalar::from_int(1);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if let Some(c) = row.get(&f) {
                        v[p] = -c;
                    }
                }
                v
            })
            .collect()
    }
}

/// `row += f · other`, removing cancelled entries.
fn axpy(row: &mut SparseRow, f: &Scalar, other: &SparseRow) {
    for (c, v) in other {
        let add = f * v;
        let e = row.entry(*c).or_default();
        *e += &add;
        if e.is_zero() {
            row.remove(c);
        }
    }
}

/// Outcome of solving `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    /// A particular solution (free variables set to zero) and a nullspace basis.
    Underdetermined {
        particular: Vec<Scalar>,
        free: Vec<Vec<Scalar>>,
    },
    Inconsistent,
}

/// Solves a system whose rows carry the right-hand side in column `nvars`.
pub fn solve(nvars: usize, augmented_rows: impl IntoIterator<Item = SparseRow>) -> Solution {
    let rref = Rref::new(nvars + 1, augmented_rows);
    if rref.pivots.last() == Some(&nvars) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Scalar::zero(); nvars];
    for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
        if let Some(v) = row.get(&nvars) {
            x[p] = v.clone();
        }
    }
    if rref.rank() == nvars {
        return Solution::Unique(x);
    }
    let free = rref
        .nullspace()
        .into_iter()
        .filter(|v| v[nvars].is_zero())
        .map(|mut v| {
            v.truncate(nvars);
            v
        })
        .collect();
    Solution::Underdetermined { particular: x, free }
}
