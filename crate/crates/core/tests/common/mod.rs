//! Dense exact linear algebra used as an independent reference for the
//! sparse solvers. Columns are built by applying each unit derivation
//! `ad(L_a)` and `d` directly, so nothing here goes through `linalg`.

#![allow(dead_code)]

use std::collections::BTreeMap;

use blocklie::{BasisIndex, DerivationTable, Element, InnerOuterDerivation, Scalar, Window};
use num_traits::{One, Zero};

/// Unit derivations in unknown order: `ad(L_a)` for `a` in the window, then `d`.
pub fn units(search: Window) -> Vec<InnerOuterDerivation> {
    let mut out: Vec<_> = search
        .indices()
        .map(|b| InnerOuterDerivation::inner(Element::basis(b)))
        .collect();
    out.push(InnerOuterDerivation::outer(Scalar::one()));
    out
}

/// Rows keyed by (input position, output index), one column per unit.
fn image_matrix(inputs: &[Element], search: Window) -> (Vec<(usize, BasisIndex)>, Vec<Vec<Scalar>>) {
    let units = units(search);
    let mut rows: BTreeMap<(usize, BasisIndex), Vec<Scalar>> = BTreeMap::new();
    for (k, u) in units.iter().enumerate() {
        for (t, x) in inputs.iter().enumerate() {
            for (b, c) in u.apply(x).terms() {
                rows.entry((t, b)).or_insert_with(|| vec![Scalar::zero(); units.len()])[k] = c.clone();
            }
        }
    }
    let keys = rows.keys().copied().collect();
    (keys, rows.into_values().collect())
}

/// In-place dense Gauss–Jordan; returns pivot columns.
pub fn rref(m: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for k in 0..m.len() {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for col in 0..m[k].len() {
                    let d = &f * &m[r][col];
                    m[k][col] = &m[k][col] - &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[Vec<Scalar>]) -> usize {
    let ncols = vectors.first().map_or(0, Vec::len);
    let mut m = vectors.to_vec();
    rref(&mut m, ncols).len()
}

/// Dimension of the space of `ad(a) + λd`, `supp(a) ⊆ search`, killing every input.
pub fn annihilator_dim(inputs: &[Element], search: Window) -> usize {
    let n = search.len() + 1;
    let (_, mut m) = image_matrix(inputs, search);
    n - rref(&mut m, n).len()
}

/// Coordinates of `d` in the unit basis, or `None` if `a` leaves the window.
pub fn coordinates(d: &InnerOuterDerivation, search: Window) -> Option<Vec<Scalar>> {
    if !d.inner.supported_in(&search) {
        return None;
    }
    let mut v: Vec<Scalar> = search.indices().map(|b| d.inner.coeff(b)).collect();
    v.push(d.lambda.clone());
    Some(v)
}

pub enum Dense {
    Unique(InnerOuterDerivation),
    Underdetermined(usize),
    Inconsistent,
}

/// Solves `ad(a) + λd = table` densely over the table's window.
pub fn decompose(table: &DerivationTable, search: Window) -> Dense {
    let inputs: Vec<Element> = table.assignments().map(|(b, _)| Element::basis(b)).collect();
    let targets: Vec<&Element> = table.assignments().map(|(_, v)| v).collect();
    let n = search.len() + 1;
    let (keys, mut m) = image_matrix(&inputs, search);
    let mut index: BTreeMap<(usize, BasisIndex), usize> = keys.iter().enumerate().map(|(r, k)| (*k, r)).collect();
    for row in m.iter_mut() {
        row.push(Scalar::zero());
    }
    for (t, v) in targets.iter().enumerate() {
        for (b, c) in v.terms() {
            let r = *index.entry((t, b)).or_insert_with(|| {
                m.push(vec![Scalar::zero(); n + 1]);
                m.len() - 1
            });
            m[r][n] = c.clone();
        }
    }
    let pivots = rref(&mut m, n + 1);
    if pivots.last() == Some(&n) {
        return Dense::Inconsistent;
    }
    if pivots.len() < n {
        return Dense::Underdetermined(n - pivots.len());
    }
    let v: Vec<Scalar> = (0..n).map(|r| m[r][n].clone()).collect();
    let inner = Element::from_terms(search.indices().zip(v.iter().cloned()));
    Dense::Unique(InnerOuterDerivation::new(inner, v[n - 1].clone()))
}
