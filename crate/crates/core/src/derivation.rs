//! Derivations `ad(a) + λ·d`, finite derivation tables, the Leibniz checker
//! and the exact solvers behind decomposition and annihilator spaces.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{structure_constant, BasisIndex, Element, Window};
use crate::linalg::{self, Rref, Solution, SparseRow};
use crate::scalar::Scalar;

/// The outer derivation `d(L_{β,j}) = β·L_{β,j}`.
pub fn outer_d(x: &Element) -> Element {
    Element::from_terms(
        x.terms()
            .map(|(b, c)| (b, c * &Scalar::from_int(b.alpha))),
    )
}

/// The derivation `ad(inner) + lambda·d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct InnerOuterDerivation {
    pub inner: Element,
    pub lambda: Scalar,
}

impl InnerOuterDerivation {
    pub fn new(inner: Element, lambda: Scalar) -> Self {
        InnerOuterDerivation { inner, lambda }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn inner(a: Element) -> Self {
        InnerOuterDerivation::new(a, Scalar::zero())
    }

    pub fn outer(lambda: Scalar) -> Self {
        InnerOuterDerivation::new(Element::zero(), lambda)
    }

    /// `ad(L_{0,0}) + d`, which sends `L_{β,j}` to `−j·L_{β,j}`.
    pub fn kernel() -> Self {
        InnerOuterDerivation::new(Element::l(0, 0), Scalar::from_int(1))
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = self.inner.bracket(x);
        if !self.lambda.is_zero() {
            out.add_scaled(&self.lambda, &outer_d(x));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero() && self.lambda.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        InnerOuterDerivation::new(&self.inner + &other.inner, &self.lambda + &other.lambda)
    }

    pub fn sub(&self, other: &Self) -> Self {
        InnerOuterDerivation::new(&self.inner - &other.inner, &self.lambda - &other.lambda)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        InnerOuterDerivation::new(self.inner.scale(c), c * &self.lambda)
    }

    /// Tabulates the action on every basis vector of `window`.
    pub fn to_table(&self, window: Window) -> DerivationTable {
        DerivationTable {
            window,
            assignments: window
                .indices()
                .map(|b| (b, self.apply(&Element::basis(b))))
                .collect(),
        }
    }
}

/// A linear map given by its values on the basis vectors of a window.
///
/// Values may be supported outside the window; only the inputs are bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTable {
    window: Window,
    assignments: BTreeMap<BasisIndex, Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("no assignment for {0}")]
    MissingAssignment(BasisIndex),
    #[error("assignment for {0} lies outside the window")]
    OutsideWindow(BasisIndex),
}

impl DerivationTable {
    pub fn new(window: Window, assignments: BTreeMap<BasisIndex, Element>) -> Result<Self, TableError> {
        if let Some(b) = assignments.keys().find(|b| !window.contains(**b)) {
            return Err(TableError::OutsideWindow(*b));
        }
        if let Some(b) = window.indices().find(|b| !assignments.contains_key(b)) {
            return Err(TableError::MissingAssignment(b));
        }
        Ok(DerivationTable { window, assignments })
    }

    /// Table of an arbitrary linear map given on basis vectors.
    pub fn from_fn(window: Window, mut f: impl FnMut(BasisIndex) -> Element) -> Self {
        DerivationTable {
            window,
            assignments: window.indices().map(|b| (b, f(b))).collect(),
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, b: BasisIndex) -> Option<&Element> {
        self.assignments.get(&b)
    }

    pub fn assignments(&self) -> impl Iterator<Item = (BasisIndex, &Element)> + '_ {
        self.assignments.iter().map(|(b, e)| (*b, e))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// A linear map that can be evaluated on at least some elements.
pub trait LinearMap {
    /// `None` when `x` lies outside the map's domain of definition.
    fn try_apply(&self, x: &Element) -> Option<Element>;
}

impl LinearMap for InnerOuterDerivation {
    fn try_apply(&self, x: &Element) -> Option<Element> {
        Some(self.apply(x))
    }
}

impl LinearMap for DerivationTable {
    fn try_apply(&self, x: &Element) -> Option<Element> {
        let mut out = Element::zero();
        for (b, c) in x.terms() {
            out.add_scaled(c, self.assignments.get(&b)?);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizFailure {
    pub x: Element,
    pub y: Element,
    /// `D([x,y]) − [D(x),y] − [x,D(y)]`.
    pub residual: Element,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LeibnizReport {
    pub checked: usize,
    pub skipped: Vec<(Element, Element)>,
    pub failures: Vec<LeibnizFailure>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `D([x,y]) = [D(x),y] + [x,D(y)]` exactly on each pair.
///
/// Pairs on which `D` cannot be evaluated (for tables: `x`, `y` or `[x,y]`
/// leaving the window) are listed as skipped.
pub fn check_leibniz<D: LinearMap + ?Sized>(d: &D, pairs: &[(Element, Element)]) -> LeibnizReport {
    let mut report = LeibnizReport::default();
    for (x, y) in pairs {
        let xy = x.bracket(y);
        let (Some(dx), Some(dy), Some(dxy)) = (d.try_apply(x), d.try_apply(y), d.try_apply(&xy)) else {
            report.skipped.push((x.clone(), y.clone()));
            continue;
        };
        report.checked += 1;
        let residual = &(&dxy - &dx.bracket(y)) - &x.bracket(&dy);
        if !residual.is_zero() {
            report.failures.push(LeibnizFailure {
                x: x.clone(),
                y: y.clone(),
                residual,
            });
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("inconsistent: the table is not ad(a) + λd for any a supported in the search window")]
    Inconsistent,
    #[error("underdetermined: {} free direction(s) remain", free.len())]
    Underdetermined { free: Vec<InnerOuterDerivation> },
}

/// Unknowns are `a_b` for each `b` in the search window (canonical order)
/// followed by `λ`.
struct Unknowns {
    search: Window,
}

impl Unknowns {
    fn count(&self) -> usize {
        self.search.len() + 1
    }

    fn lambda(&self) -> usize {
        self.search.len()
    }

    fn to_derivation(&self, v: &[Scalar]) -> InnerOuterDerivation {
        let inner = Element::from_terms(self.search.indices().zip(v.iter().cloned()));
        InnerOuterDerivation::new(inner, v[self.lambda()].clone())
    }

    /// Adds, per output index, the coefficients of `ad(a)·x + λ·d(x)` as a
    /// linear form in the unknowns.
    fn accumulate(&self, x: &Element, rows: &mut BTreeMap<BasisIndex, SparseRow>) {
        for (b, mu) in x.terms() {
            for (col, a) in self.search.indices().enumerate() {
                let (c, t) = structure_constant(a, b);
                if c != 0 {
                    *rows.entry(t).or_default().entry(col).or_default() += &(mu * &Scalar::from_i128(c));
                }
            }
            if b.alpha != 0 {
                *rows.entry(b).or_default().entry(self.lambda()).or_default() +=
                    &(mu * &Scalar::from_int(b.alpha));
            }
        }
    }
}

/// Recovers `(a, λ)` with `ad(a) + λd` equal to `table` on its window,
/// searching `a` supported in `search` (defaults to the table's window).
pub fn decompose(
    table: &DerivationTable,
    search: Option<Window>,
) -> Result<InnerOuterDerivation, DecomposeError> {
    let unknowns = Unknowns {
        search: search.unwrap_or(table.window),
    };
    let rhs_col = unknowns.count();
    let mut system: Vec<SparseRow> = Vec::new();
    for (b, value) in &table.assignments {
        let mut rows: BTreeMap<BasisIndex, SparseRow> = BTreeMap::new();
        unknowns.accumulate(&Element::basis(*b), &mut rows);
        for (t, c) in value.terms() {
            rows.entry(t).or_default().insert(rhs_col, c.clone());
        }
        system.extend(rows.into_values());
    }

    let solution = match linalg::solve(unknowns.count(), system) {
        Solution::Unique(v) => unknowns.to_derivation(&v),
        Solution::Inconsistent => return Err(DecomposeError::Inconsistent),
        Solution::Underdetermined { free, .. } => {
            return Err(DecomposeError::Underdetermined {
                free: free.iter().map(|v| unknowns.to_derivation(v)).collect(),
            })
        }
    };
    if solution.to_table(table.window) != *table {
        return Err(DecomposeError::Inconsistent);
    }
    Ok(solution)
}

/// Basis of all `ad(a) + λd` with `supp(a) ⊆ search` vanishing on every target.
///
/// The basis comes from the reduced row-echelon form with columns in
/// canonical index order and `λ` last, one vector per free column.
pub fn find_annihilators(targets: &[Element], search: Window) -> Vec<InnerOuterDerivation> {
    let unknowns = Unknowns { search };
    let mut system: Vec<SparseRow> = Vec::new();
    for x in targets {
        let mut rows = BTreeMap::new();
        unknowns.accumulate(x, &mut rows);
        system.extend(rows.into_values());
    }
    Rref::new(unknowns.count(), system)
        .nullspace()
        .iter()
        .map(|v| unknowns.to_derivation(v))
        .collect()
}
