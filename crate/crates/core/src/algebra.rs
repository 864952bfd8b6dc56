//! Basis indexing, finitely supported elements and the bracket
//!
//! `[L_{α,i}, L_{β,j}] = ((α−1)(j+1) − (β−1)(i+1)) · L_{α+β, i+j}`.
//!
//! Elements are finitely supported, so every operation here is exact on the
//! whole infinite-dimensional algebra; no truncation ever happens.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::Scalar;

/// The label `(α, i)` of the basis vector `L_{α,i}`.
///
/// Field order gives the derived `Ord` the canonical lexicographic
/// `(alpha, i)` order used for every deterministic listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub alpha: i64,
    pub i: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("second index must be nonnegative, got {0}")]
pub struct NegativeGrade(pub i64);

impl BasisIndex {
    pub const fn new(alpha: i64, i: u64) -> Self {
        BasisIndex { alpha, i }
    }

    pub fn try_new(alpha: i64, i: i64) -> Result<Self, NegativeGrade> {
        u64::try_from(i)
            .map(|i| BasisIndex { alpha, i })
            .map_err(|_| NegativeGrade(i))
    }

    /// Component-wise sum, the index of `[L_self, L_other]`.
    pub fn shift(self, other: BasisIndex) -> BasisIndex {
        BasisIndex {
            alpha: self.alpha + other.alpha,
            i: self.i + other.i,
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L[{},{}]", self.alpha, self.i)
    }
}

/// Finite rectangle `alpha_min ≤ α ≤ alpha_max`, `0 ≤ i ≤ i_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    alpha_min: i64,
    alpha_max: i64,
    i_max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("empty window: alpha_min {0} > alpha_max {1}")]
    Empty(i64, i64),
    #[error("negative i_max {0}")]
    NegativeGrade(i64),
}

impl Window {
    pub fn new(alpha_min: i64, alpha_max: i64, i_max: u64) -> Result<Self, WindowError> {
        if alpha_min > alpha_max {
            return Err(WindowError::Empty(alpha_min, alpha_max));
        }
        Ok(Window {
            alpha_min,
            alpha_max,
            i_max,
        })
    }

    /// Like [`Window::new`] but accepting a signed `i_max`, as read from text.
    pub fn from_signed(alpha_min: i64, alpha_max: i64, i_max: i64) -> Result<Self, WindowError> {
        let i_max = u64::try_from(i_max).map_err(|_| WindowError::NegativeGrade(i_max))?;
        Window::new(alpha_min, alpha_max, i_max)
    }

    pub fn alpha_min(&self) -> i64 {
        self.alpha_min
    }

    pub fn alpha_max(&self) -> i64 {
        self.alpha_max
    }

    pub fn i_max(&self) -> u64 {
        self.i_max
    }

    pub fn contains(&self, b: BasisIndex) -> bool {
        (self.alpha_min..=self.alpha_max).contains(&b.alpha) && b.i <= self.i_max
    }

    pub fn len(&self) -> usize {
        ((self.alpha_max - self.alpha_min + 1) as usize) * (self.i_max as usize + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Indices in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (self.alpha_min..=self.alpha_max)
            .flat_map(move |alpha| (0..=self.i_max).map(move |i| BasisIndex { alpha, i }))
    }

    /// Position of `b` in [`Window::indices`], if inside.
    pub fn position(&self, b: BasisIndex) -> Option<usize> {
        self.contains(b)
            .then(|| ((b.alpha - self.alpha_min) as usize) * (self.i_max as usize + 1) + b.i as usize)
    }

    pub fn basis(&self) -> Vec<Element> {
        self.indices().map(Element::basis).collect()
    }
}

/// A finitely supported linear combination `Σ μ_{γ,k} L_{γ,k}`.
///
/// No stored coefficient is ever zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(b: BasisIndex) -> Self {
        Element::term(Scalar::from_int(1), b)
    }

    /// `L_{alpha,i}`.
    pub fn l(alpha: i64, i: u64) -> Self {
        Element::basis(BasisIndex::new(alpha, i))
    }

    pub fn term(c: Scalar, b: BasisIndex) -> Self {
        let mut e = Element::zero();
        e.add_term(b, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisIndex, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (b, c) in terms {
            e.add_term(b, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `L_b`; zero outside the support.
    pub fn coeff(&self, b: BasisIndex) -> Scalar {
        self.terms.get(&b).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (BasisIndex, &Scalar)> + '_ {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn support(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        self.terms.keys().copied()
    }

    pub fn supported_in(&self, w: &Window) -> bool {
        self.support().all(|b| w.contains(b))
    }

    /// Adds `c · L_b` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, b: BasisIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &Element) {
        if c.is_zero() {
            return;
        }
        for (b, v) in &other.terms {
            self.add_term(*b, c * v);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(b, v)| (*b, c * v)).collect(),
        }
    }

    /// Keeps only the terms whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(BasisIndex) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| keep(**b))
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// The bilinear extension of [`structure_constant`].
    pub fn bracket(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let (c, t) = structure_constant(*a, *b);
                if c != 0 {
                    out.add_term(t, &(x * y) * &Scalar::from_i128(c));
                }
            }
        }
        out
    }

    /// If `self = c · other` for some scalar `c`, returns it. Both zero gives `Some(0)`.
    pub fn ratio_to(&self, other: &Element) -> Option<Scalar> {
        let Some((b, ov)) = other.terms.iter().next() else {
            return self.is_zero().then(Scalar::zero);
        };
        let c = &self.coeff(*b) / ov;
        (other.scale(&c) == *self).then_some(c)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(1), rhs);
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(mut self, rhs: Element) -> Element {
        self.add_scaled(&Scalar::from_int(1), &rhs);
        self
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), rhs);
        out
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// `[L_a, L_b] = coefficient · L_target`, with the integer coefficient
/// `(α−1)(j+1) − (β−1)(i+1)` and `target = (α+β, i+j)`.
pub fn structure_constant(a: BasisIndex, b: BasisIndex) -> (i128, BasisIndex) {
    let (alpha, i) = (a.alpha as i128, a.i as i128);
    let (beta, j) = (b.alpha as i128, b.i as i128);
    ((alpha - 1) * (j + 1) - (beta - 1) * (i + 1), a.shift(b))
}

pub fn bracket(x: &Element, y: &Element) -> Element {
    x.bracket(y)
}

/// Central-extension cocycle `ψ(L_a, L_b) = δ_{α+β,0} δ_{i,0} δ_{j,0} (α³−α)/6`.
pub fn cocycle(a: BasisIndex, b: BasisIndex) -> Scalar {
    if a.alpha + b.alpha != 0 || a.i != 0 || b.i != 0 {
        return Scalar::zero();
    }
    let alpha = a.alpha as i128;
    // α³−α = (α−1)α(α+1) is always divisible by 6
    Scalar::from_i128((alpha * alpha * alpha - alpha) / 6)
}

/// [`cocycle`] extended bilinearly.
pub fn cocycle_form(x: &Element, y: &Element) -> Scalar {
    let mut total = Scalar::zero();
    for (a, u) in x.terms() {
        if a.i != 0 {
            continue;
        }
        let partner = BasisIndex::new(-a.alpha, 0);
        let v = y.coeff(partner);
        if !v.is_zero() {
            total += &(&(u * &v) * &cocycle(a, partner));
        }
    }
    total
}
