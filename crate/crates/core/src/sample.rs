//! Seeded pseudorandom scalars, elements and derivations for randomized checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, Window};
use crate::derivation::InnerOuterDerivation;
use crate::scalar::Scalar;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small Gaussian rational: mostly integers, some fractions, some complex.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let part = |rng: &mut R| {
        let num = rng.gen_range(-6..=6);
        let den = if rng.gen_bool(0.3) { rng.gen_range(2..=5) } else { 1 };
        Scalar::ratio(num, den)
    };
    let re = part(rng);
    if rng.gen_bool(0.25) {
        let im = part(rng);
        re + im * Scalar::i()
    } else {
        re
    }
}

pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = scalar(rng);
        if !num_traits::Zero::is_zero(&s) {
            return s;
        }
    }
}

/// Between one and `max_terms` nonzero terms supported in `window`.
pub fn element<R: Rng + ?Sized>(rng: &mut R, window: Window, max_terms: usize) -> Element {
    let indices: Vec<_> = window.indices().collect();
    let n = rng.gen_range(1..=max_terms.max(1));
    let mut e = Element::zero();
    for b in indices.choose_multiple(rng, n.min(indices.len())) {
        e.add_term(*b, nonzero_scalar(rng));
    }
    e
}

/// Each index of `window` present with probability one half.
pub fn dense_element<R: Rng + ?Sized>(rng: &mut R, window: Window) -> Element {
    let mut e = Element::zero();
    for b in window.indices() {
        if rng.gen_bool(0.5) {
            e.add_term(b, nonzero_scalar(rng));
        }
    }
    e
}

/// `ad(a) + λd` with `a` supported in `window`.
pub fn derivation<R: Rng + ?Sized>(rng: &mut R, window: Window) -> InnerOuterDerivation {
    let inner = element(rng, window, 6);
    InnerOuterDerivation::new(inner, scalar(rng))
}

pub fn element_pairs<R: Rng + ?Sized>(
    rng: &mut R,
    window: Window,
    max_terms: usize,
    count: usize,
) -> Vec<(Element, Element)> {
    (0..count)
        .map(|_| (element(rng, window, max_terms), element(rng, window, max_terms)))
        .collect()
}
