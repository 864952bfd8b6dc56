//! Exact computations in the Block-type Lie algebra with basis `L_{α,i}`
//! (`α ∈ ℤ`, `i ∈ ℤ₊`) and bracket
//! `[L_{α,i}, L_{β,j}] = ((α−1)(j+1) − (β−1)(i+1)) L_{α+β,i+j}`.
//!
//! Scalars are Gaussian rationals, elements are finitely supported, and all
//! arithmetic is exact. On top of the bracket the crate provides the
//! derivations `ad(a) + λd`, solvers that recover them from tables, witness
//! families for 2-local derivations, and the reconstruction of any 2-local
//! derivation as a global one.

pub mod algebra;
pub mod cli;
pub mod derivation;
pub mod expr_io;
pub mod linalg;
pub mod sample;
pub mod scalar;
pub mod two_local;

pub use algebra::{bracket, cocycle, cocycle_form, structure_constant, BasisIndex, Element, Window};
pub use derivation::{
    check_leibniz, decompose, find_annihilators, outer_d, DecomposeError, DerivationTable, InnerOuterDerivation,
};
pub use expr_io::{format_derivation, format_element, parse_derivation, parse_element};
pub use scalar::Scalar;
pub use two_local::{reconstruct, TwoLocalMap, WitnessFamilySpec, WitnessProvider};
