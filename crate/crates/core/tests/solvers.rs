mod common;

use blocklie::sample;
use blocklie::{decompose, find_annihilators, DecomposeError, Element, InnerOuterDerivation, Scalar, Window};
use num_traits::One;

fn w(a: i64, b: i64, i: u64) -> Window {
    Window::new(a, b, i).unwrap()
}

fn check_basis(targets: &[Element], search: Window) -> Vec<InnerOuterDerivation> {
    let basis = find_annihilators(targets, search);
    assert_eq!(basis.len(), common::annihilator_dim(targets, search), "targets {targets:?}");
    let coords: Vec<_> = basis.iter().map(|d| common::coordinates(d, search).unwrap()).collect();
    assert_eq!(common::rank(&coords), basis.len(), "basis is not independent");
    for d in &basis {
        for t in targets {
            assert!(d.apply(t).is_zero(), "{d} does not kill {t}");
        }
    }
    basis
}

#[test]
fn anchor_pair_annihilators_are_the_kernel_line() {
    let basis = check_basis(&[Element::l(0, 0), Element::l(1, 0)], w(-2, 2, 2));
    assert_eq!(basis, vec![InnerOuterDerivation::kernel()]);
}

#[test]
fn annihilators_of_minus_one_one() {
    let basis = check_basis(&[Element::l(-1, 1)], w(-2, 2, 2));
    let expected: Vec<_> = (0..=2u64).rev()
        .map(|i| InnerOuterDerivation::inner(Element::l(-(i as i64), i)))
        .collect();
    assert_eq!(basis, expected);
}

#[test]
fn annihilators_match_dense_oracle_on_random_targets() {
    let mut rng = sample::rng(21);
    let search = w(-3, 3, 3);
    for n in 0..30 {
        let targets: Vec<_> = (0..1 + n % 3).map(|_| sample::element(&mut rng, w(-2, 2, 2), 3)).collect();
        check_basis(&targets, search);
    }
}

#[test]
fn basis_is_reduced_with_lambda_last() {
    // Pivot coordinates form an identity block, so the output is canonical.
    let search = w(-2, 2, 1);
    let basis = find_annihilators(&[Element::zero()], search);
    assert_eq!(basis.len(), search.len() + 1);
    for (k, b) in search.indices().enumerate() {
        assert_eq!(basis[k], InnerOuterDerivation::inner(Element::basis(b)));
    }
    assert_eq!(basis.last(), Some(&InnerOuterDerivation::outer(Scalar::one())));
}

#[test]
fn decompose_agrees_with_dense_oracle() {
    let mut rng = sample::rng(22);
    let table_window = w(-2, 2, 2);
    for _ in 0..20 {
        let d = sample::derivation(&mut rng, table_window);
        let table = d.to_table(table_window);
        match (decompose(&table, None), common::decompose(&table, table_window)) {
            (Ok(got), common::Dense::Unique(want)) => assert_eq!(got, want),
            (got, _) => panic!("{d}: sparse {got:?}, dense disagrees"),
        }
    }
}

#[test]
fn decompose_reports_free_directions_like_the_oracle() {
    // Without i > 0 the kernel derivation is invisible.
    let flat = w(-3, 3, 0);
    let table = InnerOuterDerivation::inner(Element::l(2, 0)).to_table(flat);
    match (decompose(&table, None), common::decompose(&table, flat)) {
        (Err(DecomposeError::Underdetermined { free }), common::Dense::Underdetermined(k)) => {
            assert_eq!(free.len(), k);
            assert_eq!(free, vec![InnerOuterDerivation::kernel()]);
        }
        (got, _) => panic!("unexpected {got:?}"),
    }
}

#[test]
fn decompose_rejects_non_derivations_like_the_oracle() {
    let table_window = w(-2, 2, 2);
    let mut rng = sample::rng(23);
    for _ in 0..10 {
        let table = blocklie::DerivationTable::from_fn(table_window, |_| sample::element(&mut rng, table_window, 2));
        let dense_inconsistent = matches!(common::decompose(&table, table_window), common::Dense::Inconsistent);
        assert!(dense_inconsistent);
        assert_eq!(decompose(&table, None), Err(DecomposeError::Inconsistent));
    }
}
