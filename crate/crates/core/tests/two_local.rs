use blocklie::expr_io::{format_witness_family, parse_witness_family};
use blocklie::sample;
use blocklie::two_local::{audit_witnesses, default_probes, Perturbation};
use blocklie::{find_annihilators, reconstruct, Element, InnerOuterDerivation, Scalar, Window, WitnessFamilySpec};
use rand::Rng;

fn w(a: i64, b: i64, i: u64) -> Window {
    Window::new(a, b, i).unwrap()
}

/// Valid family: every perturbation kernel kills its own pair.
fn random_family(seed: u64) -> WitnessFamilySpec {
    let mut rng = sample::rng(seed);
    let small = w(-2, 2, 2);
    let hidden = sample::derivation(&mut rng, small);
    let mut ps = Vec::new();
    let anchor = [Element::l(0, 0), Element::l(1, 0)];
    let probe = Element::l(-1, 1);
    for n in 0..6 {
        let (x, y) = match n {
            0 => (anchor[0].clone(), anchor[1].clone()),
            1 => (probe.clone(), probe.clone()),
            _ => (sample::element(&mut rng, small, 2), sample::element(&mut rng, small, 2)),
        };
        let ker = find_annihilators(&[x.clone(), y.clone()], w(-3, 3, 3));
        if ker.is_empty() {
            continue;
        }
        let k = ker[rng.gen_range(0..ker.len())].clone();
        ps.push(Perturbation { x, y, kernel: k, coeff: sample::nonzero_scalar(&mut rng) });
    }
    WitnessFamilySpec::new(hidden, ps).expect("kernels chosen from the annihilator space")
}

#[test]
fn valid_families_reconstruct_their_hidden_derivation() {
    let probes = default_probes(w(-3, 3, 3), 1);
    for seed in 0..25 {
        let family = random_family(seed);
        let hidden = family.hidden().clone();
        let r = reconstruct(&family.into_map(), &probes).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(r.passed(), "seed {seed}");
        assert_eq!(r.derivation, hidden, "seed {seed}");
    }
}

#[test]
fn valid_families_pass_the_audit() {
    for seed in 100..110 {
        let family = random_family(seed);
        let mut pairs: Vec<_> = family.perturbations().iter().map(|p| (p.x.clone(), p.y.clone())).collect();
        pairs.extend(sample::element_pairs(&mut sample::rng(seed), w(-2, 2, 2), 3, 20));
        let report = audit_witnesses(&family.into_map(), &pairs);
        assert!(report.passed(), "seed {seed}: {:?}", report.violations);
    }
}

#[test]
fn witness_files_round_trip() {
    for seed in 200..210 {
        let family = random_family(seed);
        let text = format_witness_family(&family);
        assert_eq!(parse_witness_family(&text, true).unwrap(), family, "{text}");
    }
}

#[test]
fn anchor_perturbation_is_undone_by_the_correction() {
    let hidden = InnerOuterDerivation::new(Element::l(2, 1), Scalar::from_int(3));
    let c = Scalar::ratio(-7, 3);
    let family = WitnessFamilySpec::new(
        hidden.clone(),
        vec![Perturbation {
            x: Element::l(0, 0),
            y: Element::l(1, 0),
            kernel: InnerOuterDerivation::kernel(),
            coeff: c.clone(),
        }],
    )
    .unwrap();
    let r = reconstruct(&family.into_map(), &default_probes(w(-2, 2, 2), 0)).unwrap();
    assert_eq!(r.xi, c);
    assert_eq!(r.anchor, hidden.add(&InnerOuterDerivation::kernel().scale(&c)));
    assert_eq!(r.derivation, hidden);
}
