//! 2-local derivations represented by their witness families, audits of the
//! witness contract, the structural checks on witnesses and values that hold
//! once `Δ(L_{0,0}) = Δ(L_{1,0}) = 0`, and the reconstruction of a 2-local
//! derivation as a global `ad(a) + λd`.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{BasisIndex, Element, Window};
use crate::derivation::InnerOuterDerivation;
use crate::scalar::Scalar;

/// Supplies a witness derivation `D_{x,y}` for every ordered pair.
///
/// Implementations must be deterministic. The witness contract
/// (`D_{x,y}(x) = Δ(x)` and `D_{x,y}(y) = Δ(y)`) is not assumed; see
/// [`audit_witnesses`].
pub trait WitnessProvider {
    fn witness(&self, x: &Element, y: &Element) -> InnerOuterDerivation;
}

impl<F> WitnessProvider for F
where
    F: Fn(&Element, &Element) -> InnerOuterDerivation,
{
    fn witness(&self, x: &Element, y: &Element) -> InnerOuterDerivation {
        self(x, y)
    }
}

/// A 2-local map `Δ`, with `Δ(x) := D_{x,x}(x)`.
#[derive(Debug, Clone)]
pub struct TwoLocalMap<P> {
    provider: P,
}

impl<P: WitnessProvider> TwoLocalMap<P> {
    pub fn new(provider: P) -> Self {
        TwoLocalMap { provider }
    }

    pub fn provider(&self) -> &P {
        &self.provider
    }

    pub fn witness(&self, x: &Element, y: &Element) -> InnerOuterDerivation {
        self.provider.witness(x, y)
    }

    pub fn evaluate(&self, x: &Element) -> Element {
        self.provider.witness(x, x).apply(x)
    }
}

/// One perturbation of a witness family: on the ordered pair `(x, y)` the
/// witness becomes `hidden + coeff·kernel`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub x: Element,
    pub y: Element,
    pub kernel: InnerOuterDerivation,
    pub coeff: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("perturbation kernel does not annihilate {element} of pair ({x}; {y}); residual {residual}")]
pub struct KernelNotAnnihilating {
    pub x: Element,
    pub y: Element,
    pub element: Element,
    pub residual: Element,
}

/// A witness family around a hidden derivation.
///
/// Every perturbation kernel is checked to kill both members of its pair,
/// so the family realizes a genuine 2-local derivation equal to `hidden`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFamilySpec {
    hidden: InnerOuterDerivation,
    perturbations: Vec<Perturbation>,
}

impl WitnessFamilySpec {
    pub fn new(hidden: InnerOuterDerivation, perturbations: Vec<Perturbation>) -> Result<Self, KernelNotAnnihilating> {
        for p in &perturbations {
            for member in [&p.x, &p.y] {
                let residual = p.kernel.apply(member);
                if !residual.is_zero() {
                    return Err(KernelNotAnnihilating {
                        x: p.x.clone(),
                        y: p.y.clone(),
                        element: member.clone(),
                        residual,
                    });
                }
            }
        }
        Ok(Self::new_unchecked(hidden, perturbations))
    }

    /// Skips kernel validation, for building deliberately broken families.
    pub fn new_unchecked(hidden: InnerOuterDerivation, perturbations: Vec<Perturbation>) -> Self {
        WitnessFamilySpec { hidden, perturbations }
    }

    pub fn constant(hidden: InnerOuterDerivation) -> Self {
        Self::new_unchecked(hidden, Vec::new())
    }

    pub fn hidden(&self) -> &InnerOuterDerivation {
        &self.hidden
    }

    pub fn perturbations(&self) -> &[Perturbation] {
        &self.perturbations
    }

    pub fn into_map(self) -> TwoLocalMap<Self> {
        TwoLocalMap::new(self)
    }
}

impl WitnessProvider for WitnessFamilySpec {
    fn witness(&self, x: &Element, y: &Element) -> InnerOuterDerivation {
        self.perturbations
            .iter()
            .filter(|p| p.x == *x && p.y == *y)
            .fold(self.hidden.clone(), |d, p| d.add(&p.kernel.scale(&p.coeff)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessViolation {
    /// `D_{x,y}(member) ≠ Δ(member)`; residual is `D_{x,y}(member) − Δ(member)`.
    Contract {
        x: Element,
        y: Element,
        member: Element,
        residual: Element,
    },
    /// `Δ(k·x) ≠ k·Δ(x)`; residual is `Δ(k·x) − k·Δ(x)`.
    Homogeneity { x: Element, k: Scalar, residual: Element },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub pairs_checked: usize,
    pub homogeneity_checked: usize,
    pub violations: Vec<WitnessViolation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scalars used for the homogeneity audit.
pub fn homogeneity_scalars() -> [Scalar; 4] {
    [Scalar::zero(), Scalar::from_int(-1), Scalar::from_int(2), Scalar::ratio(1, 2)]
}

/// Checks the witness contract on each pair and `Δ(kx) = kΔ(x)` on each
/// distinct pair member.
pub fn audit_witnesses<P: WitnessProvider>(delta: &TwoLocalMap<P>, pairs: &[(Element, Element)]) -> AuditReport {
    let mut report = AuditReport::default();
    let mut members: Vec<&Element> = Vec::new();
    for (x, y) in pairs {
        report.pairs_checked += 1;
        let d = delta.witness(x, y);
        for member in [x, y] {
            let residual = &d.apply(member) - &delta.evaluate(member);
            if !residual.is_zero() {
                report.violations.push(WitnessViolation::Contract {
                    x: x.clone(),
                    y: y.clone(),
                    member: member.clone(),
                    residual,
                });
            }
            if !members.contains(&member) {
                members.push(member);
            }
        }
    }
    for x in members {
        let dx = delta.evaluate(x);
        for k in homogeneity_scalars() {
            report.homogeneity_checked += 1;
            let residual = &delta.evaluate(&x.scale(&k)) - &dx.scale(&k);
            if !residual.is_zero() {
                report.violations.push(WitnessViolation::Homogeneity {
                    x: x.clone(),
                    k,
                    residual,
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    /// The hypothesis of the check does not hold; `residual` is the value
    /// that was required to vanish.
    #[error("precondition failed: {what} is {residual}, expected 0")]
    PreconditionFailed { what: String, residual: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintViolation {
    /// A term of `inner` outside the allowed support.
    Support { index: BasisIndex, coeff: Scalar },
    /// The `L_{0,0}` coefficient of `inner` differs from the required value.
    CenterCoefficient { expected: Scalar, found: Scalar },
    /// `lambda` must vanish but does not.
    Lambda { found: Scalar },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintReport {
    pub violations: Vec<ConstraintViolation>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For `j ≠ −β`, the index `(k_i, i)` with `k_i = (βi+β−i+j)/(j+1)` when that
/// quotient is an integer: these are exactly the `L_{α,i}` commuting with `L_{β,j}`.
pub fn commuting_alpha(beta: i64, j: u64, i: u64) -> Option<i64> {
    let (beta, j, i) = (beta as i128, j as i128, i as i128);
    let num = beta * i + beta - i + j;
    (num % (j + 1) == 0).then(|| (num / (j + 1)) as i64)
}

/// Shape of a derivation killing `L_{β,j}`.
///
/// For `β + j ≠ 0`: `supp(inner) ⊆ {(k_i, i)} ∪ {(0,0)}` and the `L_{0,0}`
/// coefficient is `β/(β+j)·λ`. For `j = −β`: `supp(inner) ⊆ {(−i, i)}` and
/// `λ = 0` unless `β = 0`.
pub fn lemma31_constraint_check(beta: i64, j: u64, d: &InnerOuterDerivation) -> Result<ConstraintReport, CheckError> {
    let target = Element::l(beta, j);
    let residual = d.apply(&target);
    if !residual.is_zero() {
        return Err(CheckError::PreconditionFailed {
            what: format!("D({target})"),
            residual,
        });
    }
    let center = BasisIndex::new(0, 0);
    let mut report = ConstraintReport::default();
    if beta + j as i64 != 0 {
        for (b, c) in d.inner.terms() {
            if b != center && commuting_alpha(beta, j, b.i) != Some(b.alpha) {
                report.violations.push(ConstraintViolation::Support { index: b, coeff: c.clone() });
            }
        }
        let expected = &(&Scalar::from_int(beta) / &Scalar::from_int(beta + j as i64)) * &d.lambda;
        let found = d.inner.coeff(center);
        if expected != found {
            report
                .violations
                .push(ConstraintViolation::CenterCoefficient { expected, found });
        }
    } else {
        for (b, c) in d.inner.terms() {
            if b.alpha != -(b.i as i64) {
                report.violations.push(ConstraintViolation::Support { index: b, coeff: c.clone() });
            }
        }
        if beta != 0 && !d.lambda.is_zero() {
            report.violations.push(ConstraintViolation::Lambda { found: d.lambda.clone() });
        }
    }
    Ok(report)
}

/// `L_{p,0} + L_{−2p,2p}`.
pub fn lemma34_target(p: u64) -> Element {
    let p = p as i64;
    Element::l(p, 0) + Element::l(-2 * p, 2 * p as u64)
}

/// Shape of a derivation killing `L_{p,0} + L_{−2p,2p}`: `λ = 0` and
/// `supp(inner) ⊆ {(α,i) ≠ (0,0) : α + i ∈ pℤ₊}`.
///
/// Only this necessary condition is checked.
pub fn lemma34_support_check(p: u64, d: &InnerOuterDerivation) -> Result<ConstraintReport, CheckError> {
    assert!(p > 0, "p must be positive");
    let target = lemma34_target(p);
    let residual = d.apply(&target);
    if !residual.is_zero() {
        return Err(CheckError::PreconditionFailed {
            what: format!("D({target})"),
            residual,
        });
    }
    let mut report = ConstraintReport::default();
    if !d.lambda.is_zero() {
        report.violations.push(ConstraintViolation::Lambda { found: d.lambda.clone() });
    }
    let center = BasisIndex::new(0, 0);
    let c00 = d.inner.coeff(center);
    if !c00.is_zero() {
        report.violations.push(ConstraintViolation::CenterCoefficient {
            expected: Scalar::zero(),
            found: c00,
        });
    }
    let p = p as i128;
    for (b, c) in d.inner.terms() {
        let sum = b.alpha as i128 + b.i as i128;
        if b != center && !(sum >= 0 && sum % p == 0) {
            report.violations.push(ConstraintViolation::Support { index: b, coeff: c.clone() });
        }
    }
    Ok(report)
}

fn require_anchor_zero<P: WitnessProvider>(delta: &TwoLocalMap<P>) -> Result<(), CheckError> {
    for x in [Element::l(0, 0), Element::l(1, 0)] {
        let value = delta.evaluate(&x);
        if !value.is_zero() {
            return Err(CheckError::PreconditionFailed {
                what: format!("Δ({x})"),
                residual: value,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenSample {
    pub index: BasisIndex,
    pub value: Element,
    /// `ξ` with `Δ(L_{β,j}) = j·ξ·L_{β,j}`; forced to zero when `j = 0`.
    pub xi: Option<Scalar>,
    /// `−λ` of the witness for `(L_{1,0}, L_{β,j})`.
    pub witness_xi: Scalar,
    pub ok: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EigenReport {
    pub samples: Vec<EigenSample>,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.ok)
    }
}

/// With `Δ(L_{0,0}) = Δ(L_{1,0}) = 0`, checks `Δ(L_{β,j}) = j·ξ·L_{β,j}` with
/// `ξ = −λ(L_{1,0}, L_{β,j})` on each sample. For `j = 0` the value must be zero.
pub fn lemma32_form_check<P: WitnessProvider>(
    delta: &TwoLocalMap<P>,
    samples: &[BasisIndex],
) -> Result<EigenReport, CheckError> {
    require_anchor_zero(delta)?;
    let l10 = Element::l(1, 0);
    let mut report = EigenReport::default();
    for &b in samples {
        let x = Element::basis(b);
        let value = delta.evaluate(&x);
        let witness_xi = -delta.witness(&l10, &x).lambda;
        let (xi, ok) = if b.i == 0 {
            (Some(Scalar::zero()), value.is_zero())
        } else {
            match value.ratio_to(&x) {
                Some(m) => {
                    let xi = &m / &Scalar::from_int(b.i as i64);
                    let ok = xi == witness_xi;
                    (Some(xi), ok)
                }
                None => (None, false),
            }
        };
        report.samples.push(EigenSample {
            index: b,
            value,
            xi,
            witness_xi,
            ok,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralFormReport {
    pub x: Element,
    pub value: Element,
    /// `Σ k·μ_{γ,k}·L_{γ,k}` for `x = Σ μ_{γ,k}·L_{γ,k}`.
    pub reference: Element,
    /// Proportionality constant `ξ_x`, when `Δ(x) = ξ_x·reference`.
    pub xi: Option<Scalar>,
    /// `−λ` of the witness for `(L_{n,0}, x)` with `n` past the α-span of `x`.
    pub witness_xi: Scalar,
    pub passed: bool,
}

/// The grade-weighted copy `Σ k·μ_{γ,k}·L_{γ,k}` of `x`.
pub fn grade_weighted(x: &Element) -> Element {
    Element::from_terms(x.terms().map(|(b, c)| (b, c * &Scalar::from_int(b.i as i64))))
}

/// With `Δ(L_{0,0}) = Δ(L_{1,0}) = 0`, checks that `Δ(x)` is a multiple
/// `ξ_x` of the grade-weighted copy of `x`. When that copy is nonzero, `ξ_x`
/// must also equal `−λ(L_{n,0}, x)` for `n` exceeding the α-span of `x`.
pub fn lemma33_form_check<P: WitnessProvider>(
    delta: &TwoLocalMap<P>,
    x: &Element,
) -> Result<GeneralFormReport, CheckError> {
    require_anchor_zero(delta)?;
    let value = delta.evaluate(x);
    let reference = grade_weighted(x);
    let n = match (x.support().map(|b| b.alpha).min(), x.support().map(|b| b.alpha).max()) {
        (Some(lo), Some(hi)) => hi - lo + 1,
        _ => 1,
    };
    let witness_xi = -delta.witness(&Element::l(n, 0), x).lambda;
    let xi = value.ratio_to(&reference);
    let passed = match &xi {
        None => false,
        Some(_) if reference.is_zero() => true,
        Some(xi) => *xi == witness_xi,
    };
    Ok(GeneralFormReport {
        x: x.clone(),
        value,
        reference,
        xi,
        witness_xi,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("anchor witness D(L[0,0], L[1,0]) disagrees with Δ at {member}: residual {residual}")]
    AnchorContractViolation { member: Element, residual: Element },
    #[error("Δ(L[-1,1]) − D₀(L[-1,1]) = {residual} is not a multiple of L[-1,1]")]
    NotProportional { residual: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeMismatch {
    pub probe: Element,
    /// `Δ(probe)`.
    pub expected: Element,
    /// `D(probe)`.
    pub got: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    /// The witness at the anchor pair `(L_{0,0}, L_{1,0})`.
    pub anchor: InnerOuterDerivation,
    /// Correction coefficient read off at `L_{−1,1}`.
    pub xi: Scalar,
    pub derivation: InnerOuterDerivation,
    pub probes_checked: usize,
    pub mismatches: Vec<ProbeMismatch>,
}

impl Reconstruction {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recovers a global derivation agreeing with `Δ`.
///
/// Takes the anchor witness `D₀ = D_{L_{0,0},L_{1,0}}`, reads
/// `Δ(L_{−1,1}) − D₀(L_{−1,1}) = ξ·L_{−1,1}`, and returns
/// `D = D₀ − ξ·(ad(L_{0,0}) + d)`, then compares `Δ` and `D` on every probe.
pub fn reconstruct<P: WitnessProvider>(
    delta: &TwoLocalMap<P>,
    probes: &[Element],
) -> Result<Reconstruction, ReconstructError> {
    let l00 = Element::l(0, 0);
    let l10 = Element::l(1, 0);
    let anchor = delta.witness(&l00, &l10);
    for member in [&l00, &l10] {
        let residual = &anchor.apply(member) - &delta.evaluate(member);
        if !residual.is_zero() {
            return Err(ReconstructError::AnchorContractViolation {
                member: member.clone(),
                residual,
            });
        }
    }

    let probe = Element::l(-1, 1);
    let residual = &delta.evaluate(&probe) - &anchor.apply(&probe);
    let xi = residual
        .ratio_to(&probe)
        .ok_or(ReconstructError::NotProportional { residual })?;
    let derivation = anchor.sub(&InnerOuterDerivation::kernel().scale(&xi));

    let mismatches = probes
        .iter()
        .filter_map(|x| {
            let expected = delta.evaluate(x);
            let got = derivation.apply(x);
            (expected != got).then(|| ProbeMismatch {
                probe: x.clone(),
                expected,
                got,
            })
        })
        .collect();
    Ok(Reconstruction {
        anchor,
        xi,
        derivation,
        probes_checked: probes.len(),
        mismatches,
    })
}

/// Default verification probes: every basis vector of `window` followed by
/// ten dense pseudorandom elements drawn from `seed`.
pub fn default_probes(window: Window, seed: u64) -> Vec<Element> {
    let mut rng = crate::sample::rng(seed);
    let mut probes = window.basis();
    probes.extend((0..10).map(|_| crate::sample::dense_element(&mut rng, window)));
    probes
}
