//! The local group `L = {[σ, r]}` with product
//! `[σ1, r] ⋄ [σ2, s] = [σ1 + σ2 + δ(r,s), rs]`.
//!
//! `σ` is an exact rational multiple of π on the real line and is never
//! reduced. `δ(r,s)` enters through one fixed lift, chosen in `[0, 2π)` when
//! the group is built from an exponent table.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{exponent_invariants, witness_residual, ExponentTable};
use crate::group::FiniteGroup;
use crate::phase::{format_pi, Phase, Turns};
use crate::rep::PhaseGauge;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensionError {
    #[error("local group needs an exact exponent table")]
    InexactExponent,
    #[error("exponent table violates its invariants")]
    InvalidExponent,
    #[error("exponent tables live on different groups")]
    GroupMismatch,
    #[error("gauge is not exact")]
    InexactGauge,
    #[error("target exponent is not the source plus the coboundary of the gauge")]
    NotEquivalentExponents,
    #[error("scale factor must be nonzero")]
    ZeroScale,
}

/// `[σ, r]` with `σ` stored as its coefficient of π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtensionElement {
    pub sigma: Rational64,
    pub r: usize,
}

impl ExtensionElement {
    pub fn new(sigma: Rational64, r: usize) -> Self {
        ExtensionElement { sigma, r }
    }

    pub fn identity() -> Self {
        ExtensionElement::new(Rational64::zero(), 0)
    }

    pub fn sigma_radians(&self) -> f64 {
        std::f64::consts::PI * (*self.sigma.numer() as f64) / (*self.sigma.denom() as f64)
    }
}

impl fmt::Display for ExtensionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_pi(self.sigma), self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalGroup {
    group: FiniteGroup,
    /// `δ(r,s)/π` as used by the product.
    lift: Vec<Vec<Rational64>>,
}

impl LocalGroup {
    /// Lift each exact `δ(r,s)` to `[0, 2π)`.
    pub fn new(delta: &ExponentTable) -> Result<Self, ExtensionError> {
        if !delta.is_exact() {
            return Err(ExtensionError::InexactExponent);
        }
        if !exponent_invariants(delta).holds() {
            return Err(ExtensionError::InvalidExponent);
        }
        let lift = delta
            .entries()
            .iter()
            .map(|row| row.iter().map(|p| p.as_exact().expect("exact").pi_multiple()).collect())
            .collect();
        Ok(LocalGroup {
            group: delta.group().clone(),
            lift,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// `δ(r,s)/π` as lifted.
    pub fn lift(&self, r: usize, s: usize) -> Rational64 {
        self.lift[r][s]
    }

    /// Exponent table seen mod 2π.
    pub fn exponent(&self) -> ExponentTable {
        let entries = self
            .lift
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| Phase::Exact(Turns::from_ratio(c / Rational64::from_integer(2))))
                    .collect()
            })
            .collect();
        ExponentTable::new(self.group.clone(), entries).expect("square")
    }

    pub fn elements_with_sigma(&self, sigma: Rational64) -> impl Iterator<Item = ExtensionElement> + '_ {
        self.group.elements().map(move |r| ExtensionElement::new(sigma, r))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtensionElement {
        const DENS: [i64; 6] = [1, 2, 3, 4, 6, 12];
        let den = DENS[rng.random_range(0..DENS.len())];
        let num = rng.random_range(-48..=48);
        ExtensionElement::new(Rational64::new(num, den), rng.random_range(0..self.group.order()))
    }
}

pub fn ext_product(l: &LocalGroup, a: &ExtensionElement, b: &ExtensionElement) -> ExtensionElement {
    ExtensionElement::new(a.sigma + b.sigma + l.lift(a.r, b.r), l.group.mul(a.r, b.r))
}

/// `[−(σ + δ(r,r⁻¹)), r⁻¹]`.
pub fn ext_inverse(l: &LocalGroup, a: &ExtensionElement) -> ExtensionElement {
    let ri = l.group.inv(a.r);
    ExtensionElement::new(-(a.sigma + l.lift(a.r, ri)), ri)
}

/// `c ⋄ g = g ⋄ c` for every `g`; independent of `σ`.
pub fn is_central(l: &LocalGroup, c: &ExtensionElement) -> bool {
    l.group
        .elements()
        .all(|s| l.group.commute(c.r, s) && l.lift(c.r, s) == l.lift(s, c.r))
}

pub fn quotient_map(a: &ExtensionElement) -> usize {
    a.r
}

/// `σ` of `(a⋄b)⋄c` minus `σ` of `a⋄(b⋄c)`, in units of π. Always an even
/// integer: the cocycle law holds mod 2π.
pub fn associativity_defect(
    l: &LocalGroup,
    a: &ExtensionElement,
    b: &ExtensionElement,
    c: &ExtensionElement,
) -> Rational64 {
    let left = ext_product(l, &ext_product(l, a, b), c);
    let right = ext_product(l, a, &ext_product(l, b, c));
    debug_assert_eq!(left.r, right.r);
    left.sigma - right.sigma
}

fn is_multiple_of_two_pi(c: Rational64) -> bool {
    c.is_integer() && c.numer() % 2 == 0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub identity_failures: usize,
    pub inverse_failures: usize,
    pub factorization_failures: usize,
    pub quotient_failures: usize,
    /// Triples whose associativity defect is a nonzero multiple of 2π.
    pub lift_discrepancies: usize,
    /// Triples whose defect is not a multiple of 2π (never expected).
    pub associativity_failures: usize,
    /// Largest `|defect|` in units of π.
    pub max_lift_discrepancy: i64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.identity_failures == 0
            && self.inverse_failures == 0
            && self.factorization_failures == 0
            && self.quotient_failures == 0
            && self.associativity_failures == 0
    }
}

/// Identity, inverse, factorization, quotient homomorphism and associativity
/// (up to reported 2π lifts) on `samples` seeded random triples.
pub fn check_axioms(l: &LocalGroup, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = rng::seeded(seed);
    let e = ExtensionElement::identity();
    let g = &l.group;
    let mut rpt = AxiomReport {
        samples,
        identity_failures: 0,
        inverse_failures: 0,
        factorization_failures: 0,
        quotient_failures: 0,
        lift_discrepancies: 0,
        associativity_failures: 0,
        max_lift_discrepancy: 0,
    };
    for _ in 0..samples {
        let a = l.random_element(&mut rng);
        let b = l.random_element(&mut rng);
        let c = l.random_element(&mut rng);
        if ext_product(l, &a, &e) != a || ext_product(l, &e, &a) != a {
            rpt.identity_failures += 1;
        }
        let ai = ext_inverse(l, &a);
        if ext_product(l, &a, &ai) != e || ext_product(l, &ai, &a) != e || ext_inverse(l, &ai) != a {
            rpt.inverse_failures += 1;
        }
        let split = ext_product(
            l,
            &ExtensionElement::new(a.sigma, 0),
            &ExtensionElement::new(Rational64::zero(), a.r),
        );
        if split != a {
            rpt.factorization_failures += 1;
        }
        let ab = ext_product(l, &a, &b);
        if quotient_map(&ab) != g.mul(a.r, b.r) || quotient_map(&ai) != g.inv(a.r) {
            rpt.quotient_failures += 1;
        }
        let d = associativity_defect(l, &a, &b, &c);
        if !d.is_zero() {
            if is_multiple_of_two_pi(d) {
                rpt.lift_discrepancies += 1;
                rpt.max_lift_discrepancy = rpt.max_lift_discrepancy.max(d.abs().to_integer());
            } else {
                rpt.associativity_failures += 1;
            }
        }
    }
    rpt
}

/// `φ([σ, r]) = [σ − x(r), r]` from `L` onto `L̃`, with `x(r)` lifted to
/// `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceMap {
    shift: Vec<Rational64>,
}

impl EquivalenceMap {
    pub fn apply(&self, a: &ExtensionElement) -> ExtensionElement {
        ExtensionElement::new(a.sigma - self.shift[a.r], a.r)
    }

    pub fn inverse(&self, a: &ExtensionElement) -> ExtensionElement {
        ExtensionElement::new(a.sigma + self.shift[a.r], a.r)
    }

    /// `σ` of `φ(a⋄b)` minus `σ` of `φ(a)⋄̃φ(b)`, in units of π.
    pub fn discrepancy(
        &self,
        l: &LocalGroup,
        lt: &LocalGroup,
        a: &ExtensionElement,
        b: &ExtensionElement,
    ) -> Rational64 {
        let left = self.apply(&ext_product(l, a, b));
        let right = ext_product(lt, &self.apply(a), &self.apply(b));
        left.sigma - right.sigma
    }
}

pub fn equivalence_isomorphism(
    l: &LocalGroup,
    lt: &LocalGroup,
    x: &PhaseGauge,
) -> Result<EquivalenceMap, ExtensionError> {
    if l.group != lt.group || x.order() != l.group.order() {
        return Err(ExtensionError::GroupMismatch);
    }
    if !x.is_exact() {
        return Err(ExtensionError::InexactGauge);
    }
    if witness_residual(&l.exponent(), &lt.exponent(), x).ok() != Some(0.0) {
        return Err(ExtensionError::NotEquivalentExponents);
    }
    Ok(EquivalenceMap {
        shift: x
            .values()
            .iter()
            .map(|p| p.as_exact().expect("exact").pi_multiple())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapReport {
    pub pairs: usize,
    /// Pairs where the homomorphism law holds on the nose.
    pub exact: usize,
    /// Pairs off by a nonzero multiple of 2π.
    pub lift_discrepancies: usize,
    /// Pairs off by anything else (never expected).
    pub failures: usize,
    pub bijection_failures: usize,
}

pub fn check_equivalence_map(
    l: &LocalGroup,
    lt: &LocalGroup,
    phi: &EquivalenceMap,
    samples: usize,
    seed: u64,
) -> MapReport {
    let mut rng = rng::seeded(seed);
    let mut rpt = MapReport { pairs: samples, exact: 0, lift_discrepancies: 0, failures: 0, bijection_failures: 0 };
    for _ in 0..samples {
        let a = l.random_element(&mut rng);
        let b = l.random_element(&mut rng);
        let d = phi.discrepancy(l, lt, &a, &b);
        if d.is_zero() {
            rpt.exact += 1;
        } else if is_multiple_of_two_pi(d) {
            rpt.lift_discrepancies += 1;
        } else {
            rpt.failures += 1;
        }
        if phi.inverse(&phi.apply(&a)) != a || phi.apply(&phi.inverse(&a)) != a {
            rpt.bijection_failures += 1;
        }
    }
    rpt
}

/// `f([σ, r]) = [zσ, r]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    pub z: Rational64,
}

impl ScalingMap {
    pub fn apply(&self, a: &ExtensionElement) -> ExtensionElement {
        ExtensionElement::new(self.z * a.sigma, a.r)
    }
}

/// `L'` carries the lift `z·δ` exactly as scaled, so `f` is a homomorphism
/// with no lift ambiguity.
pub fn scaling_isomorphism(
    l: &LocalGroup,
    z: Rational64,
) -> Result<(LocalGroup, ScalingMap), ExtensionError> {
    if z.is_zero() {
        return Err(ExtensionError::ZeroScale);
    }
    let lift = l
        .lift
        .iter()
        .map(|row| row.iter().map(|&c| c * z).collect())
        .collect();
    Ok((
        LocalGroup {
            group: l.group.clone(),
            lift,
        },
        ScalingMap { z },
    ))
}

pub fn check_scaling_map(
    l: &LocalGroup,
    lp: &LocalGroup,
    f: &ScalingMap,
    samples: usize,
    seed: u64,
) -> MapReport {
    let mut rng = rng::seeded(seed);
    let mut rpt = MapReport { pairs: samples, exact: 0, lift_discrepancies: 0, failures: 0, bijection_failures: 0 };
    let finv = ScalingMap { z: f.z.recip() };
    for _ in 0..samples {
        let a = l.random_element(&mut rng);
        let b = l.random_element(&mut rng);
        let d = f.apply(&ext_product(l, &a, &b)).sigma - ext_product(lp, &f.apply(&a), &f.apply(&b)).sigma;
        if d.is_zero() {
            rpt.exact += 1;
        } else if is_multiple_of_two_pi(d) {
            rpt.lift_discrepancies += 1;
        } else {
            rpt.failures += 1;
        }
        if finv.apply(&f.apply(&a)) != a {
            rpt.bijection_failures += 1;
        }
    }
    rpt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{exponent_of_rep, trivialize};
    use crate::fixtures;
    use crate::group::{make_cyclic, make_product};

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn z2() -> LocalGroup {
        let mut d = ExponentTable::zero(make_cyclic(2));
        d.set(1, 1, Phase::exact(1, 2));
        LocalGroup::new(&d).unwrap()
    }

    #[test]
    fn product_examples() {
        let l = z2();
        let a = ExtensionElement::new(r(3, 10), 1);
        assert_eq!(ext_product(&l, &a, &ExtensionElement::identity()), a);
        let one = ExtensionElement::new(r(0, 1), 1);
        assert_eq!(ext_product(&l, &one, &one), ExtensionElement::new(r(1, 1), 0));
        assert_eq!(ext_product(&l, &one, &one).to_string(), "[1·π, 0]");
        assert_eq!(ExtensionElement::new(r(-1, 2), 1).to_string(), "[-1/2·π, 1]");
    }

    #[test]
    fn inverse_examples() {
        let l = z2();
        let e = ExtensionElement::identity();
        assert_eq!(ext_inverse(&l, &e), e);
        let one = ExtensionElement::new(r(0, 1), 1);
        let inv = ext_inverse(&l, &one);
        assert_eq!(inv, ExtensionElement::new(r(-1, 1), 1));
        assert_eq!(ext_product(&l, &one, &inv), e);
    }

    #[test]
    fn centrality() {
        let l = LocalGroup::new(&exponent_of_rep(&fixtures::clock_shift(2)).unwrap()).unwrap();
        assert!(is_central(&l, &ExtensionElement::new(r(27, 10), 0)));
        assert!(!is_central(&l, &ExtensionElement::new(r(0, 1), 2)));
        // abelian group with symmetric exponent: everything is central
        let sym = LocalGroup::new(&exponent_of_rep(&fixtures::twisted(&fixtures::cyclic_diagonal(4), 7)).unwrap()).unwrap();
        for a in sym.elements_with_sigma(r(1, 3)) {
            assert!(is_central(&sym, &a));
        }
    }

    #[test]
    fn center_is_closed() {
        let l = LocalGroup::new(&exponent_of_rep(&fixtures::clock_shift(3)).unwrap()).unwrap();
        let c1 = ExtensionElement::new(r(5, 7), 0);
        let c2 = ExtensionElement::new(r(-2, 3), 0);
        let p = ext_product(&l, &c1, &c2);
        assert_eq!(p, ExtensionElement::new(r(5, 7) + r(-2, 3), 0));
        assert!(is_central(&l, &p) && is_central(&l, &ext_inverse(&l, &c1)));
    }

    #[test]
    fn quotient_examples() {
        let l = z2();
        assert_eq!(quotient_map(&ExtensionElement::new(r(9, 4), 0)), 0);
        let one = ExtensionElement::new(r(0, 1), 1);
        assert_eq!(quotient_map(&ext_product(&l, &one, &one)), 0);
    }

    #[test]
    fn axioms_on_fixtures() {
        for (name, rep) in fixtures::corpus_reps() {
            let l = LocalGroup::new(&exponent_of_rep(&rep).unwrap()).unwrap();
            let rpt = check_axioms(&l, 300, 4);
            assert!(rpt.passed(), "{name}: {rpt:?}");
        }
    }

    #[test]
    fn finite_groups_force_lift_discrepancies() {
        // a nontrivial class admits no real-valued lift of its exponent, so
        // some triple of the Pauli extension is off by a multiple of 2π
        let l = LocalGroup::new(&exponent_of_rep(&fixtures::clock_shift(2)).unwrap()).unwrap();
        let mut defects = Vec::new();
        for a in l.elements_with_sigma(r(0, 1)) {
            for b in l.elements_with_sigma(r(0, 1)) {
                for c in l.elements_with_sigma(r(0, 1)) {
                    defects.push(associativity_defect(&l, &a, &b, &c));
                }
            }
        }
        assert!(defects.iter().all(|d| is_multiple_of_two_pi(*d)));
        assert!(defects.iter().any(|d| !d.is_zero()));
    }

    #[test]
    fn equivalence_map_on_z2() {
        let l = z2();
        let lt = LocalGroup::new(&ExponentTable::zero(make_cyclic(2))).unwrap();
        let x = PhaseGauge::new(vec![Phase::zero(), Phase::exact(1, 4)]).unwrap();
        let phi = equivalence_isomorphism(&l, &lt, &x).unwrap();
        let one = ExtensionElement::new(r(0, 1), 1);
        assert_eq!(phi.apply(&one), ExtensionElement::new(r(-1, 2), 1));
        // φ([0,1]⋄[0,1]) = [π, 0] while φ([0,1])⋄̃φ([0,1]) = [−π, 0]
        assert_eq!(phi.discrepancy(&l, &lt, &one, &one), r(2, 1));
        let rpt = check_equivalence_map(&l, &lt, &phi, 500, 1);
        assert_eq!(rpt.failures + rpt.bijection_failures, 0);

        let wrong = PhaseGauge::new(vec![Phase::zero(), Phase::exact(1, 3)]).unwrap();
        assert_eq!(
            equivalence_isomorphism(&l, &lt, &wrong),
            Err(ExtensionError::NotEquivalentExponents)
        );
        let id = equivalence_isomorphism(&l, &l, &PhaseGauge::zero(2)).unwrap();
        assert_eq!(id.apply(&one), one);
    }

    #[test]
    fn equivalence_map_on_solver_witness() {
        let rep = fixtures::twisted(&fixtures::s3_rotation(), 41);
        let d = exponent_of_rep(&rep).unwrap();
        let x = trivialize(&d).unwrap().witness().unwrap().clone();
        let l = LocalGroup::new(&d).unwrap();
        let lt = LocalGroup::new(&ExponentTable::zero(d.group().clone())).unwrap();
        let phi = equivalence_isomorphism(&l, &lt, &x).unwrap();
        let rpt = check_equivalence_map(&l, &lt, &phi, 1000, 2);
        assert_eq!(rpt.failures, 0);
        assert_eq!(rpt.exact + rpt.lift_discrepancies, 1000);
    }

    #[test]
    fn scaling_examples() {
        let l = z2();
        assert_eq!(scaling_isomorphism(&l, r(0, 1)).unwrap_err(), ExtensionError::ZeroScale);
        let (same, f) = scaling_isomorphism(&l, r(1, 1)).unwrap();
        assert_eq!(same, l);
        let a = ExtensionElement::new(r(1, 5), 1);
        assert_eq!(f.apply(&a), a);

        let (neg, f) = scaling_isomorphism(&l, r(-1, 1)).unwrap();
        assert_eq!(neg.lift(1, 1), r(-1, 1));
        let one = ExtensionElement::new(r(0, 1), 1);
        let lhs = f.apply(&ext_product(&l, &one, &one));
        assert_eq!(lhs, ExtensionElement::new(r(-1, 1), 0));
        assert_eq!(lhs, ext_product(&neg, &f.apply(&one), &f.apply(&one)));

        let cs = LocalGroup::new(&exponent_of_rep(&fixtures::clock_shift(3)).unwrap()).unwrap();
        for z in [r(2, 1), r(1, 3), r(-5, 1)] {
            let (lp, f) = scaling_isomorphism(&cs, z).unwrap();
            let rpt = check_scaling_map(&cs, &lp, &f, 1000, 9);
            assert_eq!(rpt.exact, 1000);
        }
    }

    #[test]
    fn inexact_exponent_rejected() {
        let mut d = ExponentTable::zero(make_product(&make_cyclic(2), &make_cyclic(2)));
        d.set(1, 1, Phase::float(0.1));
        assert_eq!(LocalGroup::new(&d).unwrap_err(), ExtensionError::InexactExponent);
    }
}
