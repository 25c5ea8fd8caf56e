//! Local exponents, coboundaries and the equivalence problem
//! `δ2 − δ1 = Δ[x] (mod 2π)`.
//!
//! Exact tables are decided by an integer reduction over `ℤ_{D·E}`; float
//! tables go through [`numeric_equivalence`].

pub mod numeric;
pub mod snf;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::phase::{Phase, Turns};
use crate::rep::{
    build_phase_table, snap_denominator_bound, verify_cocycle, CocycleReport, PhaseGauge,
    PhaseTable, RayRepresentation, RepError,
};

pub use numeric::numeric_equivalence;
use snf::{dot_mod, functional_mod, solve_mod, ModSolution};

/// Tolerance for placing a Weyl residual on the `(2π/n)ℤ` lattice.
pub const LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CohomologyError {
    #[error("tables live on different groups")]
    GroupMismatch,
    #[error("exact solver needs exact phases; use the numeric fallback")]
    InexactPhases,
    #[error("elements {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("branch budget exhausted after {explored} of {total} branches")]
    BudgetExceeded { explored: u64, total: u128 },
    #[error("{0} unknowns exceed the numeric solver limit")]
    TooManyUnknowns(usize),
    #[error("scaled combination is no longer a cocycle (triple {0:?})")]
    CombinationBreaksCocycle((usize, usize, usize)),
    #[error("modulus {0} overflows the exact solver")]
    Overflow(i128),
    #[error("solver self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// `δ(r,s)` with `ω(r,s) = e^{iδ(r,s)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    group: FiniteGroup,
    entries: Vec<Vec<Phase>>,
}

impl ExponentTable {
    pub fn new(group: FiniteGroup, entries: Vec<Vec<Phase>>) -> Result<Self, CohomologyError> {
        let t = PhaseTable::from_entries(group, entries)?;
        Ok(ExponentTable {
            group: t.group().clone(),
            entries: t.entries().to_vec(),
        })
    }

    pub fn zero(group: FiniteGroup) -> Self {
        let n = group.order();
        ExponentTable {
            group,
            entries: vec![vec![Phase::zero(); n]; n],
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn get(&self, r: usize, s: usize) -> Phase {
        self.entries[r][s]
    }

    pub fn set(&mut self, r: usize, s: usize, p: Phase) {
        self.entries[r][s] = p;
    }

    pub fn entries(&self) -> &[Vec<Phase>] {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().flatten().all(Phase::is_exact)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_trivial(0.0))
    }

    pub fn to_phase_table(&self) -> PhaseTable {
        PhaseTable::from_entries(self.group.clone(), self.entries.clone()).expect("square table")
    }

    /// `δ + Δ[x]`.
    pub fn gauged(&self, x: &PhaseGauge) -> Result<ExponentTable, CohomologyError> {
        if x.order() != self.group.order() {
            return Err(CohomologyError::GroupMismatch);
        }
        let mut out = self.clone();
        for r in self.group.elements() {
            for s in self.group.elements() {
                out.entries[r][s] = self.entries[r][s].add(coboundary(&self.group, x, r, s));
            }
        }
        Ok(out)
    }

    /// `δ1 − δ2`, entrywise.
    pub fn difference(&self, other: &ExponentTable) -> Result<ExponentTable, CohomologyError> {
        linear_combination(self, other, Rational64::from_integer(1), Rational64::from_integer(-1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentInvariants {
    /// `δ(r,e) = δ(e,s) = 0`.
    pub normalized: bool,
    /// `δ(r,r⁻¹) = δ(r⁻¹,r)`.
    pub inverse_symmetric: bool,
    pub cocycle: CocycleReport,
}

impl ExponentInvariants {
    pub fn holds(&self) -> bool {
        self.normalized && self.inverse_symmetric && self.cocycle.passed
    }
}

pub fn exponent_invariants(d: &ExponentTable) -> ExponentInvariants {
    let g = &d.group;
    let tol = crate::rep::COCYCLE_TOL;
    let normalized = g
        .elements()
        .all(|r| d.get(r, 0).is_trivial(tol) && d.get(0, r).is_trivial(tol));
    let inverse_symmetric = g
        .elements()
        .all(|r| d.get(r, g.inv(r)).same_as(&d.get(g.inv(r), r), tol));
    ExponentInvariants {
        normalized,
        inverse_symmetric,
        cocycle: verify_cocycle(&d.to_phase_table()),
    }
}

/// Principal exponents of a factor table. Inexact entries are kept as floats.
pub fn exponent_from_factor(t: &PhaseTable) -> ExponentTable {
    if !t.is_exact() {
        warn!("factor table has unsnapped entries; exponent table is inexact");
    }
    ExponentTable {
        group: t.group().clone(),
        entries: t.entries().to_vec(),
    }
}

pub fn exponent_of_rep(rep: &RayRepresentation) -> Result<ExponentTable, CohomologyError> {
    Ok(exponent_from_factor(&build_phase_table(rep)?))
}

/// `Δ_{r,s}[x] = x(r) + x(s) − x(rs)`.
pub fn coboundary(g: &FiniteGroup, x: &PhaseGauge, r: usize, s: usize) -> Phase {
    x.get(r).add(x.get(s)).sub(x.get(g.mul(r, s)))
}

pub fn coboundary_table(g: &FiniteGroup, x: &PhaseGauge) -> ExponentTable {
    ExponentTable::zero(g.clone()).gauged(x).expect("same order")
}

/// `β(a,b)` as the phase `δ(a,b) − δ(b,a)`.
pub fn commutator_phase(d: &ExponentTable, a: usize, b: usize) -> Result<Phase, CohomologyError> {
    if !d.group.commute(a, b) {
        return Err(CohomologyError::NotCommuting(a, b));
    }
    Ok(d.get(a, b).sub(d.get(b, a)))
}

/// Unit complex form of [`commutator_phase`] on a factor table.
pub fn commutator_factor(t: &PhaseTable, a: usize, b: usize) -> Result<Complex64, CohomologyError> {
    Ok(commutator_phase(&exponent_from_factor(t), a, b)?.unit())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorWitness {
    pub a: usize,
    pub b: usize,
    pub phase: Phase,
}

/// An integer functional `f` on the pair equations with `f·B ≡ 0` and
/// `f·T ≢ 0 (mod N)`: no gauge can meet the target.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFunctional {
    pub modulus: i128,
    /// Nonzero coefficients keyed by pair `(r, s)`.
    pub coefficients: Vec<((usize, usize), i128)>,
    pub value: i128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionCertificate {
    pub commutator: Option<CommutatorWitness>,
    pub functional: Option<InvariantFunctional>,
    /// Set by the numeric solver when every branch was tried.
    pub branches_exhausted: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoboundarySolution {
    /// The table was already trivial; `x ≡ 0`.
    Trivialized(PhaseGauge),
    EquivalentVia(PhaseGauge),
    Obstructed(ObstructionCertificate),
}

impl CoboundarySolution {
    pub fn witness(&self) -> Option<&PhaseGauge> {
        match self {
            CoboundarySolution::Trivialized(x) | CoboundarySolution::EquivalentVia(x) => Some(x),
            CoboundarySolution::Obstructed(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&ObstructionCertificate> {
        match self {
            CoboundarySolution::Obstructed(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_equivalent(&self) -> bool {
        self.witness().is_some()
    }
}

/// First commuting pair `a < b` (lexicographic) with `β(a,b) ≠ 1`.
pub fn find_commutator_obstruction(d: &ExponentTable, tol: f64) -> Option<CommutatorWitness> {
    let g = &d.group;
    for a in g.elements() {
        for b in a + 1..g.order() {
            if !g.commute(a, b) {
                continue;
            }
            let phase = d.get(a, b).sub(d.get(b, a));
            if !phase.is_trivial(tol) {
                return Some(CommutatorWitness { a, b, phase });
            }
        }
    }
    None
}

/// Residual `max |δ1 + Δ[x] − δ2|` over all pairs; zero for exact witnesses.
pub fn witness_residual(
    d1: &ExponentTable,
    d2: &ExponentTable,
    x: &PhaseGauge,
) -> Result<f64, CohomologyError> {
    let moved = d1.gauged(x)?;
    let mut worst: f64 = 0.0;
    for r in d1.group.elements() {
        for s in d1.group.elements() {
            worst = worst.max(moved.get(r, s).distance(&d2.get(r, s)));
        }
    }
    Ok(worst)
}

fn exact_turns(d: &ExponentTable) -> Result<Vec<Vec<Turns>>, CohomologyError> {
    d.entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| p.as_exact().ok_or(CohomologyError::InexactPhases))
                .collect()
        })
        .collect()
}

/// Decide whether `δ2 − δ1` is a coboundary, exactly.
pub fn are_equivalent(
    d1: &ExponentTable,
    d2: &ExponentTable,
) -> Result<CoboundarySolution, CohomologyError> {
    if d1.group != d2.group {
        return Err(CohomologyError::GroupMismatch);
    }
    let (t1, t2) = (exact_turns(d1)?, exact_turns(d2)?);
    let g = &d1.group;
    let n = g.order();

    // target T = δ2 − δ1 in turns, over the common denominator D
    let target: Vec<Turns> = (0..n * n)
        .map(|i| t2[i / n][i % n].sub(t1[i / n][i % n]))
        .collect();
    let den = target.iter().fold(1i64, |acc, t| acc.lcm(&t.den()));
    let modulus = i128::from(den)
        .checked_mul(g.exponent() as i128)
        .filter(|m| *m < (1i128 << 60))
        .ok_or(CohomologyError::Overflow(i128::from(den)))?;

    // unknowns y(r) for r ≠ e, x(r) = y(r)/N turns
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for (i, t) in target.iter().enumerate() {
        let (r, s) = (i / n, i % n);
        let mut row = vec![0i128; n - 1];
        for (e, c) in [(r, 1), (s, 1), (g.mul(r, s), -1)] {
            if e != 0 {
                row[e - 1] += c;
            }
        }
        rows.push(row);
        rhs.push(i128::from(t.num()) * (modulus / i128::from(t.den())));
    }

    let cert_diff = d1.difference(d2)?;
    match solve_mod(&rows, &rhs, modulus) {
        ModSolution::Solved(y) => {
            let mut values = vec![Phase::zero()];
            values.extend(y.iter().map(|&v| {
                Phase::Exact(Turns::from_ratio(Rational64::new(v as i64, modulus as i64)))
            }));
            let x = PhaseGauge::new(values)?;
            if witness_residual(d1, d2, &x)? != 0.0 {
                return Err(CohomologyError::SelfCheck("witness fails substitution".into()));
            }
            if let Some(w) = find_commutator_obstruction(&cert_diff, 0.0) {
                return Err(CohomologyError::SelfCheck(format!(
                    "witness coexists with commutator obstruction at ({}, {})",
                    w.a, w.b
                )));
            }
            if x.values().iter().all(|p| p.is_trivial(0.0)) && d2.is_zero() {
                Ok(CoboundarySolution::Trivialized(x))
            } else {
                Ok(CoboundarySolution::EquivalentVia(x))
            }
        }
        ModSolution::Inconsistent { functional } => {
            let functional = match functional {
                Some(f) => {
                    if functional_mod(&f, &rows, modulus).iter().any(|&v| v != 0) {
                        return Err(CohomologyError::SelfCheck("functional not invariant".into()));
                    }
                    let value = dot_mod(&f, &rhs, modulus);
                    if value == 0 {
                        return Err(CohomologyError::SelfCheck("functional not violated".into()));
                    }
                    Some(InvariantFunctional {
                        modulus,
                        coefficients: f
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| c != 0)
                            .map(|(i, &c)| ((i / n, i % n), c))
                            .collect(),
                        value,
                    })
                }
                None => None,
            };
            Ok(CoboundarySolution::Obstructed(ObstructionCertificate {
                commutator: find_commutator_obstruction(&cert_diff, 0.0),
                functional,
                branches_exhausted: None,
            }))
        }
    }
}

/// `are_equivalent(δ, 0)`.
pub fn trivialize(d: &ExponentTable) -> Result<CoboundarySolution, CohomologyError> {
    are_equivalent(d, &ExponentTable::zero(d.group.clone()))
}

/// Entrywise `κ1δ1 + κ2δ2`. Non-integer weights act on the `[0, 2π)` lifts
/// and can leave the cocycle class, which is reported as an error.
pub fn linear_combination(
    d1: &ExponentTable,
    d2: &ExponentTable,
    k1: Rational64,
    k2: Rational64,
) -> Result<ExponentTable, CohomologyError> {
    if d1.group != d2.group {
        return Err(CohomologyError::GroupMismatch);
    }
    let entries = d1
        .entries
        .iter()
        .zip(&d2.entries)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.scale(k1).add(q.scale(k2))).collect())
        .collect();
    let out = ExponentTable {
        group: d1.group.clone(),
        entries,
    };
    if !(k1.is_integer() && k2.is_integer()) {
        let rpt = verify_cocycle(&out.to_phase_table());
        if let Some(w) = rpt.witness {
            return Err(CohomologyError::CombinationBreaksCocycle(w));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylRecord {
    pub x: PhaseGauge,
    pub residual: ExponentTable,
    pub clean: bool,
    /// Largest distance of a residual entry from the `(2π/n)ℤ` lattice.
    pub lattice_deviation: f64,
}

impl WeylRecord {
    pub fn on_lattice(&self) -> bool {
        self.lattice_deviation <= LATTICE_TOL
    }
}

/// `x(r) = −arg(det U_r)/n` on the principal branch, and the residual
/// exponent `δ + Δ[x]`, which the determinant forces onto `(2π/n)ℤ`.
pub fn weyl_trivialization(rep: &RayRepresentation) -> Result<WeylRecord, CohomologyError> {
    let g = rep.group();
    let dim = rep.dim();
    let delta = exponent_of_rep(rep)?;
    let max_den = dim as i64 * snap_denominator_bound(g.order());
    let raw: Vec<f64> = g
        .elements()
        .map(|r| -rep.operator(r).determinant().arg() / dim as f64)
        .collect();
    let mut values = vec![Phase::zero()];
    values.extend(raw.iter().skip(1).map(|&a| match Turns::snap(a, max_den, 1e-12) {
        Some(t) => Phase::Exact(t),
        None => Phase::float(a),
    }));
    let x = PhaseGauge::new(values)?;

    let step = std::f64::consts::TAU / dim as f64;
    let mut residual = delta.clone();
    let mut deviation: f64 = 0.0;
    let mut clean = true;
    for r in g.elements() {
        for s in g.elements() {
            let d = delta.get(r, s).radians() + raw[r] + raw[s] - raw[g.mul(r, s)];
            let k = (d / step).round();
            let dev = (d - k * step).abs();
            deviation = deviation.max(dev);
            let p = if dev <= LATTICE_TOL {
                Phase::exact(k as i64, dim as i64)
            } else {
                Phase::float(d)
            };
            clean &= p.is_trivial(0.0);
            residual.set(r, s, p);
        }
    }
    Ok(WeylRecord {
        x,
        residual,
        clean: clean && deviation <= LATTICE_TOL,
        lattice_deviation: deviation,
    })
}

/// Least-squares polish of `x` on lifted reals with fixed integer branches.
pub(crate) fn polish(
    g: &FiniteGroup,
    target: &[Vec<f64>],
    x: &[f64],
) -> Vec<f64> {
    let n = g.order();
    if n == 1 {
        return vec![0.0];
    }
    let tau = std::f64::consts::TAU;
    let mut a = DMatrix::<f64>::zeros(n * n, n - 1);
    let mut b = nalgebra::DVector::<f64>::zeros(n * n);
    for r in 0..n {
        for s in 0..n {
            let i = r * n + s;
            let rs = g.mul(r, s);
            let raw = x[r] + x[s] - x[rs] - target[r][s];
            let k = (raw / tau).round();
            for (e, c) in [(r, 1.0), (s, 1.0), (rs, -1.0)] {
                if e != 0 {
                    a[(i, e - 1)] += c;
                }
            }
            b[i] = target[r][s] + k * tau;
        }
    }
    match a.clone().svd(true, true).solve(&b, 1e-12) {
        Ok(sol) => {
            let mut out = vec![0.0];
            out.extend(sol.iter().copied());
            out
        }
        Err(_) => x.to_vec(),
    }
}
