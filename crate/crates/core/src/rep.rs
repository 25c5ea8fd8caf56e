//! Ray representations of finite groups and their local factors.

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::phase::{Phase, SNAP_TOL};
use crate::ray::{max_abs, Operator, RayError, StateVector};

/// Scalar test threshold for `U_r U_s U_{rs}†`.
pub const SCALAR_TOL: f64 = 1e-9;
/// Float tolerance of the cocycle law.
pub const COCYCLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("expected {expected} matrices (one per element), got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("matrix of element {element} has dimension {got}, expected {expected}")]
    WrongDim {
        element: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix of element {element} is not unitary (defect {defect:e})")]
    NotUnitary { element: usize, defect: f64 },
    #[error("U_{r} U_{s} U_{{rs}}† is not scalar (residual {residual:e})")]
    NotScalar { r: usize, s: usize, residual: f64 },
    #[error("factor for ({r}, {s}) has modulus {modulus}, not 1")]
    NotUnimodular { r: usize, s: usize, modulus: f64 },
    #[error("representations are over different groups")]
    GroupMismatch,
    #[error("gauge must vanish on the identity")]
    GaugeNotNormalized,
    #[error("states are linearly dependent (overlap {0})")]
    DependentStates(f64),
    #[error(transparent)]
    Ray(#[from] RayError),
}

/// One unitary representative per group element, composing up to phases.
#[derive(Debug, Clone, PartialEq)]
pub struct RayRepresentation {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<Operator>,
}

impl RayRepresentation {
    /// Validates unitarity and the scalar law on every pair. `U_e` is replaced
    /// by the identity matrix.
    pub fn new(group: FiniteGroup, matrices: Vec<DMatrix<Complex64>>) -> Result<Self, RepError> {
        let rep = Self::unchecked(group, matrices)?;
        for r in rep.group.elements() {
            for s in rep.group.elements() {
                extract_local_factor(&rep, r, s)?;
            }
        }
        Ok(rep)
    }

    fn unchecked(group: FiniteGroup, matrices: Vec<DMatrix<Complex64>>) -> Result<Self, RepError> {
        if matrices.len() != group.order() {
            return Err(RepError::WrongCount {
                expected: group.order(),
                got: matrices.len(),
            });
        }
        let dim = matrices[0].nrows();
        let mut ops = Vec::with_capacity(matrices.len());
        for (element, m) in matrices.into_iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(RepError::WrongDim {
                    element,
                    expected: dim,
                    got: m.nrows().max(m.ncols()),
                });
            }
            let op = Operator::new(m)?;
            let defect = op.unitarity_defect();
            if defect > crate::ray::UNITARY_TOL {
                return Err(RepError::NotUnitary { element, defect });
            }
            ops.push(op);
        }
        let id = DMatrix::<Complex64>::identity(dim, dim);
        let ue = ops[0].matrix();
        let lambda = ue[(0, 0)];
        if max_abs(&(ue - &id * lambda)) > SCALAR_TOL {
            warn!("U_e differs from the identity by more than a phase; replacing it");
        }
        ops[0] = Operator::identity(dim);
        Ok(RayRepresentation {
            group,
            dim,
            matrices: ops,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self, r: usize) -> &Operator {
        &self.matrices[r]
    }

    pub fn operators(&self) -> &[Operator] {
        &self.matrices
    }

    /// Replace representatives wholesale, re-running validation.
    pub fn with_operators(&self, ops: Vec<Operator>) -> Result<Self, RepError> {
        Self::new(
            self.group.clone(),
            ops.into_iter().map(Operator::into_matrix).collect(),
        )
    }
}

/// The local factor `ω(r,s)` with `U_r U_s = ω(r,s) U_{rs}`.
pub fn extract_local_factor(
    rep: &RayRepresentation,
    r: usize,
    s: usize,
) -> Result<Complex64, RepError> {
    let rs = rep.group.mul(r, s);
    let m = rep.matrices[r].matrix() * rep.matrices[s].matrix() * rep.matrices[rs].matrix().adjoint();
    let n = rep.dim;
    let lambda = m[(0, 0)];
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dev = if i == j {
                (m[(i, j)] - lambda).norm()
            } else {
                m[(i, j)].norm()
            };
            residual = residual.max(dev);
        }
    }
    if residual > SCALAR_TOL {
        return Err(RepError::NotScalar { r, s, residual });
    }
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() > SCALAR_TOL {
        return Err(RepError::NotUnimodular { r, s, modulus });
    }
    Ok(lambda / modulus)
}

/// Table of local factors, exact wherever a rational phase fits.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    group: FiniteGroup,
    entries: Vec<Vec<Phase>>,
}

impl PhaseTable {
    pub fn from_entries(group: FiniteGroup, entries: Vec<Vec<Phase>>) -> Result<Self, RepError> {
        let n = group.order();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(RepError::WrongCount {
                expected: n * n,
                got: entries.iter().map(Vec::len).sum(),
            });
        }
        Ok(PhaseTable { group, entries })
    }

    pub fn trivial(group: FiniteGroup) -> Self {
        let n = group.order();
        PhaseTable {
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

    pub fn factor(&self, r: usize, s: usize) -> Complex64 {
        self.entries[r][s].unit()
    }

    pub fn entries(&self) -> &[Vec<Phase>] {
        &self.entries
    }

    pub fn set(&mut self, r: usize, s: usize, p: Phase) {
        self.entries[r][s] = p;
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().flatten().all(Phase::is_exact)
    }
}

/// Denominator bound for exact snapping.
pub fn snap_denominator_bound(order: usize) -> i64 {
    2 * (order * order) as i64
}

pub fn build_phase_table(rep: &RayRepresentation) -> Result<PhaseTable, RepError> {
    let n = rep.group.order();
    let max_den = snap_denominator_bound(n);
    let mut entries = vec![vec![Phase::zero(); n]; n];
    for r in 0..n {
        for s in 0..n {
            if r == 0 || s == 0 {
                continue;
            }
            let w = extract_local_factor(rep, r, s)?;
            entries[r][s] = Phase::from_unit(w, max_den, SNAP_TOL);
        }
    }
    Ok(PhaseTable {
        group: rep.group.clone(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    pub passed: bool,
    pub exact: bool,
    pub triples_checked: usize,
    /// Worst phase violation in radians (0 for exact tables that pass).
    pub worst: f64,
    pub witness: Option<(usize, usize, usize)>,
}

/// Checks normalization and `ω(r,s)ω(rs,m) = ω(s,m)ω(r,sm)` on every triple.
/// A normalization failure at `ω(r,e)` or `ω(e,s)` is reported through the
/// triples `(r,e,e)` and `(e,e,s)`.
pub fn verify_cocycle(t: &PhaseTable) -> CocycleReport {
    let g = &t.group;
    let n = g.order();
    let exact = t.is_exact();
    let mut worst: f64 = 0.0;
    let mut bad: Option<(f64, (usize, usize, usize))> = None;
    let mut checked = 0;
    let mut record = |lhs: Phase, rhs: Phase, tr: (usize, usize, usize)| {
        let dev = lhs.distance(&rhs);
        worst = worst.max(dev);
        if !lhs.same_as(&rhs, COCYCLE_TOL) && bad.is_none_or(|(d, _)| dev > d) {
            bad = Some((dev, tr));
        }
    };
    for r in 0..n {
        record(t.get(r, 0), Phase::zero(), (r, 0, 0));
        record(t.get(0, r), Phase::zero(), (0, 0, r));
    }
    for r in 0..n {
        for s in 0..n {
            let rs = g.mul(r, s);
            for m in 0..n {
                checked += 1;
                let lhs = t.get(r, s).add(t.get(rs, m));
                let rhs = t.get(s, m).add(t.get(r, g.mul(s, m)));
                record(lhs, rhs, (r, s, m));
            }
        }
    }
    let witness = bad.map(|(_, tr)| tr);
    CocycleReport {
        passed: witness.is_none(),
        exact,
        triples_checked: checked,
        worst,
        witness,
    }
}

/// Per-element phase `x(r)` with `x(e) = 0`; `φ(r) = e^{i x(r)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGauge {
    values: Vec<Phase>,
}

impl PhaseGauge {
    pub fn new(values: Vec<Phase>) -> Result<Self, RepError> {
        match values.first() {
            Some(p) if p.same_as(&Phase::zero(), 0.0) => Ok(PhaseGauge { values }),
            _ => Err(RepError::GaugeNotNormalized),
        }
    }

    pub fn zero(order: usize) -> Self {
        PhaseGauge {
            values: vec![Phase::zero(); order],
        }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize) -> Phase {
        self.values[r]
    }

    pub fn values(&self) -> &[Phase] {
        &self.values
    }

    pub fn unit(&self, r: usize) -> Complex64 {
        self.values[r].unit()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Phase::is_exact)
    }

    pub fn neg(&self) -> PhaseGauge {
        PhaseGauge {
            values: self.values.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn add(&self, other: &PhaseGauge) -> PhaseGauge {
        PhaseGauge {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(*b))
                .collect(),
        }
    }
}

/// `U'_r = φ(r) U_r`.
pub fn apply_phase_gauge(
    rep: &RayRepresentation,
    gauge: &PhaseGauge,
) -> Result<RayRepresentation, RepError> {
    if gauge.order() != rep.group.order() {
        return Err(RepError::GroupMismatch);
    }
    let matrices = rep
        .matrices
        .iter()
        .enumerate()
        .map(|(r, u)| u.scaled(gauge.unit(r)))
        .collect();
    Ok(RayRepresentation {
        group: rep.group.clone(),
        dim: rep.dim,
        matrices,
    })
}

/// Max deviation of `ω'(r,s)` from `ω(r,s)φ(r)φ(s)/φ(rs)` over all pairs.
pub fn gauge_covariance_defect(
    rep: &RayRepresentation,
    gauged: &RayRepresentation,
    gauge: &PhaseGauge,
) -> Result<f64, RepError> {
    let g = &rep.group;
    let mut worst: f64 = 0.0;
    for r in g.elements() {
        for s in g.elements() {
            let w = extract_local_factor(rep, r, s)?;
            let w2 = extract_local_factor(gauged, r, s)?;
            let expect = w * gauge.unit(r) * gauge.unit(s) / gauge.unit(g.mul(r, s));
            worst = worst.max((w2 - expect).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateIndependenceReport {
    /// Phases seen on `ψ1`, `ψ2` and `normalize(ψ1 + ψ2)`.
    pub lambdas: [Complex64; 3],
    pub spread: f64,
    pub consistent: bool,
}

pub fn state_independence_check(
    rep: &RayRepresentation,
    r: usize,
    s: usize,
    psi1: &StateVector,
    psi2: &StateVector,
) -> Result<StateIndependenceReport, RepError> {
    let overlap = psi1.inner(psi2).norm();
    if overlap > 1.0 - 1e-8 {
        return Err(RepError::DependentStates(overlap));
    }
    let psi3 = StateVector::new(psi1.as_vector() + psi2.as_vector())?;
    let rs = rep.group.mul(r, s);
    let (ur, us, urs) = (&rep.matrices[r], &rep.matrices[s], &rep.matrices[rs]);
    let phase = |psi: &StateVector| {
        let a = urs.apply(psi);
        let b = ur.apply(&us.apply(psi));
        let z = a.inner(&b);
        z / z.norm()
    };
    let lambdas = [phase(psi1), phase(psi2), phase(&psi3)];
    let spread = (lambdas[0] - lambdas[1])
        .norm()
        .max((lambdas[0] - lambdas[2]).norm())
        .max((lambdas[1] - lambdas[2]).norm());
    Ok(StateIndependenceReport {
        lambdas,
        spread,
        consistent: spread <= SCALAR_TOL,
    })
}

/// True iff every factor is 1.
pub fn is_genuine(t: &PhaseTable) -> bool {
    t.entries
        .iter()
        .flatten()
        .all(|p| p.is_trivial(COCYCLE_TOL))
}
