//! Reconstruction of a unitary or antiunitary operator from a black-box map
//! on rays that preserves transition probabilities.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ray::{max_abs, ray_distance, StateVector};
use crate::rng::{self, WorkbenchRng};

pub const MODULUS_TOL: f64 = 1e-9;
pub const OVERLAP_FLOOR: f64 = 1e-8;
pub const SYMMETRY_UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WignerError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("need at least {min} probes, got {probes}")]
    TooFewProbes { probes: usize, min: usize },
    #[error("map changes |<phi,psi>| by {deviation:e} on probe pair {pair:?}")]
    NotASymmetry { pair: (usize, usize), deviation: f64 },
    #[error("no reference index gives overlaps above the floor")]
    DegenerateOverlap,
    #[error("branch probe for index {k} is ambiguous (Im ratio {ratio_im})")]
    AmbiguousBranch { k: usize, ratio_im: f64 },
    #[error("indices {first} and {second} disagree on the branch")]
    BranchInconsistent { first: usize, second: usize },
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Linear,
    Antilinear,
}

/// `ψ ↦ Mψ`, or `ψ ↦ M·conj(ψ)` when antilinear.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryOperator {
    matrix: DMatrix<Complex64>,
    antilinear: bool,
}

impl SymmetryOperator {
    pub fn new(matrix: DMatrix<Complex64>, antilinear: bool) -> Result<Self, WignerError> {
        if !matrix.is_square() {
            return Err(WignerError::DimMismatch(matrix.nrows(), matrix.ncols()));
        }
        let op = SymmetryOperator { matrix, antilinear };
        let defect = op.unitarity_defect();
        if defect > SYMMETRY_UNITARY_TOL {
            return Err(WignerError::NotUnitary(defect));
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        SymmetryOperator { matrix: DMatrix::identity(dim, dim), antilinear: false }
    }

    /// Componentwise complex conjugation.
    pub fn conjugation(dim: usize) -> Self {
        SymmetryOperator { matrix: DMatrix::identity(dim, dim), antilinear: true }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn branch(&self) -> Branch {
        if self.antilinear {
            Branch::Antilinear
        } else {
            Branch::Linear
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(n, n)))
    }

    pub fn apply_raw(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        if self.antilinear {
            &self.matrix * v.conjugate()
        } else {
            &self.matrix * v
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::new(self.apply_raw(psi.as_vector())).expect("unitary image")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SymmetryOperator) -> Result<SymmetryOperator, WignerError> {
        if self.dim() != other.dim() {
            return Err(WignerError::DimMismatch(self.dim(), other.dim()));
        }
        let rhs = if self.antilinear { other.matrix.conjugate() } else { other.matrix.clone() };
        Ok(SymmetryOperator {
            matrix: &self.matrix * rhs,
            antilinear: self.antilinear ^ other.antilinear,
        })
    }

    /// `|⟨Sφ, Sψ⟩ − ⟨φ,ψ⟩|`, or against `conj⟨φ,ψ⟩` when antilinear.
    pub fn inner_contract_defect(&self, phi: &StateVector, psi: &StateVector) -> f64 {
        let lhs = self.apply_raw(phi.as_vector()).dotc(&self.apply_raw(psi.as_vector()));
        let ip = phi.inner(psi);
        let rhs = if self.antilinear { ip.conj() } else { ip };
        (lhs - rhs).norm()
    }
}

type Evaluator = Box<dyn FnMut(&StateVector) -> StateVector + Send>;

/// A map on rays, given by representatives with an arbitrary phase per call.
pub struct RaySymmetry {
    dim: usize,
    evaluator: Evaluator,
}

impl std::fmt::Debug for RaySymmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RaySymmetry").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl RaySymmetry {
    pub fn new(dim: usize, evaluator: impl FnMut(&StateVector) -> StateVector + Send + 'static) -> Self {
        RaySymmetry { dim, evaluator: Box::new(evaluator) }
    }

    /// Wrap an operator so that each call returns a fresh random phase.
    pub fn phase_randomized(op: SymmetryOperator, seed: u64) -> Self {
        let mut rng: WorkbenchRng = rng::seeded(seed);
        let dim = op.dim();
        RaySymmetry::new(dim, move |psi| {
            let tau = Complex64::from_polar(1.0, rng::angle(&mut rng));
            op.apply(psi).scaled(tau)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&mut self, psi: &StateVector) -> StateVector {
        (self.evaluator)(psi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub probes: usize,
    pub pairs: usize,
    pub max_deviation: f64,
    /// `max |⟨T e_j, T e_k⟩ − δ_jk|`.
    pub basis_orthonormality: f64,
}

/// Probe the map on the standard basis plus `probes` seeded random states and
/// compare all pairwise overlaps.
pub fn verify_symmetry(
    t: &mut RaySymmetry,
    probes: usize,
    seed: u64,
) -> Result<SymmetryReport, WignerError> {
    let dim = t.dim();
    if probes < dim * dim {
        return Err(WignerError::TooFewProbes { probes, min: dim * dim });
    }
    let mut rng = rng::seeded(seed);
    let mut inputs: Vec<StateVector> = (0..dim).map(|k| StateVector::basis(dim, k)).collect();
    inputs.extend((0..probes).map(|_| StateVector::random(&mut rng, dim)));
    let images: Vec<StateVector> = inputs.iter().map(|v| t.eval(v)).collect();
    if let Some(bad) = images.iter().find(|v| v.dim() != dim) {
        return Err(WignerError::DimMismatch(dim, bad.dim()));
    }
    let mut rpt = SymmetryReport {
        probes: inputs.len(),
        pairs: 0,
        max_deviation: 0.0,
        basis_orthonormality: 0.0,
    };
    let mut worst: Option<((usize, usize), f64)> = None;
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            rpt.pairs += 1;
            let dev = (inputs[i].inner(&inputs[j]).norm() - images[i].inner(&images[j]).norm()).abs();
            rpt.max_deviation = rpt.max_deviation.max(dev);
            if dev > MODULUS_TOL && worst.is_none_or(|(_, d)| dev > d) {
                worst = Some(((i, j), dev));
            }
        }
    }
    for j in 0..dim {
        for k in 0..dim {
            let target = if j == k { 1.0 } else { 0.0 };
            let dev = (images[j].inner(&images[k]) - target).norm();
            rpt.basis_orthonormality = rpt.basis_orthonormality.max(dev);
        }
    }
    match worst {
        Some((pair, deviation)) => Err(WignerError::NotASymmetry { pair, deviation }),
        None => Ok(rpt),
    }
}

fn combo(dim: usize, kb: usize, k: usize, coeff: Complex64) -> StateVector {
    let mut v = DVector::zeros(dim);
    v[kb] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[k] = coeff * FRAC_1_SQRT_2;
    StateVector::new(v).expect("nonzero")
}

/// Probe `(e_k̄ + i e_k)/√2` and read the coefficient ratio in the
/// phase-fixed image basis: `i` for linear maps, `−i` for antilinear ones.
pub fn classify_branch(
    t: &mut RaySymmetry,
    basis: &[DVector<Complex64>],
    kb: usize,
    k: usize,
) -> Result<Branch, WignerError> {
    let img = t.eval(&combo(t.dim(), kb, k, Complex64::i()));
    let ck = basis[k].dotc(img.as_vector());
    let ckb = basis[kb].dotc(img.as_vector());
    if ckb.norm() < OVERLAP_FLOOR {
        return Err(WignerError::DegenerateOverlap);
    }
    let ratio = ck / ckb;
    if ratio.im > 0.5 {
        Ok(Branch::Linear)
    } else if ratio.im < -0.5 {
        Ok(Branch::Antilinear)
    } else {
        Err(WignerError::AmbiguousBranch { k, ratio_im: ratio.im })
    }
}

// images rescaled so T((e_k̄ + e_k)/√2) expands with equal coefficients
fn phase_fixed_basis(
    t: &mut RaySymmetry,
    images: &[StateVector],
    kb: usize,
) -> Option<Vec<DVector<Complex64>>> {
    let dim = t.dim();
    let mut basis: Vec<DVector<Complex64>> = images.iter().map(|v| v.as_vector().clone()).collect();
    for k in (0..dim).filter(|&k| k != kb) {
        let img = t.eval(&combo(dim, kb, k, Complex64::new(1.0, 0.0)));
        let ck = images[k].as_vector().dotc(img.as_vector());
        let ckb = images[kb].as_vector().dotc(img.as_vector());
        if ck.norm() < OVERLAP_FLOOR || ckb.norm() < OVERLAP_FLOOR {
            return None;
        }
        let ratio = ck / ckb;
        basis[k] = images[k].as_vector() * (ratio / ratio.norm());
    }
    Some(basis)
}

/// Rebuild the operator behind a ray symmetry. Columns of the result are the
/// phase-fixed images of the basis; the first nonzero entry of the first
/// column is made real and positive.
pub fn reconstruct(t: &mut RaySymmetry) -> Result<SymmetryOperator, WignerError> {
    let dim = t.dim();
    let images: Vec<StateVector> = (0..dim).map(|k| t.eval(&StateVector::basis(dim, k))).collect();
    let mut chosen = None;
    for kb in 0..dim {
        if let Some(basis) = phase_fixed_basis(t, &images, kb) {
            chosen = Some((kb, basis));
            break;
        }
    }
    let (kb, basis) = chosen.ok_or(WignerError::DegenerateOverlap)?;

    let mut branch = Branch::Linear;
    let mut first: Option<(usize, Branch)> = None;
    for k in (0..dim).filter(|&k| k != kb) {
        let b = classify_branch(t, &basis, kb, k)?;
        match first {
            None => first = Some((k, b)),
            Some((k0, b0)) if b0 != b => {
                return Err(WignerError::BranchInconsistent { first: k0, second: k })
            }
            _ => {}
        }
        branch = b;
    }

    let mut m = DMatrix::from_columns(&basis);
    if let Some(z) = m.column(0).iter().copied().find(|z| z.norm() > 1e-12) {
        m *= z.conj() / z.norm();
    }
    SymmetryOperator::new(m, branch == Branch::Antilinear)
}

/// `max ray_distance(T ψ, S ψ)` over seeded random probes.
pub fn roundtrip_residual(
    t: &mut RaySymmetry,
    s: &SymmetryOperator,
    probes: usize,
    seed: u64,
) -> f64 {
    let mut rng = rng::seeded(seed);
    (0..probes)
        .map(|_| {
            let psi = StateVector::random(&mut rng, t.dim());
            ray_distance(&t.eval(&psi).ray(), &s.apply(&psi).ray()).expect("dims")
        })
        .fold(0.0, f64::max)
}

/// Smallest `max |M − e^{iθ}V|` over a grid of `θ`, refined at the trace
/// argument.
pub fn global_phase_distance(m: &DMatrix<Complex64>, v: &DMatrix<Complex64>, grid: usize) -> f64 {
    let at = |theta: f64| max_abs(&(m - v * Complex64::from_polar(1.0, theta)));
    let coarse = (0..grid)
        .map(|k| at(std::f64::consts::TAU * k as f64 / grid as f64))
        .fold(f64::INFINITY, f64::min);
    let tr = (v.adjoint() * m).trace();
    coarse.min(at(tr.arg()))
}

/// A random unitary as a symmetry operator.
pub fn random_symmetry<R: Rng + ?Sized>(rng: &mut R, dim: usize, antilinear: bool) -> SymmetryOperator {
    let u = crate::ray::Operator::random_unitary(rng, dim).into_matrix();
    SymmetryOperator::new(u, antilinear).expect("Haar sample is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_a_symmetry() {
        let mut t = RaySymmetry::new(3, |v| v.clone());
        let rpt = verify_symmetry(&mut t, 9, 1).unwrap();
        assert_eq!(rpt.max_deviation, 0.0);
        assert!(rpt.basis_orthonormality < 1e-15);
    }

    #[test]
    fn randomized_unitary_is_a_symmetry() {
        let mut rng = rng::seeded(3);
        let v = random_symmetry(&mut rng, 4, false);
        let mut t = RaySymmetry::phase_randomized(v, 11);
        let rpt = verify_symmetry(&mut t, 16, 2).unwrap();
        assert!(rpt.max_deviation < 1e-12);
    }

    #[test]
    fn projection_is_rejected() {
        let e1 = StateVector::basis(2, 0);
        let mut t = RaySymmetry::new(2, move |v: &StateVector| {
            let c = v.as_vector()[0];
            if c.norm() > 0.0 { e1.scaled(c / c.norm()) } else { e1.clone() }
        });
        match verify_symmetry(&mut t, 4, 1) {
            Err(WignerError::NotASymmetry { pair, deviation }) => {
                assert_eq!(pair, (0, 1));
                assert!((deviation - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let mut t = RaySymmetry::new(2, |v| v.clone());
        assert!(matches!(verify_symmetry(&mut t, 3, 1), Err(WignerError::TooFewProbes { .. })));
    }

    #[test]
    fn identity_reconstructs_to_identity() {
        let mut t = RaySymmetry::phase_randomized(SymmetryOperator::identity(3), 5);
        let s = reconstruct(&mut t).unwrap();
        assert!(!s.is_antilinear());
        assert!(max_abs(&(s.matrix() - DMatrix::<Complex64>::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn conjugation_reconstructs_antilinear() {
        let mut t = RaySymmetry::phase_randomized(SymmetryOperator::conjugation(3), 6);
        let s = reconstruct(&mut t).unwrap();
        assert!(s.is_antilinear());
        assert!(max_abs(&(s.matrix() - DMatrix::<Complex64>::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn random_unitary_dim8() {
        let mut rng = rng::seeded(8);
        let v = random_symmetry(&mut rng, 8, false);
        let mut t = RaySymmetry::phase_randomized(v.clone(), 81);
        let s = reconstruct(&mut t).unwrap();
        assert_eq!(s.branch(), Branch::Linear);
        assert!(global_phase_distance(s.matrix(), v.matrix(), 10_000) <= 1e-8);
        assert!(roundtrip_residual(&mut t, &s, 100, 3) <= 1e-8);
        assert!(s.unitarity_defect() <= 1e-9);
    }

    #[test]
    fn branch_on_v_times_conjugation() {
        let mut rng = rng::seeded(9);
        let v = random_symmetry(&mut rng, 4, false);
        let a = v.compose(&SymmetryOperator::conjugation(4)).unwrap();
        assert!(a.is_antilinear());
        let mut t = RaySymmetry::phase_randomized(a.clone(), 1);
        let s = reconstruct(&mut t).unwrap();
        assert_eq!(s.branch(), Branch::Antilinear);
        assert!(global_phase_distance(s.matrix(), v.matrix(), 10_000) <= 1e-8);
    }

    #[test]
    fn composition_rules() {
        let mut rng = rng::seeded(10);
        let (a, b) = (random_symmetry(&mut rng, 3, false), random_symmetry(&mut rng, 3, false));
        let ab = a.compose(&b).unwrap();
        assert!(!ab.is_antilinear());
        assert!(max_abs(&(ab.matrix() - a.matrix() * b.matrix())) < 1e-14);
        let k = SymmetryOperator::conjugation(3);
        let kk = k.compose(&k).unwrap();
        assert_eq!(kk, SymmetryOperator::identity(3));
        let vk = a.compose(&k).unwrap();
        let sq = vk.compose(&vk).unwrap();
        assert!(!sq.is_antilinear());
        assert!(max_abs(&(sq.matrix() - a.matrix() * a.matrix().conjugate())) < 1e-12);
        assert!(sq.unitarity_defect() < 1e-12);
        let p = StateVector::random(&mut rng, 3);
        let q = StateVector::random(&mut rng, 3);
        assert!(sq.inner_contract_defect(&p, &q) < 1e-12);
        assert!(vk.inner_contract_defect(&p, &q) < 1e-12);
        assert_eq!(
            a.compose(&SymmetryOperator::identity(2)),
            Err(WignerError::DimMismatch(3, 2))
        );
    }

    #[test]
    fn inconsistent_branches_surface() {
        // conjugate only the third coordinate: modulus-preserving on the
        // basis-pair probes but not a symmetry
        let mut t = RaySymmetry::new(3, |v: &StateVector| {
            let mut w = v.as_vector().clone();
            w[2] = w[2].conj();
            StateVector::new(w).unwrap()
        });
        assert!(matches!(
            reconstruct(&mut t),
            Err(WignerError::BranchInconsistent { first: 1, second: 2 })
        ));
        assert!(verify_symmetry(&mut t, 9, 4).is_err());
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(SymmetryOperator::new(m, false), Err(WignerError::NotUnitary(_))));
    }

    #[test]
    fn dimension_one() {
        let mut t = RaySymmetry::phase_randomized(SymmetryOperator::identity(1), 2);
        let s = reconstruct(&mut t).unwrap();
        assert_eq!(s.matrix()[(0, 0)], Complex64::new(1.0, 0.0));
    }
}
