//! Complex state vectors, operators, rays and the ray metric.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::rng;

/// Vectors tagged normalized stay within this of unit norm.
pub const NORM_TOL: f64 = 1e-10;
/// Unitarity threshold on `‖U†U − I‖_max`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Two rays are equal when their overlap is at least `1 − RAY_EQ_TOL`.
pub const RAY_EQ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RayError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("empty vector")]
    Empty,
    #[error("matrix is not square ({0}×{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not unitary: ‖U†U − I‖_max = {0:e}")]
    NotUnitary(f64),
    #[error("oracle grid must be at least 8, got {0}")]
    GridTooSmall(usize),
}

/// A normalized complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Normalizes `v`; rejects the zero vector.
    pub fn new(v: DVector<Complex64>) -> Result<Self, RayError> {
        if v.is_empty() {
            return Err(RayError::Empty);
        }
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(RayError::ZeroVector);
        }
        Ok(StateVector(v.unscale(n)))
    }

    pub fn from_slice(c: &[Complex64]) -> Result<Self, RayError> {
        Self::new(DVector::from_column_slice(c))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        StateVector(v)
    }

    /// Haar-random state from a seeded stream.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        loop {
            if let Ok(s) = Self::new(rng::gaussian_vector(rng, dim)) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<Complex64> {
        self.0
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn scaled(&self, phase: Complex64) -> StateVector {
        StateVector(&self.0 * phase)
    }

    pub fn conj(&self) -> StateVector {
        StateVector(self.0.map(|c| c.conj()))
    }

    pub fn ray(&self) -> Ray {
        Ray(self.clone())
    }
}

/// Equivalence class of a normalized vector under unimodular phases.
#[derive(Debug, Clone)]
pub struct Ray(StateVector);

impl Ray {
    pub fn representative(&self) -> &StateVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl PartialEq for Ray {
    fn eq(&self, other: &Self) -> bool {
        ray_inner(self, other)
            .map(|v| v >= 1.0 - RAY_EQ_TOL)
            .unwrap_or(false)
    }
}

impl From<StateVector> for Ray {
    fn from(s: StateVector) -> Self {
        Ray(s)
    }
}

/// A square complex matrix acting on state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<Complex64>);

impl Operator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, RayError> {
        if m.nrows() != m.ncols() {
            return Err(RayError::NotSquare(m.nrows(), m.ncols()));
        }
        Ok(Operator(m))
    }

    /// Accepts `m` only if it is unitary within [`UNITARY_TOL`].
    pub fn unitary(m: DMatrix<Complex64>) -> Result<Self, RayError> {
        let op = Self::new(m)?;
        let dev = op.unitarity_defect();
        if dev > UNITARY_TOL {
            return Err(RayError::NotUnitary(dev));
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    /// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
    /// `R`'s diagonal moved into `Q`.
    pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let g = rng::gaussian_matrix(rng, dim);
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for k in 0..dim {
            let d = r[(k, k)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            for i in 0..dim {
                q[(i, k)] *= ph;
            }
        }
        Operator(q)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.0.adjoint() * &self.0 - DMatrix::<Complex64>::identity(n, n)))
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        // unitary operators keep the norm; renormalize against drift
        let w = &self.0 * &v.0;
        let n = w.norm();
        StateVector(if n > 0.0 { w.unscale(n) } else { w })
    }

    /// Raw product `U v` without renormalization.
    pub fn apply_raw(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }

    pub fn compose(&self, other: &Operator) -> Operator {
        Operator(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn scaled(&self, phase: Complex64) -> Operator {
        Operator(&self.0 * phase)
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn check_dims(a: usize, b: usize) -> Result<(), RayError> {
    if a != b {
        Err(RayError::DimMismatch(a, b))
    } else {
        Ok(())
    }
}

/// Ray overlap `|⟨φ, ψ⟩|`.
pub fn ray_inner(a: &Ray, b: &Ray) -> Result<f64, RayError> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.0.inner(&b.0).norm().min(1.0 + 1e-12))
}

/// Ray distance `[2(1 − A·B)]^{1/2}`, evaluated as `‖ψ − τφ‖` with the
/// optimal phase `τ` so that nearby rays keep full relative precision.
pub fn ray_distance(a: &Ray, b: &Ray) -> Result<f64, RayError> {
    check_dims(a.dim(), b.dim())?;
    let z = b.0.inner(&a.0);
    if z.norm() == 0.0 {
        return Ok(std::f64::consts::SQRT_2);
    }
    let tau = z / z.norm();
    Ok((a.0.as_vector() - b.0.as_vector() * tau).norm())
}

/// Brute-force distance: minimum of `‖ψ − τψ''‖` over the phases
/// `τ = e^{2πik/grid}`.
pub fn min_phase_distance_oracle(
    psi: &StateVector,
    other: &StateVector,
    grid: usize,
) -> Result<f64, RayError> {
    check_dims(psi.dim(), other.dim())?;
    if grid < 8 {
        return Err(RayError::GridTooSmall(grid));
    }
    let mut best = f64::INFINITY;
    for k in 0..grid {
        let tau = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
        let d2: f64 = psi
            .as_vector()
            .iter()
            .zip(other.as_vector().iter())
            .map(|(a, b)| (a - b * tau).norm_sqr())
            .sum();
        best = best.min(d2.sqrt());
    }
    Ok(best)
}

/// Both sides of the inner-product continuity bound
/// `|Ψ1·Φ1 − Ψ2·Φ2| ≤ d(Φ1,Φ2) + d(Ψ1,Ψ2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityGap {
    pub lhs: f64,
    pub rhs: f64,
}

impl ContinuityGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn inner_continuity_gap(
    psi1: &Ray,
    phi1: &Ray,
    psi2: &Ray,
    phi2: &Ray,
) -> Result<ContinuityGap, RayError> {
    let lhs = (ray_inner(psi1, phi1)? - ray_inner(psi2, phi2)?).abs();
    let rhs = ray_distance(phi1, phi2)? + ray_distance(psi1, psi2)?;
    Ok(ContinuityGap { lhs, rhs })
}
