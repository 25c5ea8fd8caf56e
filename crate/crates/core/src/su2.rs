//! Unit quaternions as a sampled SU(2), with the SO(3) projection.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::rng;

/// Renormalization is applied after every composition.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("radius {0} outside [0, π]")]
    BadRadius(f64),
    #[error("sample count must be at least 1")]
    EmptySample,
}

/// `w + x·i + y·j + z·k` with unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }.normalized()
    }

    /// Rotation by `angle` about the (not necessarily normalized) `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 || angle == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Quaternion::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn normalized(self) -> Self {
        let n = self.norm();
        Quaternion {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Hamilton product, renormalized.
    pub fn compose(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
        .normalized()
    }

    pub fn conjugate(&self) -> Quaternion {
        Quaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn neg(&self) -> Quaternion {
        Quaternion {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Rotation angle in `[0, π]` of the SO(3) image.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self.w.abs().min(1.0).acos()
    }

    /// Geodesic distance between the SO(3) images.
    pub fn rotation_distance(&self, o: &Quaternion) -> f64 {
        self.conjugate().compose(o).rotation_angle()
    }

    /// Representative with `w ≥ 0`: a fixed section of SU(2) → SO(3).
    pub fn so3_section(&self) -> Quaternion {
        if self.w < 0.0 {
            self.neg()
        } else {
            *self
        }
    }

    /// The defining 2×2 SU(2) matrix `w·1 − i(x σx + y σy + z σz)`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let c = Complex64::new;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                c(self.w, -self.z),
                c(-self.y, -self.x),
                c(self.y, -self.x),
                c(self.w, self.z),
            ],
        )
    }
}

/// The only built-in Lie sample group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactKind {
    Su2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledCompactGroup {
    pub kind: CompactKind,
    /// Geodesic ball radius around the identity (radians of rotation angle).
    pub chart_radius: f64,
}

impl SampledCompactGroup {
    pub fn su2(chart_radius: f64) -> Self {
        SampledCompactGroup {
            kind: CompactKind::Su2,
            chart_radius,
        }
    }
}

/// Seeded sample of unit quaternions with rotation angle at most `radius`.
/// Element 0 is always the identity.
pub fn sample_near_identity(
    _g: &SampledCompactGroup,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Quaternion>, SampleError> {
    if !(0.0..=std::f64::consts::PI).contains(&radius) || radius.is_nan() {
        return Err(SampleError::BadRadius(radius));
    }
    if count == 0 {
        return Err(SampleError::EmptySample);
    }
    let mut rng = rng::seeded(seed);
    let mut out = Vec::with_capacity(count);
    out.push(Quaternion::IDENTITY);
    while out.len() < count {
        let axis = loop {
            let v: [f64; 3] = [
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
                rng.sample(rand_distr::StandardNormal),
            ];
            if v.iter().any(|c| c.abs() > 1e-12) {
                break v;
            }
        };
        let angle = radius * rng.random::<f64>();
        out.push(Quaternion::from_axis_angle(axis, angle));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_radius_gives_identities() {
        let g = SampledCompactGroup::su2(0.0);
        let s = sample_near_identity(&g, 0.0, 3, 1).unwrap();
        assert_eq!(s, vec![Quaternion::IDENTITY; 3]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = SampledCompactGroup::su2(0.3);
        let a = sample_near_identity(&g, 0.3, 50, 42).unwrap();
        let b = sample_near_identity(&g, 0.3, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_near_identity(&g, 0.3, 50, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn radius_bound_holds() {
        let g = SampledCompactGroup::su2(0.3);
        let s = sample_near_identity(&g, 0.3, 1000, 9).unwrap();
        let max = s.iter().map(|q| q.rotation_angle()).fold(0.0, f64::max);
        assert!(max <= 0.3 + 1e-12, "max angle {max}");
        assert_eq!(s[0], Quaternion::IDENTITY);
    }

    #[test]
    fn bad_radius_rejected() {
        let g = SampledCompactGroup::su2(0.3);
        assert!(matches!(
            sample_near_identity(&g, 4.0, 3, 0),
            Err(SampleError::BadRadius(_))
        ));
        assert!(matches!(
            sample_near_identity(&g, -0.1, 3, 0),
            Err(SampleError::BadRadius(_))
        ));
    }

    #[test]
    fn composition_stays_unit_and_associative() {
        let g = SampledCompactGroup::su2(1.0);
        let s = sample_near_identity(&g, 1.0, 60, 3).unwrap();
        for w in s.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let l = a.compose(&b).compose(&c);
            let r = a.compose(&b.compose(&c));
            assert!((l.norm() - 1.0).abs() <= UNIT_TOL);
            for (p, q) in [(l.w, r.w), (l.x, r.x), (l.y, r.y), (l.z, r.z)] {
                assert!((p - q).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn angle_triangle_inequality() {
        let g = SampledCompactGroup::su2(0.8);
        let s = sample_near_identity(&g, 0.8, 200, 5).unwrap();
        for w in s.windows(2) {
            let ab = w[0].compose(&w[1]);
            assert!(
                ab.rotation_angle() <= w[0].rotation_angle() + w[1].rotation_angle() + 1e-9
            );
        }
    }

    #[test]
    fn matrix_is_a_homomorphism() {
        let g = SampledCompactGroup::su2(2.0);
        let s = sample_near_identity(&g, 2.0, 20, 11).unwrap();
        for w in s.windows(2) {
            let lhs = w[0].compose(&w[1]).matrix();
            let rhs = w[0].matrix() * w[1].matrix();
            assert!(crate::ray::max_abs(&(lhs - rhs)) < 1e-12);
        }
    }
}
