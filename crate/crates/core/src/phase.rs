//! Unimodular phases, either exact (a rational number of turns) or floating.
//!
//! An exact phase `p/q` stands for the angle `2πp/q`; it is always kept in
//! lowest terms with `0 ≤ p < q`. Floating phases are angles in `(−π, π]`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Tolerance used when deciding that a floating value sits on a rational phase.
pub const SNAP_TOL: f64 = 1e-9;

/// Exact angle measured in turns, reduced into `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Turns(Rational64);

impl Turns {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_ratio(Rational64::new(num, den))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        Turns(reduce_unit(r))
    }

    pub fn zero() -> Self {
        Turns(Rational64::zero())
    }

    pub fn half() -> Self {
        Turns::new(1, 2)
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Angle in `[0, 2π)`.
    pub fn radians(&self) -> f64 {
        TAU * (self.num() as f64) / (self.den() as f64)
    }

    /// Angle in `(−π, π]`.
    pub fn principal_radians(&self) -> f64 {
        wrap_angle(self.radians())
    }

    pub fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }

    pub fn add(self, other: Turns) -> Turns {
        Turns::from_ratio(self.0 + other.0)
    }

    pub fn sub(self, other: Turns) -> Turns {
        Turns::from_ratio(self.0 - other.0)
    }

    pub fn neg(self) -> Turns {
        Turns::from_ratio(-self.0)
    }

    pub fn scale(self, k: Rational64) -> Turns {
        Turns::from_ratio(self.0 * k)
    }

    /// Lift to a rational multiple of π lying in `[0, 2)`.
    pub fn pi_multiple(&self) -> Rational64 {
        self.0 * Rational64::from_integer(2)
    }

    /// Best rational approximation with denominator at most `max_den`, accepted
    /// only if the angular error is at most `tol` radians.
    pub fn snap(angle: f64, max_den: i64, tol: f64) -> Option<Turns> {
        if !angle.is_finite() {
            return None;
        }
        let t = (angle / TAU).rem_euclid(1.0);
        for (p, q) in convergents(t, max_den) {
            let err = ((t - p as f64 / q as f64) * TAU).abs();
            if err <= tol {
                return Some(Turns::new(p, q));
            }
        }
        None
    }
}

impl fmt::Display for Turns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

fn reduce_unit(r: Rational64) -> Rational64 {
    let (n, d) = (*r.numer(), *r.denom());
    Rational64::new(n.mod_floor(&d), d)
}

// continued-fraction convergents of t ∈ [0,1) with denominators ≤ max_den
fn convergents(t: f64, max_den: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1), (1, 1)];
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut x = t;
    for _ in 0..64 {
        let a = x.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let h2 = a.saturating_mul(h1).saturating_add(h0);
        let k2 = a.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den || k2 <= 0 {
            break;
        }
        out.push((h2, k2));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = x - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    out
}

/// Wrap a real angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// A unimodular phase: exact rational turns or a floating angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    Exact(Turns),
    Float(f64),
}

impl Phase {
    pub fn zero() -> Self {
        Phase::Exact(Turns::zero())
    }

    pub fn exact(num: i64, den: i64) -> Self {
        Phase::Exact(Turns::new(num, den))
    }

    pub fn float(angle: f64) -> Self {
        Phase::Float(wrap_angle(angle))
    }

    /// Snap a unit complex number to an exact phase when possible.
    pub fn from_unit(z: Complex64, max_den: i64, tol: f64) -> Self {
        let angle = z.arg();
        match Turns::snap(angle, max_den, tol) {
            Some(t) => Phase::Exact(t),
            None => Phase::float(angle),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Phase::Exact(_))
    }

    pub fn as_exact(&self) -> Option<Turns> {
        match self {
            Phase::Exact(t) => Some(*t),
            Phase::Float(_) => None,
        }
    }

    /// Angle in `(−π, π]`.
    pub fn radians(&self) -> f64 {
        match self {
            Phase::Exact(t) => t.principal_radians(),
            Phase::Float(a) => *a,
        }
    }

    pub fn unit(&self) -> Complex64 {
        match self {
            Phase::Exact(t) => t.unit(),
            Phase::Float(a) => Complex64::from_polar(1.0, *a),
        }
    }

    pub fn add(self, other: Phase) -> Phase {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => Phase::Exact(a.add(b)),
            _ => Phase::float(self.radians() + other.radians()),
        }
    }

    pub fn neg(self) -> Phase {
        match self {
            Phase::Exact(a) => Phase::Exact(a.neg()),
            Phase::Float(a) => Phase::float(-a),
        }
    }

    pub fn sub(self, other: Phase) -> Phase {
        self.add(other.neg())
    }

    pub fn scale(self, k: Rational64) -> Phase {
        match self {
            Phase::Exact(a) => Phase::Exact(a.scale(k)),
            Phase::Float(a) => {
                Phase::float(a * (*k.numer() as f64) / (*k.denom() as f64))
            }
        }
    }

    /// Distance between the two phases on the unit circle, in radians.
    pub fn distance(&self, other: &Phase) -> f64 {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) if a == b => 0.0,
            _ => wrap_angle(self.radians() - other.radians()).abs(),
        }
    }

    /// Exact equality for exact phases, `tol` otherwise.
    pub fn same_as(&self, other: &Phase, tol: f64) -> bool {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => a == b,
            _ => self.distance(other) <= tol,
        }
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.same_as(&Phase::zero(), tol)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Exact(t) => write!(f, "2π·{t}"),
            Phase::Float(a) => write!(f, "{a}"),
        }
    }
}

/// Serialized phase: exact `{num, den}` turns, or `{angle}` radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseRepr {
    Exact { num: i64, den: i64 },
    Float { angle: f64 },
}

impl From<Phase> for PhaseRepr {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Exact(t) => PhaseRepr::Exact {
                num: t.num(),
                den: t.den(),
            },
            Phase::Float(a) => PhaseRepr::Float { angle: a },
        }
    }
}

impl TryFrom<PhaseRepr> for Phase {
    type Error = String;

    fn try_from(r: PhaseRepr) -> Result<Self, Self::Error> {
        match r {
            PhaseRepr::Exact { num, den } => {
                if den <= 0 {
                    Err(format!("phase denominator must be positive, got {den}"))
                } else {
                    Ok(Phase::exact(num, den))
                }
            }
            PhaseRepr::Float { angle } if angle.is_finite() => Ok(Phase::float(angle)),
            PhaseRepr::Float { angle } => Err(format!("non-finite phase angle {angle}")),
        }
    }
}

/// Format a rational multiple of π as `num/den·π`.
pub fn format_pi(r: Rational64) -> String {
    if r.is_zero() {
        "0".to_string()
    } else if r.denom().is_one() {
        format!("{}·π", r.numer())
    } else {
        format!("{}/{}·π", r.numer(), r.denom())
    }
}

/// `|r|` for rationals, used in report residuals.
pub fn ratio_abs_f64(r: Rational64) -> f64 {
    let a = r.abs();
    *a.numer() as f64 / *a.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_reduce_into_unit_interval() {
        assert_eq!(Turns::new(5, 4), Turns::new(1, 4));
        assert_eq!(Turns::new(-1, 3), Turns::new(2, 3));
        assert_eq!(Turns::new(4, 2), Turns::zero());
        let t = Turns::new(-7, 6);
        assert_eq!((t.num(), t.den()), (5, 6));
    }

    #[test]
    fn snap_recovers_small_rationals() {
        for q in 1..=30i64 {
            for p in 0..q {
                let angle = TAU * p as f64 / q as f64;
                assert_eq!(Turns::snap(angle, 30, SNAP_TOL), Some(Turns::new(p, q)));
            }
        }
        // principal-branch negative angles land on the same turn
        assert_eq!(Turns::snap(-PI / 2.0, 8, SNAP_TOL), Some(Turns::new(3, 4)));
    }

    #[test]
    fn snap_rejects_irrational_angle() {
        assert_eq!(Turns::snap(1.0, 8, SNAP_TOL), None);
        // 1/97 needs a denominator above the bound
        assert_eq!(Turns::snap(TAU / 97.0, 50, SNAP_TOL), None);
    }

    #[test]
    fn phase_arithmetic_stays_exact() {
        let a = Phase::exact(1, 3);
        let b = Phase::exact(2, 3);
        assert_eq!(a.add(b), Phase::zero());
        assert_eq!(a.neg(), b);
        let f = a.add(Phase::float(0.1));
        assert!(!f.is_exact());
        assert!((f.radians() - (TAU / 3.0 + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn wrap_angle_is_principal() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn format_pi_forms() {
        assert_eq!(format_pi(Rational64::new(1, 2)), "1/2·π");
        assert_eq!(format_pi(Rational64::from_integer(-1)), "-1·π");
        assert_eq!(format_pi(Rational64::zero()), "0");
    }
}
