//! Wigner gauge fixing and numerical certification of the continuity bounds.
//!
//! Given a reference state `ψ`, each admissible representative is rephased so
//! that `g_r = ⟨ψ, U_r ψ⟩` is real and positive. On the gauged family the scan
//! evaluates `d_{r,s}`, `σ_{r,s} = ⟨U_rψ, U_sψ⟩`, `Z_{r,s} = U_sψ − σ_{r,s}U_rψ`
//! and the chain of inequalities that makes `r ↦ U_rψ` continuous.

use std::fmt::Debug;

use log::info;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::ray::{ray_distance, Operator, StateVector};
use crate::rep::{RayRepresentation, RepError};
use crate::su2::Quaternion;

/// Slack on every continuity bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// Orthogonality `⟨U_rψ, Z_{r,s}⟩ = 0` threshold.
pub const ORTHO_TOL: f64 = 1e-10;
/// `Im g_r` must vanish to this after gauge fixing.
pub const REALITY_TOL: f64 = 1e-9;

pub const DEFAULT_ALPHA: f64 = 0.5;

/// Default constant of the χ bound, `2^{3/2}`.
pub fn default_pre_constant() -> f64 {
    2f64.powf(1.5)
}

/// Alternative constant `2^{2/3}`, evaluated alongside the default.
pub fn alt_pre_constant() -> f64 {
    2f64.powf(2.0 / 3.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("only the identity passes the g_r > alpha threshold")]
    EmptyNeighborhood,
    #[error("element {0} is not admissible")]
    NotAdmissible(String),
    #[error("reference states are not orthonormal (overlap {0:e})")]
    NotOrthogonal(f64),
    #[error("dimension mismatch: family {0}, state {1}")]
    DimMismatch(usize, usize),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// A family of operator representatives closed under a product of labels.
pub trait RayFamily {
    type Element: Copy + Debug;
    fn dim(&self) -> usize;
    fn operator(&self, r: Self::Element) -> Operator;
    fn product(&self, r: Self::Element, s: Self::Element) -> Self::Element;
    fn inverse(&self, r: Self::Element) -> Self::Element;
}

impl RayFamily for RayRepresentation {
    type Element = usize;

    fn dim(&self) -> usize {
        RayRepresentation::dim(self)
    }

    fn operator(&self, r: usize) -> Operator {
        RayRepresentation::operator(self, r).clone()
    }

    fn product(&self, r: usize, s: usize) -> usize {
        self.group().mul(r, s)
    }

    fn inverse(&self, r: usize) -> usize {
        self.group().inv(r)
    }
}

/// Which representative of `±q` a quaternion label maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Su2Section {
    /// The defining representation of SU(2): genuine.
    Su2,
    /// Projective representation of SO(3) via the `w ≥ 0` sign choice.
    So3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Su2Family {
    pub section: Su2Section,
}

impl RayFamily for Su2Family {
    type Element = Quaternion;

    fn dim(&self) -> usize {
        2
    }

    fn operator(&self, q: Quaternion) -> Operator {
        let q = match self.section {
            Su2Section::Su2 => q,
            Su2Section::So3 => q.so3_section(),
        };
        Operator::new(q.matrix()).expect("square")
    }

    fn product(&self, r: Quaternion, s: Quaternion) -> Quaternion {
        r.compose(&s)
    }

    fn inverse(&self, r: Quaternion) -> Quaternion {
        r.conjugate()
    }
}

/// Phase `τ` with `τ⟨ψ, Uψ⟩ = |⟨ψ, Uψ⟩|`.
fn wigner_phase(psi: &StateVector, u: &Operator) -> Complex64 {
    let g = psi.inner(&u.apply(psi));
    if g.norm() > 0.0 {
        g.conj() / g.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Any family rephased on the fly into the Wigner gauge of `reference`.
#[derive(Debug, Clone)]
pub struct GaugedFamily<F> {
    pub inner: F,
    pub reference: StateVector,
}

impl<F: RayFamily> RayFamily for GaugedFamily<F> {
    type Element = F::Element;

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn operator(&self, r: F::Element) -> Operator {
        let u = self.inner.operator(r);
        let tau = wigner_phase(&self.reference, &u);
        u.scaled(tau)
    }

    fn product(&self, r: F::Element, s: F::Element) -> F::Element {
        self.inner.product(r, s)
    }

    fn inverse(&self, r: F::Element) -> F::Element {
        self.inner.inverse(r)
    }
}

/// The sign conditions on `(φ⁰, U⁰φ⁰) = X + iY` and the gauge phase
/// `τ = τ1 + iτ2`: `Xτ1 − Yτ2 ≥ 0` and `Xτ2 + Yτ1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeCondition {
    pub element: usize,
    pub x: f64,
    pub y: f64,
    pub tau: [f64; 2],
    pub real_part: f64,
    pub imag_part: f64,
}

impl GaugeCondition {
    pub fn holds(&self) -> bool {
        self.real_part >= -REALITY_TOL && self.imag_part.abs() <= REALITY_TOL
    }
}

#[derive(Debug, Clone)]
pub struct GaugeContext {
    pub reference: StateVector,
    pub alpha: f64,
    pub admissible: Vec<usize>,
    pub excluded: Vec<usize>,
    pub conditions: Vec<GaugeCondition>,
}

impl GaugeContext {
    /// Context for a generic family; admissibility is tested per element.
    pub fn for_family(reference: StateVector, alpha: f64) -> Result<Self, GaugeError> {
        check_alpha(alpha)?;
        Ok(GaugeContext {
            reference,
            alpha,
            admissible: Vec::new(),
            excluded: Vec::new(),
            conditions: Vec::new(),
        })
    }
}

fn check_alpha(alpha: f64) -> Result<(), GaugeError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(GaugeError::BadAlpha(alpha))
    }
}

/// Rephase every element with `|⟨ψ, U_rψ⟩| > α` so that `⟨ψ, U_rψ⟩` is real
/// and positive. Elements under the threshold are left alone and excluded.
pub fn wigner_gauge(
    rep: &RayRepresentation,
    psi: &StateVector,
    alpha: f64,
) -> Result<(RayRepresentation, GaugeContext), GaugeError> {
    check_alpha(alpha)?;
    if psi.dim() != rep.dim() {
        return Err(GaugeError::DimMismatch(rep.dim(), psi.dim()));
    }
    let mut ops = Vec::with_capacity(rep.group().order());
    let (mut admissible, mut excluded, mut conditions) = (Vec::new(), Vec::new(), Vec::new());
    for r in rep.group().elements() {
        let u = RayRepresentation::operator(rep, r);
        let g = psi.inner(&u.apply(psi));
        if g.norm() > alpha {
            let tau = wigner_phase(psi, u);
            let z = tau * g;
            conditions.push(GaugeCondition {
                element: r,
                x: g.re,
                y: g.im,
                tau: [tau.re, tau.im],
                real_part: z.re,
                imag_part: z.im,
            });
            ops.push(u.scaled(tau));
            admissible.push(r);
        } else {
            ops.push(u.clone());
            excluded.push(r);
        }
    }
    if admissible.len() <= 1 && rep.group().order() > 1 {
        return Err(GaugeError::EmptyNeighborhood);
    }
    if !excluded.is_empty() {
        info!("elements {excluded:?} fail the g_r > {alpha} threshold and are excluded");
    }
    let gauged = rep.with_operators(ops)?;
    Ok((
        gauged,
        GaugeContext {
            reference: psi.clone(),
            alpha,
            admissible,
            excluded,
            conditions,
        },
    ))
}

/// `g_r = ⟨ψ, U_rψ⟩`.
pub fn g_value<F: RayFamily>(family: &F, psi: &StateVector, r: F::Element) -> Complex64 {
    psi.inner(&family.operator(r).apply(psi))
}

fn require_admissible<F: RayFamily>(
    family: &F,
    ctx: &GaugeContext,
    r: F::Element,
) -> Result<Complex64, GaugeError> {
    let g = g_value(family, &ctx.reference, r);
    if g.im.abs() <= REALITY_TOL && g.re > ctx.alpha {
        Ok(g)
    } else {
        Err(GaugeError::NotAdmissible(format!("{r:?}")))
    }
}

pub fn is_admissible<F: RayFamily>(family: &F, ctx: &GaugeContext, r: F::Element) -> bool {
    require_admissible(family, ctx, r).is_ok()
}

/// Evaluated sides of one inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl Bound {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRecord<E> {
    pub pair: (E, E),
    pub d_rs: f64,
    pub sigma_rs: Complex64,
    pub z_norm: f64,
    /// `|⟨U_rψ, Z_{r,s}⟩|`.
    pub orthogonality: f64,
    /// `|‖Z‖² − (1 − |σ|²)|`.
    pub z_identity: f64,
    /// `|σ_{r,s} − ω(r,m)* g_m|` with `m = r⁻¹s`.
    pub sigma_vs_g: f64,
    /// `‖Z‖² ≤ d²`, `‖U_sψ − U_rψ‖² ≤ 2|1 − σ|`, `≤ (4/α)d`, `|1 − |σ|| ≤ (2/α)d`.
    pub bounds: [Bound; 4],
}

impl<E> ContinuityRecord<E> {
    pub fn violations(&self, slack: f64) -> Vec<&'static str> {
        let mut v: Vec<_> = self
            .bounds
            .iter()
            .filter(|b| !b.holds(slack))
            .map(|b| b.name)
            .collect();
        if self.orthogonality > ORTHO_TOL {
            v.push("orthogonality");
        }
        v
    }
}

/// Evaluate the continuity chain on each pair. All elements must be admissible.
pub fn continuity_scan<F: RayFamily>(
    family: &F,
    ctx: &GaugeContext,
    pairs: &[(F::Element, F::Element)],
) -> Result<Vec<ContinuityRecord<F::Element>>, GaugeError> {
    let psi = &ctx.reference;
    if psi.dim() != family.dim() {
        return Err(GaugeError::DimMismatch(family.dim(), psi.dim()));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for &(r, s) in pairs {
        require_admissible(family, ctx, r)?;
        require_admissible(family, ctx, s)?;
        let (ur, us) = (family.operator(r), family.operator(s));
        let (a, b) = (ur.apply(psi), us.apply(psi));
        let d = ray_distance(&a.ray(), &b.ray()).expect("equal dims");
        let sigma = a.inner(&b);
        let z = b.as_vector() - a.as_vector() * sigma;
        let z_norm = z.norm();
        let orthogonality = a.as_vector().dotc(&z).norm();
        let z_identity = (z_norm * z_norm - (1.0 - sigma.norm_sqr())).abs();
        let m = family.product(family.inverse(r), s);
        let w = family_factor(family, r, m);
        let sigma_vs_g = (sigma - w.conj() * g_value(family, psi, m)).norm();
        let diff2 = (b.as_vector() - a.as_vector()).norm_squared();
        let alpha = ctx.alpha;
        let bounds = [
            Bound { name: "j5", lhs: z_norm * z_norm, rhs: d * d },
            Bound { name: "nec", lhs: diff2, rhs: 2.0 * (1.0 - sigma).norm() },
            Bound { name: "jjj", lhs: diff2, rhs: 4.0 / alpha * d },
            Bound { name: "ad5", lhs: (1.0 - sigma.norm()).abs(), rhs: 2.0 / alpha * d },
        ];
        out.push(ContinuityRecord {
            pair: (r, s),
            d_rs: d,
            sigma_rs: sigma,
            z_norm,
            orthogonality,
            z_identity,
            sigma_vs_g,
            bounds,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiReport {
    pub pairs: usize,
    pub constant: f64,
    /// Worst residual of `⟨U_rφ, Z(χ)⟩ + ⟨U_sφ − U_rφ, U_sχ⟩ = (1 − σ(χ))/√2`.
    pub identity_residual: f64,
    pub violations: usize,
    pub violations_alt_constant: usize,
    pub violations_default_constant: usize,
    /// Largest `lhs / (d(χ) + ‖U_sφ − U_rφ‖)` seen; the smallest constant the
    /// data supports.
    pub max_ratio: f64,
}

/// Continuity transfer from `φ` to `χ = (φ + ϕ)/√2`.
pub fn chi_continuity_check<F: RayFamily>(
    family: &F,
    ctx: &GaugeContext,
    phi: &StateVector,
    varphi: &StateVector,
    pairs: &[(F::Element, F::Element)],
    constant: f64,
) -> Result<ChiReport, GaugeError> {
    let overlap = phi.inner(varphi).norm();
    if overlap > 1e-9 {
        return Err(GaugeError::NotOrthogonal(overlap));
    }
    let chi = StateVector::new(phi.as_vector() + varphi.as_vector())
        .map_err(RepError::from)?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut rpt = ChiReport {
        pairs: pairs.len(),
        constant,
        identity_residual: 0.0,
        violations: 0,
        violations_alt_constant: 0,
        violations_default_constant: 0,
        max_ratio: 0.0,
    };
    for &(r, s) in pairs {
        require_admissible(family, ctx, r)?;
        require_admissible(family, ctx, s)?;
        let (ur, us) = (family.operator(r), family.operator(s));
        let (rphi, sphi) = (ur.apply_raw(phi.as_vector()), us.apply_raw(phi.as_vector()));
        let (rchi, schi) = (ur.apply_raw(chi.as_vector()), us.apply_raw(chi.as_vector()));
        let sigma = rchi.dotc(&schi);
        let z = &schi - &rchi * sigma;
        let lhs_id = rphi.dotc(&z) + (&sphi - &rphi).dotc(&schi);
        let rhs_id = (Complex64::new(1.0, 0.0) - sigma) * inv_sqrt2;
        rpt.identity_residual = rpt.identity_residual.max((lhs_id - rhs_id).norm());

        let d_chi = ray_distance(
            &StateVector::new(rchi.clone()).map_err(RepError::from)?.ray(),
            &StateVector::new(schi.clone()).map_err(RepError::from)?.ray(),
        )
        .expect("equal dims");
        let lhs = (&schi - &rchi).norm_squared();
        let base = d_chi + (&sphi - &rphi).norm();
        let fails = |k: f64| lhs > k * base + BOUND_SLACK;
        rpt.violations += fails(constant) as usize;
        rpt.violations_alt_constant += fails(alt_pre_constant()) as usize;
        rpt.violations_default_constant += fails(default_pre_constant()) as usize;
        if base > 0.0 {
            rpt.max_ratio = rpt.max_ratio.max(lhs / base);
        }
    }
    Ok(rpt)
}

/// Local factor of a family: the scalar in `U_r U_s U_{rs}†`, read off the
/// normalized trace.
pub fn family_factor<F: RayFamily>(family: &F, r: F::Element, s: F::Element) -> Complex64 {
    let rs = family.product(r, s);
    let m = family.operator(r).compose(&family.operator(s)).compose(&family.operator(rs).adjoint());
    let tr = m.matrix().trace();
    tr / tr.norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorContinuityReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` (negative when every bound holds with room).
    pub worst_margin: f64,
}

/// `|ω(r',s') − ω(r,s)| ≤ ‖(U_{rs} − U_{r's'})ψ‖ + ‖(U_s − U_{s'})ψ‖ +
/// ‖(U_{r'} − U_r)ψ'‖` with `ψ' = U_{s'}ψ`. Quadruples whose products are not
/// admissible are skipped.
pub fn local_factor_continuity<F: RayFamily>(
    family: &F,
    ctx: &GaugeContext,
    quads: &[(F::Element, F::Element, F::Element, F::Element)],
    psi: &StateVector,
) -> Result<FactorContinuityReport, GaugeError> {
    let mut rpt = FactorContinuityReport {
        checked: 0,
        skipped: 0,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
    };
    for &(r, s, r2, s2) in quads {
        for e in [r, s, r2, s2] {
            require_admissible(family, ctx, e)?;
        }
        let (rs, rs2) = (family.product(r, s), family.product(r2, s2));
        if !is_admissible(family, ctx, rs) || !is_admissible(family, ctx, rs2) {
            info!("skipping ({r:?},{s:?},{r2:?},{s2:?}): product outside the admissible set");
            rpt.skipped += 1;
            continue;
        }
        let lhs = (family_factor(family, r2, s2) - family_factor(family, r, s)).norm();
        let v = psi.as_vector();
        let (u_rs, u_rs2) = (family.operator(rs), family.operator(rs2));
        let (u_s, u_s2) = (family.operator(s), family.operator(s2));
        let (u_r, u_r2) = (family.operator(r), family.operator(r2));
        let psi2 = u_s2.apply_raw(v);
        let rhs = (u_rs.apply_raw(v) - u_rs2.apply_raw(v)).norm()
            + (u_s.apply_raw(v) - u_s2.apply_raw(v)).norm()
            + (u_r2.apply_raw(&psi2) - u_r.apply_raw(&psi2)).norm();
        rpt.checked += 1;
        rpt.worst_margin = rpt.worst_margin.max(lhs - rhs);
        if lhs > rhs + BOUND_SLACK {
            rpt.violations += 1;
        }
    }
    if rpt.checked == 0 {
        rpt.worst_margin = 0.0;
    }
    Ok(rpt)
}
