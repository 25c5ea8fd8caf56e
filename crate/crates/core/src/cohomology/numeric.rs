//! Float fallback for unsnapped exponent tables.
//!
//! Summing the coboundary relation over the powers of a generator `g` of
//! order `k` gives `k·x(g) ≡ Σ_j T(g, g^j)`, so `x(g)` is one of `k` branches.
//! Each combination of generator branches determines `x` everywhere by
//! propagation; the combination is accepted if every pair equation holds.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use super::{
    polish, CoboundarySolution, CohomologyError, CommutatorWitness, ExponentTable,
    ObstructionCertificate,
};
use crate::phase::{wrap_angle, Phase};
use crate::rep::PhaseGauge;

/// Acceptance threshold on the wrapped residual.
pub const NUMERIC_TOL: f64 = 1e-6;
pub const MAX_UNKNOWNS: usize = 64;

fn max_residual(d: &ExponentTable, target: &[Vec<f64>], x: &[f64]) -> f64 {
    let g = d.group();
    let mut worst: f64 = 0.0;
    for r in g.elements() {
        for s in g.elements() {
            let v = x[r] + x[s] - x[g.mul(r, s)] - target[r][s];
            worst = worst.max(wrap_angle(v).abs());
        }
    }
    worst
}

fn propagate(d: &ExponentTable, target: &[Vec<f64>], gens: &[usize], xg: &[f64]) -> Vec<f64> {
    let g = d.group();
    let mut x = vec![f64::NAN; g.order()];
    x[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(r) = queue.pop_front() {
        for (&gen, &v) in gens.iter().zip(xg) {
            let rg = g.mul(r, gen);
            if x[rg].is_nan() {
                x[rg] = x[r] + v - target[r][gen];
                queue.push_back(rg);
            }
        }
    }
    x
}

/// Search for `x` with `δ1 + Δ[x] ≈ δ2` among at most `branch_budget`
/// generator branches.
pub fn numeric_equivalence(
    d1: &ExponentTable,
    d2: &ExponentTable,
    branch_budget: u64,
) -> Result<CoboundarySolution, CohomologyError> {
    if d1.group() != d2.group() {
        return Err(CohomologyError::GroupMismatch);
    }
    let g = d1.group();
    let n = g.order();
    if n - 1 > MAX_UNKNOWNS {
        return Err(CohomologyError::TooManyUnknowns(n - 1));
    }
    let target: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|s| d2.get(r, s).radians() - d1.get(r, s).radians()).collect())
        .collect();

    // gauge-invariant certificate first
    for a in g.elements() {
        for b in a + 1..n {
            if !g.commute(a, b) {
                continue;
            }
            let beta = wrap_angle(target[b][a] - target[a][b]);
            if beta.abs() > NUMERIC_TOL {
                return Ok(CoboundarySolution::Obstructed(ObstructionCertificate {
                    commutator: Some(CommutatorWitness { a, b, phase: Phase::float(beta) }),
                    functional: None,
                    branches_exhausted: None,
                }));
            }
        }
    }

    let gens = g.generators();
    let orders: Vec<usize> = gens.iter().map(|&h| g.element_order(h)).collect();
    let total: u128 = orders.iter().map(|&k| k as u128).product();
    let base: Vec<f64> = gens
        .iter()
        .zip(&orders)
        .map(|(&h, &k)| (0..k).map(|j| target[h][g.pow(h, j)]).sum::<f64>() / k as f64)
        .collect();

    let mut digits = vec![0usize; gens.len()];
    let mut explored: u64 = 0;
    loop {
        if explored >= branch_budget {
            return Err(CohomologyError::BudgetExceeded { explored, total });
        }
        explored += 1;
        let xg: Vec<f64> = base
            .iter()
            .zip(&digits)
            .zip(&orders)
            .map(|((b, &m), &k)| b + TAU * m as f64 / k as f64)
            .collect();
        let x = propagate(d1, &target, &gens, &xg);
        if max_residual(d1, &target, &x) < NUMERIC_TOL {
            let x = polish(g, &target, &x);
            if max_residual(d1, &target, &x) < NUMERIC_TOL {
                let mut values = vec![Phase::zero()];
                values.extend(x.iter().skip(1).map(|&v| Phase::float(v)));
                return Ok(CoboundarySolution::EquivalentVia(PhaseGauge::new(values)?));
            }
        }
        // next branch, odometer style
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(CoboundarySolution::Obstructed(ObstructionCertificate {
                    commutator: None,
                    functional: None,
                    branches_exhausted: Some(explored),
                }));
            }
            digits[i] += 1;
            if digits[i] < orders[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
