//! Builders for the standard test representations shipped in `corpus/`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::group::{make_cyclic, make_product, make_q8, make_s3, permutations3};
use crate::phase::Phase;
use crate::rep::{apply_phase_gauge, PhaseGauge, RayRepresentation};
use crate::su2::Quaternion;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Clock `C e_j = ζ^j e_j` with `ζ = e^{2πi/n}`.
pub fn clock(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, TAU * j as f64 / n as f64)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Shift `S e_j = e_{j+1 mod n}`.
pub fn shift(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn mat_pow(m: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let n = m.nrows();
    (0..k).fold(DMatrix::identity(n, n), |acc, _| acc * m)
}

/// `U_{(a,b)} = S^a C^b` on `Z_n × Z_n`, element `(a,b)` stored as `a·n + b`.
/// For `n = 2` this is the Pauli representation `X, Z, XZ`.
pub fn clock_shift(n: usize) -> RayRepresentation {
    let g = make_product(&make_cyclic(n), &make_cyclic(n));
    let (s, cl) = (shift(n), clock(n));
    let ms = (0..n * n)
        .map(|e| mat_pow(&s, e / n) * mat_pow(&cl, e % n))
        .collect();
    RayRepresentation::new(g, ms).expect("clock/shift is a ray representation")
}

/// `Z_2` with `U_1 = i·1` in dimension 2.
pub fn twisted_z2() -> RayRepresentation {
    let id = DMatrix::<Complex64>::identity(2, 2);
    RayRepresentation::new(make_cyclic(2), vec![id.clone(), id * c(0.0, 1.0)])
        .expect("scalar rep")
}

/// `Z_n` acting as `diag(ζ^r, ζ^{−r})`; genuine with unit determinant.
pub fn cyclic_diagonal(n: usize) -> RayRepresentation {
    let ms = (0..n)
        .map(|r| {
            let a = TAU * r as f64 / n as f64;
            DMatrix::from_row_slice(
                2,
                2,
                &[Complex64::from_polar(1.0, a), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, -a)],
            )
        })
        .collect();
    RayRepresentation::new(make_cyclic(n), ms).expect("cyclic rep")
}

fn permutation_matrix(p: &[usize; 3]) -> DMatrix<Complex64> {
    DMatrix::from_fn(3, 3, |i, j| if p[j] == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn parity(p: &[usize; 3]) -> f64 {
    let inversions = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Permutation matrices of `S3` (determinant = sign).
pub fn s3_permutation() -> RayRepresentation {
    let ms = permutations3().iter().map(permutation_matrix).collect();
    RayRepresentation::new(make_s3(), ms).expect("permutation rep")
}

/// `sign(p)·P_p`: `S3` as the rotation symmetries of a triangle in 3D,
/// genuine with unit determinant.
pub fn s3_rotation() -> RayRepresentation {
    let ms = permutations3()
        .iter()
        .map(|p| permutation_matrix(p) * c(parity(p), 0.0))
        .collect();
    RayRepresentation::new(make_s3(), ms).expect("rotation rep")
}

/// `Q8 ⊂ SU(2)`.
pub fn q8_su2() -> RayRepresentation {
    let units = [
        Quaternion::IDENTITY,
        Quaternion::new(0.0, 1.0, 0.0, 0.0),
        Quaternion::new(0.0, 0.0, 1.0, 0.0),
        Quaternion::new(0.0, 0.0, 0.0, 1.0),
    ];
    let ms = (0..8)
        .map(|e| {
            let q = units[e / 2];
            let q = if e % 2 == 1 { q.neg() } else { q };
            q.matrix()
        })
        .collect();
    RayRepresentation::new(make_q8(), ms).expect("Q8 in SU(2)")
}

/// Uniform exact gauge with values in `(1/den)ℤ` turns.
pub fn random_exact_gauge<R: Rng + ?Sized>(rng: &mut R, order: usize, den: i64) -> PhaseGauge {
    let mut values = vec![Phase::zero()];
    values.extend((1..order).map(|_| Phase::exact(rng.random_range(0..den), den)));
    PhaseGauge::new(values).expect("x(e) = 0")
}

/// Exact gauge with `|x(r)| < 1/(2·dim)` turns, so a unit-determinant
/// representation twisted by it keeps `dim·x(r)` on the principal branch.
pub fn small_exact_gauge<R: Rng + ?Sized>(
    rng: &mut R,
    order: usize,
    den: i64,
    dim: usize,
) -> PhaseGauge {
    let dim = dim as i64;
    // |k| / den < 1 / (2·dim)  ⇔  2·dim·|k| < den
    let kmax = (den - 1) / (2 * dim);
    let mut values = vec![Phase::zero()];
    values.extend((1..order).map(|_| Phase::exact(rng.random_range(-kmax..=kmax), den)));
    PhaseGauge::new(values).expect("x(e) = 0")
}

/// A genuine unit-determinant representation twisted by a small exact gauge.
pub fn twisted(rep: &RayRepresentation, seed: u64) -> RayRepresentation {
    let order = rep.group().order();
    let den = crate::rep::snap_denominator_bound(order);
    let mut rng = crate::rng::seeded(seed);
    let gauge = small_exact_gauge(&mut rng, order, den, rep.dim());
    apply_phase_gauge(rep, &gauge).expect("same group")
}

/// Named bundled representations, in corpus order.
pub fn corpus_reps() -> Vec<(String, RayRepresentation)> {
    let mut out = vec![("twisted-z2".to_string(), twisted_z2())];
    for n in 3..=12 {
        out.push((format!("twisted-z{n}"), twisted(&cyclic_diagonal(n), 1000 + n as u64)));
    }
    out.push(("pauli-z2z2".into(), clock_shift(2)));
    out.push(("clock-shift-z3z3".into(), clock_shift(3)));
    out.push(("clock-shift-z4z4".into(), clock_shift(4)));
    out.push(("s3-genuine".into(), s3_rotation()));
    out.push(("s3-twisted".into(), twisted(&s3_rotation(), 2006)));
    out.push(("q8-genuine".into(), q8_su2()));
    out.push(("q8-twisted".into(), twisted(&q8_su2(), 2008)));
    out
}

/// Whether a corpus entry is a genuine representation up to a coboundary.
pub fn corpus_is_trivializable(name: &str) -> bool {
    !(name.starts_with("pauli") || name.starts_with("clock-shift"))
}

/// Every bundled JSON file as `(file name, contents)`.
pub fn corpus_files() -> Vec<(String, String)> {
    use crate::group::GroupFile;
    use crate::io::{self, MatrixFile, SectionName, Su2Preset};

    let mut out = Vec::new();
    for (name, rep) in corpus_reps() {
        out.push((format!("{name}.json"), io::to_json(&io::rep_to_file(&rep))));
    }
    for (name, g) in [("z2", make_cyclic(2)), ("s3", make_s3()), ("q8", make_q8())] {
        out.push((format!("group-{name}.json"), io::to_json(&GroupFile::from(&g))));
    }
    let mut half = crate::cohomology::ExponentTable::zero(make_cyclic(2));
    half.set(1, 1, Phase::exact(1, 2));
    out.push(("exponent-z2-half.json".into(), io::to_json(&io::exponent_to_file(&half))));
    let mut rng = crate::rng::seeded(8);
    let u = crate::ray::Operator::random_unitary(&mut rng, 8).into_matrix();
    let mf = MatrixFile { dim: 8, matrix: io::matrix_to_rows(&u) };
    out.push(("random-u8.json".into(), io::to_json(&mf)));
    let preset = Su2Preset { radius: 0.3, samples: 10_000, seed: 42, alpha: 0.5, section: SectionName::Su2 };
    out.push(("su2-preset.json".into(), io::to_json(&preset)));
    out
}
