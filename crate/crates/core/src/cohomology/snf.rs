//! Linear systems `A z ≡ b (mod N)` over the integers, decided by a diagonal
//! (Smith-type) reduction with unimodular row and column operations.

use num_integer::Integer;

/// Row-transform tracking is skipped above this many equations.
pub const MAX_TRACKED_ROWS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModSolution {
    Solved(Vec<i128>),
    Inconsistent {
        /// `f` with `f·A ≡ 0` and `f·b ≢ 0 (mod N)`, when tracked.
        functional: Option<Vec<i128>>,
    },
}

fn md(a: i128, n: i128) -> i128 {
    a.rem_euclid(n)
}

/// `(g, p, q)` with `p·a + q·b = g = gcd(a, b)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

fn mod_inverse(a: i128, n: i128) -> i128 {
    if n == 1 {
        return 0;
    }
    let (g, p, _) = ext_gcd(md(a, n), n);
    debug_assert_eq!(g, 1);
    md(p, n)
}

struct Reducer {
    n: i128,
    a: Vec<Vec<i128>>,
    c: Vec<i128>,
    v: Vec<Vec<i128>>,
    u: Option<Vec<Vec<i128>>>,
}

impl Reducer {
    // rows (i, j) <- [[p, q], [s, t]] applied to (row_i, row_j)
    fn row_mix(&mut self, i: usize, j: usize, p: i128, q: i128, s: i128, t: i128) {
        let n = self.n;
        let mix = |x: i128, y: i128| (md(p * x + q * y, n), md(s * x + t * y, n));
        for col in 0..self.a[i].len() {
            let (x, y) = mix(self.a[i][col], self.a[j][col]);
            self.a[i][col] = x;
            self.a[j][col] = y;
        }
        let (x, y) = mix(self.c[i], self.c[j]);
        self.c[i] = x;
        self.c[j] = y;
        if let Some(u) = self.u.as_mut() {
            for col in 0..u[i].len() {
                let (x, y) = mix(u[i][col], u[j][col]);
                u[i][col] = x;
                u[j][col] = y;
            }
        }
    }

    fn col_mix(&mut self, i: usize, j: usize, p: i128, q: i128, s: i128, t: i128) {
        let n = self.n;
        let mix = |x: i128, y: i128| (md(p * x + q * y, n), md(s * x + t * y, n));
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let (x, y) = mix(row[i], row[j]);
            row[i] = x;
            row[j] = y;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.c.swap(i, j);
            if let Some(u) = self.u.as_mut() {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut().chain(self.v.iter_mut()) {
                row.swap(i, j);
            }
        }
    }

    // clear column t below the pivot; returns true if anything changed
    fn clear_column(&mut self, t: usize) -> bool {
        let mut changed = false;
        for i in t + 1..self.a.len() {
            let b = self.a[i][t];
            if b == 0 {
                continue;
            }
            changed = true;
            let a = self.a[t][t];
            if b % a == 0 {
                self.row_mix(t, i, 1, 0, -(b / a), 1);
            } else {
                let (g, p, q) = ext_gcd(a, b);
                self.row_mix(t, i, p, q, -(b / g), a / g);
            }
        }
        changed
    }

    fn clear_row(&mut self, t: usize) -> bool {
        let mut changed = false;
        for j in t + 1..self.a[t].len() {
            let b = self.a[t][j];
            if b == 0 {
                continue;
            }
            changed = true;
            let a = self.a[t][t];
            if b % a == 0 {
                self.col_mix(t, j, 1, 0, -(b / a), 1);
            } else {
                let (g, p, q) = ext_gcd(a, b);
                self.col_mix(t, j, p, q, -(b / g), a / g);
            }
        }
        changed
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(i128, usize, usize)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                    best = Some((x, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Decide `A z ≡ b (mod n)`; on success return one solution with free
/// coordinates set to zero.
pub fn solve_mod(a: &[Vec<i128>], b: &[i128], n: i128) -> ModSolution {
    assert!(n >= 1);
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    let track = m <= MAX_TRACKED_ROWS;
    let mut red = Reducer {
        n,
        a: a.iter().map(|row| row.iter().map(|&x| md(x, n)).collect()).collect(),
        c: b.iter().map(|&x| md(x, n)).collect(),
        v: (0..k).map(|i| (0..k).map(|j| i128::from(i == j)).collect()).collect(),
        u: track.then(|| (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect()),
    };
    let mut rank = 0;
    for t in 0..m.min(k) {
        let Some((i, j)) = red.pivot(t) else { break };
        red.swap_rows(t, i);
        red.swap_cols(t, j);
        loop {
            let c1 = red.clear_column(t);
            let c2 = red.clear_row(t);
            if !c1 && !c2 {
                break;
            }
        }
        rank += 1;
    }

    let fail = |red: &Reducer, row: usize, scale: i128| ModSolution::Inconsistent {
        functional: red
            .u
            .as_ref()
            .map(|u| u[row].iter().map(|&x| md(x * scale, n)).collect()),
    };
    let mut z = vec![0i128; k];
    for t in 0..rank {
        let d = red.a[t][t];
        let g = d.gcd(&n);
        if red.c[t] % g != 0 {
            return fail(&red, t, n / g);
        }
        let ng = n / g;
        z[t] = md((red.c[t] / g) * mod_inverse(d / g, ng), ng);
    }
    for t in rank..m {
        if red.c[t] != 0 {
            return fail(&red, t, 1);
        }
    }
    let sol = (0..k)
        .map(|i| md((0..k).map(|j| red.v[i][j] * z[j]).sum::<i128>(), n))
        .collect();
    ModSolution::Solved(sol)
}

/// `A z mod n`.
pub fn apply_mod(a: &[Vec<i128>], z: &[i128], n: i128) -> Vec<i128> {
    a.iter()
        .map(|row| md(row.iter().zip(z).map(|(x, y)| x * y).sum::<i128>(), n))
        .collect()
}

/// `f·A mod n`.
pub fn functional_mod(f: &[i128], a: &[Vec<i128>], n: i128) -> Vec<i128> {
    let k = a.first().map_or(0, Vec::len);
    (0..k)
        .map(|j| md(f.iter().zip(a).map(|(x, row)| x * row[j]).sum::<i128>(), n))
        .collect()
}

pub fn dot_mod(f: &[i128], b: &[i128], n: i128) -> i128 {
    md(f.iter().zip(b).map(|(x, y)| x * y).sum::<i128>(), n)
}
