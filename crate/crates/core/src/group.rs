//! Finite groups stored as validated multiplication tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry table[{r}][{s}] = {value} out of range for order {order}")]
    OutOfRange {
        r: usize,
        s: usize,
        value: i64,
        order: usize,
    },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
}

/// A finite group with elements `0..order`, identity always `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validate a raw table. If the identity is not element 0 the elements are
    /// relabelled by swapping the identity with 0.
    pub fn from_table(raw: &[Vec<i64>]) -> Result<Self, GroupError> {
        let order = raw.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut table = vec![vec![0usize; order]; order];
        for (r, row) in raw.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotSquare {
                    row: r,
                    len: row.len(),
                    order,
                });
            }
            for (s, &v) in row.iter().enumerate() {
                if v < 0 || v as usize >= order {
                    return Err(GroupError::OutOfRange {
                        r,
                        s,
                        value: v,
                        order,
                    });
                }
                table[r][s] = v as usize;
            }
        }

        let identity = (0..order)
            .find(|&e| (0..order).all(|r| table[e][r] == r && table[r][e] == r))
            .ok_or(GroupError::NoIdentity)?;
        if identity != 0 {
            table = relabel_swap(&table, 0, identity);
        }

        let mut inv = vec![usize::MAX; order];
        for r in 0..order {
            inv[r] = (0..order)
                .find(|&s| table[r][s] == 0 && table[s][r] == 0)
                .ok_or(GroupError::MissingInverse(r))?;
        }

        for r in 0..order {
            for s in 0..order {
                let rs = table[r][s];
                for m in 0..order {
                    if table[rs][m] != table[r][table[s][m]] {
                        return Err(GroupError::NonAssociative(r, s, m));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, inv })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, r: usize, s: usize) -> usize {
        self.table[r][s]
    }

    pub fn inv(&self, r: usize) -> usize {
        self.inv[r]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.commute(a, b)))
    }

    /// `r^k` for `k ≥ 0`.
    pub fn pow(&self, r: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, r))
    }

    pub fn element_order(&self, r: usize) -> usize {
        let mut k = 1;
        let mut x = r;
        while x != 0 {
            x = self.mul(x, r);
            k += 1;
        }
        k
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|r| self.element_order(r))
            .fold(1, num_integer::lcm)
    }

    /// A small generating set, chosen greedily in element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.order()];
        span[0] = true;
        for r in self.elements() {
            if !span[r] {
                gens.push(r);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn to_raw(&self) -> Vec<Vec<i64>> {
        self.table
            .iter()
            .map(|row| row.iter().map(|&v| v as i64).collect())
            .collect()
    }
}

fn relabel_swap(table: &[Vec<usize>], a: usize, b: usize) -> Vec<Vec<usize>> {
    let swap = |x: usize| {
        if x == a {
            b
        } else if x == b {
            a
        } else {
            x
        }
    };
    let n = table.len();
    let mut out = vec![vec![0; n]; n];
    for r in 0..n {
        for s in 0..n {
            out[swap(r)][swap(s)] = swap(table[r][s]);
        }
    }
    out
}

/// Validate a raw multiplication table.
pub fn validate_group(raw: &[Vec<i64>]) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_table(raw)
}

/// Cyclic group `Z_n` with `table[a][b] = (a + b) mod n`.
pub fn make_cyclic(n: usize) -> FiniteGroup {
    assert!(n >= 1, "cyclic group needs n ≥ 1");
    let raw: Vec<Vec<i64>> = (0..n)
        .map(|a| (0..n).map(|b| ((a + b) % n) as i64).collect())
        .collect();
    FiniteGroup::from_table(&raw).expect("cyclic table is a group")
}

/// Direct product; the pair `(g, h)` is element `g·|H| + h`.
pub fn make_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let (m, n) = (g.order(), h.order());
    let mut raw = vec![vec![0i64; m * n]; m * n];
    for a in 0..m * n {
        for b in 0..m * n {
            let (ga, ha) = (a / n, a % n);
            let (gb, hb) = (b / n, b % n);
            raw[a][b] = (g.mul(ga, gb) * n + h.mul(ha, hb)) as i64;
        }
    }
    FiniteGroup::from_table(&raw).expect("product of groups is a group")
}

/// Symmetric group on three letters. Elements are permutations in
/// lexicographic order of their one-line notation; 0 is the identity.
pub fn make_s3() -> FiniteGroup {
    let perms = permutations3();
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let raw: Vec<Vec<i64>> = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    // (a·b)(i) = a(b(i))
                    let c = [a[b[0]], a[b[1]], a[b[2]]];
                    index(c) as i64
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(&raw).expect("S3 table is a group")
}

/// The permutations of {0,1,2} in lexicographic order (index 0 is identity).
pub fn permutations3() -> Vec<[usize; 3]> {
    vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

/// Quaternion units `±1, ±i, ±j, ±k`, as elements
/// `0:1, 1:−1, 2:i, 3:−i, 4:j, 5:−j, 6:k, 7:−k`.
pub fn make_q8() -> FiniteGroup {
    // unit index u ∈ {0:1, 1:i, 2:j, 3:k} with a sign bit
    fn unit_mul(a: usize, b: usize) -> (bool, usize) {
        // returns (negative, unit)
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 1) => (true, 3),
            (2, 3) => (false, 1),
            (3, 2) => (true, 1),
            (3, 1) => (false, 2),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    }
    let raw: Vec<Vec<i64>> = (0..8)
        .map(|a: usize| {
            (0..8)
                .map(|b: usize| {
                    let (neg, u) = unit_mul(a / 2, b / 2);
                    let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
                    (2 * u + sign as usize) as i64
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(&raw).expect("Q8 table is a group")
}

/// JSON shape of a group file: `{order, table}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupFile {
    pub order: usize,
    pub table: Vec<Vec<i64>>,
}

impl From<&FiniteGroup> for GroupFile {
    fn from(g: &FiniteGroup) -> Self {
        GroupFile {
            order: g.order(),
            table: g.to_raw(),
        }
    }
}
