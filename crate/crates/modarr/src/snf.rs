//! Smith normal form with unimodular transforms, and the modular queries
//! built on top of it.
//!
//! For an `m x k` integer matrix `G` we compute unimodular `S` (`m x m`) and
//! `T` (`k x k`) with `S * G * T = diag(e_1, ..., e_l; m, k)` where
//! `e_1 | e_2 | ... | e_l` are the elementary divisors and `l = rank G`.
//!
//! Reading `G` as the map `x -> x * G` on row vectors of `Z_q^m`, the kernel
//! has `prod gcd(e_i, q) * q^(m - l)` elements, and a vector `b` lies in the
//! mod-`q` column span of `G` iff `(S b)_i` is divisible by `gcd(e_i, q)` for
//! `i < l` and by `q` for `i >= l`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithData {
    /// Elementary divisors `e_1 | ... | e_l`, all positive.
    pub divisors: Vec<BigInt>,
    /// `S`, acting on rows.
    pub left_transform: IntMatrix,
    /// `T`, acting on columns.
    pub right_transform: IntMatrix,
}

impl SmithData {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Largest elementary divisor; 1 for the zero matrix.
    pub fn largest_divisor(&self) -> BigInt {
        self.divisors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// `diag(e_1, ..., e_l; m, k)` with the dimensions of the source matrix.
    pub fn diagonal(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left_transform.rows(), self.right_transform.rows());
        for (i, e) in self.divisors.iter().enumerate() {
            d[(i, i)] = e.clone();
        }
        d
    }

    /// `|{x in Z_q^m : x G = 0}|`.
    pub fn kernel_cardinality(&self, q: u64) -> BigInt {
        let m = self.left_transform.rows();
        let q_big = BigInt::from(q);
        let mut card: BigInt = self.divisors.iter().map(|e| e.gcd(&q_big)).product();
        card *= num_traits::pow(q_big, m - self.rank());
        card
    }

    /// Whether `b mod q` lies in the `Z_q`-span of the columns of the source
    /// matrix.
    pub fn spans_mod_q(&self, b: &[BigInt], q: u64) -> Result<bool> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        let transformed = self.left_transform.mul_vec(b)?;
        let q_big = BigInt::from(q);
        Ok(transformed.iter().enumerate().all(|(i, y)| {
            let modulus = match self.divisors.get(i) {
                Some(e) => e.gcd(&q_big),
                None => q_big.clone(),
            };
            y.is_multiple_of(&modulus)
        }))
    }
}

/// Smith normal form with transforms; the pivot each round is the
/// nonzero entry of minimum absolute value in the active block.
pub fn smith_normal_form(g: &IntMatrix) -> Result<SmithData> {
    let (m, k) = (g.rows(), g.cols());
    if m == 0 || k == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut d = g.clone();
    let mut s = IntMatrix::identity(m);
    let mut t = IntMatrix::identity(k);
    let mut rank = 0;

    while rank < m.min(k) {
        let Some((pi, pj)) = min_abs_entry(&d, rank, rank) else {
            break;
        };
        d.swap_rows(rank, pi);
        s.swap_rows(rank, pi);
        d.swap_cols(rank, pj);
        t.swap_cols(rank, pj);

        loop {
            let mut residue = false;
            for i in rank + 1..m {
                if d[(i, rank)].is_zero() {
                    continue;
                }
                let f = -nearest_quotient(&d[(i, rank)], &d[(rank, rank)]);
                d.add_row_multiple(i, rank, &f);
                s.add_row_multiple(i, rank, &f);
                residue |= !d[(i, rank)].is_zero();
            }
            for j in rank + 1..k {
                if d[(rank, j)].is_zero() {
                    continue;
                }
                let f = -nearest_quotient(&d[(rank, j)], &d[(rank, rank)]);
                d.add_col_multiple(j, rank, &f);
                t.add_col_multiple(j, rank, &f);
                residue |= !d[(rank, j)].is_zero();
            }
            if residue {
                // A smaller remainder is left in the pivot row or column.
                let (pi, pj) = min_abs_in_cross(&d, rank);
                d.swap_rows(rank, pi);
                s.swap_rows(rank, pi);
                d.swap_cols(rank, pj);
                t.swap_cols(rank, pj);
                continue;
            }
            // Pivot must divide the rest of the block.
            let pivot = d[(rank, rank)].clone();
            let offender =
                (rank + 1..m).find(|&i| (rank + 1..k).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(rank, i, &one);
                    s.add_row_multiple(rank, i, &one);
                }
                None => break,
            }
        }

        if d[(rank, rank)].is_negative() {
            d.negate_row(rank);
            s.negate_row(rank);
        }
        rank += 1;
    }

    let divisors = (0..rank).map(|i| d[(i, i)].clone()).collect();
    Ok(SmithData {
        divisors,
        left_transform: s,
        right_transform: t,
    })
}

/// Elementary divisors of `g`.
pub fn elementary_divisors(g: &IntMatrix) -> Result<Vec<BigInt>> {
    Ok(smith_normal_form(g)?.divisors)
}

/// Rank of `g`, via the Smith form.
pub fn rank(g: &IntMatrix) -> Result<usize> {
    Ok(smith_normal_form(g)?.rank())
}

/// `prod_{j} gcd(e_j, q) * q^(m - l)`: the size of the kernel of
/// `x -> x G` on `Z_q^m`.
pub fn kernel_cardinality(g: &IntMatrix, q: u64) -> Result<BigInt> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(smith_normal_form(g)?.kernel_cardinality(q))
}

/// Whether `b mod q` lies in the column span of `a mod q` over `Z_q`.
pub fn in_column_space_mod_q(a: &IntMatrix, b: &[BigInt], q: u64) -> Result<bool> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a matrix with {} rows",
            b.len(),
            a.rows()
        )));
    }
    smith_normal_form(a)?.spans_mod_q(b, q)
}

fn min_abs_entry(d: &IntMatrix, r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in r0..d.rows() {
        for j in c0..d.cols() {
            let v = &d[(i, j)];
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            if best.as_ref().is_none_or(|(_, b)| a < *b) {
                best = Some(((i, j), a));
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smallest nonzero entry among column `r` (rows >= r) and row `r`
/// (columns >= r).
fn min_abs_in_cross(d: &IntMatrix, r: usize) -> (usize, usize) {
    let col = (r..d.rows()).map(|i| (i, r));
    let row = (r + 1..d.cols()).map(|j| (r, j));
    col.chain(row)
        .filter(|&p| !d[p].is_zero())
        .min_by(|&a, &b| d[a].abs().cmp(&d[b].abs()))
        .expect("pivot is nonzero")
}

/// Quotient `a / b` rounded to the nearest integer.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // r has the sign of b; step toward the nearer multiple.
    if (BigInt::from(2) * r.abs()) > b.abs() {
        q + 1
    } else {
        q
    }
}
