//! Enumeration of square minors.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Default cap on the number of minors examined by [`nonzero_minors_lcm`].
pub const DEFAULT_MAX_MINORS: u64 = 1 << 22;

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Number of `j x j` minors of an `m x n` matrix, summed over `1 <= j <= min(m, n)`.
pub fn minor_count(m: usize, n: usize) -> u128 {
    (1..=m.min(n))
        .map(|j| binomial(m, j) * binomial(n, j))
        .sum()
}

/// lcm of `|det|` over every nonzero square minor of `g`.
pub fn nonzero_minors_lcm(g: &IntMatrix, max_minors: u64) -> Result<BigInt> {
    if g.rows() == 0 || g.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if g.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let needed = minor_count(g.rows(), g.cols());
    if needed > max_minors as u128 {
        return Err(Error::MinorCap {
            needed,
            cap: max_minors,
        });
    }

    let mut acc = BigInt::one();
    for size in 1..=g.rows().min(g.cols()) {
        let row_sets: Vec<Vec<usize>> = (0..g.rows()).combinations(size).collect();
        let col_sets: Vec<Vec<usize>> = (0..g.cols()).combinations(size).collect();
        let partial = row_sets
            .par_iter()
            .map(|rows| {
                col_sets.iter().fold(BigInt::one(), |acc, cols| {
                    let det = g
                        .select(rows, cols)
                        .determinant()
                        .expect("square by construction");
                    if det.is_zero() {
                        acc
                    } else {
                        acc.lcm(&det.abs())
                    }
                })
            })
            .reduce(BigInt::one, |a, b| a.lcm(&b));
        acc = acc.lcm(&partial);
    }
    Ok(acc)
}
