//! Brute-force enumeration over `Z_q^m`.
//!
//! These routines never touch elementary divisors; they are the ground truth
//! that the formula-based results are tested against.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Default evaluation budget (points times columns).
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// An explicit subset of `Z_q^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub q: u64,
    pub m: usize,
    pub points: BTreeSet<Vec<u64>>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.is_subset(&other.points)
    }
}

/// Columns reduced into `[0, q)`.
struct Reduced {
    q: u64,
    m: usize,
    columns: Vec<Vec<u64>>,
}

impl Reduced {
    fn new(c: &IntMatrix, q: u64, budget: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        let m = c.rows();
        let points = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        let needed = points.saturating_mul(c.cols().max(1) as u128);
        if needed > budget as u128 {
            return Err(Error::OracleBudget { needed, budget });
        }
        let q_big = BigInt::from(q);
        let columns = (0..c.cols())
            .map(|j| {
                (0..m)
                    .map(|i| {
                        c[(i, j)]
                            .mod_floor(&q_big)
                            .to_u64()
                            .expect("reduced below q")
                    })
                    .collect()
            })
            .collect();
        Ok(Reduced { q, m, columns })
    }

    fn on_hyperplane(&self, x: &[u64], col: &[u64]) -> bool {
        let q = self.q as u128;
        let dot = x
            .iter()
            .zip(col)
            .fold(0u128, |acc, (&a, &b)| (acc + a as u128 * b as u128) % q);
        dot == 0
    }

    fn on_any(&self, x: &[u64]) -> bool {
        self.columns.iter().any(|c| self.on_hyperplane(x, c))
    }

    fn on_all(&self, x: &[u64]) -> bool {
        self.columns.iter().all(|c| self.on_hyperplane(x, c))
    }

    /// Runs `visit` over every point whose first coordinate is `first`,
    /// odometer style.
    fn for_each_with_first<F: FnMut(&[u64])>(&self, first: u64, mut visit: F) {
        let mut x = vec![0u64; self.m];
        x[0] = first;
        loop {
            visit(&x);
            let mut i = self.m - 1;
            loop {
                if i == 0 {
                    return;
                }
                x[i] += 1;
                if x[i] < self.q {
                    break;
                }
                x[i] = 0;
                i -= 1;
            }
        }
    }
}

/// `|M(A_q)|`: points of `Z_q^m` on none of the hyperplanes `x c_j = 0`.
pub fn count_complement(c: &IntMatrix, q: u64, budget: u64) -> Result<u64> {
    let r = Reduced::new(c, q, budget)?;
    Ok((0..q)
        .into_par_iter()
        .map(|first| {
            let mut n = 0u64;
            r.for_each_with_first(first, |x| {
                if !r.on_any(x) {
                    n += 1;
                }
            });
            n
        })
        .sum())
}

/// `|union of H_{j,q}|`, counted directly.
pub fn count_union(c: &IntMatrix, q: u64, budget: u64) -> Result<u64> {
    let r = Reduced::new(c, q, budget)?;
    Ok((0..q)
        .into_par_iter()
        .map(|first| {
            let mut n = 0u64;
            r.for_each_with_first(first, |x| {
                if r.on_any(x) {
                    n += 1;
                }
            });
            n
        })
        .sum())
}

/// Number of points of `Z_q^m` on every column's hyperplane, without storing them.
pub fn count_flat(c_j: &IntMatrix, q: u64, budget: u64) -> Result<u64> {
    let r = Reduced::new(c_j, q, budget)?;
    Ok((0..q)
        .into_par_iter()
        .map(|first| {
            let mut n = 0u64;
            r.for_each_with_first(first, |x| {
                if r.on_all(x) {
                    n += 1;
                }
            });
            n
        })
        .sum())
}

/// All solutions of `x C_J = 0 (mod q)`.
pub fn enumerate_flat(c_j: &IntMatrix, q: u64, budget: u64) -> Result<PointSet> {
    let r = Reduced::new(c_j, q, budget)?;
    let chunks: Vec<Vec<Vec<u64>>> = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            r.for_each_with_first(first, |x| {
                if r.on_all(x) {
                    found.push(x.to_vec());
                }
            });
            found
        })
        .collect();
    Ok(PointSet {
        q,
        m: r.m,
        points: chunks.into_iter().flatten().collect(),
    })
}

/// Whether two column sets cut out the same subset of `Z_q^m`.
pub fn flats_equal(c_i: &IntMatrix, c_j: &IntMatrix, q: u64, budget: u64) -> Result<bool> {
    if c_i.rows() != c_j.rows() {
        return Err(Error::DimensionMismatch(format!(
            "flats in dimensions {} and {}",
            c_i.rows(),
            c_j.rows()
        )));
    }
    Ok(enumerate_flat(c_i, q, budget)? == enumerate_flat(c_j, q, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> IntMatrix {
        IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])
    }

    fn pts(v: &[&[u64]]) -> BTreeSet<Vec<u64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn complement_counts() {
        assert_eq!(count_complement(&example(), 5, DEFAULT_BUDGET).unwrap(), 12);
        assert_eq!(count_union(&example(), 5, DEFAULT_BUDGET).unwrap(), 13);
        assert_eq!(count_complement(&example(), 1, DEFAULT_BUDGET).unwrap(), 0);
        assert_eq!(count_complement(&example(), 6, DEFAULT_BUDGET).unwrap(), 23);
        assert_eq!(
            count_complement(&IntMatrix::from_rows(&[[1]]), 4, DEFAULT_BUDGET).unwrap(),
            3
        );
    }

    #[test]
    fn flats_of_worked_example() {
        let c = example();
        let f12 = enumerate_flat(&c.select_columns(&[0, 1]), 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(f12.points, pts(&[&[0, 0], &[2, 2]]));
        let f23 = enumerate_flat(&c.select_columns(&[1, 2]), 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(f23.points, pts(&[&[0, 0], &[2, 4], &[4, 2]]));
        assert_eq!(
            count_flat(&c.select_columns(&[1, 2]), 6, DEFAULT_BUDGET).unwrap(),
            3
        );
    }

    #[test]
    fn single_column_over_prime_is_a_hyperplane() {
        let c = IntMatrix::from_columns(&[[3, -1, 2]]);
        for q in [2u64, 5, 7] {
            assert_eq!(
                enumerate_flat(&c, q, DEFAULT_BUDGET).unwrap().len() as u64,
                q * q
            );
        }
    }

    #[test]
    fn flat_equality() {
        let c = example();
        let col = |j: usize| c.select_columns(&[j]);
        assert!(flats_equal(&col(0), &col(1), 2, DEFAULT_BUDGET).unwrap());
        assert!(flats_equal(&col(1), &col(2), 3, DEFAULT_BUDGET).unwrap());
        assert!(!flats_equal(&col(0), &col(1), 5, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let err = count_complement(&example(), 100, 1000).unwrap_err();
        assert!(matches!(
            err,
            Error::OracleBudget {
                needed: 30_000,
                budget: 1000
            }
        ));
        assert!(matches!(
            count_complement(&example(), 0, 1000),
            Err(Error::ZeroModulus)
        ));
    }
}
