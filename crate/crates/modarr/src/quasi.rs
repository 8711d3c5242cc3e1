//! The characteristic quasi-polynomial `q -> |M(A_q)|`.
//!
//! Every flat `H_{J,q}` has `prod_i gcd(e_{J,i}, q) * q^(m - rank C_J)` points,
//! and since each `e_{J,i}` divides `rho0`, `gcd(e_{J,i}, q)` only depends on
//! `gcd(rho0, q)`. Inclusion–exclusion over all nonempty `J` therefore gives
//! one integer polynomial per divisor `d` of `rho0`, obtained by substituting
//! `gcd(e, d)` for `gcd(e, q)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::bigint_serde;
use crate::error::{Error, Result};
use crate::numtheory::{divisors, gcd};
use crate::poly::IntPoly;

/// `q -> (prod_i gcd(e_i, q)) * q^degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiMonomial {
    pub degree: usize,
    pub divisors: Vec<BigInt>,
}

impl QuasiMonomial {
    pub fn new(degree: usize, divisors: Vec<BigInt>) -> Self {
        QuasiMonomial { degree, divisors }
    }

    pub fn evaluate(&self, q: u64) -> BigInt {
        let q_big = BigInt::from(q);
        let coeff: BigInt = self.divisors.iter().map(|e| e.gcd(&q_big)).product();
        coeff * num_traits::pow(q_big, self.degree)
    }

    /// Minimum period: the largest divisor, or 1 when there are none.
    pub fn period(&self) -> BigInt {
        self.divisors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// `(degree, coefficient)` of the monomial that applies when
    /// `gcd(period, q) = class`.
    pub fn constituent(&self, class: u64) -> (usize, BigInt) {
        let d = BigInt::from(class);
        (
            self.degree,
            self.divisors.iter().map(|e| e.gcd(&d)).product(),
        )
    }
}

/// A monic quasi-polynomial of degree `dimension` whose constituents are
/// indexed by the divisors of `period`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuasiPolynomial", into = "RawQuasiPolynomial")]
pub struct CharQuasiPolynomial {
    dimension: usize,
    period: u64,
    /// Divisor of `period` -> `(alpha_0, ..., alpha_{m-1})`.
    constituents: BTreeMap<u64, Vec<BigInt>>,
}

impl CharQuasiPolynomial {
    /// Checks that the keys are exactly the divisors of `period` and that
    /// every vector has `dimension` entries.
    pub fn from_parts(
        dimension: usize,
        period: u64,
        constituents: BTreeMap<u64, Vec<BigInt>>,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::Precondition("period must be positive".into()));
        }
        let keys: Vec<u64> = constituents.keys().copied().collect();
        if keys != divisors(period) {
            return Err(Error::Precondition(format!(
                "constituent keys {keys:?} are not the divisors of {period}"
            )));
        }
        if let Some((d, v)) = constituents.iter().find(|(_, v)| v.len() != dimension) {
            return Err(Error::Precondition(format!(
                "constituent for gcd class {d} has {} coefficients, expected {dimension}",
                v.len()
            )));
        }
        Ok(CharQuasiPolynomial {
            dimension,
            period,
            constituents,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn classes(&self) -> impl Iterator<Item = u64> + '_ {
        self.constituents.keys().copied()
    }

    /// Lower coefficients `alpha_0..alpha_{m-1}` for a gcd class.
    pub fn lower_coefficients(&self, class: u64) -> Option<&[BigInt]> {
        self.constituents.get(&class).map(Vec::as_slice)
    }

    pub fn lower_coefficients_mut(&mut self, class: u64) -> Option<&mut Vec<BigInt>> {
        self.constituents.get_mut(&class)
    }

    /// Full monic constituent for a gcd class.
    pub fn constituent(&self, class: u64) -> Option<IntPoly> {
        self.constituents.get(&class).map(|lower| {
            let mut c = lower.clone();
            c.push(BigInt::one());
            IntPoly::new(c)
        })
    }

    /// Constituent selected by `q`.
    pub fn constituent_for(&self, q: u64) -> IntPoly {
        self.constituent(gcd(self.period, q))
            .expect("every gcd class is present")
    }

    /// `|M(A_q)|` for `q >= 1`.
    pub fn evaluate(&self, q: u64) -> Result<BigInt> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(self.constituent_for(q).eval(&BigInt::from(q)))
    }

    /// Smallest divisor `p` of the stored period such that the constituent
    /// chosen for `q` and for `q + p` agree for every `q` in `1..=period`.
    pub fn minimum_period(&self) -> u64 {
        let rho = self.period;
        // Label each class by the first class carrying an identical vector.
        let mut label: BTreeMap<u64, u64> = BTreeMap::new();
        for (&d, v) in &self.constituents {
            let first = self
                .constituents
                .iter()
                .find(|(_, w)| *w == v)
                .map(|(&e, _)| e)
                .unwrap_or(d);
            label.insert(d, first);
        }
        let class_of = |q: u64| label[&gcd(rho, q)];
        let labels: Vec<u64> = (1..=2 * rho).map(class_of).collect();
        divisors(rho)
            .into_iter()
            .find(|&p| (0..rho as usize).all(|i| labels[i] == labels[i + p as usize]))
            .unwrap_or(rho)
    }
}

/// Assembles the characteristic quasi-polynomial from all `2^n - 1` nonempty
/// column subsets.
pub fn char_quasi_poly(arr: &Arrangement) -> Result<CharQuasiPolynomial> {
    let m = arr.dimension();
    let rho0 = arr.period_rho0()?;
    let classes = divisors(rho0);
    let subsets = arr.nonempty_subsets()?;

    let zero_table = || vec![vec![BigInt::zero(); m]; classes.len()];
    let table = subsets
        .par_iter()
        .try_fold(zero_table, |mut table, &subset| -> Result<_> {
            let snf = arr.smith(subset)?;
            let degree = m - snf.rank();
            let divs: Vec<u64> = snf
                .divisors
                .iter()
                .map(|e| e.to_u64().expect("elementary divisors divide rho0"))
                .collect();
            debug_assert!(divs.iter().all(|e| rho0 % e == 0));
            let negative = subset.len() % 2 == 1;
            for (row, &d) in table.iter_mut().zip(&classes) {
                let coeff: BigInt = divs.iter().map(|&e| BigInt::from(gcd(e, d))).product();
                if negative {
                    row[degree] -= coeff;
                } else {
                    row[degree] += coeff;
                }
            }
            Ok(table)
        })
        .try_reduce(zero_table, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            Ok(a)
        })?;

    CharQuasiPolynomial::from_parts(m, rho0, classes.into_iter().zip(table).collect())
}

#[derive(Serialize, Deserialize)]
struct RawConstituent {
    gcd: u64,
    #[serde(with = "bigint_serde::vec")]
    coefficients: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawQuasiPolynomial {
    dimension: usize,
    period: u64,
    constituents: Vec<RawConstituent>,
}

impl From<CharQuasiPolynomial> for RawQuasiPolynomial {
    fn from(p: CharQuasiPolynomial) -> Self {
        RawQuasiPolynomial {
            dimension: p.dimension,
            period: p.period,
            constituents: p
                .constituents
                .into_iter()
                .map(|(gcd, coefficients)| RawConstituent { gcd, coefficients })
                .collect(),
        }
    }
}

impl TryFrom<RawQuasiPolynomial> for CharQuasiPolynomial {
    type Error = Error;

    fn try_from(raw: RawQuasiPolynomial) -> Result<Self> {
        let mut map = BTreeMap::new();
        for c in raw.constituents {
            if map.insert(c.gcd, c.coefficients).is_some() {
                return Err(Error::Precondition(format!(
                    "duplicate gcd class {}",
                    c.gcd
                )));
            }
        }
        CharQuasiPolynomial::from_parts(raw.dimension, raw.period, map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;

    fn lower(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn example() -> CharQuasiPolynomial {
        let arr = Arrangement::new(IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])).unwrap();
        char_quasi_poly(&arr).unwrap()
    }

    #[test]
    fn worked_example_constituents() {
        let p = example();
        assert_eq!(p.period(), 6);
        assert_eq!(p.lower_coefficients(1).unwrap(), lower(&[2, -3]));
        assert_eq!(p.lower_coefficients(2).unwrap(), lower(&[3, -3]));
        assert_eq!(p.lower_coefficients(3).unwrap(), lower(&[4, -3]));
        assert_eq!(p.lower_coefficients(6).unwrap(), lower(&[5, -3]));
        assert_eq!(p.minimum_period(), 6);
    }

    #[test]
    fn worked_example_values() {
        let p = example();
        assert_eq!(p.evaluate(5).unwrap(), BigInt::from(12));
        assert_eq!(p.evaluate(1).unwrap(), BigInt::from(0));
        assert_eq!(p.evaluate(6).unwrap(), BigInt::from(23));
        assert!(matches!(p.evaluate(0), Err(Error::ZeroModulus)));
    }

    #[test]
    fn coordinate_and_point_arrangements() {
        let id = char_quasi_poly(&Arrangement::new(IntMatrix::identity(2)).unwrap()).unwrap();
        assert_eq!(id.period(), 1);
        assert_eq!(id.lower_coefficients(1).unwrap(), lower(&[1, -2]));
        assert_eq!(id.minimum_period(), 1);
        let one =
            char_quasi_poly(&Arrangement::new(IntMatrix::from_rows(&[[1]])).unwrap()).unwrap();
        assert_eq!(one.constituent(1).unwrap(), IntPoly::from_i64(&[-1, 1]));
    }

    #[test]
    fn minimum_period_detects_cancellation() {
        // constituents agree on {1,2} and on {3,6}: the function only sees 3 | q.
        let mut map = BTreeMap::new();
        map.insert(1, lower(&[0]));
        map.insert(2, lower(&[0]));
        map.insert(3, lower(&[7]));
        map.insert(6, lower(&[7]));
        let p = CharQuasiPolynomial::from_parts(1, 6, map).unwrap();
        // direct definition over q = 1..2*rho
        let values: Vec<BigInt> = (1..=12)
            .map(|q| p.evaluate(q).unwrap() - BigInt::from(q))
            .collect();
        let direct = (1..=6u64)
            .find(|&per| (0..6).all(|i| values[i] == values[i + per as usize]))
            .unwrap();
        assert_eq!(direct, 3);
        assert_eq!(p.minimum_period(), 3);
    }

    #[test]
    fn from_parts_validates() {
        let mut map = BTreeMap::new();
        map.insert(1, lower(&[0]));
        map.insert(2, lower(&[0]));
        assert!(CharQuasiPolynomial::from_parts(1, 4, map.clone()).is_err());
        assert!(CharQuasiPolynomial::from_parts(2, 2, map.clone()).is_err());
        assert!(CharQuasiPolynomial::from_parts(1, 2, map).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = example();
        let json = serde_json::to_string(&p).unwrap();
        assert!(
            json.contains(r#"{"gcd":1,"coefficients":["2","-3"]}"#),
            "{json}"
        );
        let back: CharQuasiPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let broken = json.replace(r#""period":6"#, r#""period":4"#);
        assert!(serde_json::from_str::<CharQuasiPolynomial>(&broken).is_err());
    }

    #[test]
    fn quasi_monomial_matches_flat() {
        let arr = Arrangement::new(IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])).unwrap();
        let j = crate::subset::ColumnSet::from_one_based([2, 3]);
        let qm = arr.quasi_monomial(j).unwrap();
        assert_eq!(qm.period(), BigInt::from(3));
        for q in 1..=30 {
            assert_eq!(qm.evaluate(q), arr.flat_cardinality(j, q).unwrap());
            assert_eq!(qm.constituent(gcd(6, q)).1, qm.evaluate(q));
        }
    }
}
