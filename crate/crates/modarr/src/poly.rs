//! Univariate integer polynomials: printing, evaluation, exact
//! interpolation and integer-root factoring.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer-root search gives up when the constant term exceeds this.
const MAX_ROOT_SEARCH: u64 = 1_000_000;

/// Coefficients in ascending order of degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn display(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let abs = c.abs();
            if deg == 0 || !abs.is_one() {
                out.push_str(&abs.to_string());
            }
            match deg {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{deg}")),
            }
        }
        out
    }

    /// Splits off every integer root. Returns the roots (with multiplicity,
    /// ascending) and the remaining cofactor.
    pub fn integer_roots(&self) -> (Vec<BigInt>, IntPoly) {
        let mut roots = Vec::new();
        let mut rest = self.clone();
        if rest.coeffs.is_empty() {
            return (roots, rest);
        }
        while rest.degree().is_some_and(|d| d > 0) && rest.coeffs[0].is_zero() {
            roots.push(BigInt::zero());
            rest.coeffs.remove(0);
        }
        while rest.degree().is_some_and(|d| d > 0) {
            let constant = rest.coeffs[0].abs();
            if constant > BigInt::from(MAX_ROOT_SEARCH) {
                break;
            }
            let found = candidate_roots(&constant).find(|r| rest.eval(r).is_zero());
            match found {
                Some(r) => {
                    rest = rest.divide_linear(&r);
                    roots.push(r);
                }
                None => break,
            }
        }
        roots.sort();
        (roots, rest)
    }

    /// Quotient by `(x - r)`, assuming `r` is a root.
    fn divide_linear(&self, r: &BigInt) -> IntPoly {
        let n = self.coeffs.len();
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (1..n).rev() {
            carry = &self.coeffs[i] + carry * r;
            q[i - 1] = carry.clone();
        }
        IntPoly::new(q)
    }

    /// Product of linear factors when at least one integer root exists,
    /// e.g. `t(t - 1)(t - 2)`.
    pub fn factored(&self, var: &str) -> Option<String> {
        let (roots, rest) = self.integer_roots();
        if roots.is_empty() {
            return None;
        }
        let mut out = String::new();
        match rest.degree() {
            Some(0) if rest.coeffs[0].is_one() => {}
            Some(0) if (-&rest.coeffs[0]).is_one() => out.push('-'),
            Some(0) => out.push_str(&rest.coeffs[0].to_string()),
            _ => out.push_str(&format!("({})", rest.display(var))),
        }
        let mut i = 0;
        while i < roots.len() {
            let r = &roots[i];
            let mult = roots[i..].iter().take_while(|x| *x == r).count();
            let base = if r.is_zero() {
                var.to_string()
            } else if r.is_negative() {
                format!("({var} + {})", r.abs())
            } else {
                format!("({var} - {r})")
            };
            out.push_str(&base);
            if mult > 1 {
                out.push_str(&format!("^{mult}"));
            }
            i += mult;
        }
        Some(out)
    }
}

/// Divisors of `|c|` with both signs; for `c = 0` just `0`.
fn candidate_roots(c: &BigInt) -> impl Iterator<Item = BigInt> + '_ {
    let zero_only = c.is_zero();
    let bound = if zero_only { BigInt::zero() } else { c.clone() };
    let mut d = BigInt::zero();
    std::iter::from_fn(move || loop {
        if zero_only {
            if d.is_zero() {
                d = BigInt::one();
                return Some(BigInt::zero());
            }
            return None;
        }
        d += 1;
        if d > bound {
            return None;
        }
        if c.is_multiple_of(&d) {
            return Some(d.clone());
        }
    })
    .flat_map(|d| {
        if d.is_zero() {
            vec![d]
        } else {
            vec![d.clone(), -d]
        }
    })
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("t"))
    }
}

/// Coefficients (ascending) of the unique polynomial of degree `< points.len()`
/// through the given points, in exact rational arithmetic.
pub fn interpolate(points: &[(BigInt, BigInt)]) -> Result<Vec<BigRational>> {
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::Precondition(format!(
                "repeated interpolation node {xi}"
            )));
        }
    }
    let n = points.len();
    let mut coeffs = vec![BigRational::zero(); n];
    // Lagrange basis expansion.
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let xj = BigRational::from_integer(xj.clone());
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xj;
            }
            basis = next;
            denom *= BigRational::from_integer(xi.clone()) - xj;
        }
        let scale = BigRational::from_integer(yi.clone()) / denom;
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += b * &scale;
        }
    }
    Ok(coeffs)
}

/// [`interpolate`], then insists that every coefficient is an integer.
pub fn interpolate_integral(points: &[(BigInt, BigInt)]) -> Result<IntPoly> {
    let coeffs = interpolate(points)?;
    let ints = coeffs
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::NonIntegral(c.to_string()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPoly::new(ints))
}
