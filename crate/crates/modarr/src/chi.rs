//! Characteristic polynomial of the real arrangement.
//!
//! For `q` coprime to a period of `|M(A_q)|` the count equals `chi(A, q)`, so
//! the constituent of the gcd class 1 is `chi(A, t)`. The same polynomial can
//! be recovered independently by interpolating brute-force counts at `m + 1`
//! distinct moduli coprime to the period.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::bigint_serde;
use crate::error::{Error, Result};
use crate::numtheory::gcd;
use crate::oracle;
use crate::poly::{interpolate_integral, IntPoly};
use crate::quasi::char_quasi_poly;

/// `chi(A, t)`: the constituent of the characteristic quasi-polynomial for
/// `gcd(rho0, q) = 1`.
pub fn characteristic_polynomial(arr: &Arrangement) -> Result<IntPoly> {
    Ok(char_quasi_poly(arr)?
        .constituent(1)
        .expect("1 divides every period"))
}

/// The `count` smallest integers `>= 2` coprime to `period`.
pub fn coprime_nodes(period: u64, count: usize) -> Vec<u64> {
    (2u64..)
        .filter(|&q| gcd(period, q) == 1)
        .take(count)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiCrossCheck {
    pub nodes: Vec<u64>,
    pub counts: Vec<u64>,
    #[serde(with = "bigint_serde::vec")]
    pub interpolated: Vec<BigInt>,
    pub agrees: bool,
}

/// Interpolates brute-force complement counts at `nodes` and compares the
/// result with `chi`. Needs `m + 1` distinct nodes coprime to `rho0`.
pub fn chi_cross_check(arr: &Arrangement, chi: &IntPoly, nodes: &[u64]) -> Result<ChiCrossCheck> {
    let m = arr.dimension();
    let rho0 = arr.period_rho0()?;
    if nodes.len() != m + 1 {
        return Err(Error::Precondition(format!(
            "{} interpolation nodes given, {} needed",
            nodes.len(),
            m + 1
        )));
    }
    if let Some(&q) = nodes.iter().find(|&&q| q == 0 || gcd(rho0, q) != 1) {
        return Err(Error::Precondition(format!(
            "node {q} is not coprime to rho0 = {rho0}"
        )));
    }
    let budget = arr.limits().oracle_budget;
    let counts = nodes
        .iter()
        .map(|&q| oracle::count_complement(arr.matrix(), q, budget))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(BigInt, BigInt)> = nodes
        .iter()
        .zip(&counts)
        .map(|(&q, &c)| (BigInt::from(q), BigInt::from(c)))
        .collect();
    let interpolated = interpolate_integral(&points)?;
    Ok(ChiCrossCheck {
        nodes: nodes.to_vec(),
        counts,
        agrees: &interpolated == chi,
        interpolated: interpolated.coeffs().to_vec(),
    })
}
