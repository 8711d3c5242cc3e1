//! Verification harness: runs the formula-based results against the
//! brute-force oracle and the lattice periodicity statements.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::chi::{chi_cross_check, coprime_nodes};
use crate::error::{Error, Result};
use crate::lattice::{broken_identifications, q0_bound, verify_periodicity, ClosureTable};
use crate::numtheory::gcd;
use crate::oracle::{self, PointSet};
use crate::quasi::CharQuasiPolynomial;
use crate::subset::ColumnSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn pass(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            skipped: false,
            detail,
            counterexample: None,
        }
    }

    fn fail(name: &str, detail: String, counterexample: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            skipped: false,
            detail,
            counterexample: Some(counterexample),
        }
    }

    fn skip(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            skipped: true,
            detail,
            counterexample: None,
        }
    }

    fn from_outcome(name: &str, detail: String, counterexample: Option<String>) -> Self {
        match counterexample {
            None => Self::pass(name, detail),
            Some(c) => Self::fail(name, detail, c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub q_max: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Default upper end of the verification range: two full periods past the
/// q0 bound.
pub fn default_q_max(arr: &Arrangement) -> Result<u64> {
    let bound = q0_bound(arr)?;
    let rho0 = arr.period_rho0()?;
    bound
        .checked_add(
            rho0.checked_mul(2)
                .ok_or(Error::Overflow { what: "q range" })?,
        )
        .ok_or(Error::Overflow { what: "q range" })
}

/// Runs every check for `q` in `1..=q_max`. Budget and cap errors abort the
/// run; mismatches are recorded in the report.
pub fn run(arr: &Arrangement, poly: &CharQuasiPolynomial, q_max: u64) -> Result<VerifyReport> {
    if q_max == 0 {
        return Err(Error::ZeroModulus);
    }
    let checks = vec![
        oracle_equivalence(arr, poly, q_max)?,
        period_divisibility(arr, poly)?,
        characteristic_polynomial(arr, poly)?,
        flats_against_oracle(arr, q_max)?,
        lattice_periodicity(arr, q_max)?,
        coarseness_nesting(arr, q_max)?,
    ];
    Ok(VerifyReport { q_max, checks })
}

fn oracle_equivalence(
    arr: &Arrangement,
    poly: &CharQuasiPolynomial,
    q_max: u64,
) -> Result<CheckResult> {
    const NAME: &str = "oracle_equivalence";
    let budget = arr.limits().oracle_budget;
    let mut checked = 0;
    let mut skipped = Vec::new();
    for q in 1..=q_max {
        let formula = poly.evaluate(q)?;
        if formula.is_negative() {
            return Ok(CheckResult::fail(
                NAME,
                "quasi-polynomial must be nonnegative".into(),
                format!("q = {q}: formula gives {formula}"),
            ));
        }
        let brute = match oracle::count_complement(arr.matrix(), q, budget) {
            Ok(c) => c,
            Err(Error::OracleBudget { .. }) => {
                skipped.push(q);
                continue;
            }
            Err(e) => return Err(e),
        };
        checked += 1;
        if formula != BigInt::from(brute) {
            return Ok(CheckResult::fail(
                NAME,
                format!("formula and brute-force count disagree after {checked} moduli"),
                format!("q = {q}: formula {formula}, oracle {brute}"),
            ));
        }
    }
    if checked == 0 {
        return Ok(CheckResult::skip(
            NAME,
            "every modulus exceeds the oracle budget".into(),
        ));
    }
    let mut detail = format!("{checked} moduli agree");
    if let Some(first) = skipped.first() {
        detail.push_str(&format!("; q >= {first} skipped by budget"));
    }
    Ok(CheckResult::pass(NAME, detail))
}

fn period_divisibility(arr: &Arrangement, poly: &CharQuasiPolynomial) -> Result<CheckResult> {
    const NAME: &str = "period_divisibility";
    let rho0 = poly.period();
    let rho_e = match crate::minors::nonzero_minors_lcm(arr.matrix(), arr.limits().max_minors) {
        Ok(v) => v,
        Err(Error::MinorCap { needed, cap }) => {
            return Ok(CheckResult::skip(
                NAME,
                format!("{needed} minors exceed the cap {cap}"),
            ))
        }
        Err(e) => return Err(e),
    };
    let minimum = poly.minimum_period();
    let detail = format!("rho0 = {rho0}, rhoE = {rho_e}, minimum period = {minimum}");
    let counterexample = if !rho_e.is_multiple_of(&BigInt::from(rho0)) {
        Some(format!("rho0 = {rho0} does not divide rhoE = {rho_e}"))
    } else if !rho0.is_multiple_of(minimum) {
        Some(format!(
            "minimum period {minimum} does not divide rho0 = {rho0}"
        ))
    } else {
        None
    };
    Ok(CheckResult::from_outcome(NAME, detail, counterexample))
}

fn characteristic_polynomial(arr: &Arrangement, poly: &CharQuasiPolynomial) -> Result<CheckResult> {
    const NAME: &str = "characteristic_polynomial";
    let chi = poly.constituent(1).expect("1 divides every period");
    let nodes = coprime_nodes(poly.period(), arr.dimension() + 1);
    let check = match chi_cross_check(arr, &chi, &nodes) {
        Ok(c) => c,
        Err(Error::OracleBudget { .. }) => {
            return Ok(CheckResult::skip(
                NAME,
                format!("nodes {nodes:?} exceed the oracle budget"),
            ))
        }
        Err(Error::NonIntegral(c)) => {
            return Ok(CheckResult::fail(
                NAME,
                "interpolated polynomial is not integral".into(),
                format!("coefficient {c} from nodes {nodes:?}"),
            ))
        }
        Err(e) => return Err(e),
    };
    let interpolated = crate::poly::IntPoly::new(check.interpolated.clone());
    let detail = format!(
        "chi(t) = {}; interpolated through q = {nodes:?}",
        chi.display("t")
    );
    let counterexample = (!check.agrees).then(|| {
        format!(
            "interpolation gives {}, constituent is {}",
            interpolated.display("t"),
            chi.display("t")
        )
    });
    Ok(CheckResult::from_outcome(NAME, detail, counterexample))
}

/// Flat sizes and closures against explicit point sets.
fn flats_against_oracle(arr: &Arrangement, q_max: u64) -> Result<CheckResult> {
    const NAME: &str = "flats_against_oracle";
    let budget = arr.limits().oracle_budget;
    let subsets = arr.nonempty_subsets()?;
    let mut checked_moduli = 0;
    for q in 1..=q_max {
        match flats_at(arr, &subsets, q, budget) {
            Ok(None) => checked_moduli += 1,
            Ok(Some((detail, counterexample))) => {
                return Ok(CheckResult::fail(NAME, detail.into(), counterexample))
            }
            Err(Error::OracleBudget { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if checked_moduli == 0 {
        return Ok(CheckResult::skip(
            NAME,
            "every modulus exceeds the oracle budget".into(),
        ));
    }
    Ok(CheckResult::pass(
        NAME,
        format!("{} subsets at q = 1..={checked_moduli}", subsets.len()),
    ))
}

/// First disagreement between formulas and enumeration at `q`, if any.
fn flats_at(
    arr: &Arrangement,
    subsets: &[ColumnSet],
    q: u64,
    budget: u64,
) -> Result<Option<(&'static str, String)>> {
    let singles: Vec<PointSet> = (0..arr.len())
        .map(|j| oracle::enumerate_flat(&arr.submatrix(ColumnSet::singleton(j)), q, budget))
        .collect::<Result<_>>()?;
    for &j in subsets {
        let points = oracle::enumerate_flat(&arr.submatrix(j), q, budget)?;
        let card = arr.flat_cardinality(j, q)?;
        if card != BigInt::from(points.len()) {
            return Ok(Some((
                "flat cardinality disagrees with enumeration",
                format!("q = {q}, J = {j}: formula {card}, oracle {}", points.len()),
            )));
        }
        let expected =
            ColumnSet::from_indices((0..arr.len()).filter(|&i| points.is_subset(&singles[i])));
        let computed = crate::lattice::closure(arr, j, q)?;
        if computed != expected {
            return Ok(Some((
                "closure disagrees with enumeration",
                format!("q = {q}, J = {j}: computed {computed}, oracle {expected}"),
            )));
        }
    }
    Ok(None)
}

fn lattice_periodicity(arr: &Arrangement, q_max: u64) -> Result<CheckResult> {
    const NAME: &str = "lattice_periodicity";
    let bound = q0_bound(arr)?;
    if q_max <= bound {
        return Ok(CheckResult::skip(
            NAME,
            format!("q_max {q_max} does not exceed the q0 bound {bound}"),
        ));
    }
    let report = verify_periodicity(arr, q_max)?;
    let mut detail = format!(
        "{} consecutive same-class pairs in ({bound}, {q_max}]; observed onset q = {}",
        report.pairs_checked, report.observed_onset
    );
    if report.bound_is_loose() {
        detail.push_str(" (below the q0 bound)");
    }
    let counterexample = report
        .violations
        .first()
        .map(|(a, b)| format!("lattices differ at q = {a} and q = {b}"));
    Ok(CheckResult::from_outcome(NAME, detail, counterexample))
}

/// Identifications at `q` must survive at every `q'` whose gcd class divides
/// that of `q`. With periodicity checked separately, comparing each `q`
/// against the first modulus above the bound in each dividing class covers
/// every pair.
fn coarseness_nesting(arr: &Arrangement, q_max: u64) -> Result<CheckResult> {
    const NAME: &str = "coarseness_nesting";
    let bound = q0_bound(arr)?;
    if q_max <= bound {
        return Ok(CheckResult::skip(
            NAME,
            format!("q_max {q_max} does not exceed the q0 bound {bound}"),
        ));
    }
    let rho0 = arr.period_rho0()?;
    let closures = ClosureTable::new(arr)?;
    let subsets = closures.subsets();
    let tables: Vec<Vec<ColumnSet>> = (bound + 1..=q_max)
        .into_par_iter()
        .map(|q| closures.closures(q))
        .collect::<Result<_>>()?;
    let table = |q: u64| &tables[(q - bound - 1) as usize];
    let mut representatives: BTreeMap<u64, u64> = BTreeMap::new();
    for q in bound + 1..=q_max {
        representatives.entry(gcd(rho0, q)).or_insert(q);
    }
    let mut pairs = 0;
    for q in bound + 1..=q_max {
        let g = gcd(rho0, q);
        for (&g2, &q2) in &representatives {
            if !g.is_multiple_of(g2) {
                continue;
            }
            pairs += 1;
            if let Some((i, j)) = broken_identifications(subsets, table(q), table(q2)).first() {
                return Ok(CheckResult::fail(
                    NAME,
                    "identification lost at a modulus with smaller gcd class".into(),
                    format!("H_{i} = H_{j} at q = {q} but not at q' = {q2}"),
                ));
            }
        }
    }
    Ok(CheckResult::pass(
        NAME,
        format!(
            "{pairs} pairs (q, q') in ({bound}, {q_max}], {} gcd classes",
            representatives.len()
        ),
    ))
}
