//! Intersection lattices of the mod-`q` arrangement.
//!
//! `H_{j,q}` contains `H_{J,q}` exactly when `c_j mod q` lies in the `Z_q`
//! column span of `C_J`, which the Smith data of `C_J` decides without
//! enumerating points. Each flat is labelled by its closure, the set of all
//! `j` whose hyperplane contains it; two subsets give the same flat iff
//! their closures agree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::bigint_serde;
use crate::error::{Error, Result};
use crate::numtheory::gcd;
use crate::subset::ColumnSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flat {
    /// Every `j` with `H_{j,q} ⊇ H_{J,q}`.
    pub closure: ColumnSet,
    #[serde(with = "bigint_serde::scalar")]
    pub cardinality: BigInt,
    /// Smallest subset (by size, then indices) producing this flat.
    pub generator: ColumnSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionLattice {
    pub q: u64,
    /// Ordered by closure size, then lexicographically; `V` comes first.
    pub flats: Vec<Flat>,
    /// `(lower, upper)` index pairs into `flats`; lower is the larger point set.
    pub covers: Vec<(usize, usize)>,
}

impl IntersectionLattice {
    pub fn closures(&self) -> BTreeSet<ColumnSet> {
        self.flats.iter().map(|f| f.closure).collect()
    }

    pub fn find(&self, closure: ColumnSet) -> Option<usize> {
        self.flats.iter().position(|f| f.closure == closure)
    }
}

/// Whether `H_{j,q} ⊇ H_{J,q}` for nonempty `J`.
pub fn covers_flat(arr: &Arrangement, j: usize, subset: ColumnSet, q: u64) -> Result<bool> {
    if subset.contains(j) {
        return Ok(true);
    }
    arr.smith(subset)?.spans_mod_q(arr.column(j), q)
}

/// Closure of `J` at `q`. For `J = ∅` this is the set of columns vanishing mod `q`.
pub fn closure(arr: &Arrangement, subset: ColumnSet, q: u64) -> Result<ColumnSet> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut out = subset;
    if subset.is_empty() {
        let q_big = BigInt::from(q);
        for j in 0..arr.len() {
            if arr.column(j).iter().all(|c| (c % &q_big).is_zero()) {
                out.insert(j);
            }
        }
        return Ok(out);
    }
    for j in 0..arr.len() {
        if !subset.contains(j) && covers_flat(arr, j, subset, q)? {
            out.insert(j);
        }
    }
    Ok(out)
}

/// Upper bound for the periodicity threshold: the largest `|u|` over entries
/// `u` of `C` and of `S_J C` for every nonempty `J`, using the left transform
/// our Smith form produced.
pub fn q0_bound(arr: &Arrangement) -> Result<u64> {
    let subsets = arr.nonempty_subsets()?;
    let c = arr.matrix();
    let max = subsets
        .par_iter()
        .map(|&j| -> Result<BigInt> {
            let snf = arr.smith(j)?;
            Ok(snf.left_transform.mul(c)?.max_abs_entry())
        })
        .try_reduce(|| c.max_abs_entry(), |a, b| Ok(a.max(b)))?;
    max.to_u64().ok_or(Error::Overflow { what: "q0 bound" })
}

/// `L(A_q)`, ordered by inclusion of closures.
pub fn build_lattice(arr: &Arrangement, q: u64) -> Result<IntersectionLattice> {
    let subsets = arr.nonempty_subsets()?;
    let labelled: Vec<(ColumnSet, ColumnSet)> = subsets
        .par_iter()
        .map(|&j| closure(arr, j, q).map(|c| (c, j)))
        .collect::<Result<_>>()?;

    let mut generators: BTreeMap<ColumnSet, ColumnSet> = BTreeMap::new();
    generators.insert(closure(arr, ColumnSet::EMPTY, q)?, ColumnSet::EMPTY);
    for (c, j) in labelled {
        generators
            .entry(c)
            .and_modify(|g| {
                if j.shortlex_key() < g.shortlex_key() {
                    *g = j;
                }
            })
            .or_insert(j);
    }

    let ambient = num_traits::pow(BigInt::from(q), arr.dimension());
    let mut flats = generators
        .into_iter()
        .map(|(closure, generator)| {
            let cardinality = if generator.is_empty() {
                ambient.clone()
            } else {
                arr.flat_cardinality(generator, q)?
            };
            Ok(Flat {
                closure,
                cardinality,
                generator,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    flats.sort_by_key(|f| f.closure.shortlex_key());

    let covers = cover_relations(&flats);
    Ok(IntersectionLattice { q, flats, covers })
}

/// Transitive reduction of closure inclusion.
fn cover_relations(flats: &[Flat]) -> Vec<(usize, usize)> {
    let below = |a: usize, b: usize| a != b && flats[a].closure.is_subset(flats[b].closure);
    let n = flats.len();
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if below(a, b) && !(0..n).any(|c| below(a, c) && below(c, b)) {
                covers.push((a, b));
            }
        }
    }
    covers
}

/// Closure-labelled isomorphism: the same family of closures.
pub fn lattices_isomorphic(l1: &IntersectionLattice, l2: &IntersectionLattice) -> bool {
    l1.closures() == l2.closures()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub rho0: u64,
    pub q0_bound: u64,
    pub q_max: u64,
    /// Consecutive pairs `q < q'` above the bound within one gcd class.
    pub pairs_checked: u64,
    /// Consecutive same-class pairs above the bound with different lattices.
    pub violations: Vec<(u64, u64)>,
    /// Smallest `s` such that lattices agree on every equal-gcd pair in `[s, q_max]`.
    pub observed_onset: u64,
}

impl PeriodicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// The observed onset of periodicity lies strictly below the bound.
    pub fn bound_is_loose(&self) -> bool {
        self.observed_onset <= self.q0_bound
    }
}

/// Checks that `L_q = L_{q'}` whenever `q0_bound < q, q' <= q_max` and
/// `gcd(rho0, q) = gcd(rho0, q')`. Equality is transitive, so only moduli
/// adjacent within a gcd class are compared.
pub fn verify_periodicity(arr: &Arrangement, q_max: u64) -> Result<PeriodicityReport> {
    let bound = q0_bound(arr)?;
    if q_max <= bound {
        return Err(Error::Precondition(format!(
            "q_max = {q_max} must exceed the q0 bound {bound}"
        )));
    }
    let rho0 = arr.period_rho0()?;
    let table = ClosureTable::new(arr)?;
    let families: Vec<BTreeSet<ColumnSet>> = (1..=q_max)
        .into_par_iter()
        .map(|q| table.closures(q).map(|t| t.into_iter().collect()))
        .collect::<Result<_>>()?;
    let family = |q: u64| &families[(q - 1) as usize];

    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    let mut last_bad = 0;
    let mut previous: BTreeMap<u64, u64> = BTreeMap::new();
    for q2 in 1..=q_max {
        if let Some(q) = previous.insert(gcd(rho0, q2), q2) {
            let same = family(q) == family(q2);
            if !same {
                last_bad = last_bad.max(q);
            }
            if q > bound {
                pairs_checked += 1;
                if !same {
                    violations.push((q, q2));
                }
            }
        }
    }
    Ok(PeriodicityReport {
        rho0,
        q0_bound: bound,
        q_max,
        pairs_checked,
        violations,
        observed_onset: last_bad + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarsenessReport {
    pub q: u64,
    pub q_prime: u64,
    /// Subsets, including the empty one, whose identifications were compared.
    pub subsets_checked: u64,
    /// Subsets `(I, J)` with `H_{I,q} = H_{J,q}` but `H_{I,q'} != H_{J,q'}`.
    pub violations: Vec<(ColumnSet, ColumnSet)>,
}

impl CoarsenessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every identification `H_{I,q} = H_{J,q}` must persist at `q'` when
/// `gcd(rho0, q')` divides `gcd(rho0, q)` and both exceed the q0 bound.
pub fn coarseness_check(arr: &Arrangement, q: u64, q_prime: u64) -> Result<CoarsenessReport> {
    let bound = q0_bound(arr)?;
    let rho0 = arr.period_rho0()?;
    if q <= bound || q_prime <= bound {
        return Err(Error::Precondition(format!(
            "q = {q} and q' = {q_prime} must both exceed the q0 bound {bound}"
        )));
    }
    let (g, g_prime) = (gcd(rho0, q), gcd(rho0, q_prime));
    if g % g_prime != 0 {
        return Err(Error::Precondition(format!(
            "gcd(rho0, q') = {g_prime} does not divide gcd(rho0, q) = {g}"
        )));
    }

    let table = ClosureTable::new(arr)?;
    let at_q = table.closures(q)?;
    let at_q_prime = table.closures(q_prime)?;
    Ok(CoarsenessReport {
        q,
        q_prime,
        subsets_checked: table.subsets().len() as u64,
        violations: broken_identifications(table.subsets(), &at_q, &at_q_prime),
    })
}

/// Closures of every column subset, the empty one first, with the
/// `q`-independent part of each span test precomputed: the divisors of
/// `C_J` and the vectors `S_J c_j`. Falls back to [`closure`] when an entry
/// does not fit in 128 bits.
pub(crate) struct ClosureTable<'a> {
    arr: &'a Arrangement,
    subsets: Vec<ColumnSet>,
    tests: Vec<SpanTests>,
}

enum SpanTests {
    Native {
        divisors: Vec<u128>,
        vectors: Vec<(usize, Vec<i128>)>,
    },
    Big,
}

impl SpanTests {
    fn new(arr: &Arrangement, subset: ColumnSet) -> Result<Self> {
        let (divisors, vectors) = if subset.is_empty() {
            (
                Vec::new(),
                (0..arr.len())
                    .map(|j| (j, arr.column(j).to_vec()))
                    .collect(),
            )
        } else {
            let snf = arr.smith(subset)?;
            let vectors = (0..arr.len())
                .filter(|&j| !subset.contains(j))
                .map(|j| snf.left_transform.mul_vec(arr.column(j)).map(|v| (j, v)))
                .collect::<Result<Vec<_>>>()?;
            (snf.divisors.clone(), vectors)
        };
        let divisors: Option<Vec<u128>> = divisors.iter().map(ToPrimitive::to_u128).collect();
        let vectors: Option<Vec<(usize, Vec<i128>)>> = vectors
            .iter()
            .map(|(j, v)| {
                v.iter()
                    .map(ToPrimitive::to_i128)
                    .collect::<Option<_>>()
                    .map(|v| (*j, v))
            })
            .collect();
        Ok(match (divisors, vectors) {
            (Some(divisors), Some(vectors)) => SpanTests::Native { divisors, vectors },
            _ => SpanTests::Big,
        })
    }
}

impl<'a> ClosureTable<'a> {
    pub(crate) fn new(arr: &'a Arrangement) -> Result<Self> {
        let mut subsets = arr.nonempty_subsets()?;
        subsets.insert(0, ColumnSet::EMPTY);
        let tests = subsets
            .par_iter()
            .map(|&j| SpanTests::new(arr, j))
            .collect::<Result<_>>()?;
        Ok(ClosureTable {
            arr,
            subsets,
            tests,
        })
    }

    pub(crate) fn subsets(&self) -> &[ColumnSet] {
        &self.subsets
    }

    /// Closure of each subset at `q`, in the order of [`Self::subsets`].
    pub(crate) fn closures(&self, q: u64) -> Result<Vec<ColumnSet>> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        let q128 = u128::from(q);
        self.subsets
            .iter()
            .zip(&self.tests)
            .map(|(&subset, tests)| match tests {
                SpanTests::Big => closure(self.arr, subset, q),
                SpanTests::Native { divisors, vectors } => {
                    let mut out = subset;
                    for (j, y) in vectors {
                        let spans = y.iter().enumerate().all(|(i, &v)| {
                            let modulus = divisors.get(i).map_or(q128, |&e| e.gcd(&q128));
                            v.unsigned_abs() % modulus == 0
                        });
                        if spans {
                            out.insert(*j);
                        }
                    }
                    Ok(out)
                }
            })
            .collect()
    }
}

/// Pairs identified by `coarse` (same closure) that `fine` separates.
pub(crate) fn broken_identifications(
    subsets: &[ColumnSet],
    coarse: &[ColumnSet],
    fine: &[ColumnSet],
) -> Vec<(ColumnSet, ColumnSet)> {
    let mut groups: BTreeMap<ColumnSet, (ColumnSet, ColumnSet)> = BTreeMap::new();
    let mut violations = Vec::new();
    for ((&j, &a), &b) in subsets.iter().zip(coarse).zip(fine) {
        match groups.get(&a) {
            None => {
                groups.insert(a, (j, b));
            }
            Some(&(rep, rep_b)) if rep_b != b => violations.push((rep, j)),
            Some(_) => {}
        }
    }
    violations
}

/// DOT rendering of the Hasse diagram, `V` at the bottom.
pub fn hasse_dot(lattice: &IntersectionLattice) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph intersection_lattice {{");
    let _ = writeln!(out, "  label=\"q = {}\";", lattice.q);
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box];");
    for (i, f) in lattice.flats.iter().enumerate() {
        let name = if f.generator.is_empty() {
            "V".to_string()
        } else {
            format!("H{}", f.generator)
        };
        let _ = writeln!(
            out,
            "  f{i} [label=\"{name}\\nclosure {}\\n|H| = {}\"];",
            f.closure, f.cardinality
        );
    }
    for &(lo, hi) in &lattice.covers {
        let _ = writeln!(out, "  f{lo} -> f{hi};");
    }
    out.push_str("}\n");
    out
}
