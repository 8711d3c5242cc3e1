//! Central arrangements given by an integer coefficient matrix, with a
//! memoized Smith form per column subset.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::minors::{self, binomial};
use crate::quasi::QuasiMonomial;
use crate::snf::{smith_normal_form, SmithData};
use crate::subset::{subsets_of_size, ColumnSet, MAX_COLUMNS};

/// Resource caps shared by the enumeration-heavy operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Most column subsets any single operation may enumerate.
    pub max_subsets: u64,
    /// Most square minors examined when computing the minor period.
    pub max_minors: u64,
    /// Most point-times-column evaluations a brute-force count may spend.
    pub oracle_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_subsets: 1 << 22,
            max_minors: minors::DEFAULT_MAX_MINORS,
            oracle_budget: 100_000_000,
        }
    }
}

/// The arrangement `{ x : x c_j = 0 }` for the nonzero columns `c_j` of an
/// `m x n` integer matrix.
#[derive(Debug)]
pub struct Arrangement {
    matrix: IntMatrix,
    columns: Vec<Vec<BigInt>>,
    /// For each column, the first column equal to it.
    representative: Vec<usize>,
    limits: Limits,
    cache: RwLock<HashMap<ColumnSet, Arc<SmithData>>>,
}

impl Clone for Arrangement {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("cache lock poisoned").clone();
        Arrangement {
            matrix: self.matrix.clone(),
            columns: self.columns.clone(),
            representative: self.representative.clone(),
            limits: self.limits,
            cache: RwLock::new(cache),
        }
    }
}

impl Arrangement {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        Self::with_limits(matrix, Limits::default())
    }

    pub fn with_limits(matrix: IntMatrix, limits: Limits) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if matrix.cols() > MAX_COLUMNS {
            return Err(Error::TooManyColumns {
                columns: matrix.cols(),
                max: MAX_COLUMNS,
            });
        }
        if let Some(j) = (0..matrix.cols()).find(|&j| matrix.is_zero_column(j)) {
            return Err(Error::ZeroColumn { column: j + 1 });
        }
        let columns: Vec<Vec<BigInt>> = (0..matrix.cols()).map(|j| matrix.column(j)).collect();
        let representative = (0..columns.len())
            .map(|j| {
                (0..=j)
                    .find(|&i| columns[i] == columns[j])
                    .expect("j matches itself")
            })
            .collect();
        Ok(Arrangement {
            matrix,
            columns,
            representative,
            limits,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Ambient dimension `m`.
    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of hyperplanes `n`.
    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, j: usize) -> &[BigInt] {
        &self.columns[j]
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    pub fn all_columns(&self) -> ColumnSet {
        ColumnSet::full(self.len())
    }

    /// `C_J` with columns in increasing index order.
    pub fn submatrix(&self, subset: ColumnSet) -> IntMatrix {
        self.matrix.select_columns(&subset.indices())
    }

    /// Identical columns give identical flats, so repeated columns are folded
    /// onto their first occurrence before memoizing.
    fn canonical(&self, subset: ColumnSet) -> ColumnSet {
        ColumnSet::from_indices(subset.iter().map(|j| self.representative[j]))
    }

    /// Smith data of `C_J` (after folding repeated columns). The divisors,
    /// rank and left transform are those of `C_J` itself.
    pub fn smith(&self, subset: ColumnSet) -> Result<Arc<SmithData>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let key = self.canonical(subset);
        if let Some(hit) = self.cache.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let data = Arc::new(smith_normal_form(&self.submatrix(key))?);
        let mut cache = self.cache.write().expect("cache lock poisoned");
        Ok(Arc::clone(cache.entry(key).or_insert(data)))
    }

    pub fn cached_subsets(&self) -> usize {
        self.cache.read().expect("cache lock poisoned").len()
    }

    /// `|H_{J,q}|` as a quasi-monomial in `q`.
    pub fn quasi_monomial(&self, subset: ColumnSet) -> Result<QuasiMonomial> {
        let snf = self.smith(subset)?;
        Ok(QuasiMonomial::new(
            self.dimension() - snf.rank(),
            snf.divisors.clone(),
        ))
    }

    /// `|H_{J,q}|`, the size of the common kernel of the columns in `J`.
    pub fn flat_cardinality(&self, subset: ColumnSet, q: u64) -> Result<BigInt> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(self.smith(subset)?.kernel_cardinality(q))
    }

    pub(crate) fn check_subset_count(&self, needed: u128) -> Result<()> {
        if needed > self.limits.max_subsets as u128 {
            return Err(Error::SubsetCap {
                needed,
                cap: self.limits.max_subsets,
            });
        }
        Ok(())
    }

    /// All `2^n - 1` nonempty subsets, after checking the subset cap.
    pub fn nonempty_subsets(&self) -> Result<Vec<ColumnSet>> {
        let n = self.len();
        self.check_subset_count((1u128 << n) - 1)?;
        Ok((1..=n).flat_map(|s| subsets_of_size(n, s)).collect())
    }

    /// Nonempty subsets of size at most `max_size`.
    pub fn subsets_up_to(&self, max_size: usize) -> Result<Vec<ColumnSet>> {
        let n = self.len();
        let max_size = max_size.min(n);
        self.check_subset_count((1..=max_size).map(|s| binomial(n, s)).sum())?;
        Ok((1..=max_size).flat_map(|s| subsets_of_size(n, s)).collect())
    }

    /// lcm of the largest elementary divisor of `C_J` over `1 <= |J| <= min(m, n)`.
    /// Larger subsets cannot contribute new factors.
    pub fn period_rho0(&self) -> Result<u64> {
        let subsets = self.subsets_up_to(self.dimension())?;
        let lcm = subsets
            .par_iter()
            .map(|&j| self.smith(j).map(|s| s.largest_divisor()))
            .try_reduce(BigInt::one, |a, b| Ok(a.lcm(&b)))?;
        lcm.to_u64().ok_or(Error::Overflow {
            what: "period rho0",
        })
    }

    /// lcm of all nonzero minors of `C`. Always a multiple of
    /// [`period_rho0`](Self::period_rho0).
    pub fn period_rho_e(&self) -> Result<BigInt> {
        let rho_e = minors::nonzero_minors_lcm(&self.matrix, self.limits.max_minors)?;
        if let Ok(rho0) = self.period_rho0() {
            assert!(
                rho_e.is_multiple_of(&BigInt::from(rho0)),
                "rho0 = {rho0} does not divide rhoE = {rho_e}"
            );
        }
        Ok(rho_e)
    }
}
