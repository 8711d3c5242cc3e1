//! Column subsets as 64-bit masks.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Most columns a [`ColumnSet`] can address.
pub const MAX_COLUMNS: usize = 64;

/// A set of column indices (0-based internally, printed 1-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSet(u64);

impl ColumnSet {
    pub const EMPTY: ColumnSet = ColumnSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ColumnSet(bits)
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_COLUMNS);
        if n == MAX_COLUMNS {
            ColumnSet(u64::MAX)
        } else {
            ColumnSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(j: usize) -> Self {
        ColumnSet(1u64 << j)
    }

    /// From 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        ColumnSet(indices.into_iter().fold(0, |acc, j| acc | (1u64 << j)))
    }

    /// From 1-based indices, the convention used in printed output.
    pub fn from_one_based<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self::from_indices(indices.into_iter().map(|j| j - 1))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, j: usize) -> bool {
        j < MAX_COLUMNS && self.0 & (1u64 << j) != 0
    }

    pub fn insert(&mut self, j: usize) {
        self.0 |= 1u64 << j;
    }

    pub fn union(self, other: ColumnSet) -> ColumnSet {
        ColumnSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ColumnSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(j)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|j| j + 1).collect()
    }

    /// Ordering used for canonical output: by size, then lexicographically
    /// on the sorted index list.
    pub fn shortlex_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.indices())
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for ColumnSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ColumnSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = v.iter().find(|&&j| j == 0 || j > MAX_COLUMNS) {
            return Err(serde::de::Error::custom(format!(
                "column index {bad} out of range"
            )));
        }
        Ok(ColumnSet::from_one_based(v))
    }
}

/// Every subset of `0..n` of exactly `size` elements, in increasing mask order.
pub fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = ColumnSet> {
    let limit: u128 = 1u128 << n;
    let mut next: Option<u64> = match size {
        0 => Some(0),
        s if s > n => None,
        s => Some(if s == 64 { u64::MAX } else { (1u64 << s) - 1 }),
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            let nxt = (((r ^ cur) >> 2) / c) | r;
            if r == 0 || (nxt as u128) >= limit {
                None
            } else {
                Some(nxt)
            }
        };
        Some(ColumnSet(cur))
    })
}
