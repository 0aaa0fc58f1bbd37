//! Sets of nonnegative integers that support membership and interval counts.
//!
//! The supersequence construction selects from the complement of a sparse
//! sequence, which is far too large to materialize; [`Complement`] answers
//! counts from the sparse side.

use crate::bitmap::Bitmap;
use crate::sequences::SequencePrefix;
use num_traits::ToPrimitive;

pub trait IntegerSet {
    fn contains(&self, n: u64) -> bool;

    /// `|S ∩ [lo, hi]|`, zero when `lo > hi`.
    fn count_in(&self, lo: u64, hi: u64) -> u64;
}

/// Finite set stored as sorted distinct members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedSet {
    members: Vec<u64>,
}

impl SortedSet {
    pub fn new(mut members: Vec<u64>) -> Self {
        members.sort_unstable();
        members.dedup();
        SortedSet { members }
    }

    /// The values of `prefix` that are at most `max`.
    pub fn from_prefix_upto(prefix: &SequencePrefix, max: u64) -> Self {
        SortedSet::new(
            prefix
                .values()
                .iter()
                .filter_map(|v| v.to_u64())
                .filter(|&v| v <= max)
                .collect(),
        )
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }
}

impl IntegerSet for SortedSet {
    fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        let a = self.members.partition_point(|&m| m < lo);
        let b = self.members.partition_point(|&m| m <= hi);
        (b - a) as u64
    }
}

/// `ℕ₀ ∖ S`.
#[derive(Debug, Clone)]
pub struct Complement<S> {
    inner: S,
}

impl<S: IntegerSet> Complement<S> {
    pub fn new(inner: S) -> Self {
        Complement { inner }
    }
}

impl<S: IntegerSet> IntegerSet for Complement<S> {
    fn contains(&self, n: u64) -> bool {
        !self.inner.contains(n)
    }

    fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        (hi - lo + 1) - self.inner.count_in(lo, hi)
    }
}

/// Bitset over `[0, max]` built from a predicate; nothing above `max` is a member.
#[derive(Debug, Clone)]
pub struct DenseSet {
    bits: Bitmap,
    ranks: Vec<u64>,
}

impl DenseSet {
    pub fn from_predicate(max: u64, pred: impl Fn(u64) -> bool) -> Self {
        let len = max as usize + 1;
        let bits = Bitmap::from_indices(len, (0..=max).filter(|&n| pred(n)).map(|n| n as usize));
        let ranks = bits.word_ranks();
        DenseSet { bits, ranks }
    }

    pub fn max(&self) -> u64 {
        self.bits.len() as u64 - 1
    }
}

impl IntegerSet for DenseSet {
    fn contains(&self, n: u64) -> bool {
        n <= self.max() && self.bits.get(n as usize)
    }

    fn count_in(&self, lo: u64, hi: u64) -> u64 {
        let hi = hi.min(self.max());
        if lo > hi {
            return 0;
        }
        self.bits.rank(&self.ranks, hi as usize + 1) - self.bits.rank(&self.ranks, lo as usize)
    }
}

impl<T: IntegerSet + ?Sized> IntegerSet for &T {
    fn contains(&self, n: u64) -> bool {
        (**self).contains(n)
    }

    fn count_in(&self, lo: u64, hi: u64) -> u64 {
        (**self).count_in(lo, hi)
    }
}
