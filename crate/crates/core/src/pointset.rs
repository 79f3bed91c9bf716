//! Bitset over the points of a finite space.

use std::fmt;

/// Largest number of points any constructed space may carry.
pub const MAX_POINTS: usize = 128;

/// A subset of `0..MAX_POINTS`, stored as a single `u128` mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PointSet(u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u128 << p)
    }

    pub fn from_bits(bits: u128) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, p: usize) -> bool {
        p < MAX_POINTS && self.0 >> p & 1 == 1
    }

    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u128 << p;
    }

    pub fn remove(&mut self, p: usize) {
        self.0 &= !(1u128 << p);
    }

    pub fn with(mut self, p: usize) -> Self {
        self.insert(p);
        self
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl IntoIterator for PointSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter(u128);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of `universe`, in increasing order of their bit patterns.
pub fn subsets(universe: PointSet) -> impl Iterator<Item = PointSet> {
    let mask = universe.0;
    let mut next = Some(0u128);
    std::iter::from_fn(move || {
        let cur = next?;
        // Carry-propagating increment restricted to the mask.
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(PointSet(cur))
    })
}
