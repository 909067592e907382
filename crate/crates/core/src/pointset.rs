//! Finite subsets of a fixed universe of points.
//!
//! Every concrete lattice handled by the crate is a powerset: tests of a
//! relational model are subsets of the carrier, tests of the guarded-string
//! model are sets of atoms, and TopKAT codomains are again carrier subsets.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of `{0, .., universe - 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    bits: FixedBitSet,
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        PointSet { bits }
    }

    pub fn singleton(universe: usize, point: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(point);
        s
    }

    /// Builds a set from point indices. Panics if a point is outside the universe.
    pub fn from_points<I: IntoIterator<Item = usize>>(universe: usize, points: I) -> Self {
        let mut s = Self::empty(universe);
        for p in points {
            s.insert(p);
        }
        s
    }

    /// Decodes the low `universe` bits of `mask`; only meaningful for universes up to 64.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64);
        Self::from_points(universe, (0..universe).filter(|i| mask >> i & 1 == 1))
    }

    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.universe() <= 64);
        self.iter().fold(0u64, |m, i| m | 1 << i)
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, point: usize) {
        assert!(point < self.universe(), "point {point} outside universe");
        self.bits.insert(point);
    }

    pub fn contains(&self, point: usize) -> bool {
        self.bits.contains(point)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn complement(&self) -> PointSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn last(&self) -> Option<usize> {
        self.bits.maximum()
    }

    /// All subsets of a universe, in mask order. Only for universes up to 30 points.
    pub fn all(universe: usize) -> impl Iterator<Item = PointSet> {
        assert!(universe <= 30, "refusing to enumerate 2^{universe} subsets");
        (0u64..1 << universe).map(move |m| PointSet::from_mask(universe, m))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_roundtrip_and_ops() {
        let a = PointSet::from_mask(5, 0b10110);
        assert_eq!(a.to_mask(), 0b10110);
        assert_eq!(a.len(), 3);
        let b = PointSet::from_points(5, [0, 1]);
        assert_eq!(a.union(&b).to_mask(), 0b10111);
        assert_eq!(a.intersection(&b).to_mask(), 0b00010);
        assert_eq!(a.complement().to_mask(), 0b01001);
        assert!(a.intersection(&b).is_subset(&a));
        assert_eq!(a.first(), Some(1));
        assert_eq!(a.last(), Some(4));
    }

    #[test]
    fn enumerates_powerset() {
        assert_eq!(PointSet::all(3).count(), 8);
        assert!(PointSet::all(0).next().unwrap().is_empty());
    }
}
