//! Guarded-string tests over a set of primitive tests `B`.
//!
//! An atom is a truth assignment to `B`, written as a string of `+`/`-`
//! characters (position `i` is `+` when the `i`-th primitive test holds).
//! Atom indices follow the lexicographic order of these strings, with `+`
//! before `-`. Only the diamond steps of primitive elements are available;
//! composite guarded-string sets are never built.

use crate::pointset::PointSet;

pub const MAX_TESTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsModel {
    tests: Vec<String>,
}

/// Primitive elements of the guarded-string model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GsElement {
    /// `G(a) = {α a β}` for a primitive action.
    Action,
    /// A test, as a set of atoms.
    Test(PointSet),
}

impl GsModel {
    pub fn new(tests: Vec<String>) -> Option<Self> {
        (tests.len() <= MAX_TESTS).then_some(GsModel { tests })
    }

    pub fn tests(&self) -> &[String] {
        &self.tests
    }

    pub fn atom_count(&self) -> usize {
        1 << self.tests.len()
    }

    fn bit(&self, i: usize) -> usize {
        self.tests.len() - 1 - i
    }

    /// The atoms in which primitive test number `i` appears positively.
    pub fn positive(&self, i: usize) -> PointSet {
        let bit = self.bit(i);
        PointSet::from_points(self.atom_count(), (0..self.atom_count()).filter(|k| k >> bit & 1 == 0))
    }

    pub fn test_index(&self, name: &str) -> Option<usize> {
        self.tests.iter().position(|t| t == name)
    }

    pub fn atom_name(&self, k: usize) -> String {
        (0..self.tests.len())
            .map(|i| if k >> self.bit(i) & 1 == 1 { '-' } else { '+' })
            .collect()
    }

    pub fn parse_atom(&self, s: &str) -> Option<usize> {
        if s.chars().count() != self.tests.len() {
            return None;
        }
        let mut k = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => {}
                '-' => k |= 1 << self.bit(i),
                _ => return None,
            }
        }
        Some(k)
    }

    /// `⟨e]p`: an action reaches every atom from any nonempty test.
    pub fn bdia(&self, e: &GsElement, p: &PointSet) -> PointSet {
        match e {
            GsElement::Action if p.is_empty() => PointSet::empty(self.atom_count()),
            GsElement::Action => PointSet::full(self.atom_count()),
            GsElement::Test(s) => p.intersection(s),
        }
    }
}
