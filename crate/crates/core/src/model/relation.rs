//! Binary relations over a carrier of at most 64 points, stored as bit rows.

use std::fmt;

use rand::Rng;

use crate::pointset::PointSet;

pub const MAX_CARRIER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    /// `rows[x]` has bit `y` set iff `(x, y)` is in the relation.
    rows: Vec<u64>,
}

fn row_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_CARRIER);
        Relation { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            r.rows[x] = 1 << x;
        }
        r
    }

    /// The greatest relation `X × X`.
    pub fn top(n: usize) -> Self {
        Relation {
            n,
            rows: vec![row_mask(n); n],
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Self::empty(n);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert_eq!(rows.len(), n);
        let m = row_mask(n);
        Relation {
            n,
            rows: rows.into_iter().map(|r| r & m).collect(),
        }
    }

    /// Sub-identity relation with the given support.
    pub fn test(support: &PointSet) -> Self {
        let mut r = Self::empty(support.universe());
        for x in support.iter() {
            r.rows[x] = 1 << x;
        }
        r
    }

    /// Decodes relation number `code` of the `2^(n*n)` relations on `n` points.
    pub fn from_code(n: usize, code: u64) -> Self {
        assert!(n * n <= 63);
        let m = row_mask(n);
        Relation {
            n,
            rows: (0..n).map(|x| (code >> (x * n)) & m).collect(),
        }
    }

    /// All relations on `n <= 4` points, in code order.
    pub fn all(n: usize) -> impl Iterator<Item = Relation> {
        assert!(n <= 4, "refusing to enumerate relations on {n} points");
        (0u64..1 << (n * n)).map(move |c| Relation::from_code(n, c))
    }

    /// A random relation where each pair is present with probability `density`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Self {
        let mut r = Self::empty(n);
        for x in 0..n {
            for y in 0..n {
                if rng.gen_bool(density) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        assert!(x < self.n && y < self.n, "pair ({x},{y}) outside carrier");
        self.rows[x] |= 1 << y;
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x] >> y & 1 == 1
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| (0..self.n).filter(move |&y| self.contains(x, y)).map(move |y| (x, y)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            n: self.n,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        Relation {
            n: self.n,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect(),
        }
    }

    /// Relational composition: `(x, z)` with `(x, y)` in `self` and `(y, z)` in `other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut out = 0u64;
                let mut bits = row;
                while bits != 0 {
                    let y = bits.trailing_zeros() as usize;
                    out |= other.rows[y];
                    bits &= bits - 1;
                }
                out
            })
            .collect();
        Relation { n: self.n, rows }
    }

    /// Reflexive-transitive closure (Warshall).
    pub fn star(&self) -> Relation {
        let mut rows = self.rows.clone();
        for (x, row) in rows.iter_mut().enumerate() {
            *row |= 1 << x;
        }
        for k in 0..self.n {
            for x in 0..self.n {
                if rows[x] >> k & 1 == 1 {
                    rows[x] |= rows[k];
                }
            }
        }
        Relation { n: self.n, rows }
    }

    /// `{y | ∃x ∈ p, (x, y) ∈ self}`.
    pub fn image(&self, p: &PointSet) -> PointSet {
        let mut out = 0u64;
        for x in p.iter() {
            out |= self.rows[x];
        }
        PointSet::from_mask(self.n, out)
    }

    pub fn codomain(&self) -> PointSet {
        PointSet::from_mask(self.n, self.rows.iter().fold(0, |a, r| a | r))
    }

    pub fn is_test(&self) -> bool {
        self.rows.iter().enumerate().all(|(x, &r)| r & !(1u64 << x) == 0)
    }

    /// Support of a sub-identity; the caller must ensure `is_test`.
    pub fn test_support(&self) -> PointSet {
        PointSet::from_points(self.n, (0..self.n).filter(|&x| self.contains(x, x)))
    }

    pub fn power(&self, k: usize) -> Relation {
        (0..k).fold(Relation::identity(self.n), |acc, _| acc.compose(self))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
