//! Finite KATs given by explicit operation tables.

use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableModel {
    names: Vec<String>,
    plus: Vec<Vec<usize>>,
    times: Vec<Vec<usize>>,
    star: Vec<usize>,
    zero: usize,
    one: usize,
    tests: Vec<usize>,
    top: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("table `{0}` has the wrong shape")]
    Shape(&'static str),
    #[error("element index {0} out of range")]
    Range(usize),
    #[error("tests must contain 0 and 1")]
    Tests,
}

impl TableModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        names: Vec<String>,
        plus: Vec<Vec<usize>>,
        times: Vec<Vec<usize>>,
        star: Vec<usize>,
        zero: usize,
        one: usize,
        tests: Vec<usize>,
        top: Option<usize>,
    ) -> Result<Self, TableError> {
        let n = names.len();
        if plus.len() != n || plus.iter().any(|r| r.len() != n) {
            return Err(TableError::Shape("plus"));
        }
        if times.len() != n || times.iter().any(|r| r.len() != n) {
            return Err(TableError::Shape("times"));
        }
        if star.len() != n {
            return Err(TableError::Shape("star"));
        }
        let all = plus.iter().chain(&times).flatten().chain(&star).chain(&tests).chain(top.iter());
        if let Some(&bad) = all.chain([&zero, &one]).find(|&&e| e >= n) {
            return Err(TableError::Range(bad));
        }
        if !tests.contains(&zero) || !tests.contains(&one) {
            return Err(TableError::Tests);
        }
        let mut tests = tests;
        tests.sort_unstable();
        tests.dedup();
        Ok(TableModel {
            names,
            plus,
            times,
            star,
            zero,
            one,
            tests,
            top,
        })
    }

    /// The three-element algebra `{0, 1, a}` with `a·a = 0`, every star equal
    /// to `1`, tests `{0, 1}` and top `1`.
    pub fn a3() -> Self {
        let (z, o, a) = (0, 1, 2);
        TableModel::new(
            vec!["0".into(), "1".into(), "a".into()],
            vec![vec![z, o, a], vec![o, o, o], vec![a, o, a]],
            vec![vec![z, z, z], vec![z, o, a], vec![z, a, z]],
            vec![o, o, o],
            z,
            o,
            vec![z, o],
            Some(o),
        )
        .expect("a3 tables are well formed")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn tests(&self) -> &[usize] {
        &self.tests
    }

    pub fn is_test(&self, e: usize) -> bool {
        self.tests.binary_search(&e).is_ok()
    }

    pub fn plus(&self, a: usize, b: usize) -> usize {
        self.plus[a][b]
    }

    pub fn times(&self, a: usize, b: usize) -> usize {
        self.times[a][b]
    }

    pub fn star(&self, a: usize) -> usize {
        self.star[a]
    }

    /// Natural order: `a ≤ b` iff `a + b = b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.plus[a][b] == b
    }

    /// The test `q` with `p + q = 1` and `p·q = 0`, if unique.
    pub fn complement(&self, p: usize) -> Option<usize> {
        let mut it = self
            .tests
            .iter()
            .copied()
            .filter(|&q| self.plus[p][q] == self.one && self.times[p][q] == self.zero);
        let q = it.next()?;
        it.next().is_none().then_some(q)
    }

    /// Returns a copy with one entry of the product table overwritten.
    pub fn with_times(mut self, a: usize, b: usize, value: usize) -> Self {
        self.times[a][b] = value;
        self
    }

    pub fn with_plus(mut self, a: usize, b: usize, value: usize) -> Self {
        self.plus[a][b] = value;
        self
    }

    pub fn with_star(mut self, a: usize, value: usize) -> Self {
        self.star[a] = value;
        self
    }

    /// The least test `q` (in the natural order) with `p·a = p·a·q`.
    pub fn bdia(&self, a: usize, p: usize) -> Option<usize> {
        let pa = self.times[p][a];
        let candidates: Vec<usize> = self.tests.iter().copied().filter(|&q| self.times[pa][q] == pa).collect();
        candidates
            .iter()
            .copied()
            .find(|&q| candidates.iter().all(|&r| self.leq(q, r)))
    }

    /// Least fixpoint of `x ↦ 1 + a·x`, by iteration from `0`.
    pub fn star_closure(&self, a: usize) -> usize {
        let mut x = self.zero;
        for _ in 0..=self.len() {
            let next = self.plus[self.one][self.times[a][x]];
            if next == x {
                return x;
            }
            x = next;
        }
        x
    }

    /// `⟦t⟧` in the table, with atoms mapped by `atom`.
    pub fn interp(&self, t: &Term, atom: &dyn Fn(&str) -> Option<usize>) -> Option<usize> {
        Some(match t {
            Term::Atom(a) => atom(&a.name)?,
            Term::Zero => self.zero,
            Term::One => self.one,
            Term::Plus(l, r) => self.plus[self.interp(l, atom)?][self.interp(r, atom)?],
            Term::Seq(l, r) => self.times[self.interp(l, atom)?][self.interp(r, atom)?],
            Term::Star(b) => self.star[self.interp(b, atom)?],
        })
    }

    /// `⊤·c·⟦t⟧`; `None` when the model has no top or an atom is unmapped.
    pub fn top_post(&self, t: &Term, c: usize, atom: &dyn Fn(&str) -> Option<usize>) -> Option<usize> {
        let top = self.top?;
        let lhs = self.times[top][c];
        Some(self.times[lhs][self.interp(t, atom)?])
    }

    /// A test `q` with `⊤·q = e`, found by exhaustive search.
    pub fn represent_as_top_test(&self, e: usize) -> Option<usize> {
        let top = self.top?;
        self.tests.iter().copied().find(|&q| self.times[top][q] == e)
    }
}
