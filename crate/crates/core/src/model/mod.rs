//! Finite KAT models and the evaluation of atoms in them.

pub mod axioms;
pub mod file;
pub mod guarded;
pub mod relation;
pub mod table;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::term::{parse_term, AtomKind, Term};

pub use guarded::{GsElement, GsModel};
pub use relation::Relation;
pub use table::TableModel;

/// Which powerset a concrete value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConcreteKind {
    /// Tests of the model.
    Tests,
    /// Elements `⊤a`, represented by the codomain of `a`.
    ToppCodomains,
}

/// Full relational model over the integer range `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelModel {
    lo: i64,
    hi: i64,
}

impl RelModel {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::semantic(format!("empty carrier {lo}..{hi}")));
        }
        let size = (hi - lo) as u128 + 1;
        if size > relation::MAX_CARRIER as u128 {
            return Err(Error::semantic(format!(
                "carrier {lo}..{hi} has {size} points; at most {} are supported",
                relation::MAX_CARRIER
            )));
        }
        Ok(RelModel { lo, hi })
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn index(&self, value: i64) -> Option<usize> {
        (self.lo..=self.hi).contains(&value).then(|| (value - self.lo) as usize)
    }

    pub fn value(&self, index: usize) -> i64 {
        self.lo + index as i64
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn set_where(&self, pred: impl Fn(i64) -> bool) -> PointSet {
        PointSet::from_points(self.size(), (0..self.size()).filter(|&i| pred(self.value(i))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Relational(RelModel),
    Guarded(GsModel),
    Table(TableModel),
}

/// Relational model with every sub-identity as a test.
pub fn rel_model(lo: i64, hi: i64) -> Result<Model> {
    Ok(Model::Relational(RelModel::new(lo, hi)?))
}

pub fn gs_model<S: Into<String>>(tests: impl IntoIterator<Item = S>) -> Result<Model> {
    let tests: Vec<String> = tests.into_iter().map(Into::into).collect();
    let n = tests.len();
    GsModel::new(tests)
        .map(Model::Guarded)
        .ok_or_else(|| Error::semantic(format!("{n} primitive tests; at most {} supported", guarded::MAX_TESTS)))
}

pub fn a3_model() -> Model {
    Model::Table(TableModel::a3())
}

impl Model {
    /// Number of points of the powerset holding tests (and codomains).
    pub fn universe(&self) -> usize {
        match self {
            Model::Relational(r) => r.size(),
            Model::Guarded(g) => g.atom_count(),
            Model::Table(t) => t.tests().len(),
        }
    }

    pub fn rel(&self) -> Option<&RelModel> {
        match self {
            Model::Relational(r) => Some(r),
            _ => None,
        }
    }

    pub fn supports(&self, kind: ConcreteKind) -> bool {
        match (self, kind) {
            (Model::Relational(_), _) => true,
            (Model::Guarded(_), ConcreteKind::Tests) => true,
            _ => false,
        }
    }

    fn point_name(&self, k: usize) -> String {
        match self {
            Model::Relational(r) => r.value(k).to_string(),
            Model::Guarded(g) => g.atom_name(k),
            Model::Table(t) => t.name(t.tests()[k]).to_string(),
        }
    }

    pub fn format_set(&self, set: &PointSet, kind: ConcreteKind) -> String {
        let mut out = String::new();
        if kind == ConcreteKind::ToppCodomains {
            out.push_str("top");
        }
        out.push('{');
        let points: Vec<usize> = set.iter().collect();
        let mut items = Vec::new();
        match self {
            Model::Relational(_) => {
                let mut i = 0;
                while i < points.len() {
                    let mut j = i;
                    while j + 1 < points.len() && points[j + 1] == points[j] + 1 {
                        j += 1;
                    }
                    if j - i >= 2 {
                        items.push(format!("{}..{}", self.point_name(points[i]), self.point_name(points[j])));
                    } else {
                        items.extend((i..=j).map(|k| self.point_name(points[k])));
                    }
                    i = j + 1;
                }
            }
            _ => items.extend(points.iter().map(|&k| self.point_name(k))),
        }
        let _ = write!(out, "{}}}", items.join(","));
        out
    }

    /// Parses `{..}` (or `top{..}` for codomains); plain braces are accepted for codomains too.
    pub fn parse_set(&self, text: &str, kind: ConcreteKind) -> Result<PointSet> {
        let text = text.trim();
        let body = match text.strip_prefix("top") {
            Some(rest) if kind == ConcreteKind::ToppCodomains => rest.trim_start(),
            Some(_) => {
                return Err(Error::semantic(format!("`{text}` is a codomain literal but a test is expected")));
            }
            None => text,
        };
        let inner = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::syntax(format!("malformed set literal `{text}`")))?;
        let mut set = PointSet::empty(self.universe());
        for item in inner.split(',').map(str::trim) {
            if item.is_empty() {
                if inner.trim().is_empty() {
                    continue;
                }
                return Err(Error::syntax(format!("empty item in set literal `{text}`")));
            }
            match self {
                Model::Relational(r) => {
                    let (a, b) = match item.split_once("..") {
                        Some((a, b)) => (a.trim(), b.trim()),
                        None => (item, item),
                    };
                    let parse = |s: &str| {
                        s.parse::<i64>()
                            .map_err(|_| Error::syntax(format!("`{s}` is not an integer in `{text}`")))
                    };
                    let (a, b) = (parse(a)?, parse(b)?);
                    for v in a..=b {
                        let k = r
                            .index(v)
                            .ok_or_else(|| Error::semantic(format!("{v} is outside the carrier {}..{}", r.lo, r.hi)))?;
                        set.insert(k);
                    }
                }
                Model::Guarded(g) => {
                    if !item.chars().all(|c| c == '+' || c == '-') {
                        return Err(Error::syntax(format!("`{item}` is not an atom of +/- signs")));
                    }
                    let k = g.parse_atom(item).ok_or_else(|| {
                        Error::semantic(format!("atom `{item}` needs {} signs", g.tests().len()))
                    })?;
                    set.insert(k);
                }
                Model::Table(t) => {
                    let k = t
                        .tests()
                        .iter()
                        .position(|&e| t.name(e) == item)
                        .ok_or_else(|| Error::semantic(format!("`{item}` is not a test of the table")))?;
                    set.insert(k);
                }
            }
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Rel(Relation),
    Gs(GsElement),
    Table(usize),
}

/// The `ok` and `err` meaning of one atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomValue {
    pub kind: AtomKind,
    pub ok: Element,
    pub err: Element,
}

/// Atom name to value, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evaluation {
    atoms: BTreeMap<String, (usize, AtomValue)>,
}

impl Evaluation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: AtomValue) {
        let next = self.atoms.len();
        let name = name.into();
        let order = self.atoms.get(&name).map_or(next, |(o, _)| *o);
        self.atoms.insert(name, (order, value));
    }

    pub fn get(&self, name: &str) -> Option<&AtomValue> {
        self.atoms.get(name).map(|(_, v)| v)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.atoms.contains_key(name)
    }

    /// Names in declaration order.
    pub fn names(&self) -> Vec<&str> {
        let mut v: Vec<_> = self.atoms.iter().map(|(n, (o, _))| (*o, n.as_str())).collect();
        v.sort_unstable();
        v.into_iter().map(|(_, n)| n).collect()
    }

    pub fn names_of(&self, kind: AtomKind) -> Vec<&str> {
        self.names().into_iter().filter(|n| self.get(n).is_some_and(|v| v.kind == kind)).collect()
    }
}

/// A model together with an evaluation of its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub model: Model,
    pub eval: Evaluation,
}

impl Instance {
    pub fn new(model: Model, eval: Evaluation) -> Self {
        Instance { model, eval }
    }

    pub fn universe(&self) -> usize {
        self.model.universe()
    }

    /// Parses a term against the atoms declared in the evaluation.
    pub fn parse_term(&self, src: &str) -> Result<Term> {
        let sigma = self.eval.names_of(AtomKind::Action);
        let tests = self.eval.names_of(AtomKind::Test);
        Ok(parse_term(src, &sigma, &tests)?)
    }

    pub fn parse_set(&self, text: &str, kind: ConcreteKind) -> Result<PointSet> {
        self.model.parse_set(text, kind)
    }

    pub fn format_set(&self, set: &PointSet, kind: ConcreteKind) -> String {
        self.model.format_set(set, kind)
    }

    /// Relational instance with the given relations as `ok` components and empty `err`.
    pub fn relational(lo: i64, hi: i64, atoms: &[(&str, AtomKind, Relation)]) -> Result<Self> {
        let model = rel_model(lo, hi)?;
        let n = model.universe();
        let mut eval = Evaluation::new();
        for (name, kind, rel) in atoms {
            eval.insert(
                *name,
                AtomValue {
                    kind: *kind,
                    ok: Element::Rel(rel.clone()),
                    err: Element::Rel(Relation::empty(n)),
                },
            );
        }
        Ok(Instance::new(model, eval))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn relational_literals() {
        let m = rel_model(0, 11).unwrap();
        let s = m.parse_set("{0, 2,10}", ConcreteKind::Tests).unwrap();
        assert_eq!(m.format_set(&s, ConcreteKind::Tests), "{0,2,10}");
        let all = m.parse_set("{0..11}", ConcreteKind::Tests).unwrap();
        assert!(all.is_full());
        assert_eq!(m.format_set(&all, ConcreteKind::Tests), "{0..11}");
        let c = m.parse_set("top{0,1,2,5,6}", ConcreteKind::ToppCodomains).unwrap();
        assert_eq!(m.format_set(&c, ConcreteKind::ToppCodomains), "top{0..2,5,6}");
        assert!(m.parse_set("top{0}", ConcreteKind::Tests).is_err());
        assert!(matches!(m.parse_set("{12}", ConcreteKind::Tests), Err(Error::Semantic(_))));
        assert!(matches!(m.parse_set("{x}", ConcreteKind::Tests), Err(Error::Syntax(_))));
        assert!(matches!(m.parse_set("0,1", ConcreteKind::Tests), Err(Error::Syntax(_))));
        assert!(m.parse_set("{}", ConcreteKind::Tests).unwrap().is_empty());
    }

    #[test]
    fn negative_carrier() {
        let m = rel_model(-8, 8).unwrap();
        let s = m.parse_set("{-8..-6,0}", ConcreteKind::Tests).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(m.format_set(&s, ConcreteKind::Tests), "{-8..-6,0}");
    }

    #[test]
    fn carrier_bounds() {
        assert!(rel_model(0, 63).is_ok());
        assert!(rel_model(0, 64).is_err());
        assert!(rel_model(1, 0).is_err());
        match rel_model(0, 3).unwrap() {
            Model::Relational(r) => assert_eq!(PointSet::all(r.size()).count(), 16),
            _ => unreachable!(),
        }
    }

    #[test]
    fn guarded_literals() {
        let m = gs_model(["b1", "b2"]).unwrap();
        assert_eq!(m.universe(), 4);
        let s = m.parse_set("{--, ++}", ConcreteKind::Tests).unwrap();
        assert_eq!(m.format_set(&s, ConcreteKind::Tests), "{++,--}");
        assert!(m.parse_set("{+}", ConcreteKind::Tests).is_err());
    }

    proptest! {
        #[test]
        fn relational_literal_roundtrip(mask in any::<u64>(), lo in -20i64..20) {
            let m = rel_model(lo, lo + 17).unwrap();
            let s = PointSet::from_mask(18, mask);
            for kind in [ConcreteKind::Tests, ConcreteKind::ToppCodomains] {
                let text = m.format_set(&s, kind);
                prop_assert_eq!(m.parse_set(&text, kind).unwrap(), s.clone());
            }
        }
    }
}
