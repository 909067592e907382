//! Strongest-postcondition transformers of terms, concrete and abstract, for
//! normal (`ok`) and erroneous (`err`) termination.
//!
//! Concrete values are sets of points: test supports, or codomains when the
//! model is read as a TopKAT. In relational models both readings take the
//! relational image at every atom, so one evaluator serves both.

pub mod completeness;
pub mod oracle;

use crate::domain::{Abs, GaloisInsertion};
use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Element, Instance, Model, TableModel};
use crate::pointset::PointSet;
use crate::term::Term;

pub use completeness::{global_complete, global_complete_for, local_complete, Incompleteness, LocalCompleteness, Transformer};
pub use oracle::{materialize, oracle_post};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Ok,
    Err,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::Ok => "ok",
            Component::Err => "err",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostPair {
    pub ok: PointSet,
    pub err: PointSet,
}

impl PostPair {
    pub fn get(&self, c: Component) -> &PointSet {
        match c {
            Component::Ok => &self.ok,
            Component::Err => &self.err,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsPair {
    pub ok: Abs,
    pub err: Abs,
}

impl AbsPair {
    pub fn get(&self, c: Component) -> Abs {
        match c {
            Component::Ok => self.ok,
            Component::Err => self.err,
        }
    }
}

fn check_set(inst: &Instance, p: &PointSet) -> Result<()> {
    if p.universe() != inst.universe() {
        return Err(Error::semantic(format!(
            "set over {} points used with a model of {} points",
            p.universe(),
            inst.universe()
        )));
    }
    Ok(())
}

/// One diamond step of an atom component.
pub fn atom_step(inst: &Instance, name: &str, c: Component, p: &PointSet) -> Result<PointSet> {
    let v = inst
        .eval
        .get(name)
        .ok_or_else(|| Error::semantic(format!("atom `{name}` has no value in the model")))?;
    let e = match c {
        Component::Ok => &v.ok,
        Component::Err => &v.err,
    };
    match (&inst.model, e) {
        (Model::Relational(_), Element::Rel(r)) => Ok(r.image(p)),
        (Model::Guarded(g), Element::Gs(x)) => Ok(g.bdia(x, p)),
        (Model::Table(t), &Element::Table(x)) => table_step(t, x, p),
        _ => Err(Error::semantic(format!("atom `{name}` has a value of the wrong kind"))),
    }
}

/// Table tests are single elements, written as one-point sets.
fn table_test(t: &TableModel, p: &PointSet) -> Result<usize> {
    match (p.len(), p.first()) {
        (1, Some(k)) => Ok(t.tests()[k]),
        _ => Err(Error::semantic("a test of a table model is a single element")),
    }
}

fn table_step(t: &TableModel, x: usize, p: &PointSet) -> Result<PointSet> {
    let q = t
        .bdia(x, table_test(t, p)?)
        .ok_or_else(|| Error::semantic(format!("no least test for `{}` in the table", t.name(x))))?;
    let k = t.tests().iter().position(|&e| e == q).expect("diamonds are tests");
    Ok(PointSet::singleton(t.tests().len(), k))
}

/// `⟦t⟧` in a table model as an `(ok, err)` pair of elements.
pub fn table_interp(inst: &Instance, t: &Term) -> Result<(usize, usize)> {
    let Model::Table(tab) = &inst.model else {
        return Err(Error::semantic("not a table model"));
    };
    let value = |name: &str, c: Component| -> Result<usize> {
        let v = inst.eval.get(name).ok_or_else(|| Error::semantic(format!("atom `{name}` is undefined")))?;
        match if c == Component::Ok { &v.ok } else { &v.err } {
            Element::Table(x) => Ok(*x),
            _ => Err(Error::semantic(format!("atom `{name}` is not a table element"))),
        }
    };
    Ok(match t {
        Term::Atom(a) => (value(&a.name, Component::Ok)?, value(&a.name, Component::Err)?),
        Term::Zero => (tab.zero(), tab.zero()),
        Term::One => (tab.one(), tab.zero()),
        Term::Plus(l, r) => {
            let (a, b) = (table_interp(inst, l)?, table_interp(inst, r)?);
            (tab.plus(a.0, b.0), tab.plus(a.1, b.1))
        }
        Term::Seq(l, r) => {
            let (a, b) = (table_interp(inst, l)?, table_interp(inst, r)?);
            (tab.times(a.0, b.0), tab.plus(a.1, tab.times(a.0, b.1)))
        }
        Term::Star(b) => {
            let (ok, err) = table_interp(inst, b)?;
            let s = tab.star(ok);
            (s, tab.times(s, err))
        }
    })
}

/// Least fixpoint of `q ↦ p ∪ f(q)` by accumulation from `p`, with the
/// number of growing steps taken.
pub fn star_fixpoint(p: &PointSet, mut f: impl FnMut(&PointSet) -> Result<PointSet>) -> Result<(PointSet, usize)> {
    let mut acc = p.clone();
    let mut steps = 0;
    loop {
        let next = acc.union(&f(&acc)?);
        if next == acc {
            return Ok((acc, steps));
        }
        acc = next;
        steps += 1;
    }
}

fn eval_pair(inst: &Instance, t: &Term, p: &PointSet) -> Result<PostPair> {
    let n = p.universe();
    Ok(match t {
        Term::Atom(a) => PostPair {
            ok: atom_step(inst, &a.name, Component::Ok, p)?,
            err: atom_step(inst, &a.name, Component::Err, p)?,
        },
        Term::Zero => PostPair {
            ok: PointSet::empty(n),
            err: PointSet::empty(n),
        },
        Term::One => PostPair {
            ok: p.clone(),
            err: PointSet::empty(n),
        },
        Term::Plus(l, r) => {
            let (a, b) = (eval_pair(inst, l, p)?, eval_pair(inst, r, p)?);
            PostPair {
                ok: a.ok.union(&b.ok),
                err: a.err.union(&b.err),
            }
        }
        Term::Seq(l, r) => {
            let a = eval_pair(inst, l, p)?;
            let b = eval_pair(inst, r, &a.ok)?;
            PostPair {
                ok: b.ok,
                err: a.err.union(&b.err),
            }
        }
        Term::Star(body) => {
            let (ok, _) = star_fixpoint(p, |q| Ok(eval_pair(inst, body, q)?.ok))?;
            let err = eval_pair(inst, body, &ok)?.err;
            PostPair { ok, err }
        }
    })
}

/// `(⦅t⦆ok p, ⦅t⦆err p)`.
pub fn post(inst: &Instance, t: &Term, p: &PointSet) -> Result<PostPair> {
    check_set(inst, p)?;
    if let Model::Table(tab) = &inst.model {
        let (ok, err) = table_interp(inst, t)?;
        return Ok(PostPair {
            ok: table_step(tab, ok, p)?,
            err: table_step(tab, err, p)?,
        });
    }
    eval_pair(inst, t, p)
}

pub fn post_ok(inst: &Instance, t: &Term, p: &PointSet) -> Result<PointSet> {
    Ok(post(inst, t, p)?.ok)
}

pub fn post_err(inst: &Instance, t: &Term, p: &PointSet) -> Result<PointSet> {
    Ok(post(inst, t, p)?.err)
}

/// Codomain of `⊤c⟦t⟧` for the `ok` and `err` interpretations.
pub fn top_post(inst: &Instance, t: &Term, c: &PointSet) -> Result<PostPair> {
    if !inst.model.supports(ConcreteKind::ToppCodomains) {
        return Err(Error::semantic("codomain postconditions need a relational model with a top element"));
    }
    post(inst, t, c)
}

/// Number of growing steps of each star fixpoint met while evaluating `t`
/// from `p`; the largest is returned.
pub fn star_stabilization(inst: &Instance, t: &Term, p: &PointSet) -> Result<usize> {
    check_set(inst, p)?;
    fn walk(inst: &Instance, t: &Term, p: &PointSet, worst: &mut usize) -> Result<PointSet> {
        Ok(match t {
            Term::Plus(l, r) => walk(inst, l, p, worst)?.union(&walk(inst, r, p, worst)?),
            Term::Seq(l, r) => {
                let mid = walk(inst, l, p, worst)?;
                walk(inst, r, &mid, worst)?
            }
            Term::Star(b) => {
                let (q, steps) = star_fixpoint(p, |q| walk(inst, b, q, worst))?;
                *worst = (*worst).max(steps);
                q
            }
            _ => eval_pair(inst, t, p)?.ok,
        })
    }
    let mut worst = 0;
    walk(inst, t, p, &mut worst)?;
    Ok(worst)
}

fn abs_pair(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<AbsPair> {
    Ok(match t {
        Term::Atom(x) => {
            let g = d.gamma(a);
            AbsPair {
                ok: d.alpha(&atom_step(inst, &x.name, Component::Ok, g)?),
                err: d.alpha(&atom_step(inst, &x.name, Component::Err, g)?),
            }
        }
        Term::Zero => AbsPair {
            ok: d.bottom(),
            err: d.bottom(),
        },
        Term::One => AbsPair { ok: a, err: d.bottom() },
        Term::Plus(l, r) => {
            let (x, y) = (abs_pair(d, inst, l, a)?, abs_pair(d, inst, r, a)?);
            AbsPair {
                ok: d.join(x.ok, y.ok),
                err: d.join(x.err, y.err),
            }
        }
        Term::Seq(l, r) => {
            let x = abs_pair(d, inst, l, a)?;
            let y = abs_pair(d, inst, r, x.ok)?;
            AbsPair {
                ok: y.ok,
                err: d.join(x.err, y.err),
            }
        }
        Term::Star(body) => {
            let ok = orbit_join(d, a, |x| Ok(abs_pair(d, inst, body, x)?.ok))?;
            let err = abs_pair(d, inst, body, ok)?.err;
            AbsPair { ok, err }
        }
    })
}

/// `⋁ fⁿ(a)`: the orbit of `a` is eventually periodic, so the join stops at
/// the first repeated element.
pub fn orbit_join(d: &GaloisInsertion, a: Abs, mut f: impl FnMut(Abs) -> Result<Abs>) -> Result<Abs> {
    let mut seen = vec![a];
    let mut acc = a;
    let mut x = a;
    loop {
        x = f(x)?;
        if seen.contains(&x) {
            return Ok(acc);
        }
        seen.push(x);
        acc = d.join(acc, x);
    }
}

/// Abstract `(ok, err)` transformer over tests.
pub fn apost(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<AbsPair> {
    d.ensure_compatible(&inst.model, ConcreteKind::Tests)?;
    abs_pair(d, inst, t, a)
}

pub fn apost_ok(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<Abs> {
    Ok(apost(d, inst, t, a)?.ok)
}

pub fn apost_err(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<Abs> {
    Ok(apost(d, inst, t, a)?.err)
}

/// Abstract transformer over topped codomains.
pub fn atop_post(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<AbsPair> {
    d.ensure_compatible(&inst.model, ConcreteKind::ToppCodomains)?;
    abs_pair(d, inst, t, a)
}

/// Abstract transformer matching the domain's own concrete kind.
pub fn abstract_post(d: &GaloisInsertion, inst: &Instance, t: &Term, a: Abs) -> Result<AbsPair> {
    match d.kind() {
        ConcreteKind::Tests => apost(d, inst, t, a),
        ConcreteKind::ToppCodomains => atop_post(d, inst, t, a),
    }
}

/// Concrete transformer matching `kind`.
pub fn concrete_post(inst: &Instance, kind: ConcreteKind, t: &Term, p: &PointSet) -> Result<PostPair> {
    match kind {
        ConcreteKind::Tests => post(inst, t, p),
        ConcreteKind::ToppCodomains => top_post(inst, t, p),
    }
}
