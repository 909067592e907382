//! Reference postconditions computed from fully materialized relations.

use super::PostPair;
use crate::error::{Error, Result};
use crate::model::{Element, Instance, Model, Relation};
use crate::pointset::PointSet;
use crate::term::Term;

/// `(⟦t⟧ok, ⟦t⟧err)` as relations, with `⟦t1·t2⟧err = err1 ∪ ok1;err2` and
/// `⟦t*⟧err = ok*;err`.
pub fn materialize(inst: &Instance, t: &Term) -> Result<(Relation, Relation)> {
    let Model::Relational(r) = &inst.model else {
        return Err(Error::semantic("the oracle needs a relational model"));
    };
    let n = r.size();
    Ok(match t {
        Term::Atom(a) => {
            let v = inst.eval.get(&a.name).ok_or_else(|| Error::semantic(format!("atom `{}` is undefined", a.name)))?;
            match (&v.ok, &v.err) {
                (Element::Rel(ok), Element::Rel(err)) => (ok.clone(), err.clone()),
                _ => return Err(Error::semantic(format!("atom `{}` is not a relation", a.name))),
            }
        }
        Term::Zero => (Relation::empty(n), Relation::empty(n)),
        Term::One => (Relation::identity(n), Relation::empty(n)),
        Term::Plus(l, rt) => {
            let (a, b) = (materialize(inst, l)?, materialize(inst, rt)?);
            (a.0.union(&b.0), a.1.union(&b.1))
        }
        Term::Seq(l, rt) => {
            let (a, b) = (materialize(inst, l)?, materialize(inst, rt)?);
            (a.0.compose(&b.0), a.1.union(&a.0.compose(&b.1)))
        }
        Term::Star(b) => {
            let (ok, err) = materialize(inst, b)?;
            let s = ok.star();
            let e = s.compose(&err);
            (s, e)
        }
    })
}

/// Posts read off the materialized relations: `{y | ∃x ∈ p. (x,y) ∈ R}`.
pub fn oracle_post(inst: &Instance, t: &Term, p: &PointSet) -> Result<PostPair> {
    let (ok, err) = materialize(inst, t)?;
    let image = |r: &Relation| {
        let n = r.carrier_size();
        PointSet::from_points(n, (0..n).filter(|&y| p.iter().any(|x| r.contains(x, y))))
    };
    Ok(PostPair {
        ok: image(&ok),
        err: image(&err),
    })
}
