//! Local and global completeness of transformers with respect to a domain.

use super::{atom_step, concrete_post, Component};
use crate::domain::GaloisInsertion;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::pointset::PointSet;
use crate::term::Term;

#[derive(Clone, Copy, Debug)]
pub enum Transformer<'a> {
    Atom(&'a str, Component),
    Term(&'a Term, Component),
}

/// Both sides of `A(f(p)) = A(f(A(p)))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCompleteness {
    pub holds: bool,
    pub direct: PointSet,
    pub through_closure: PointSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incompleteness {
    pub component: Component,
    pub input: PointSet,
    pub direct: PointSet,
    pub through_closure: PointSet,
}

fn apply(d: &GaloisInsertion, inst: &Instance, f: Transformer<'_>, p: &PointSet) -> Result<PointSet> {
    match f {
        Transformer::Atom(name, c) => atom_step(inst, name, c, p),
        Transformer::Term(t, c) => Ok(concrete_post(inst, d.kind(), t, p)?.get(c).clone()),
    }
}

pub fn local_complete(d: &GaloisInsertion, inst: &Instance, f: Transformer<'_>, p: &PointSet) -> Result<LocalCompleteness> {
    d.ensure_compatible(&inst.model, d.kind())?;
    let direct = d.closure(&apply(d, inst, f, p)?);
    let through_closure = d.closure(&apply(d, inst, f, &d.closure(p))?);
    Ok(LocalCompleteness {
        holds: direct == through_closure,
        direct,
        through_closure,
    })
}

/// Largest concrete lattice enumerated by [`global_complete`].
pub const MAX_GLOBAL_POINTS: usize = 20;

/// Local completeness of both components of an atom at every concrete
/// element; the first failure is returned.
pub fn global_complete(d: &GaloisInsertion, inst: &Instance, atom: &str) -> Result<Option<Incompleteness>> {
    global_complete_for(d, inst, atom, &[Component::Ok, Component::Err])
}

/// [`global_complete`] restricted to the given components.
pub fn global_complete_for(
    d: &GaloisInsertion,
    inst: &Instance,
    atom: &str,
    components: &[Component],
) -> Result<Option<Incompleteness>> {
    d.ensure_compatible(&inst.model, d.kind())?;
    if !inst.eval.contains(atom) {
        return Err(Error::semantic(format!("atom `{atom}` has no value in the model")));
    }
    if d.is_trivial() {
        return Ok(None);
    }
    let n = inst.universe();
    if n > MAX_GLOBAL_POINTS {
        return Err(Error::semantic(format!(
            "global completeness enumerates 2^{n} elements; at most 2^{MAX_GLOBAL_POINTS} are supported"
        )));
    }
    for &component in components {
        for p in PointSet::all(n) {
            let lc = local_complete(d, inst, Transformer::Atom(atom, component), &p)?;
            if !lc.holds {
                return Ok(Some(Incompleteness {
                    component,
                    input: p,
                    direct: lc.direct,
                    through_closure: lc.through_closure,
                }));
            }
        }
    }
    Ok(None)
}
