//! Canonical derivations for valid triples over globally complete atoms.

use thiserror::Error;

use super::translate::{translate, Direction};
use super::{validity, Derivation, Judgment, Rule, System, Verdict};
use crate::domain::{trivial_domain, GaloisInsertion};
use crate::error::Error as CoreError;
use crate::model::{ConcreteKind, Instance};
use crate::pointset::PointSet;
use crate::semantics::{concrete_post, global_complete_for, Component};
use crate::term::{atoms_of, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("the triple is not valid: {0}")]
    Invalid(Verdict),
    #[error("atom `{atom}` is not globally complete ({component} fails at {witness})")]
    Incomplete {
        atom: String,
        component: Component,
        witness: String,
    },
    #[error("the iteration chain exceeds {bound} elements")]
    ChainBound { bound: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}

struct Builder<'a> {
    system: System,
    inst: &'a Instance,
    kind: ConcreteKind,
    bound: usize,
}

impl Builder<'_> {
    fn ok_post(&self, t: &Term, p: &PointSet) -> Result<PointSet, SynthError> {
        Ok(concrete_post(self.inst, self.kind, t, p)?.ok)
    }

    /// A derivation of `[p] t [exact post]` using only the rules of the
    /// local systems.
    fn canon(&self, t: &Term, p: &PointSet) -> Result<Derivation, SynthError> {
        let err = self.system.has_err();
        Ok(match t {
            Term::Atom(_) | Term::Zero | Term::One => Derivation::leaf(Rule::Transfer {
                atom: t.clone(),
                pre: p.clone(),
            }),
            Term::Plus(a, b) => Derivation::new(Rule::Join, vec![self.canon(a, p)?, self.canon(b, p)?]),
            Term::Seq(a, b) => {
                let d1 = self.canon(a, p)?;
                let mid = self.ok_post(a, p)?;
                let d2 = self.canon(b, &mid)?;
                if err {
                    Derivation::new(
                        Rule::Pair,
                        vec![
                            Derivation::new(Rule::SeqOk, vec![d1.clone(), d2.clone()]),
                            Derivation::new(Rule::SeqErr, vec![d1, d2]),
                        ],
                    )
                } else {
                    Derivation::new(Rule::Seq, vec![d1, d2])
                }
            }
            Term::Star(body) => {
                let mut chain = vec![p.clone()];
                loop {
                    let next = self.ok_post(body, chain.last().expect("chain is never empty"))?;
                    if chain.contains(&next) {
                        break;
                    }
                    if chain.len() >= self.bound {
                        return Err(SynthError::ChainBound { bound: self.bound });
                    }
                    chain.push(next);
                }
                let children = chain.iter().map(|pi| self.canon(body, pi)).collect::<Result<Vec<_>, _>>()?;
                let join = chain.iter().fold(PointSet::empty(p.universe()), |acc, q| acc.union(q));
                let limit = Derivation::new(Rule::Limit { chain }, children);
                if err {
                    let e = self.canon(body, &join)?;
                    Derivation::new(Rule::Pair, vec![limit.clone(), Derivation::new(Rule::RecErr, vec![limit, e])])
                } else {
                    limit
                }
            }
        })
    }
}

fn local_counterpart(system: System) -> System {
    match system {
        System::Ul => System::Lck,
        System::Il => System::Lcil,
        s => s,
    }
}

/// Builds a derivation of `j` in `system`. The triple must be valid and,
/// for the local systems, every atom of its term globally complete in `d`.
pub fn synthesize(system: System, d: &GaloisInsertion, inst: &Instance, j: &Judgment) -> Result<Derivation, SynthError> {
    let v = validity(system, d, inst, j)?;
    if !v.is_pass() {
        return Err(SynthError::Invalid(v));
    }
    let local = local_counterpart(system);
    let kind = system.kind();
    let trivial;
    let dom = if system.is_local() {
        let comps = local.transfer_components();
        for a in atoms_of(&j.term) {
            if let Some(w) = global_complete_for(d, inst, &a.name, comps)? {
                return Err(SynthError::Incomplete {
                    atom: a.name.clone(),
                    component: w.component,
                    witness: inst.format_set(&w.input, kind),
                });
            }
        }
        d
    } else {
        trivial = trivial_domain(&inst.model, kind);
        &trivial
    };
    let n = inst.universe();
    let b = Builder {
        system: local,
        inst,
        kind,
        bound: if n >= usize::BITS as usize { usize::MAX } else { 1usize << n },
    };
    let mut dv = b.canon(&j.term, &j.pre)?;
    if !system.is_local() {
        dv = translate(local, Direction::ToUnder, inst, &dv)?;
    }
    let concl = match super::conclude(system, dom, inst, &dv)? {
        Ok(c) => c,
        Err(f) => {
            return Err(CoreError::semantic(format!("internal: canonical derivation rejected at {}: {f}", f.path_string())).into())
        }
    };
    if concl.post != j.post {
        let post = j.post.clone();
        let rule = if system.is_local() { Rule::Relax { pre: None, post } } else { Rule::Consequence { pre: None, post } };
        dv = Derivation::new(rule, vec![dv]);
    }
    Ok(dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{interval_domain, parity_domain, sign_domain};
    use crate::logic::{parse_triple, verify, Status};
    use crate::model::file::parse_model_file;

    #[test]
    fn kat_and_error_systems() {
        let i = parse_model_file("model relational\ncarrier 0 11\naction inc ok succ-sat\naction error ok empty err full\n").unwrap();
        let d = interval_domain(&i.model, ConcreteKind::Tests).unwrap();
        let j = parse_triple(&i, System::Lck, "[{0,2}] inc* [{0..11}]").unwrap();
        let dv = synthesize(System::Lck, &d, &i, &j).unwrap();
        assert_eq!(verify(System::Lck, &d, &i, &dv).unwrap().status, Status::Accepted);
        let Rule::Limit { chain } = &dv.rule else { panic!("{:?}", dv.rule) };
        assert_eq!(chain.len(), 12);

        let e = parse_triple(&i, System::Lcil, "[{0,2}] (inc+error)* [ok: {0..11}][err: {0..11}]").unwrap();
        let de = synthesize(System::Lcil, &d, &i, &e).unwrap();
        assert!(verify(System::Lcil, &d, &i, &de).unwrap().is_pass());
        for sys in [System::Ul, System::Il] {
            let u = parse_triple(&i, sys, "[{0,2}] inc;inc* [{3,5}]").unwrap();
            let du = synthesize(sys, &d, &i, &u).unwrap();
            assert!(verify(sys, &d, &i, &du).unwrap().is_pass());
            assert_eq!(crate::logic::conclude(sys, &d, &i, &du).unwrap().unwrap(), u);
        }
    }

    #[test]
    fn preconditions() {
        let i = parse_model_file("model guarded-strings b1 b2\naction u\n").unwrap();
        let d = parity_domain(&i.model).unwrap();
        let bad = parse_triple(&i, System::Lck, "[{-+}] b1 [{++}]").unwrap();
        assert!(matches!(synthesize(System::Lck, &d, &i, &bad), Err(SynthError::Invalid(_))));
        let inc = parse_triple(&i, System::Lck, "[{++,--}] b1 [{++}]").unwrap();
        match synthesize(System::Lck, &d, &i, &inc) {
            Err(SynthError::Incomplete { atom, .. }) => assert_eq!(atom, "b1"),
            other => panic!("{other:?}"),
        }
        let ok = parse_triple(&i, System::Lck, "[{++,--}] (u;b1)* [{++,+-,--}]").unwrap();
        let dv = synthesize(System::Lck, &d, &i, &ok);
        assert!(matches!(dv, Err(SynthError::Incomplete { .. })));
    }

    #[test]
    fn codomains() {
        let i = parse_model_file("model relational\ncarrier -8 8\ntest geq0 ok ge 0\ntest lt0 ok lt 0\naction inc ok succ\n").unwrap();
        let d = sign_domain(&i.model, ConcreteKind::ToppCodomains).unwrap();
        let j = parse_triple(&i, System::Lctk, "[top{0,8}] (geq0;inc)*;lt0 [top{}]").unwrap();
        // `inc` is partial at the top of the carrier, so sign is not
        // globally complete for it.
        match synthesize(System::Lctk, &d, &i, &j) {
            Err(SynthError::Incomplete { atom, .. }) => assert_eq!(atom, "inc"),
            other => panic!("{other:?}"),
        }
        let t = crate::domain::trivial_domain(&i.model, ConcreteKind::ToppCodomains);
        let dv = synthesize(System::Lctk, &t, &i, &j).unwrap();
        assert!(verify(System::Lctk, &t, &i, &dv).unwrap().is_pass());
    }
}
