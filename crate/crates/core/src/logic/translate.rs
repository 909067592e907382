//! Moving derivations between a local system and its under-approximate
//! partner (`lck`/`ul`, `lcil`/`il`). Translation is checked against the
//! trivial domain, where every local side condition holds.

use super::synth::{synthesize, SynthError};
use super::{conclude, Derivation, Judgment, Rule, System};
use crate::domain::{trivial_domain, GaloisInsertion};
use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// From `lck`/`lcil` to `ul`/`il`.
    ToUnder,
    /// From `ul`/`il` to `lck`/`lcil`.
    ToLocal,
}

fn target(source: System, dir: Direction) -> Result<System> {
    match (source, dir) {
        (System::Lck, Direction::ToUnder) => Ok(System::Ul),
        (System::Lcil, Direction::ToUnder) => Ok(System::Il),
        (System::Ul, Direction::ToLocal) => Ok(System::Lck),
        (System::Il, Direction::ToLocal) => Ok(System::Lcil),
        (s, d) => Err(Error::semantic(format!("system {s} has no counterpart in direction {d:?}"))),
    }
}

struct Tr<'a> {
    from: System,
    to: System,
    dir: Direction,
    d: GaloisInsertion,
    inst: &'a Instance,
}

impl Tr<'_> {
    fn source_conclusion(&self, dv: &Derivation) -> Result<Judgment> {
        conclude(self.from, &self.d, self.inst, dv)?
            .map_err(|f| Error::semantic(format!("source derivation is rejected at node {}: {f}", f.path_string())))
    }

    fn target_conclusion(&self, dv: &Derivation) -> Result<Judgment> {
        conclude(self.to, &self.d, self.inst, dv)?
            .map_err(|f| Error::semantic(format!("internal: translated derivation rejected at node {}: {f}", f.path_string())))
    }

    fn resynthesize(&self, j: &Judgment) -> Result<Derivation> {
        synthesize(self.to, &self.d, self.inst, j).map_err(|e| match e {
            SynthError::Core(e) => e,
            other => Error::semantic(format!("cannot rebuild [{}]: {other}", j.display(self.inst, self.to.kind()))),
        })
    }

    fn weaken(&self, pre: Option<crate::pointset::PointSet>, post: super::Post) -> Rule {
        match self.dir {
            Direction::ToUnder => Rule::Consequence { pre, post },
            Direction::ToLocal => Rule::Relax { pre, post },
        }
    }

    fn node(&self, dv: &Derivation) -> Result<Derivation> {
        let src = self.source_conclusion(dv)?;
        let kids = || dv.children.iter().map(|c| self.node(c)).collect::<Result<Vec<_>>>();
        let out = match (&dv.rule, self.dir) {
            (Rule::Transfer { .. } | Rule::Pair, _) => Derivation::new(dv.rule.clone(), kids()?),
            (Rule::Seq, _) if self.to != System::Il && self.to != System::Lcil => Derivation::new(Rule::Seq, kids()?),
            (Rule::Relax { pre, post }, Direction::ToUnder) => {
                Derivation::new(Rule::Consequence { pre: pre.clone(), post: post.clone() }, kids()?)
            }
            (Rule::Consequence { pre, post }, Direction::ToLocal) => {
                Derivation::new(Rule::Relax { pre: pre.clone(), post: post.clone() }, kids()?)
            }
            (Rule::Limit { chain }, Direction::ToUnder) => Derivation::new(Rule::BackV { chain: chain.clone() }, kids()?),
            (Rule::BackV { chain }, Direction::ToLocal) => Derivation::new(Rule::Limit { chain: chain.clone() }, kids()?),
            (Rule::Join, Direction::ToUnder) => {
                let (l, r) = (&dv.children[0], &dv.children[1]);
                let (t1, t2) = (self.source_conclusion(l)?.term, self.source_conclusion(r)?.term);
                let mut k = kids()?.into_iter();
                let (d1, d2) = (k.next().expect("two premises"), k.next().expect("two premises"));
                Derivation::new(
                    Rule::Disj,
                    vec![
                        Derivation::new(Rule::Choice { left: None, right: Some(t2) }, vec![d1]),
                        Derivation::new(Rule::Choice { left: Some(t1), right: None }, vec![d2]),
                    ],
                )
            }
            (Rule::SeqOk, Direction::ToUnder) => Derivation::new(Rule::SeqNormal, kids()?),
            (Rule::SeqErr, Direction::ToUnder) => {
                let t2 = self.source_conclusion(&dv.children[1])?.term;
                let mut k = kids()?.into_iter();
                let (d1, d2) = (k.next().expect("two premises"), k.next().expect("two premises"));
                Derivation::new(
                    Rule::Disj,
                    vec![
                        Derivation::new(Rule::SeqNormal, vec![d1.clone(), d2]),
                        Derivation::new(Rule::ShortCircuit { then: t2 }, vec![d1]),
                    ],
                )
            }
            (Rule::RecErr, Direction::ToUnder) => {
                Derivation::new(Rule::IterateNonZero, vec![Derivation::new(Rule::SeqNormal, kids()?)])
            }
            _ => self.resynthesize(&src)?,
        };
        let got = self.target_conclusion(&out)?;
        if got == src {
            return Ok(out);
        }
        let pre = (got.pre != src.pre).then(|| src.pre.clone());
        Ok(Derivation::new(self.weaken(pre, src.post.clone()), vec![out]))
    }
}

/// Translates a derivation of `source` into its partner system. The input
/// must be accepted by `source` over the trivial domain; the result has the
/// same conclusion.
pub fn translate(source: System, dir: Direction, inst: &Instance, dv: &Derivation) -> Result<Derivation> {
    let to = target(source, dir)?;
    let tr = Tr {
        from: source,
        to,
        dir,
        d: trivial_domain(&inst.model, source.kind()),
        inst,
    };
    tr.node(dv)
}
