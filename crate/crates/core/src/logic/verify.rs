//! Bottom-up checking of derivations.

use super::{check_setting, Derivation, Failure, Judgment, Post, Rule, Status, System, Verdict};
use crate::domain::GaloisInsertion;
use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Instance, Relation};
use crate::pointset::PointSet;
use crate::semantics::{concrete_post, local_complete, Component, Transformer};
use crate::term::{pretty_term, Term};

type Step = std::result::Result<Judgment, Failure>;

struct Checker<'a> {
    system: System,
    d: &'a GaloisInsertion,
    inst: &'a Instance,
    kind: ConcreteKind,
}

fn expect(ok: bool, f: impl FnOnce() -> Failure) -> std::result::Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(f())
    }
}

impl Checker<'_> {
    fn set(&self, s: &PointSet) -> String {
        self.inst.format_set(s, self.kind)
    }

    fn fail(&self, condition: &str, values: &[(&str, &PointSet)]) -> Failure {
        Failure::new(condition, values.iter().map(|(k, v)| (k.to_string(), self.set(v))).collect())
    }

    fn term_fail(&self, condition: &str, found: &Term, expected: &str) -> Failure {
        Failure::new(
            condition,
            vec![("found".into(), pretty_term(found)), ("expected".into(), expected.to_string())],
        )
    }

    fn closure(&self, p: &PointSet) -> PointSet {
        self.d.closure(p)
    }

    fn component<'j>(&self, rule: &str, j: &'j Judgment, c: Component) -> std::result::Result<&'j PointSet, Failure> {
        j.post
            .get(c)
            .ok_or_else(|| Failure::new(format!("{rule}: premise has no {c} postcondition"), vec![]))
    }

    fn same_pre(&self, rule: &str, a: &PointSet, b: &PointSet) -> std::result::Result<(), Failure> {
        expect(a == b, || self.fail(&format!("{rule}: preconditions differ"), &[("left", a), ("right", b)]))
    }

    fn same_term(&self, rule: &str, a: &Term, b: &Term) -> std::result::Result<(), Failure> {
        expect(a == b, || self.term_fail(&format!("{rule}: premise terms differ"), b, &pretty_term(a)))
    }

    fn node(&self, dv: &Derivation, path: &mut Vec<usize>) -> Result<Step> {
        let where_ = || if path.is_empty() { "root".to_string() } else { path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".") };
        if !dv.rule.allowed_in(self.system) {
            return Err(Error::semantic(format!(
                "rule ({}) is not part of {} (node {})",
                dv.rule.name(),
                self.system,
                where_()
            )));
        }
        if dv.children.len() != dv.rule.arity() {
            return Err(Error::semantic(format!(
                "rule ({}) takes {} premises but has {} (node {})",
                dv.rule.name(),
                dv.rule.arity(),
                dv.children.len(),
                where_()
            )));
        }
        let mut premises = Vec::with_capacity(dv.children.len());
        for (i, child) in dv.children.iter().enumerate() {
            path.push(i);
            let r = self.node(child, path)?;
            path.pop();
            match r {
                Ok(j) => premises.push(j),
                Err(f) => return Ok(Err(f)),
            }
        }
        Ok(self.rule(&dv.rule, premises).map_err(|f| f.at(path)))
    }

    fn check_values(&self, sets: &[&PointSet]) -> Result<()> {
        let n = self.inst.universe();
        if sets.iter().any(|s| s.universe() != n) {
            return Err(Error::semantic("derivation values do not belong to the model"));
        }
        Ok(())
    }

    fn rule(&self, rule: &Rule, prem: Vec<Judgment>) -> Step {
        let n = self.inst.universe();
        let local = self.system.is_local();
        match rule {
            Rule::Transfer { atom, pre } => {
                expect(atom.is_leaf(), || self.term_fail("transfer: term is not an atom", atom, "an atom, 0 or 1"))?;
                let post = concrete_post(self.inst, self.kind, atom, pre)
                    .map_err(|e| Failure::new(format!("transfer: {e}"), vec![]))?;
                let mut out = Post::default();
                for &c in self.system.transfer_components() {
                    if local {
                        let f = match atom {
                            Term::Atom(a) => Transformer::Atom(&a.name, c),
                            other => Transformer::Term(other, c),
                        };
                        let lc = local_complete(self.d, self.inst, f, pre)
                            .map_err(|e| Failure::new(format!("transfer: {e}"), vec![]))?;
                        expect(lc.holds, || {
                            self.fail(
                                &format!("transfer: local completeness ({c})"),
                                &[("pre", pre), ("A(f(p))", &lc.direct), ("A(f(A(p)))", &lc.through_closure)],
                            )
                        })?;
                    }
                    out.set(c, Some(post.get(c).clone()));
                }
                Ok(Judgment::new(pre.clone(), atom.clone(), out))
            }
            Rule::Relax { pre, post } | Rule::Consequence { pre, post } => {
                let name = rule.name();
                let j = &prem[0];
                let p = pre.clone().unwrap_or_else(|| j.pre.clone());
                expect(j.pre.is_subset(&p), || self.fail(&format!("{name}: p' <= p"), &[("p'", &j.pre), ("p", &p)]))?;
                if local {
                    let ap = self.closure(&j.pre);
                    expect(p.is_subset(&ap), || self.fail("relax: p <= A(p')", &[("p", &p), ("A(p')", &ap)]))?;
                }
                let mut out = Post::default();
                for c in [Component::Ok, Component::Err] {
                    let explicit = post.get(c);
                    if explicit.is_none() && !post.is_empty() {
                        continue;
                    }
                    let Some(qp) = j.post.get(c) else {
                        if explicit.is_some() {
                            return Err(Failure::new(format!("{name}: premise has no {c} postcondition"), vec![]));
                        }
                        continue;
                    };
                    let q = explicit.cloned().unwrap_or_else(|| qp.clone());
                    expect(q.is_subset(qp), || self.fail(&format!("{name}: q <= q' ({c})"), &[("q", &q), ("q'", qp)]))?;
                    if local {
                        let aq = self.closure(&q);
                        expect(qp.is_subset(&aq), || {
                            self.fail(&format!("relax: q' <= A(q) ({c})"), &[("q'", qp), ("A(q)", &aq)])
                        })?;
                    }
                    out.set(c, Some(q));
                }
                Ok(Judgment::new(p, j.term.clone(), out))
            }
            Rule::Seq | Rule::SeqOk => {
                let name = rule.name();
                let (a, b) = (&prem[0], &prem[1]);
                let r = self.component(name, a, Component::Ok)?;
                expect(r == &b.pre, || self.fail(&format!("{name}: middle conditions differ"), &[("r", r), ("pre2", &b.pre)]))?;
                let q = self.component(name, b, Component::Ok)?;
                Ok(Judgment::new(a.pre.clone(), Term::seq(a.term.clone(), b.term.clone()), Post::ok(q.clone())))
            }
            Rule::SeqNormal => {
                let (a, b) = (&prem[0], &prem[1]);
                let r = self.component("seq-normal", a, Component::Ok)?;
                expect(r == &b.pre, || self.fail("seq-normal: middle conditions differ", &[("r", r), ("pre2", &b.pre)]))?;
                Ok(Judgment::new(a.pre.clone(), Term::seq(a.term.clone(), b.term.clone()), b.post.clone()))
            }
            Rule::Join | Rule::Disj => {
                let name = rule.name();
                let (a, b) = (&prem[0], &prem[1]);
                let (pre, term) = if matches!(rule, Rule::Join) {
                    self.same_pre(name, &a.pre, &b.pre)?;
                    (a.pre.clone(), Term::plus(a.term.clone(), b.term.clone()))
                } else {
                    self.same_term(name, &a.term, &b.term)?;
                    (a.pre.union(&b.pre), a.term.clone())
                };
                let mut out = Post::default();
                for c in [Component::Ok, Component::Err] {
                    if let (Some(x), Some(y)) = (a.post.get(c), b.post.get(c)) {
                        out.set(c, Some(x.union(y)));
                    }
                }
                expect(!out.is_empty(), || Failure::new(format!("{name}: premises share no postcondition component"), vec![]))?;
                Ok(Judgment::new(pre, term, out))
            }
            Rule::Rec => {
                let (a, b) = (&prem[0], &prem[1]);
                let r = self.component("rec", a, Component::Ok)?;
                let star = Term::star(a.term.clone());
                self.same_term("rec", &star, &b.term)?;
                let pr = a.pre.union(r);
                expect(b.pre == pr, || self.fail("rec: second premise must start from p + r", &[("found", &b.pre), ("p + r", &pr)]))?;
                let q = self.component("rec", b, Component::Ok)?;
                Ok(Judgment::new(a.pre.clone(), star, Post::ok(q.clone())))
            }
            Rule::Iterate => {
                let a = &prem[0];
                let q = self.component("iterate", a, Component::Ok)?;
                let ap = self.closure(&a.pre);
                expect(q.is_subset(&ap), || self.fail("iterate: q <= A(p)", &[("q", q), ("A(p)", &ap)]))?;
                Ok(Judgment::new(a.pre.clone(), Term::star(a.term.clone()), Post::ok(a.pre.union(q))))
            }
            Rule::Limit { chain } | Rule::BackV { chain } => {
                let name = rule.name();
                let last = chain.len() - 1;
                let term = prem[0].term.clone();
                for (i, j) in prem.iter().enumerate() {
                    self.same_term(name, &term, &j.term)?;
                    expect(j.pre == chain[i], || {
                        self.fail(&format!("{name}: premise {i} must start from p{i}"), &[("found", &j.pre), ("expected", &chain[i])])
                    })?;
                    let q = self.component(name, j, Component::Ok)?;
                    if i < last {
                        expect(q == &chain[i + 1], || {
                            self.fail(&format!("{name}: premise {i} must reach p{}", i + 1), &[("found", q), ("expected", &chain[i + 1])])
                        })?;
                    } else {
                        expect(chain.contains(q), || {
                            self.fail(&format!("{name}: last premise must return into the chain"), &[("found", q)])
                        })?;
                    }
                }
                let join = chain.iter().fold(PointSet::empty(n), |acc, p| acc.union(p));
                if self.kind == ConcreteKind::ToppCodomains {
                    let top = Relation::top(n);
                    let whole = top.compose(&Relation::test(&join)).codomain();
                    let parts = chain
                        .iter()
                        .fold(PointSet::empty(n), |acc, p| acc.union(&top.compose(&Relation::test(p)).codomain()));
                    expect(whole == parts, || self.fail("limit: top does not distribute over the chain", &[("whole", &whole), ("parts", &parts)]))?;
                }
                Ok(Judgment::new(chain[0].clone(), Term::star(term), Post::ok(join)))
            }
            Rule::Empty { only, term, pre } => {
                let mut out = Post::default();
                for c in [Component::Ok, Component::Err] {
                    if only.map_or(true, |o| o == c) && (c == Component::Ok || self.system.has_err()) {
                        out.set(c, Some(PointSet::empty(n)));
                    }
                }
                expect(!out.is_empty(), || Failure::new("empty: system has no err postconditions", vec![]))?;
                Ok(Judgment::new(pre.clone(), term.clone(), out))
            }
            Rule::IterateZero { body, pre } => Ok(Judgment::new(pre.clone(), Term::star(body.clone()), Post::ok(pre.clone()))),
            Rule::IterateNonZero => {
                let a = &prem[0];
                match &a.term {
                    Term::Seq(l, r) if matches!(&**l, Term::Star(b) if **b == **r) => {
                        Ok(Judgment::new(a.pre.clone(), (**l).clone(), a.post.clone()))
                    }
                    other => Err(self.term_fail("iterate-non-zero: premise term must be t* ; t", other, "t* ; t")),
                }
            }
            Rule::Choice { left, right } => {
                let a = &prem[0];
                let term = match (left, right) {
                    (None, Some(t2)) => Term::plus(a.term.clone(), t2.clone()),
                    (Some(t1), None) => Term::plus(t1.clone(), a.term.clone()),
                    _ => return Err(Failure::new("choice: exactly one of :left and :right is required", vec![])),
                };
                Ok(Judgment::new(a.pre.clone(), term, a.post.clone()))
            }
            Rule::SeqErr => {
                let (a, b) = (&prem[0], &prem[1]);
                let q = self.component("seq-err", a, Component::Ok)?;
                let r = self.component("seq-err", a, Component::Err)?;
                expect(q == &b.pre, || self.fail("seq-err: middle conditions differ", &[("q", q), ("pre2", &b.pre)]))?;
                let s = self.component("seq-err", b, Component::Err)?;
                Ok(Judgment::new(a.pre.clone(), Term::seq(a.term.clone(), b.term.clone()), Post::err(r.union(s))))
            }
            Rule::RecErr => {
                let (a, b) = (&prem[0], &prem[1]);
                let q = self.component("rec-err", a, Component::Ok)?;
                let star = Term::star(b.term.clone());
                self.same_term("rec-err", &star, &a.term)?;
                expect(q == &b.pre, || self.fail("rec-err: middle conditions differ", &[("q", q), ("pre2", &b.pre)]))?;
                let r = self.component("rec-err", b, Component::Err)?;
                Ok(Judgment::new(a.pre.clone(), star, Post::err(r.clone())))
            }
            Rule::Pair => {
                let (a, b) = (&prem[0], &prem[1]);
                self.same_pre("pair", &a.pre, &b.pre)?;
                self.same_term("pair", &a.term, &b.term)?;
                let q = self.component("pair", a, Component::Ok)?;
                let r = self.component("pair", b, Component::Err)?;
                Ok(Judgment::new(a.pre.clone(), a.term.clone(), Post::pair(q.clone(), r.clone())))
            }
            Rule::ShortCircuit { then } => {
                let a = &prem[0];
                let q = self.component("short-circuit", a, Component::Err)?;
                Ok(Judgment::new(a.pre.clone(), Term::seq(a.term.clone(), then.clone()), Post::err(q.clone())))
            }
        }
    }
}

fn collect_values<'a>(dv: &'a Derivation, out: &mut Vec<&'a PointSet>) {
    match &dv.rule {
        Rule::Transfer { pre, .. } | Rule::Empty { pre, .. } | Rule::IterateZero { pre, .. } => out.push(pre),
        Rule::Relax { pre, post } | Rule::Consequence { pre, post } => {
            out.extend(pre.iter());
            out.extend(post.components().map(|(_, q)| q));
        }
        Rule::Limit { chain } | Rule::BackV { chain } => out.extend(chain.iter()),
        _ => {}
    }
    for c in &dv.children {
        collect_values(c, out);
    }
}

/// The conclusion of a derivation, or the first violated side condition
/// (children are checked left to right before their parent).
pub fn conclude(system: System, d: &GaloisInsertion, inst: &Instance, dv: &Derivation) -> Result<Step> {
    check_setting(system, d, inst, None)?;
    let ck = Checker {
        system,
        d,
        inst,
        kind: system.kind(),
    };
    let mut values = Vec::new();
    collect_values(dv, &mut values);
    ck.check_values(&values)?;
    if let Rule::Limit { chain } | Rule::BackV { chain } = &dv.rule {
        if chain.is_empty() {
            return Err(Error::semantic("a limit chain needs at least one element"));
        }
    }
    ck.node(dv, &mut Vec::new())
}

pub fn verify(system: System, d: &GaloisInsertion, inst: &Instance, dv: &Derivation) -> Result<Verdict> {
    Ok(match conclude(system, d, inst, dv)? {
        Ok(_) => Verdict::ok(Status::Accepted),
        Err(f) => Verdict {
            status: Status::Rejected,
            failures: vec![f],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{interval_domain, sign_domain};
    use crate::logic::sexp::parse_derivation;
    use crate::model::file::parse_model_file;

    fn codomain_inst() -> Instance {
        parse_model_file("model relational\ncarrier -8 8\ntest geq0 ok ge 0\ntest lt0 ok lt 0\naction inc ok succ\n").unwrap()
    }

    #[test]
    fn hand_derivation_in_codomains() {
        let i = codomain_inst();
        let d = sign_domain(&i.model, ConcreteKind::ToppCodomains).unwrap();
        let src = "(seq (iterate (seq (transfer geq0 top{0,8}) (transfer inc top{0,8}))) (transfer lt0 top{0,1,8}))";
        let dv = parse_derivation(&i, System::Lctk, src).unwrap();
        let j = conclude(System::Lctk, &d, &i, &dv).unwrap().unwrap();
        assert_eq!(j.display(&i, ConcreteKind::ToppCodomains), "[top{0,8}] (geq0 ; inc)* ; lt0 [top{}]");
        assert_eq!(verify(System::Lctk, &d, &i, &dv).unwrap().status, Status::Accepted);
    }

    #[test]
    fn rejections_carry_paths() {
        let i = codomain_inst();
        let d = sign_domain(&i.model, ConcreteKind::ToppCodomains).unwrap();
        let dv = parse_derivation(&i, System::Lctk, "(seq (transfer geq0 top{0}) (transfer inc top{1}))").unwrap();
        let v = verify(System::Lctk, &d, &i, &dv).unwrap();
        assert_eq!(v.status, Status::Rejected);
        assert!(v.failures[0].path.is_empty());
        assert!(v.failures[0].condition.starts_with("seq"), "{}", v.failures[0]);

        // inc is incomplete at {-8}: the closure adds 0 to the result.
        let bad = parse_derivation(&i, System::Lctk, "(relax :ok top{} (transfer inc top{-8}))").unwrap();
        let v = verify(System::Lctk, &d, &i, &bad).unwrap();
        assert_eq!(v.failures[0].path, vec![0]);
        assert_eq!(v.failures[0].condition, "transfer: local completeness (ok)");
    }

    #[test]
    fn malformed_trees_are_errors() {
        let i = parse_model_file("model relational\ncarrier 0 4\naction inc ok succ-sat\n").unwrap();
        let d = interval_domain(&i.model, ConcreteKind::Tests).unwrap();
        let dv = parse_derivation(&i, System::Lck, "(seq (transfer inc {0}) (empty inc {1}))").unwrap();
        let e = verify(System::Lck, &d, &i, &dv).unwrap_err();
        assert!(e.to_string().contains("node 1"), "{e}");
        let ok = parse_derivation(&i, System::Lck, "(relax :pre {0,1,2} :ok {1,3} (transfer inc {0,2}))").unwrap();
        let v = verify(System::Lck, &d, &i, &ok).unwrap();
        assert!(v.is_pass(), "{v}");
        let too_wide = parse_derivation(&i, System::Lck, "(relax :pre {0,2,4} (transfer inc {0,2}))").unwrap();
        let v = verify(System::Lck, &d, &i, &too_wide).unwrap();
        assert_eq!(v.failures[0].condition, "relax: p <= A(p')");
    }
}
