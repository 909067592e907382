//! Triples, validity, derivation checking, proof synthesis and translation
//! between the local-completeness systems and their under-approximate
//! counterparts.

pub mod derivation;
pub mod sexp;
pub mod synth;
pub mod translate;
pub mod triple;
pub mod verify;

use std::fmt;

use crate::domain::GaloisInsertion;
use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Instance};
use crate::pointset::PointSet;
use crate::semantics::{abstract_post, concrete_post, Component};
use crate::term::{pretty_term, Term};

pub use derivation::{Derivation, Rule};
pub use synth::{synthesize, SynthError};
pub use translate::{translate, Direction};
pub use triple::parse_triple;
pub use verify::{conclude, verify};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    Lck,
    Ul,
    Lcil,
    Il,
    Lctk,
    Lctil,
}

impl System {
    pub const ALL: [System; 6] = [System::Lck, System::Ul, System::Lcil, System::Il, System::Lctk, System::Lctil];

    pub fn name(self) -> &'static str {
        match self {
            System::Lck => "lck",
            System::Ul => "ul",
            System::Lcil => "lcil",
            System::Il => "il",
            System::Lctk => "lctk",
            System::Lctil => "lctil",
        }
    }

    pub fn parse(s: &str) -> Option<System> {
        System::ALL.into_iter().find(|sys| sys.name().eq_ignore_ascii_case(s))
    }

    /// Which concrete powerset pre- and postconditions live in.
    pub fn kind(self) -> ConcreteKind {
        match self {
            System::Lctk | System::Lctil => ConcreteKind::ToppCodomains,
            _ => ConcreteKind::Tests,
        }
    }

    /// Systems whose judgments may carry an `err` postcondition.
    pub fn has_err(self) -> bool {
        matches!(self, System::Lcil | System::Il | System::Lctil)
    }

    /// Systems that also demand abstract precision (condition (ii)).
    pub fn is_local(self) -> bool {
        !matches!(self, System::Ul | System::Il)
    }

    /// The components a transfer leaf concludes.
    pub fn transfer_components(self) -> &'static [Component] {
        if self.has_err() {
            &[Component::Ok, Component::Err]
        } else {
            &[Component::Ok]
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A postcondition with an optional `ok` and an optional `err` part.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Post {
    pub ok: Option<PointSet>,
    pub err: Option<PointSet>,
}

impl Post {
    pub fn ok(q: PointSet) -> Self {
        Post { ok: Some(q), err: None }
    }

    pub fn err(r: PointSet) -> Self {
        Post { ok: None, err: Some(r) }
    }

    pub fn pair(q: PointSet, r: PointSet) -> Self {
        Post { ok: Some(q), err: Some(r) }
    }

    pub fn get(&self, c: Component) -> Option<&PointSet> {
        match c {
            Component::Ok => self.ok.as_ref(),
            Component::Err => self.err.as_ref(),
        }
    }

    pub fn set(&mut self, c: Component, v: Option<PointSet>) {
        match c {
            Component::Ok => self.ok = v,
            Component::Err => self.err = v,
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (Component, &PointSet)> {
        self.ok.iter().map(|q| (Component::Ok, q)).chain(self.err.iter().map(|r| (Component::Err, r)))
    }

    pub fn is_empty(&self) -> bool {
        self.ok.is_none() && self.err.is_none()
    }

    /// Keeps only the components present in `shape`.
    pub fn restrict(&self, shape: &Post) -> Post {
        Post {
            ok: self.ok.clone().filter(|_| shape.ok.is_some()),
            err: self.err.clone().filter(|_| shape.err.is_some()),
        }
    }

    /// True when every component of `request` is present here with the same value.
    pub fn matches(&self, request: &Post) -> bool {
        request.components().all(|(c, q)| self.get(c) == Some(q))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub pre: PointSet,
    pub term: Term,
    pub post: Post,
}

impl Judgment {
    pub fn new(pre: PointSet, term: Term, post: Post) -> Self {
        Judgment { pre, term, post }
    }

    pub fn display(&self, inst: &Instance, kind: ConcreteKind) -> String {
        let f = |s: &PointSet| inst.format_set(s, kind);
        let mut out = format!("[{}] {} ", f(&self.pre), pretty_term(&self.term));
        match (&self.post.ok, &self.post.err) {
            (Some(q), None) => out.push_str(&format!("[{}]", f(q))),
            _ => {
                for (c, q) in self.post.components() {
                    out.push_str(&format!("[{c}: {}]", f(q)));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Valid,
    Invalid,
    Accepted,
    Rejected,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Valid => "valid",
            Status::Invalid => "invalid",
            Status::Accepted => "accepted",
            Status::Rejected => "rejected",
        })
    }
}

/// A violated condition, where it was found, and the values involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub condition: String,
    pub path: Vec<usize>,
    pub values: Vec<(String, String)>,
}

impl Failure {
    pub fn new(condition: impl Into<String>, values: Vec<(String, String)>) -> Self {
        Failure {
            condition: condition.into(),
            path: Vec::new(),
            values,
        }
    }

    pub fn at(mut self, path: &[usize]) -> Self {
        self.path = path.to_vec();
        self
    }

    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            "root".to_string()
        } else {
            self.path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}", self.condition)?;
        for (k, v) in &self.values {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn ok(status: Status) -> Self {
        Verdict {
            status,
            failures: Vec::new(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self.status, Status::Valid | Status::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.status)?;
        for fl in &self.failures {
            if self.status == Status::Rejected {
                write!(f, "\nat node {}: {fl}", fl.path_string())?;
            } else {
                write!(f, "\n{fl}")?;
            }
        }
        Ok(())
    }
}

/// Checks the system/domain/model combination and the shape of `j`.
pub(crate) fn check_setting(system: System, d: &GaloisInsertion, inst: &Instance, j: Option<&Judgment>) -> Result<()> {
    if system.is_local() {
        d.ensure_compatible(&inst.model, system.kind())?;
    } else if d.universe() != inst.universe() {
        return Err(Error::semantic("domain and model disagree on the number of points"));
    }
    if !inst.model.supports(system.kind()) {
        return Err(Error::semantic(format!("system {system} needs a model with a top element")));
    }
    if let Some(j) = j {
        if j.post.is_empty() {
            return Err(Error::semantic("a triple needs at least one postcondition"));
        }
        if j.post.err.is_some() && !system.has_err() {
            return Err(Error::semantic(format!("system {system} has no err postconditions")));
        }
        let n = inst.universe();
        if j.pre.universe() != n || j.post.components().any(|(_, q)| q.universe() != n) {
            return Err(Error::semantic("triple values do not belong to the model"));
        }
    }
    Ok(())
}

/// Validity of a triple. Local systems check both the under-approximation
/// (i) and the abstract precision (ii) of each present component;
/// under-approximate systems check (i) only.
pub fn validity(system: System, d: &GaloisInsertion, inst: &Instance, j: &Judgment) -> Result<Verdict> {
    check_setting(system, d, inst, Some(j))?;
    let kind = system.kind();
    let f = |s: &PointSet| inst.format_set(s, kind);
    let concrete = concrete_post(inst, kind, &j.term, &j.pre)?;
    let abs = if system.is_local() {
        Some(abstract_post(d, inst, &j.term, d.alpha(&j.pre))?)
    } else {
        None
    };
    let mut failures = Vec::new();
    for (c, q) in j.post.components() {
        let post = concrete.get(c);
        if !q.is_subset(post) {
            failures.push(Failure::new(
                "(i)",
                vec![("LHS".into(), f(q)), ("RHS".into(), f(post)), ("component".into(), c.to_string())],
            ));
        }
        if let Some(abs) = abs {
            let lhs = abs.get(c);
            let (aq, apost) = (d.alpha(q), d.alpha(post));
            if lhs != aq || aq != apost {
                let (l, r) = if lhs != aq { (lhs, aq) } else { (aq, apost) };
                failures.push(Failure::new(
                    "(ii)",
                    vec![
                        ("LHS".into(), d.name(l).to_string()),
                        ("RHS".into(), d.name(r).to_string()),
                        ("component".into(), c.to_string()),
                        ("apost".into(), d.name(lhs).to_string()),
                        ("alpha(q)".into(), d.name(aq).to_string()),
                        ("alpha(post)".into(), d.name(apost).to_string()),
                    ],
                ));
            }
        }
    }
    Ok(Verdict {
        status: if failures.is_empty() { Status::Valid } else { Status::Invalid },
        failures,
    })
}
