//! Proof trees. Only side data is stored; every conclusion is recomputed
//! from the leaves up.

use super::{Post, System};
use crate::pointset::PointSet;
use crate::semantics::Component;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `[p] a [⦅a⦆p]` for a leaf term (an atom, `0` or `1`).
    Transfer { atom: Term, pre: PointSet },
    /// Enlarges the precondition and shrinks the postcondition within the
    /// closure. A missing precondition keeps the premise's; an empty `post`
    /// keeps every premise component, otherwise only the listed ones remain.
    Relax { pre: Option<PointSet>, post: Post },
    Seq,
    Join,
    Rec,
    Iterate,
    /// `p₀..p_N`; premise `i < N` proves `[pᵢ] t [pᵢ₊₁]` and the last one
    /// proves `[p_N] t [p_k]` for some `k ≤ N`.
    Limit { chain: Vec<PointSet> },
    /// `[p] t [0]` for the listed components (both when `None`).
    Empty { only: Option<Component>, term: Term, pre: PointSet },
    Consequence { pre: Option<PointSet>, post: Post },
    Disj,
    IterateZero { body: Term, pre: PointSet },
    IterateNonZero,
    BackV { chain: Vec<PointSet> },
    /// Widens the premise's term `t` to `t + right` or `left + t`.
    Choice { left: Option<Term>, right: Option<Term> },
    SeqOk,
    SeqErr,
    RecErr,
    Pair,
    ShortCircuit { then: Term },
    SeqNormal,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Transfer { .. } => "transfer",
            Rule::Relax { .. } => "relax",
            Rule::Seq => "seq",
            Rule::Join => "join",
            Rule::Rec => "rec",
            Rule::Iterate => "iterate",
            Rule::Limit { .. } => "limit",
            Rule::Empty { .. } => "empty",
            Rule::Consequence { .. } => "consequence",
            Rule::Disj => "disj",
            Rule::IterateZero { .. } => "iterate-zero",
            Rule::IterateNonZero => "iterate-non-zero",
            Rule::BackV { .. } => "back-v",
            Rule::Choice { .. } => "choice",
            Rule::SeqOk => "seq-ok",
            Rule::SeqErr => "seq-err",
            Rule::RecErr => "rec-err",
            Rule::Pair => "pair",
            Rule::ShortCircuit { .. } => "short-circuit",
            Rule::SeqNormal => "seq-normal",
        }
    }

    /// The number of premises the rule takes.
    pub fn arity(&self) -> usize {
        match self {
            Rule::Transfer { .. } | Rule::Empty { .. } | Rule::IterateZero { .. } => 0,
            Rule::Relax { .. }
            | Rule::Consequence { .. }
            | Rule::Iterate
            | Rule::IterateNonZero
            | Rule::Choice { .. }
            | Rule::ShortCircuit { .. } => 1,
            Rule::Limit { chain } | Rule::BackV { chain } => chain.len(),
            _ => 2,
        }
    }

    pub fn allowed_in(&self, system: System) -> bool {
        use System::*;
        let names: &[&str] = match system {
            Lck | Lctk => &["transfer", "relax", "seq", "join", "rec", "iterate", "limit"],
            Ul => &[
                "transfer",
                "empty",
                "consequence",
                "disj",
                "seq",
                "iterate-zero",
                "iterate-non-zero",
                "back-v",
                "choice",
            ],
            Lcil | Lctil => &["transfer", "relax", "seq-ok", "seq-err", "rec-err", "join", "limit", "pair"],
            Il => &[
                "transfer",
                "empty",
                "consequence",
                "disj",
                "short-circuit",
                "seq-normal",
                "iterate-zero",
                "back-v",
                "iterate-non-zero",
                "choice",
                "pair",
            ],
        };
        names.contains(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: Rule, children: Vec<Derivation>) -> Self {
        Derivation { rule, children }
    }

    pub fn leaf(rule: Rule) -> Self {
        Derivation { rule, children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule.name()];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    pub fn subtree(&self, path: &[usize]) -> Option<&Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i)?.subtree(rest),
        }
    }

    pub fn subtree_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get_mut(i)?.subtree_mut(rest),
        }
    }
}
