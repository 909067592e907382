//! Triple syntax: `[PRE] TERM [Q]`, `[PRE] TERM [ok: Q][err: R]`, or either
//! half of the latter. A bare `[Q]` is the `ok` postcondition.

use super::{Judgment, Post, System};
use crate::error::{Error, Result};
use crate::model::Instance;

pub fn parse_triple(inst: &Instance, system: System, src: &str) -> Result<Judgment> {
    let kind = system.kind();
    let s = src.trim();
    let body = s
        .strip_prefix('[')
        .ok_or_else(|| Error::syntax(format!("triple `{s}` must start with `[`")))?;
    let close = body.find(']').ok_or_else(|| Error::syntax("unclosed precondition"))?;
    let pre = inst.parse_set(&body[..close], kind)?;
    let mut rest = body[close + 1..].trim_end();

    let mut groups = Vec::new();
    while let Some(stripped) = rest.strip_suffix(']') {
        let open = stripped.rfind('[').ok_or_else(|| Error::syntax("unbalanced `]` in postcondition"))?;
        groups.push(stripped[open + 1..].trim().to_string());
        rest = stripped[..open].trim_end();
    }
    if groups.is_empty() {
        return Err(Error::syntax("missing postcondition `[..]`"));
    }
    groups.reverse();
    let term_src = rest.trim();
    if term_src.is_empty() {
        return Err(Error::syntax("missing term between pre- and postcondition"));
    }
    let term = inst.parse_term(term_src)?;

    let mut post = Post::default();
    let bare = groups.len() == 1 && !groups[0].contains(':');
    for g in &groups {
        let (label, value) = match g.split_once(':') {
            Some((l, v)) => (l.trim(), v.trim()),
            None if bare => ("ok", g.as_str()),
            None => return Err(Error::syntax(format!("postcondition `[{g}]` needs an `ok:` or `err:` label"))),
        };
        let set = inst.parse_set(value, kind)?;
        let slot = match label {
            "ok" => &mut post.ok,
            "err" => &mut post.err,
            other => return Err(Error::syntax(format!("unknown postcondition label `{other}`"))),
        };
        if slot.replace(set).is_some() {
            return Err(Error::syntax(format!("duplicate `{label}` postcondition")));
        }
    }
    if post.err.is_some() && !system.has_err() {
        return Err(Error::semantic(format!("system {system} has no err postconditions")));
    }
    Ok(Judgment::new(pre, term, post))
}
