//! S-expression syntax for derivations.
//!
//! ```text
//! (seq (transfer a {0}) (relax :post {2} (transfer b {1})))
//! (limit :chain [{0} {1}] (transfer inc {0}) (transfer inc {1}))
//! ```
//!
//! Terms are bare symbols for atoms, `0` and `1`, or double-quoted strings in
//! the usual term syntax. `;` outside a string starts a comment.

use super::{Derivation, Post, Rule, System};
use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Instance};
use crate::pointset::PointSet;
use crate::semantics::Component;
use crate::term::{pretty_term, Term};

#[derive(Clone, Debug, PartialEq)]
enum Sx {
    List,
    Vector,
    Sym(String),
    Str(String),
    Set(String),
    Kw(String),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

struct Reader {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Reader {
    fn new(src: &str) -> Self {
        Reader {
            chars: src.chars().collect(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> Error {
        Error::syntax(msg).at(pos)
    }

    /// Reads one token that is not a bracketed form.
    fn read(&mut self) -> Result<(Sx, Pos)> {
        self.skip_ws();
        let pos = self.pos();
        let c = self.peek().ok_or_else(|| self.err(pos, "unexpected end of input"))?;
        match c {
            ')' | ']' => Err(self.err(pos, format!("unexpected `{c}`"))),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(pos, "unterminated string")),
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                Ok((Sx::Str(s), pos))
            }
            '{' => Ok((Sx::Set(self.read_set(pos, String::new())?), pos)),
            _ => {
                let mut s = String::new();
                while let Some(ch) = self.peek() {
                    if ch.is_whitespace() || "()[]\";".contains(ch) {
                        break;
                    }
                    if ch == '{' {
                        if s == "top" {
                            return Ok((Sx::Set(self.read_set(pos, s)?), pos));
                        }
                        return Err(self.err(self.pos(), format!("unexpected `{{` after `{s}`")));
                    }
                    s.push(ch);
                    self.bump();
                }
                match s.strip_prefix(':') {
                    Some(k) if !k.is_empty() => Ok((Sx::Kw(k.to_string()), pos)),
                    Some(_) => Err(self.err(pos, "empty keyword")),
                    None => Ok((Sx::Sym(s), pos)),
                }
            }
        }
    }

    fn read_set(&mut self, pos: Pos, mut s: String) -> Result<String> {
        loop {
            match self.bump() {
                None => return Err(self.err(pos, "unclosed set literal")),
                Some('}') => {
                    s.push('}');
                    return Ok(s);
                }
                Some(ch) => s.push(ch),
            }
        }
    }
}

/// Positioned tree, so that interpretation errors can point into the source.
#[derive(Debug)]
struct Node {
    sx: Sx,
    pos: Pos,
    kids: Vec<Node>,
}

fn read_node(r: &mut Reader) -> Result<Node> {
    r.skip_ws();
    let pos = r.pos();
    match r.peek() {
        Some('(') | Some('[') => {
            let open = r.bump().unwrap_or('(');
            let close = if open == '(' { ')' } else { ']' };
            let mut kids = Vec::new();
            loop {
                r.skip_ws();
                match r.peek() {
                    None => return Err(r.err(pos, format!("unclosed `{open}`"))),
                    Some(d) if d == close => {
                        r.bump();
                        break;
                    }
                    Some(')') | Some(']') => return Err(r.err(r.pos(), "mismatched closing bracket")),
                    _ => kids.push(read_node(r)?),
                }
            }
            let sx = if open == '(' { Sx::List } else { Sx::Vector };
            Ok(Node { sx, pos, kids })
        }
        _ => {
            let (sx, pos) = r.read()?;
            Ok(Node { sx, pos, kids: Vec::new() })
        }
    }
}

struct Interp<'a> {
    inst: &'a Instance,
    kind: ConcreteKind,
}

impl Interp<'_> {
    fn set(&self, n: &Node) -> Result<PointSet> {
        match &n.sx {
            Sx::Set(s) => self.inst.parse_set(s, self.kind).map_err(|e| e.at(n.pos)),
            _ => Err(Error::syntax("expected a set literal").at(n.pos)),
        }
    }

    fn term(&self, n: &Node) -> Result<Term> {
        match &n.sx {
            Sx::Sym(s) | Sx::Str(s) => self.inst.parse_term(s).map_err(|e| e.at(n.pos)),
            _ => Err(Error::syntax("expected a term (symbol or string)").at(n.pos)),
        }
    }

    fn is_list(n: &Node) -> bool {
        matches!(n.sx, Sx::List)
    }

    fn derivation(&self, n: &Node) -> Result<Derivation> {
        if !Self::is_list(n) {
            return Err(Error::syntax("expected a derivation `( .. )`").at(n.pos));
        }
        let (head, args) = n.kids.split_first().ok_or_else(|| Error::syntax("empty derivation").at(n.pos))?;
        let Sx::Sym(name) = &head.sx else {
            return Err(Error::syntax("a derivation starts with a rule name").at(head.pos));
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::syntax(format!("({name} ..) takes {k} arguments, found {}", args.len())).at(n.pos))
            }
        };
        let subs = |xs: &[Node]| xs.iter().map(|x| self.derivation(x)).collect::<Result<Vec<_>>>();
        let plain = |rule: Rule, k: usize| -> Result<Derivation> {
            arity(k)?;
            Ok(Derivation::new(rule, subs(args)?))
        };
        match name.as_str() {
            "transfer" => {
                arity(2)?;
                let atom = self.term(&args[0])?;
                if !atom.is_leaf() {
                    return Err(Error::syntax("transfer needs an atom, 0 or 1").at(args[0].pos));
                }
                Ok(Derivation::leaf(Rule::Transfer {
                    atom,
                    pre: self.set(&args[1])?,
                }))
            }
            "relax" | "consequence" => {
                let mut pre = None;
                let mut post = Post::default();
                let mut rest = args;
                while let Some((k, tail)) = rest.split_first() {
                    let Sx::Kw(kw) = &k.sx else { break };
                    let v = tail.first().ok_or_else(|| Error::syntax(format!(":{kw} needs a value")).at(k.pos))?;
                    let slot = match kw.as_str() {
                        "pre" => &mut pre,
                        "post" | "ok" => &mut post.ok,
                        "err" => &mut post.err,
                        other => return Err(Error::syntax(format!("unknown keyword :{other}")).at(k.pos)),
                    };
                    if slot.replace(self.set(v)?).is_some() {
                        return Err(Error::syntax(format!("duplicate :{kw}")).at(k.pos));
                    }
                    rest = &tail[1..];
                }
                if rest.len() != 1 {
                    return Err(Error::syntax(format!("({name} ..) takes exactly one premise")).at(n.pos));
                }
                let rule = if name == "relax" { Rule::Relax { pre, post } } else { Rule::Consequence { pre, post } };
                Ok(Derivation::new(rule, subs(rest)?))
            }
            "seq" => plain(Rule::Seq, 2),
            "join" => plain(Rule::Join, 2),
            "rec" => plain(Rule::Rec, 2),
            "iterate" => plain(Rule::Iterate, 1),
            "disj" => plain(Rule::Disj, 2),
            "iterate-non-zero" => plain(Rule::IterateNonZero, 1),
            "seq-ok" => plain(Rule::SeqOk, 2),
            "seq-err" => plain(Rule::SeqErr, 2),
            "rec-err" => plain(Rule::RecErr, 2),
            "pair" => plain(Rule::Pair, 2),
            "seq-normal" => plain(Rule::SeqNormal, 2),
            "limit" | "back-v" => {
                let kw = args.first().ok_or_else(|| Error::syntax("missing :chain").at(n.pos))?;
                if !matches!(&kw.sx, Sx::Kw(k) if k == "chain") {
                    return Err(Error::syntax(format!("({name} ..) starts with :chain")).at(kw.pos));
                }
                let v = args.get(1).ok_or_else(|| Error::syntax(":chain needs a value").at(kw.pos))?;
                if !matches!(v.sx, Sx::Vector) {
                    return Err(Error::syntax(":chain takes a vector `[..]` of sets").at(v.pos));
                }
                if v.kids.is_empty() {
                    return Err(Error::syntax("a chain needs at least one set").at(v.pos));
                }
                let chain = v.kids.iter().map(|s| self.set(s)).collect::<Result<Vec<_>>>()?;
                let premises = &args[2..];
                if premises.len() != chain.len() {
                    return Err(Error::syntax(format!(
                        "a chain of {} sets needs {} premises, found {}",
                        chain.len(),
                        chain.len(),
                        premises.len()
                    ))
                    .at(n.pos));
                }
                let rule = if name == "limit" { Rule::Limit { chain } } else { Rule::BackV { chain } };
                Ok(Derivation::new(rule, subs(premises)?))
            }
            "empty" => {
                let (only, rest) = match args.first().map(|a| &a.sx) {
                    Some(Sx::Kw(k)) if k == "ok" => (Some(Component::Ok), &args[1..]),
                    Some(Sx::Kw(k)) if k == "err" => (Some(Component::Err), &args[1..]),
                    Some(Sx::Kw(k)) => return Err(Error::syntax(format!("unknown keyword :{k}")).at(args[0].pos)),
                    _ => (None, args),
                };
                if rest.len() != 2 {
                    return Err(Error::syntax("(empty [:ok|:err] TERM PRE)").at(n.pos));
                }
                Ok(Derivation::leaf(Rule::Empty {
                    only,
                    term: self.term(&rest[0])?,
                    pre: self.set(&rest[1])?,
                }))
            }
            "iterate-zero" => {
                arity(2)?;
                Ok(Derivation::leaf(Rule::IterateZero {
                    body: self.term(&args[0])?,
                    pre: self.set(&args[1])?,
                }))
            }
            "choice" => match args.first().map(|a| &a.sx) {
                Some(Sx::Kw(k)) if k == "left" || k == "right" => {
                    arity(3)?;
                    let t = Some(self.term(&args[1])?);
                    let rule = if k == "left" { Rule::Choice { left: t, right: None } } else { Rule::Choice { left: None, right: t } };
                    Ok(Derivation::new(rule, subs(&args[2..])?))
                }
                Some(Sx::Kw(k)) => Err(Error::syntax(format!("unknown keyword :{k}")).at(args[0].pos)),
                _ => plain(Rule::Join, 2),
            },
            "short-circuit" => {
                arity(3)?;
                if !matches!(&args[0].sx, Sx::Kw(k) if k == "then") {
                    return Err(Error::syntax("(short-circuit :then TERM D)").at(args[0].pos));
                }
                Ok(Derivation::new(
                    Rule::ShortCircuit {
                        then: self.term(&args[1])?,
                    },
                    subs(&args[2..])?,
                ))
            }
            other => Err(Error::syntax(format!("unknown rule `{other}`")).at(head.pos)),
        }
    }
}

/// Reads one derivation. Sets are interpreted in the concrete powerset of
/// `system`.
pub fn parse_derivation(inst: &Instance, system: System, src: &str) -> Result<Derivation> {
    let mut r = Reader::new(src);
    let node = read_node(&mut r)?;
    r.skip_ws();
    if r.peek().is_some() {
        return Err(Error::syntax("trailing input after the derivation").at(r.pos()));
    }
    Interp {
        inst,
        kind: system.kind(),
    }
    .derivation(&node)
}

fn term_sx(t: &Term) -> String {
    let s = pretty_term(t);
    if t.is_leaf() {
        s
    } else {
        format!("\"{s}\"")
    }
}

/// Indented, re-readable rendering of a derivation.
pub fn print_derivation(inst: &Instance, system: System, d: &Derivation) -> String {
    let mut out = String::new();
    write_node(inst, system.kind(), d, 0, &mut out);
    out
}

fn write_node(inst: &Instance, kind: ConcreteKind, d: &Derivation, depth: usize, out: &mut String) {
    let set = |s: &PointSet| inst.format_set(s, kind);
    let mut head = format!("({}", d.rule.name());
    match &d.rule {
        Rule::Transfer { atom, pre } => head.push_str(&format!(" {} {}", term_sx(atom), set(pre))),
        Rule::Relax { pre, post } | Rule::Consequence { pre, post } => {
            if let Some(p) = pre {
                head.push_str(&format!(" :pre {}", set(p)));
            }
            for (c, q) in post.components() {
                head.push_str(&format!(" :{c} {}", set(q)));
            }
        }
        Rule::Limit { chain } | Rule::BackV { chain } => {
            let items: Vec<String> = chain.iter().map(set).collect();
            head.push_str(&format!(" :chain [{}]", items.join(" ")));
        }
        Rule::Empty { only, term, pre } => {
            if let Some(c) = only {
                head.push_str(&format!(" :{c}"));
            }
            head.push_str(&format!(" {} {}", term_sx(term), set(pre)));
        }
        Rule::IterateZero { body, pre } => head.push_str(&format!(" {} {}", term_sx(body), set(pre))),
        Rule::Choice { left, right } => {
            if let Some(t) = left {
                head.push_str(&format!(" :left {}", term_sx(t)));
            }
            if let Some(t) = right {
                head.push_str(&format!(" :right {}", term_sx(t)));
            }
        }
        Rule::ShortCircuit { then } => head.push_str(&format!(" :then {}", term_sx(then))),
        _ => {}
    }
    out.push_str(&head);
    for c in &d.children {
        out.push('\n');
        out.push_str(&"  ".repeat(depth + 1));
        write_node(inst, kind, c, depth + 1, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::file::parse_model_file;

    fn inst() -> Instance {
        parse_model_file("model relational\ncarrier 0 3\naction inc ok succ\ntest z ok in {0}\n").unwrap()
    }

    #[test]
    fn round_trip() {
        let i = inst();
        let src = r#"
            ; a comment
            (relax :pre {0,1} :ok {2}
              (seq (transfer inc {0}) (limit :chain [{1} {2}] (transfer inc {1}) (transfer "1" {2}))))"#;
        let d = parse_derivation(&i, System::Lck, src).unwrap();
        assert_eq!(d.rules(), vec!["relax", "seq", "transfer", "limit", "transfer", "transfer"]);
        let printed = print_derivation(&i, System::Lck, &d);
        assert_eq!(parse_derivation(&i, System::Lck, &printed).unwrap(), d);
        let il = r#"(pair (choice :right "z;inc" (empty :ok inc {0})) (short-circuit :then inc (iterate-zero "inc+z" {1})))"#;
        let d = parse_derivation(&i, System::Il, il).unwrap();
        assert_eq!(parse_derivation(&i, System::Il, &print_derivation(&i, System::Il, &d)).unwrap(), d);
    }

    #[test]
    fn errors_have_positions() {
        let i = inst();
        let e = parse_derivation(&i, System::Lck, "(seq\n  (transfer inc {0})\n  (bogus))").unwrap_err();
        assert!(e.to_string().starts_with("3:4"), "{e}");
        assert!(parse_derivation(&i, System::Lck, "(seq (transfer inc {0})").is_err());
        assert!(parse_derivation(&i, System::Lck, "(transfer \"inc;inc\" {0})").is_err());
        assert!(parse_derivation(&i, System::Lck, "(limit :chain [{0}] )").is_err());
        let unknown = parse_derivation(&i, System::Lck, "(transfer dec {0})").unwrap_err();
        assert!(!unknown.is_parse());
    }
}
