//! KAT terms over primitive actions and primitive tests.
//!
//! Concrete syntax: `+` for choice, `;` for sequencing, postfix `*` for
//! iteration, `0` and `1` for the constant tests. `*` binds tighter than `;`,
//! which binds tighter than `+`; both binary operators associate to the left.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Action,
    Test,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub kind: AtomKind,
    pub name: String,
}

impl Atom {
    pub fn action(name: impl Into<String>) -> Self {
        Atom {
            kind: AtomKind::Action,
            name: name.into(),
        }
    }

    pub fn test(name: impl Into<String>) -> Self {
        Atom {
            kind: AtomKind::Test,
            name: name.into(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Atom(Atom),
    Zero,
    One,
    Plus(Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    Star(Box<Term>),
}

impl Term {
    pub fn atom(atom: Atom) -> Term {
        Term::Atom(atom)
    }

    pub fn plus(l: Term, r: Term) -> Term {
        Term::Plus(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Term, r: Term) -> Term {
        Term::Seq(Box::new(l), Box::new(r))
    }

    pub fn star(t: Term) -> Term {
        Term::Star(Box::new(t))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Zero | Term::One => 1,
            Term::Plus(l, r) | Term::Seq(l, r) => 1 + l.size() + r.size(),
            Term::Star(t) => 1 + t.size(),
        }
    }

    /// True for the leaves a (transfer) step may be applied to.
    pub fn is_leaf(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Zero | Term::One)
    }
}

/// The atoms occurring in `t`. The constants `0` and `1` are not atoms here.
pub fn atoms_of(t: &Term) -> BTreeSet<Atom> {
    fn walk(t: &Term, out: &mut BTreeSet<Atom>) {
        match t {
            Term::Atom(a) => {
                out.insert(a.clone());
            }
            Term::Zero | Term::One => {}
            Term::Plus(l, r) | Term::Seq(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Term::Star(t) => walk(t, out),
        }
    }
    let mut out = BTreeSet::new();
    walk(t, &mut out);
    out
}

const PREC_PLUS: u8 = 0;
const PREC_SEQ: u8 = 1;
const PREC_STAR: u8 = 2;
const PREC_ATOM: u8 = 3;

fn precedence(t: &Term) -> u8 {
    match t {
        Term::Plus(..) => PREC_PLUS,
        Term::Seq(..) => PREC_SEQ,
        Term::Star(_) => PREC_STAR,
        _ => PREC_ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if precedence(t) < min {
        f.write_str("(")?;
        write_at(f, t, PREC_PLUS)?;
        return f.write_str(")");
    }
    match t {
        Term::Atom(a) => f.write_str(&a.name),
        Term::Zero => f.write_str("0"),
        Term::One => f.write_str("1"),
        Term::Plus(l, r) => {
            write_at(f, l, PREC_PLUS)?;
            f.write_str(" + ")?;
            write_at(f, r, PREC_SEQ)
        }
        Term::Seq(l, r) => {
            write_at(f, l, PREC_SEQ)?;
            f.write_str(" ; ")?;
            write_at(f, r, PREC_STAR)
        }
        Term::Star(t) => {
            write_at(f, t, PREC_STAR)?;
            f.write_str("*")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, PREC_PLUS)
    }
}

pub fn pretty_term(t: &Term) -> String {
    t.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unexpected character {found:?} at offset {pos}")]
    Lex { pos: usize, found: char },
    #[error("parse error at offset {pos}: expected {expected}")]
    Parse { pos: usize, expected: &'static str },
    #[error("unknown atom `{name}` at offset {pos}")]
    UnknownAtom { pos: usize, name: String },
    #[error("`{0}` is declared both as an action and as a test")]
    OverlappingAlphabets(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Plus,
    Semi,
    Star,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, TermError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => Tok::Plus,
            ';' => Tok::Semi,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((
                    pos,
                    match name.as_str() {
                        "0" => Tok::Zero,
                        "1" => Tok::One,
                        _ => Tok::Ident(name),
                    },
                ));
                continue;
            }
            found => return Err(TermError::Lex { pos, found }),
        };
        chars.next();
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a, S: AsRef<str>> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    sigma: &'a [S],
    tests: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<Term, TermError> {
        let mut lhs = self.seq()?;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            let rhs = self.seq()?;
            lhs = Term::plus(lhs, rhs);
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> Result<Term, TermError> {
        let mut lhs = self.postfix()?;
        while self.peek() == Some(&Tok::Semi) {
            self.at += 1;
            let rhs = self.postfix()?;
            lhs = Term::seq(lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Term, TermError> {
        let mut t = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            t = Term::star(t);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, TermError> {
        let pos = self.pos();
        let Some((_, tok)) = self.toks.get(self.at).cloned() else {
            return Err(TermError::Parse {
                pos,
                expected: "a term",
            });
        };
        self.at += 1;
        match tok {
            Tok::Zero => Ok(Term::Zero),
            Tok::One => Ok(Term::One),
            Tok::Ident(name) => {
                if self.sigma.iter().any(|s| s.as_ref() == name) {
                    Ok(Term::Atom(Atom::action(name)))
                } else if self.tests.iter().any(|s| s.as_ref() == name) {
                    Ok(Term::Atom(Atom::test(name)))
                } else {
                    Err(TermError::UnknownAtom { pos, name })
                }
            }
            Tok::LParen => {
                let t = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(TermError::Parse {
                        pos: self.pos(),
                        expected: "`)`",
                    });
                }
                self.at += 1;
                Ok(t)
            }
            _ => Err(TermError::Parse {
                pos,
                expected: "an atom, `0`, `1` or `(`",
            }),
        }
    }
}

/// Parses `src` against the action alphabet `sigma` and test alphabet `tests`.
pub fn parse_term<S: AsRef<str>>(src: &str, sigma: &[S], tests: &[S]) -> Result<Term, TermError> {
    if let Some(dup) = sigma
        .iter()
        .find(|s| tests.iter().any(|b| b.as_ref() == s.as_ref()))
    {
        return Err(TermError::OverlappingAlphabets(dup.as_ref().to_string()));
    }
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
        sigma,
        tests,
    };
    let t = p.expr()?;
    if p.at != p.toks.len() {
        return Err(TermError::Parse {
            pos: p.pos(),
            expected: "end of input",
        });
    }
    Ok(t)
}

/// Every term with at most `max_size` nodes built from `leaves`, smallest first.
pub fn terms_up_to(leaves: &[Term], max_size: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(), leaves.to_vec()];
    for n in 2..=max_size {
        let mut here: Vec<Term> = by_size[n - 1].iter().map(|t| Term::star(t.clone())).collect();
        for l in 1..n - 1 {
            for a in &by_size[l] {
                for b in &by_size[n - 1 - l] {
                    here.push(Term::plus(a.clone(), b.clone()));
                    here.push(Term::seq(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(here);
    }
    by_size.into_iter().take(max_size + 1).flatten().collect()
}

/// A random term of at most `max_size` nodes over `leaves`.
pub fn random_term<R: rand::Rng + ?Sized>(rng: &mut R, leaves: &[Term], max_size: usize) -> Term {
    let target = rng.gen_range(1..=max_size.max(1));
    grow(rng, leaves, target)
}

fn grow<R: rand::Rng + ?Sized>(rng: &mut R, leaves: &[Term], size: usize) -> Term {
    if size <= 1 {
        return leaves[rng.gen_range(0..leaves.len())].clone();
    }
    if size == 2 || rng.gen_bool(0.25) {
        return Term::star(grow(rng, leaves, size - 1));
    }
    let l = rng.gen_range(1..size - 1);
    let (a, b) = (grow(rng, leaves, l), grow(rng, leaves, size - 1 - l));
    if rng.gen_bool(0.5) {
        Term::plus(a, b)
    } else {
        Term::seq(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Term {
        Term::Atom(Atom::action("u"))
    }
    fn b1() -> Term {
        Term::Atom(Atom::test("b1"))
    }
    fn parse(src: &str) -> Result<Term, TermError> {
        parse_term(src, &["u"], &["b1", "b2"])
    }

    #[test]
    fn parses_star_of_sequence() {
        assert_eq!(parse("(u ; b1)*").unwrap(), Term::star(Term::seq(u(), b1())));
    }

    #[test]
    fn constants_are_not_atoms() {
        assert_eq!(parse("1").unwrap(), Term::One);
        assert_eq!(parse("0").unwrap(), Term::Zero);
        assert!(atoms_of(&Term::One).is_empty());
    }

    #[test]
    fn seq_binds_tighter_than_plus() {
        let reference = Term::plus(u(), Term::seq(u(), b1()));
        assert_eq!(parse("u + u ; b1").unwrap(), reference);
        assert_eq!(parse("u;u;b1").unwrap(), Term::seq(Term::seq(u(), u()), b1()));
        assert_eq!(parse("u + b1*").unwrap(), Term::plus(u(), Term::star(b1())));
    }

    #[test]
    fn atoms_are_collected() {
        let t = Term::plus(u(), Term::seq(u(), b1()));
        let atoms: Vec<_> = atoms_of(&t).into_iter().map(|a| a.name).collect();
        assert_eq!(atoms, ["u", "b1"]);
    }

    #[test]
    fn pretty_forms() {
        assert_eq!(pretty_term(&Term::star(Term::seq(u(), b1()))), "(u ; b1)*");
        assert_eq!(pretty_term(&Term::Zero), "0");
        assert_eq!(pretty_term(&Term::plus(Term::One, Term::star(u()))), "1 + u*");
        assert_eq!(pretty_term(&Term::plus(u(), Term::plus(u(), b1()))), "u + (u + b1)");
        assert_eq!(pretty_term(&Term::star(Term::star(u()))), "u**");
    }

    #[test]
    fn enumeration_counts_and_sizes() {
        let leaves = [u(), b1()];
        let all = terms_up_to(&leaves, 3);
        // 2 leaves, 2 stars, 2 double stars and 8 binary terms.
        assert_eq!(all.len(), 14);
        assert!(all.iter().all(|t| t.size() <= 3));
        let mut rng = rand::rngs::mock::StepRng::new(7, 11);
        assert!(random_term(&mut rng, &leaves, 6).size() <= 6);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("u ; zz").unwrap_err(),
            TermError::UnknownAtom {
                pos: 4,
                name: "zz".into()
            }
        );
        assert!(matches!(parse("u + "), Err(TermError::Parse { pos: 4, .. })));
        assert!(matches!(parse("(u"), Err(TermError::Parse { .. })));
        assert!(matches!(parse("u ) "), Err(TermError::Parse { pos: 2, .. })));
        assert!(matches!(parse("u & b1"), Err(TermError::Lex { pos: 2, found: '&' })));
        assert!(matches!(
            parse_term("u", &["u"], &["u"]),
            Err(TermError::OverlappingAlphabets(_))
        ));
    }
}
