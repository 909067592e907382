//! Line-oriented model files.
//!
//! ```text
//! model relational
//! carrier 0 11
//! action inc ok succ
//! action error ok empty err full
//! test geq0 ok ge 0
//! action f ok pairs (0,1)(0,2)
//! ```
//!
//! Relational generators: `succ` (partial at the maximum), `succ-sat`
//! (saturating at the maximum), `pred`, `empty`, `full` (identity), `all`
//! (`X × X`), `ge k`, `lt k`, `in {..}` (sub-identity on a set) and
//! `pairs (x,y)...`. Guarded-string headers list the primitive tests
//! (`model guarded-strings b1 b2`), which are declared automatically; their
//! generators are `act`, `empty`, `full` and `pos NAME`. `model a3` uses the
//! element names `0`, `1`, `a`.

use crate::error::{Error, Result};
use crate::model::{
    gs_model, rel_model, AtomValue, ConcreteKind, Element, Evaluation, GsElement, Instance, Model, Relation,
    TableModel,
};
use crate::pointset::PointSet;
use crate::term::AtomKind;

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

fn parse_int(s: &str) -> Result<i64> {
    s.parse().map_err(|_| Error::syntax(format!("`{s}` is not an integer")))
}

fn parse_pairs(model: &Model, text: &str) -> Result<Vec<(usize, usize)>> {
    let Model::Relational(r) = model else {
        unreachable!()
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let inner;
        (inner, rest) = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| Error::syntax(format!("malformed pair list `{text}`")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::syntax(format!("malformed pair `({inner})`")))?;
        let idx = |v: i64| {
            r.index(v)
                .ok_or_else(|| Error::semantic(format!("{v} is outside the carrier {}..{}", r.lo(), r.hi())))
        };
        out.push((idx(parse_int(a)?)?, idx(parse_int(b)?)?));
    }
    Ok(out)
}

fn relational_generator(model: &Model, words: &[&str]) -> Result<Relation> {
    let Model::Relational(r) = model else {
        unreachable!()
    };
    let n = r.size();
    let arg = |i: usize| -> Result<i64> {
        words
            .get(i)
            .ok_or_else(|| Error::syntax(format!("generator `{}` needs an argument", words[0])))
            .and_then(|s| parse_int(s))
    };
    let test_where = |pred: &dyn Fn(i64) -> bool| Relation::test(&r.set_where(pred));
    let rel = match words[0] {
        "succ" => Relation::from_pairs(n, (0..n - 1).map(|i| (i, i + 1))),
        "succ-sat" => Relation::from_pairs(n, (0..n).map(|i| (i, (i + 1).min(n - 1)))),
        "pred" => Relation::from_pairs(n, (1..n).map(|i| (i, i - 1))),
        "empty" => Relation::empty(n),
        "full" => Relation::identity(n),
        "all" => Relation::top(n),
        "ge" => {
            let k = arg(1)?;
            test_where(&|v| v >= k)
        }
        "lt" => {
            let k = arg(1)?;
            test_where(&|v| v < k)
        }
        "in" => Relation::test(&model.parse_set(&words[1..].join(" "), ConcreteKind::Tests)?),
        "pairs" => Relation::from_pairs(n, parse_pairs(model, &words[1..].join(" "))?),
        other => return Err(Error::syntax(format!("unknown relational generator `{other}`"))),
    };
    let extra = match words[0] {
        "ge" | "lt" => 2,
        "in" | "pairs" => words.len(),
        _ => 1,
    };
    if words.len() > extra {
        return Err(Error::syntax(format!("unexpected `{}` after generator", words[extra])));
    }
    Ok(rel)
}

fn generator(model: &Model, words: &[&str]) -> Result<Element> {
    if words.is_empty() {
        return Err(Error::syntax("missing generator"));
    }
    match model {
        Model::Relational(_) => relational_generator(model, words).map(Element::Rel),
        Model::Guarded(g) => {
            let n = g.atom_count();
            let e = match words {
                ["act"] => GsElement::Action,
                ["empty"] => GsElement::Test(PointSet::empty(n)),
                ["full"] => GsElement::Test(PointSet::full(n)),
                ["pos", b] => GsElement::Test(g.positive(
                    g.test_index(b).ok_or_else(|| Error::semantic(format!("unknown primitive test `{b}`")))?,
                )),
                _ => return Err(Error::syntax(format!("unknown guarded-string generator `{}`", words.join(" ")))),
            };
            Ok(Element::Gs(e))
        }
        Model::Table(t) => match words {
            [name] => t
                .element(name)
                .map(Element::Table)
                .ok_or_else(|| Error::semantic(format!("`{name}` is not an element of the table"))),
            _ => Err(Error::syntax(format!("expected one element name, found `{}`", words.join(" ")))),
        },
    }
}

fn zero_of(model: &Model) -> Element {
    match model {
        Model::Relational(r) => Element::Rel(Relation::empty(r.size())),
        Model::Guarded(g) => Element::Gs(GsElement::Test(PointSet::empty(g.atom_count()))),
        Model::Table(t) => Element::Table(t.zero()),
    }
}

fn default_ok(model: &Model, kind: AtomKind) -> Option<Element> {
    match (model, kind) {
        (Model::Guarded(_), AtomKind::Action) => Some(Element::Gs(GsElement::Action)),
        _ => None,
    }
}

fn is_test_element(model: &Model, e: &Element) -> bool {
    match (model, e) {
        (_, Element::Rel(r)) => r.is_test(),
        (_, Element::Gs(g)) => matches!(g, GsElement::Test(_)),
        (Model::Table(t), Element::Table(i)) => t.is_test(*i),
        _ => false,
    }
}

/// Parses a model file into a model and the evaluation of its atoms.
pub fn parse_model_file(src: &str) -> Result<Instance> {
    let mut model: Option<Model> = None;
    let mut pending_relational = false;
    let mut eval = Evaluation::new();
    for (lineno, raw) in src.lines().enumerate() {
        let loc = format!("line {}", lineno + 1);
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "model" => {
                if model.is_some() || pending_relational {
                    return Err(Error::syntax("duplicate `model` line").at(&loc));
                }
                match words.get(1).copied() {
                    Some("relational") if words.len() == 2 => pending_relational = true,
                    Some("guarded-strings") => {
                        let tests = &words[2..];
                        if tests.is_empty() {
                            return Err(Error::syntax("guarded-strings needs primitive test names").at(&loc));
                        }
                        for t in tests {
                            if !is_ident(t) || eval.contains(t) {
                                return Err(Error::syntax(format!("bad primitive test name `{t}`")).at(&loc));
                            }
                        }
                        let m = gs_model(tests.iter().copied()).map_err(|e| e.at(&loc))?;
                        let Model::Guarded(g) = &m else { unreachable!() };
                        for (i, t) in tests.iter().enumerate() {
                            eval.insert(
                                *t,
                                AtomValue {
                                    kind: AtomKind::Test,
                                    ok: Element::Gs(GsElement::Test(g.positive(i))),
                                    err: zero_of(&m),
                                },
                            );
                        }
                        model = Some(m);
                    }
                    Some("a3") if words.len() == 2 => model = Some(Model::Table(TableModel::a3())),
                    _ => return Err(Error::syntax(format!("unknown model header `{line}`")).at(&loc)),
                }
            }
            "carrier" => {
                if !pending_relational || model.is_some() {
                    return Err(Error::syntax("`carrier` must follow `model relational`").at(&loc));
                }
                let [_, lo, hi] = words[..] else {
                    return Err(Error::syntax("expected `carrier LO HI`").at(&loc));
                };
                let lo = parse_int(lo).map_err(|e| e.at(&loc))?;
                let hi = parse_int(hi).map_err(|e| e.at(&loc))?;
                model = Some(rel_model(lo, hi).map_err(|e| e.at(&loc))?);
            }
            "action" | "test" => {
                let Some(m) = model.as_ref() else {
                    return Err(Error::syntax("atoms must follow the model header and carrier").at(&loc));
                };
                let kind = if words[0] == "action" { AtomKind::Action } else { AtomKind::Test };
                let Some(&name) = words.get(1) else {
                    return Err(Error::syntax("missing atom name").at(&loc));
                };
                if !is_ident(name) {
                    return Err(Error::syntax(format!("`{name}` is not a valid atom name")).at(&loc));
                }
                if eval.contains(name) {
                    return Err(Error::semantic(format!("atom `{name}` declared twice")).at(&loc));
                }
                let rest = &words[2..];
                let err_at = rest.iter().position(|w| *w == "err");
                let (ok_words, err_words) = match err_at {
                    Some(i) => (&rest[..i], Some(&rest[i + 1..])),
                    None => (rest, None),
                };
                let ok = match ok_words {
                    [] => default_ok(m, kind),
                    ["ok", gen @ ..] => Some(generator(m, gen).map_err(|e| e.at(&loc))?),
                    _ => return Err(Error::syntax("expected `ok GENERATOR`").at(&loc)),
                }
                .ok_or_else(|| Error::syntax(format!("atom `{name}` needs an `ok` generator")).at(&loc))?;
                let err = match err_words {
                    None => zero_of(m),
                    Some(gen) => generator(m, gen).map_err(|e| e.at(&loc))?,
                };
                if kind == AtomKind::Test && !is_test_element(m, &ok) {
                    return Err(Error::semantic(format!("test `{name}` is not a sub-identity")).at(&loc));
                }
                eval.insert(name, AtomValue { kind, ok, err });
            }
            other => return Err(Error::syntax(format!("unknown directive `{other}`")).at(&loc)),
        }
    }
    let model = model.ok_or_else(|| {
        if pending_relational {
            Error::syntax("relational model without a `carrier` line")
        } else {
            Error::syntax("missing `model` header")
        }
    })?;
    Ok(Instance::new(model, eval))
}
