//! The bundled worked examples, run end to end.

use katlcl::domain::{parse_domain_file, GaloisInsertion};
use katlcl::logic::sexp::parse_derivation;
use katlcl::logic::{conclude, parse_triple, validity, System};
use katlcl::model::axioms::{check_kat_axioms, AxiomOptions, Group};
use katlcl::model::file::parse_model_file;
use katlcl::model::{ConcreteKind, Instance, Model};
use katlcl::semantics::concrete_post;
use katlcl::term::{Atom, Term};
use katlcl::{Error, Result};

use crate::Failure;

struct Bundle {
    name: &'static str,
    model: &'static str,
    domain: &'static str,
    triples: Option<&'static str>,
    derivation: Option<&'static str>,
}

macro_rules! bundle_file {
    ($dir:literal, $file:literal) => {
        include_str!(concat!("../../../bundles/", $dir, "/", $file))
    };
}

const BUNDLES: [Bundle; 4] = [
    Bundle {
        name: "gs-parity",
        model: bundle_file!("gs-parity", "model.kat"),
        domain: bundle_file!("gs-parity", "domain.dom"),
        triples: Some(bundle_file!("gs-parity", "triples.txt")),
        derivation: Some(bundle_file!("gs-parity", "derivation.sexp")),
    },
    Bundle {
        name: "interval-il",
        model: bundle_file!("interval-il", "model.kat"),
        domain: bundle_file!("interval-il", "domain.dom"),
        triples: Some(bundle_file!("interval-il", "triples.txt")),
        derivation: Some(bundle_file!("interval-il", "derivation.sexp")),
    },
    Bundle {
        name: "sign-topkat",
        model: bundle_file!("sign-topkat", "model.kat"),
        domain: bundle_file!("sign-topkat", "domain.dom"),
        triples: Some(bundle_file!("sign-topkat", "triples.txt")),
        derivation: Some(bundle_file!("sign-topkat", "derivation.sexp")),
    },
    Bundle {
        name: "a3",
        model: bundle_file!("a3", "model.kat"),
        domain: "domain trivial",
        triples: None,
        derivation: None,
    },
];

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.lines.push((ok, what.into()));
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }
}

fn domain(b: &Bundle, inst: &Instance, kind: ConcreteKind) -> Result<GaloisInsertion> {
    parse_domain_file(b.domain, &inst.model, kind)
}

fn run_triples(b: &Bundle, triples: &str, inst: &Instance, r: &mut Report) -> Result<()> {
    for (n, line) in triples.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let (sys, expected) = (words.next(), words.next());
        let rest = line.find('[').map(|i| &line[i..]);
        let (Some(sys), Some(expected), Some(rest)) = (sys, expected, rest) else {
            return Err(Error::syntax("expected `SYSTEM valid|invalid TRIPLE`").at(format!("triples.txt:{}", n + 1)));
        };
        let system = System::parse(sys).ok_or_else(|| Error::syntax(format!("unknown system `{sys}`")))?;
        let j = parse_triple(inst, system, rest)?;
        let d = domain(b, inst, system.kind())?;
        let v = validity(system, &d, inst, &j)?;
        let want = expected == "valid";
        let mut what = format!("{system} {} is {}", rest.trim(), v.status);
        if let Some(f) = v.failures.first() {
            what.push_str(&format!(" ({f})"));
        }
        r.check(v.is_pass() == want, what);
    }
    Ok(())
}

fn run_derivation(b: &Bundle, src: &str, inst: &Instance, r: &mut Report) -> Result<()> {
    let sys = src
        .lines()
        .find_map(|l| l.trim().strip_prefix("; system:"))
        .ok_or_else(|| Error::syntax("derivation file lacks a `; system:` header"))?;
    let system = System::parse(sys.trim()).ok_or_else(|| Error::syntax(format!("unknown system `{}`", sys.trim())))?;
    let d = domain(b, inst, system.kind())?;
    let dv = parse_derivation(inst, system, src)?;
    match conclude(system, &d, inst, &dv)? {
        Ok(j) => {
            let shown = j.display(inst, system.kind());
            r.check(true, format!("derivation accepted in {system}: {shown}"));
            let v = validity(system, &d, inst, &j)?;
            r.check(v.is_pass(), format!("its conclusion is {}", v.status));
        }
        Err(f) => r.check(false, format!("derivation rejected at node {}: {f}", f.path_string())),
    }
    Ok(())
}

fn set(inst: &Instance, text: &str, kind: ConcreteKind) -> Result<katlcl::pointset::PointSet> {
    inst.parse_set(text, kind)
}

fn extras(b: &Bundle, inst: &Instance, r: &mut Report) -> Result<()> {
    let tests = ConcreteKind::Tests;
    match b.name {
        "gs-parity" => {
            let d = domain(b, inst, tests)?;
            let t = inst.parse_term("(u;b1)*")?;
            let p = set(inst, "{++,--}", tests)?;
            let s = set(inst, "{++,+-,--}", tests)?;
            let post = concrete_post(inst, tests, &t, &p)?.ok;
            let closure = d.closure(&s);
            r.check(
                s.is_subset(&post) && post.is_subset(&closure),
                format!(
                    "s <= post <= A(s): {} <= {} <= {}",
                    inst.format_set(&s, tests),
                    inst.format_set(&post, tests),
                    inst.format_set(&closure, tests)
                ),
            );
            let alert = s.difference(&p);
            r.check(alert == set(inst, "{+-}", tests)?, format!("true alert s \\ Spec = {}", inst.format_set(&alert, tests)));
        }
        "interval-il" => {
            let d = domain(b, inst, tests)?;
            let t = inst.parse_term("(inc + error)*")?;
            let p = set(inst, "{0,2}", tests)?;
            let post = concrete_post(inst, tests, &t, &p)?;
            let all = set(inst, "{0..11}", tests)?;
            r.check(
                post.ok == all && post.err == all,
                format!("ok: {} err: {}", inst.format_set(&post.ok, tests), inst.format_set(&post.err, tests)),
            );
            let a = d.closure(&post.err);
            r.check(!a.is_empty(), format!("err clause fails: A(s) = {} is not below {{}}", inst.format_set(&a, tests)));
        }
        "sign-topkat" => {
            let kind = ConcreteKind::ToppCodomains;
            let t = inst.parse_term("(geq0;inc)*;lt0")?;
            let p = set(inst, "top{0,8}", kind)?;
            let post = concrete_post(inst, kind, &t, &p)?.ok;
            r.check(post.is_empty(), format!("top post from top{{0,8}} is {}", inst.format_set(&post, kind)));
        }
        "a3" => {
            let report = check_kat_axioms(&inst.model, AxiomOptions::default())?;
            r.check(report.group_passed(Group::Kat), "every KAT law holds");
            let bd2 = report.family("bd2").is_some_and(|f| f.witness.is_some());
            r.check(bd2, "bd2 fails, so the test diamond is not lawful");
            if let Model::Table(m) = &inst.model {
                let a = m.element("a").expect("a3 has an element a");
                let x = Term::atom(Atom::action("x"));
                let tp = m.top_post(&x, m.one(), &|_| Some(a));
                r.check(tp == Some(a), "top . 1 . a = a");
                r.check(m.represent_as_top_test(a).is_none(), "no test q has top . q = a");
            }
        }
        _ => {}
    }
    Ok(())
}

fn run_bundle(b: &Bundle) -> Result<Report> {
    let mut r = Report { lines: Vec::new() };
    let inst = parse_model_file(b.model)?;
    if let Some(src) = b.triples {
        run_triples(b, src, &inst, &mut r)?;
    }
    if let Some(src) = b.derivation {
        run_derivation(b, src, &inst, &mut r)?;
    }
    extras(b, &inst, &mut r)?;
    Ok(r)
}

pub fn run(only: Option<&str>) -> Result<u8, Failure> {
    let chosen: Vec<&Bundle> = BUNDLES.iter().filter(|b| only.is_none_or(|o| o == b.name)).collect();
    if chosen.is_empty() {
        let names: Vec<&str> = BUNDLES.iter().map(|b| b.name).collect();
        return Err(Error::semantic(format!("no example named `{}` (have {})", only.unwrap_or(""), names.join(", "))).into());
    }
    let mut all = true;
    for b in chosen {
        println!("== {}", b.name);
        for note in b.model.lines().filter_map(|l| l.strip_prefix("# note:")) {
            println!("   note:{note}");
        }
        let r = run_bundle(b).map_err(|e| Failure::from(e.at(b.name)))?;
        for (ok, line) in &r.lines {
            println!("   {} {line}", if *ok { "ok  " } else { "FAIL" });
        }
        let pass = r.passed();
        all &= pass;
        println!("{}: {}", b.name, if pass { "PASS" } else { "FAIL" });
    }
    Ok(if all { 0 } else { crate::EXIT_FAIL })
}
