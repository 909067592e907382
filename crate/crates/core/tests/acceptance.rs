//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the target exits non-zero if any criterion fails. It runs without the
//! libtest harness so the lines are always shown.

mod common;

use std::time::{Duration, Instant};

use katlcl::domain::{interval_domain, parity_domain, parse_domain_file, sign_domain, trivial_domain, GaloisInsertion};
use katlcl::logic::sexp::parse_derivation;
use katlcl::logic::{conclude, synthesize, translate, validity, verify, Direction, Judgment, Post, SynthError, System};
use katlcl::model::axioms::{check_kat_axioms, AxiomOptions, Group};
use katlcl::model::file::parse_model_file;
use katlcl::model::{a3_model, rel_model, ConcreteKind, Instance, Model, Relation};
use katlcl::pointset::PointSet;
use katlcl::semantics::{apost, atop_post, global_complete_for, oracle_post, post, top_post};
use katlcl::term::{random_term, terms_up_to, Atom, Term};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct Bundle {
    inst: Instance,
    domain: String,
    derivation: String,
}

fn load(dir: &str) -> Result<Bundle, String> {
    Ok(Bundle {
        inst: parse_model_file(&common::bundle(dir, "model.kat")).map_err(fmt_err)?,
        domain: common::bundle(dir, "domain.dom"),
        derivation: common::bundle(dir, "derivation.sexp"),
    })
}

/// Verifies the bundled derivation and returns its conclusion.
fn bundled_conclusion(b: &Bundle, system: System, d: &GaloisInsertion) -> Result<Judgment, String> {
    let dv = parse_derivation(&b.inst, system, &b.derivation).map_err(fmt_err)?;
    let v = verify(system, d, &b.inst, &dv).map_err(fmt_err)?;
    ensure(v.is_pass(), || format!("derivation rejected: {v}"))?;
    let j = conclude(system, d, &b.inst, &dv).map_err(fmt_err)?.map_err(|f| f.to_string())?;
    let valid = validity(system, d, &b.inst, &j).map_err(fmt_err)?;
    ensure(valid.is_pass(), || format!("conclusion is not valid: {valid}"))?;
    Ok(j)
}

fn parity_example() -> Outcome {
    let b = load("gs-parity")?;
    let tests = ConcreteKind::Tests;
    let d = parse_domain_file(&b.domain, &b.inst.model, tests).map_err(fmt_err)?;
    let set = |s: &str| b.inst.parse_set(s, tests).map_err(fmt_err);
    let (p, s) = (set("{++,--}")?, set("{++,+-,--}")?);
    let j = bundled_conclusion(&b, System::Lck, &d)?;
    let r = b.inst.parse_term("(u;b1)*").map_err(fmt_err)?;
    ensure(j.pre == p && j.term == r && j.post == Post::ok(s.clone()), || {
        format!("unexpected conclusion {}", j.display(&b.inst, tests))
    })?;
    let q = post(&b.inst, &r, &p).map_err(fmt_err)?.ok;
    let a = d.closure(&s);
    ensure(s.is_subset(&q) && q.is_subset(&a), || {
        format!("s <= post <= A(s) fails: {} {} {}", b.inst.format_set(&s, tests), b.inst.format_set(&q, tests), b.inst.format_set(&a, tests))
    })?;
    let alert = b.inst.format_set(&s.difference(&p), tests);
    ensure(alert == "{+-}", || format!("s minus Spec is {alert}"))?;
    Ok(format!("post {} , alert {alert}", b.inst.format_set(&q, tests)))
}

fn interval_example() -> Outcome {
    let b = load("interval-il")?;
    let tests = ConcreteKind::Tests;
    let d = parse_domain_file(&b.domain, &b.inst.model, tests).map_err(fmt_err)?;
    let j = bundled_conclusion(&b, System::Lcil, &d)?;
    let all = b.inst.parse_set("{0..11}", tests).map_err(fmt_err)?;
    let r = b.inst.parse_term("(inc + error)*").map_err(fmt_err)?;
    let pp = post(&b.inst, &r, &j.pre).map_err(fmt_err)?;
    ensure(pp.ok == all && pp.err == all, || format!("posts are {:?}", pp))?;
    ensure(j.post == Post::pair(all.clone(), all.clone()), || format!("conclusion {}", j.display(&b.inst, tests)))?;
    let a = d.closure(&pp.err);
    ensure(a == all, || format!("Int(err post) = {}", b.inst.format_set(&a, tests)))?;
    let spec = Judgment::new(j.pre.clone(), r, Post::pair(all.clone(), PointSet::empty(all.universe())));
    let v = validity(System::Lcil, &d, &b.inst, &spec).map_err(fmt_err)?;
    ensure(!v.is_pass(), || "the triple with an empty err post is valid".into())?;
    Ok(format!("ok = err = {}, Int(s) = {} is not below {{}}", b.inst.format_set(&all, tests), d.name(d.alpha(&pp.err))))
}

fn sign_example() -> Outcome {
    let b = load("sign-topkat")?;
    let kind = ConcreteKind::ToppCodomains;
    let d = parse_domain_file(&b.domain, &b.inst.model, kind).map_err(fmt_err)?;
    let j = bundled_conclusion(&b, System::Lctk, &d)?;
    let r = b.inst.parse_term("(geq0;inc)*;lt0").map_err(fmt_err)?;
    let p = b.inst.parse_set("top{0,8}", kind).map_err(fmt_err)?;
    let empty = PointSet::empty(p.universe());
    ensure(j.pre == p && j.term == r && j.post == Post::ok(empty.clone()), || {
        format!("unexpected conclusion {}", j.display(&b.inst, kind))
    })?;
    let q = top_post(&b.inst, &r, &p).map_err(fmt_err)?.ok;
    ensure(q.is_empty(), || format!("top post is {}", b.inst.format_set(&q, kind)))?;
    let v = validity(System::Lctk, &d, &b.inst, &Judgment::new(p, r, Post::ok(empty))).map_err(fmt_err)?;
    ensure(v.is_pass(), || v.to_string())?;
    Ok("top post from top{0,8} (10 clamped to 8 on -8..8) is top{}".into())
}

fn a3_checks() -> Outcome {
    let m = a3_model();
    let report = check_kat_axioms(&m, AxiomOptions::default()).map_err(fmt_err)?;
    ensure(report.group_passed(Group::Kat), || {
        let names: Vec<_> = report.failures().map(|f| f.name).collect();
        format!("KAT laws fail: {names:?}")
    })?;
    let Model::Table(t) = &m else { return Err("a3 is not a table model".into()) };
    let a = t.element("a").ok_or("no element a")?;
    let x = Term::atom(Atom::action("x"));
    ensure(t.top_post(&x, t.one(), &|_| Some(a)) == Some(a), || "top . 1 . a differs from a".into())?;
    ensure(t.represent_as_top_test(a).is_none(), || "some test q has top . q = a".into())?;
    let tests: Vec<_> = t.tests().iter().map(|&q| t.name(q)).collect();
    Ok(format!("KAT laws hold; no q in {tests:?} has top.q = a"))
}

fn axiom_suite() -> Outcome {
    let small = rel_model(0, 2).map_err(fmt_err)?;
    let opts = AxiomOptions {
        diamond_only: true,
        ..AxiomOptions::default()
    };
    let r = check_kat_axioms(&small, opts).map_err(fmt_err)?;
    for f in &r.families {
        ensure(f.exhaustive, || format!("{} was sampled on 0..2", f.name))?;
        ensure(f.witness.is_none(), || format!("{} fails on 0..2: {}", f.name, f.witness.clone().unwrap_or_default()))?;
    }
    let large = rel_model(0, 5).map_err(fmt_err)?;
    let opts = AxiomOptions {
        samples: 10_000,
        ..opts
    };
    let r6 = check_kat_axioms(&large, opts).map_err(fmt_err)?;
    for f in &r6.families {
        ensure(f.checked >= 10_000, || format!("{} checked only {} cases on 0..5", f.name, f.checked))?;
        ensure(f.witness.is_none(), || format!("{} fails on 0..5: {}", f.name, f.witness.clone().unwrap_or_default()))?;
    }
    let cases: u64 = r.families.iter().map(|f| f.checked).sum();
    Ok(format!("{} families, {cases} exhaustive cases on 0..2, seed {}", r.families.len(), r6.seed))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = common::rng(0x6f72_6163);
    let leaves = common::leaves();
    let mut nonempty_err = 0;
    for case in 0..1000 {
        let n = 1 + case % 8;
        let inst = common::random_instance(&mut rng, n);
        let t = random_term(&mut rng, &leaves, 8);
        let p = common::random_set(&mut rng, n);
        let fast = post(&inst, &t, &p).map_err(fmt_err)?;
        let slow = oracle_post(&inst, &t, &p).map_err(fmt_err)?;
        ensure(fast == slow, || format!("case {case}: {t:?} from {p:?}: {fast:?} vs {slow:?}"))?;
        nonempty_err += usize::from(!fast.err.is_empty());
    }
    Ok(format!("1000 cases, {nonempty_err} with a nonempty err post"))
}

fn soundness_case(d: &GaloisInsertion, inst: &Instance, t: &Term, p: &PointSet) -> Result<(), String> {
    let tests = ConcreteKind::Tests;
    if d.kind() == tests {
        let c = post(inst, t, p).map_err(fmt_err)?;
        let a = apost(d, inst, t, d.alpha(p)).map_err(fmt_err)?;
        ensure(d.leq(d.alpha(&c.ok), a.ok) && d.leq(d.alpha(&c.err), a.err), || {
            format!("{}: apost unsound for {t:?} at {}", d.label(), inst.format_set(p, tests))
        })
    } else {
        let c = top_post(inst, t, p).map_err(fmt_err)?;
        let a = atop_post(d, inst, t, d.alpha(p)).map_err(fmt_err)?;
        ensure(d.leq(d.alpha(&c.ok), a.ok) && d.leq(d.alpha(&c.err), a.err), || {
            format!("{}: atop_post unsound for {t:?} at {}", d.label(), inst.format_set(p, ConcreteKind::ToppCodomains))
        })
    }
}

fn abstract_soundness() -> Outcome {
    let mut rng = common::rng(0x736f_756e);
    let leaves = common::leaves();
    type Maker = fn(&Model, ConcreteKind) -> GaloisInsertion;
    let makers: [(&str, Maker); 3] = [
        ("trivial", |m, k| trivial_domain(m, k)),
        ("sign", |m, k| sign_domain(m, k).unwrap()),
        ("interval", |m, k| interval_domain(m, k).unwrap()),
    ];
    for (name, make) in makers {
        for case in 0..1000 {
            let n = 1 + case % 8;
            let inst = common::random_instance(&mut rng, n);
            let t = random_term(&mut rng, &leaves, 8);
            let p = common::random_set(&mut rng, n);
            for kind in [ConcreteKind::Tests, ConcreteKind::ToppCodomains] {
                soundness_case(&make(&inst.model, kind), &inst, &t, &p).map_err(|e| format!("{name} case {case}: {e}"))?;
            }
        }
    }
    let gs = parse_model_file("model guarded-strings b1 b2\naction u\naction v\n").map_err(fmt_err)?;
    let d = parity_domain(&gs.model).map_err(fmt_err)?;
    let gs_leaves: Vec<Term> = ["u", "v"]
        .iter()
        .map(|a| Term::atom(Atom::action(*a)))
        .chain(["b1", "b2"].iter().map(|b| Term::atom(Atom::test(*b))))
        .chain([Term::Zero, Term::One])
        .collect();
    for case in 0..1000 {
        let t = random_term(&mut rng, &gs_leaves, 8);
        let p = common::random_set(&mut rng, gs.universe());
        soundness_case(&d, &gs, &t, &p).map_err(|e| format!("parity case {case}: {e}"))?;
    }
    Ok("1000 instances each for trivial, sign, interval (tests and codomains) and parity (tests)".into())
}

/// Instances on the carrier {0,1}: every `ok` relation for `a`, with an
/// empty or identity `err`, and the test `p` = {0}.
fn grid_instances() -> Vec<Instance> {
    let n = 2;
    let p = PointSet::singleton(n, 0);
    let mut out = Vec::new();
    for ok in Relation::all(n) {
        for err in [Relation::empty(n), Relation::identity(n)] {
            out.push(common::instance(n, (ok.clone(), err), (Relation::empty(n), Relation::empty(n)), &p));
        }
    }
    out
}

fn grid_terms(max: usize) -> Vec<Term> {
    let leaves = vec![Term::atom(Atom::action("a")), Term::atom(Atom::test("p")), Term::Zero, Term::One];
    terms_up_to(&leaves, max)
}

/// Requests of the shape `system` expects, over every pair of sets.
fn grid_posts(system: System, n: usize) -> Vec<Post> {
    let sets: Vec<PointSet> = PointSet::all(n).collect();
    let mut out = Vec::new();
    for q in &sets {
        if system.has_err() {
            out.push(Post::ok(q.clone()));
            out.push(Post::err(q.clone()));
            for r in &sets {
                out.push(Post::pair(q.clone(), r.clone()));
            }
        } else {
            out.push(Post::ok(q.clone()));
        }
    }
    out
}

fn round_trip_grid() -> Outcome {
    let terms = grid_terms(4);
    let systems = [System::Lck, System::Ul, System::Lcil, System::Il, System::Lctk];
    let (mut synthesized, mut skipped) = (0u64, 0u64);
    for (k, inst) in grid_instances().iter().enumerate() {
        let n = inst.universe();
        // Odd instances differ from their predecessor only in `err`.
        for sys in systems.into_iter().filter(|s| s.has_err() || k % 2 == 0) {
            let kind = sys.kind();
            let domains: Vec<GaloisInsertion> = if sys.is_local() {
                vec![trivial_domain(&inst.model, kind), sign_domain(&inst.model, kind).map_err(fmt_err)?]
            } else {
                vec![trivial_domain(&inst.model, kind)]
            };
            let posts = grid_posts(sys, n);
            for d in &domains {
                let mut complete = std::collections::BTreeMap::new();
                for name in ["a", "p"] {
                    let w = global_complete_for(d, inst, name, sys.transfer_components()).map_err(fmt_err)?;
                    complete.insert(name.to_string(), w.is_none());
                }
                for t in &terms {
                    let atoms_complete = katlcl::term::atoms_of(t).iter().all(|a| complete[&a.name]);
                    for pre in PointSet::all(n) {
                        for q in &posts {
                            let j = Judgment::new(pre.clone(), t.clone(), q.clone());
                            let ctx = || format!("instance {k}, {sys}, {}: {}", d.label(), j.display(inst, kind));
                            let valid = validity(sys, d, inst, &j).map_err(fmt_err)?.is_pass();
                            match synthesize(sys, d, inst, &j) {
                                Ok(dv) => {
                                    synthesized += 1;
                                    ensure(valid, || format!("{}: synthesized an invalid triple", ctx()))?;
                                    let v = verify(sys, d, inst, &dv).map_err(fmt_err)?;
                                    ensure(v.is_pass(), || format!("{}: {v}", ctx()))?;
                                    let c = conclude(sys, d, inst, &dv).map_err(fmt_err)?.map_err(|f| f.to_string())?;
                                    ensure(c == j, || format!("{}: concluded {}", ctx(), c.display(inst, kind)))?;
                                    ensure(validity(sys, d, inst, &c).map_err(fmt_err)?.is_pass(), || {
                                        format!("{}: verified conclusion is invalid", ctx())
                                    })?;
                                }
                                Err(SynthError::Invalid(_)) => ensure(!valid, || format!("{}: valid but reported invalid", ctx()))?,
                                Err(SynthError::Incomplete { atom, .. }) => {
                                    ensure(!complete[&atom], || format!("{}: `{atom}` is complete", ctx()))?;
                                    ensure(sys.is_local() && !atoms_complete, || format!("{}: incomplete without cause", ctx()))?;
                                    skipped += 1;
                                }
                                Err(e) => return Err(format!("{}: {e}", ctx())),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{} terms, {synthesized} derivations built and checked, {skipped} valid triples over incomplete atoms", terms.len()))
}

fn corpus() -> Result<(Instance, Vec<(System, String, String)>), String> {
    let inst = parse_model_file(&common::bundle("corpus", "model.kat")).map_err(fmt_err)?;
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bundles/corpus");
    let mut out = Vec::new();
    for (dir, sys) in [("ul", System::Ul), ("il", System::Il)] {
        let mut files: Vec<_> = std::fs::read_dir(root.join(dir)).map_err(fmt_err)?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
        files.sort();
        for f in files {
            let src = std::fs::read_to_string(&f).map_err(fmt_err)?;
            out.push((sys, format!("{dir}/{}", f.file_name().unwrap().to_string_lossy()), src));
        }
    }
    Ok((inst, out))
}

fn agree(inst: &Instance, a: (System, &Judgment), b: (System, &Judgment)) -> Result<(), String> {
    let va = validity(a.0, &trivial_domain(&inst.model, a.0.kind()), inst, a.1).map_err(fmt_err)?;
    let vb = validity(b.0, &trivial_domain(&inst.model, b.0.kind()), inst, b.1).map_err(fmt_err)?;
    ensure(va.is_pass() == vb.is_pass(), || {
        format!("{} says {} but {} says {} for {}", a.0, va.status, b.0, vb.status, a.1.display(inst, a.0.kind()))
    })
}

fn equivalences() -> Outcome {
    let (inst, files) = corpus()?;
    let (mut ul, mut il) = (0, 0);
    for (sys, name, src) in &files {
        let local = if *sys == System::Ul { System::Lck } else { System::Lcil };
        let trivial = trivial_domain(&inst.model, sys.kind());
        let dv = parse_derivation(&inst, *sys, src).map_err(|e| format!("{name}: {e}"))?;
        let want = conclude(*sys, &trivial, &inst, &dv).map_err(fmt_err)?.map_err(|f| format!("{name}: {f}"))?;
        let there = translate(*sys, Direction::ToLocal, &inst, &dv).map_err(|e| format!("{name}: {e}"))?;
        let v = verify(local, &trivial, &inst, &there).map_err(fmt_err)?;
        ensure(v.is_pass(), || format!("{name} in {local}: {v}"))?;
        let got = conclude(local, &trivial, &inst, &there).map_err(fmt_err)?.map_err(|f| f.to_string())?;
        ensure(got == want, || format!("{name}: {local} concluded {}", got.display(&inst, local.kind())))?;
        let back = translate(local, Direction::ToUnder, &inst, &there).map_err(|e| format!("{name}: {e}"))?;
        let v = verify(*sys, &trivial, &inst, &back).map_err(fmt_err)?;
        ensure(v.is_pass(), || format!("{name} back in {sys}: {v}"))?;
        let got = conclude(*sys, &trivial, &inst, &back).map_err(fmt_err)?.map_err(|f| f.to_string())?;
        ensure(got == want, || format!("{name}: back in {sys} concluded {}", got.display(&inst, sys.kind())))?;
        if *sys == System::Ul {
            ul += 1;
        } else {
            il += 1;
        }
    }
    ensure(ul >= 20 && il >= 20, || format!("corpus has {ul} ul and {il} il derivations"))?;

    let terms = grid_terms(4);
    let mut compared = 0u64;
    for inst in grid_instances() {
        let n = inst.universe();
        for t in &terms {
            for pre in PointSet::all(n) {
                for q in grid_posts(System::Il, n) {
                    let j = Judgment::new(pre.clone(), t.clone(), q.clone());
                    agree(&inst, (System::Lcil, &j), (System::Il, &j))?;
                    compared += 1;
                    if q.err.is_none() {
                        agree(&inst, (System::Lck, &j), (System::Ul, &j))?;
                        agree(&inst, (System::Lctk, &j), (System::Ul, &j))?;
                        compared += 2;
                    }
                }
            }
        }
    }
    Ok(format!("{ul} ul and {il} il derivations round-trip; {compared} validity comparisons agree"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("guarded strings with parity", parity_example, 1),
        ("interval errors on 0..11", interval_example, 1),
        ("sign over topped codomains", sign_example, 1),
        ("A3 table model", a3_checks, 1),
        ("diamond axiom suite", axiom_suite, 60),
        ("oracle equivalence", oracle_equivalence, 60),
        ("abstract soundness", abstract_soundness, 60),
        ("synthesis round trip grid", round_trip_grid, 120),
        ("equivalence with ul and il", equivalences, 60),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if took > Duration::from_secs(*limit) {
                Err(format!("{detail}; took {took:.2?}, limit {limit} s"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name} ({took:.2?}): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
