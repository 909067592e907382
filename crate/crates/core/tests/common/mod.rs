#![allow(dead_code)]

use katlcl::model::{rel_model, AtomValue, Element, Evaluation, Instance, Relation};
use katlcl::pointset::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use katlcl::term::{Atom, AtomKind, Term};

/// Relational instance on `0..n` with actions `a`, `b` (each an `(ok, err)`
/// pair) and a test `p`.
pub fn instance(n: usize, a: (Relation, Relation), b: (Relation, Relation), p: &PointSet) -> Instance {
    let model = rel_model(0, n as i64 - 1).unwrap();
    let mut eval = Evaluation::new();
    for (name, (ok, err)) in [("a", a), ("b", b)] {
        eval.insert(
            name,
            AtomValue {
                kind: AtomKind::Action,
                ok: Element::Rel(ok),
                err: Element::Rel(err),
            },
        );
    }
    eval.insert(
        "p",
        AtomValue {
            kind: AtomKind::Test,
            ok: Element::Rel(Relation::test(p)),
            err: Element::Rel(Relation::empty(n)),
        },
    );
    Instance::new(model, eval)
}

/// A random instance on `n` points. The `err` parts are sparser than the
/// `ok` parts so that both components stay interesting.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> Instance {
    let act = |rng: &mut R| (Relation::random(rng, n, 0.3), Relation::random(rng, n, 0.1));
    let a = act(rng);
    let b = act(rng);
    let p = random_set(rng, n);
    instance(n, a, b, &p)
}

pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> PointSet {
    PointSet::from_points(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a`, `b`, `p`, `0` and `1`.
pub fn leaves() -> Vec<Term> {
    vec![
        Term::atom(Atom::action("a")),
        Term::atom(Atom::action("b")),
        Term::atom(Atom::test("p")),
        Term::Zero,
        Term::One,
    ]
}

pub fn bundle(dir: &str, file: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bundles").join(dir).join(file);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
