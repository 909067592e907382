//! Executable axiom suites for finite models.
//!
//! Each family is checked exhaustively when the number of quantified tuples
//! fits the budget, and otherwise on random samples drawn with a fixed seed.
//! KAT laws and backward-diamond laws are reported in separate groups, since
//! a KAT can satisfy all of the former and still lack a lawful diamond.

use std::collections::HashMap;
use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Model, Relation, TableModel};
use crate::pointset::PointSet;

/// Seed used by every sampled family unless overridden.
pub const DEFAULT_SEED: u64 = 0x4b41_5431;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Kat,
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub name: &'static str,
    pub group: Group,
    pub checked: u64,
    pub exhaustive: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub families: Vec<FamilyReport>,
    pub seed: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.witness.is_none())
    }

    pub fn group_passed(&self, group: Group) -> bool {
        self.families.iter().filter(|f| f.group == group).all(|f| f.witness.is_none())
    }

    pub fn family(&self, name: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FamilyReport> {
        self.families.iter().filter(|f| f.witness.is_some())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AxiomOptions {
    /// Largest number of tuples a family may enumerate exhaustively.
    pub budget: u64,
    /// Number of random tuples per family when enumeration is over budget.
    pub samples: u64,
    pub seed: u64,
    /// Skip the KAT group (useful when only the diamond laws are of interest).
    pub diamond_only: bool,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        AxiomOptions {
            budget: 1 << 22,
            samples: 10_000,
            seed: DEFAULT_SEED,
            diamond_only: false,
        }
    }
}

/// The operations an axiom suite needs from a finite model.
trait Algebra {
    type E: Clone + PartialEq + Debug;
    fn plus(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn times(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn star(&self, a: &Self::E) -> Self::E;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn elements(&self) -> Option<Vec<Self::E>>;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::E;
    fn tests(&self) -> Vec<Self::E>;
    fn bdia(&self, a: &Self::E, p: &Self::E) -> Option<Self::E>;
    fn show(&self, e: &Self::E) -> String;

    fn leq(&self, a: &Self::E, b: &Self::E) -> bool {
        self.plus(a, b) == *b
    }
}

struct RelAlgebra {
    n: usize,
}

impl Algebra for RelAlgebra {
    type E = Relation;
    fn plus(&self, a: &Relation, b: &Relation) -> Relation {
        a.union(b)
    }
    fn times(&self, a: &Relation, b: &Relation) -> Relation {
        a.compose(b)
    }
    fn star(&self, a: &Relation) -> Relation {
        a.star()
    }
    fn zero(&self) -> Relation {
        Relation::empty(self.n)
    }
    fn one(&self) -> Relation {
        Relation::identity(self.n)
    }
    fn elements(&self) -> Option<Vec<Relation>> {
        (self.n <= 4).then(|| Relation::all(self.n).collect())
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Relation {
        let density = [0.1, 0.25, 0.5][rng.gen_range(0..3)];
        Relation::random(rng, self.n, density)
    }
    fn tests(&self) -> Vec<Relation> {
        PointSet::all(self.n).map(|s| Relation::test(&s)).collect()
    }
    fn bdia(&self, a: &Relation, p: &Relation) -> Option<Relation> {
        Some(Relation::test(&a.image(&p.test_support())))
    }
    fn show(&self, e: &Relation) -> String {
        format!("{e:?}")
    }
}

struct TableAlgebra<'a> {
    t: &'a TableModel,
}

impl Algebra for TableAlgebra<'_> {
    type E = usize;
    fn plus(&self, a: &usize, b: &usize) -> usize {
        self.t.plus(*a, *b)
    }
    fn times(&self, a: &usize, b: &usize) -> usize {
        self.t.times(*a, *b)
    }
    fn star(&self, a: &usize) -> usize {
        self.t.star(*a)
    }
    fn zero(&self) -> usize {
        self.t.zero()
    }
    fn one(&self) -> usize {
        self.t.one()
    }
    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.t.len()).collect())
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..self.t.len())
    }
    fn tests(&self) -> Vec<usize> {
        self.t.tests().to_vec()
    }
    fn bdia(&self, a: &usize, p: &usize) -> Option<usize> {
        self.t.bdia(*a, *p)
    }
    fn show(&self, e: &usize) -> String {
        self.t.name(*e).to_string()
    }
}

type Check<'f, E> = dyn Fn(&[E], &[E]) -> std::result::Result<(), String> + 'f;

struct Runner<'a, A: Algebra> {
    alg: &'a A,
    elements: Option<Vec<A::E>>,
    tests: Vec<A::E>,
    opts: AxiomOptions,
    rng: ChaCha8Rng,
    out: Vec<FamilyReport>,
}

impl<A: Algebra> Runner<'_, A> {
    fn family(&mut self, name: &'static str, group: Group, ke: u32, kt: u32, check: &Check<'_, A::E>) {
        let ne = self.elements.as_ref().map(|e| e.len() as u64);
        let nt = self.tests.len() as u64;
        let total = ne.and_then(|ne| ne.checked_pow(ke)).and_then(|x| x.checked_mul(nt.checked_pow(kt)?));
        let mut report = FamilyReport {
            name,
            group,
            checked: 0,
            exhaustive: false,
            witness: None,
        };
        match total {
            Some(total) if total <= self.opts.budget => {
                report.exhaustive = true;
                let elems = self.elements.as_ref().unwrap();
                let mut idx = vec![0usize; (ke + kt) as usize];
                let radix: Vec<usize> = (0..ke).map(|_| elems.len()).chain((0..kt).map(|_| self.tests.len())).collect();
                'outer: for _ in 0..total {
                    let es: Vec<A::E> = idx[..ke as usize].iter().map(|&i| elems[i].clone()).collect();
                    let ts: Vec<A::E> = idx[ke as usize..].iter().map(|&i| self.tests[i].clone()).collect();
                    report.checked += 1;
                    if let Err(w) = check(&es, &ts) {
                        report.witness = Some(w);
                        break 'outer;
                    }
                    for (d, r) in idx.iter_mut().zip(&radix) {
                        *d += 1;
                        if *d < *r {
                            break;
                        }
                        *d = 0;
                    }
                }
            }
            _ => {
                for _ in 0..self.opts.samples {
                    let es: Vec<A::E> = (0..ke)
                        .map(|_| match &self.elements {
                            Some(all) if self.rng.gen_bool(0.5) => all[self.rng.gen_range(0..all.len())].clone(),
                            _ => self.alg.sample(&mut self.rng),
                        })
                        .collect();
                    let ts: Vec<A::E> = (0..kt).map(|_| self.tests[self.rng.gen_range(0..self.tests.len())].clone()).collect();
                    report.checked += 1;
                    if let Err(w) = check(&es, &ts) {
                        report.witness = Some(w);
                        break;
                    }
                }
            }
        }
        self.out.push(report);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_suite<A: Algebra>(alg: &A, opts: AxiomOptions) -> AxiomReport {
    let mut r = Runner {
        alg,
        elements: alg.elements(),
        tests: alg.tests(),
        opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        out: Vec::new(),
    };
    let a = alg;
    let s = |e: &A::E| a.show(e);
    let zero = a.zero();
    let one = a.one();
    let tests = r.tests.clone();
    let is_test = |e: &A::E| tests.contains(e);
    use Group::{Diamond, Kat};

    if !opts.diamond_only {
        r.family("plus-associative", Kat, 3, 0, &|e, _| {
            let (x, y, z) = (&e[0], &e[1], &e[2]);
            ensure(a.plus(&a.plus(x, y), z) == a.plus(x, &a.plus(y, z)), || format!("a={} b={} c={}", s(x), s(y), s(z)))
        });
        r.family("plus-commutative", Kat, 2, 0, &|e, _| {
            ensure(a.plus(&e[0], &e[1]) == a.plus(&e[1], &e[0]), || format!("a={} b={}", s(&e[0]), s(&e[1])))
        });
        r.family("plus-idempotent", Kat, 1, 0, &|e, _| {
            ensure(a.plus(&e[0], &e[0]) == e[0], || format!("a={}", s(&e[0])))
        });
        r.family("plus-identity", Kat, 1, 0, &|e, _| {
            ensure(a.plus(&zero, &e[0]) == e[0] && a.plus(&e[0], &zero) == e[0], || format!("a={}", s(&e[0])))
        });
        r.family("times-associative", Kat, 3, 0, &|e, _| {
            let (x, y, z) = (&e[0], &e[1], &e[2]);
            ensure(a.times(&a.times(x, y), z) == a.times(x, &a.times(y, z)), || {
                format!("a={} b={} c={}", s(x), s(y), s(z))
            })
        });
        r.family("times-identity", Kat, 1, 0, &|e, _| {
            ensure(a.times(&one, &e[0]) == e[0] && a.times(&e[0], &one) == e[0], || format!("a={}", s(&e[0])))
        });
        r.family("annihilation", Kat, 1, 0, &|e, _| {
            ensure(a.times(&zero, &e[0]) == zero && a.times(&e[0], &zero) == zero, || format!("a={}", s(&e[0])))
        });
        r.family("distributivity", Kat, 3, 0, &|e, _| {
            let (x, y, z) = (&e[0], &e[1], &e[2]);
            let left = a.times(x, &a.plus(y, z)) == a.plus(&a.times(x, y), &a.times(x, z));
            let right = a.times(&a.plus(y, z), x) == a.plus(&a.times(y, x), &a.times(z, x));
            ensure(left && right, || format!("a={} b={} c={}", s(x), s(y), s(z)))
        });
        r.family("star-unfold", Kat, 1, 0, &|e, _| {
            let x = &e[0];
            let st = a.star(x);
            let l = a.leq(&a.plus(&one, &a.times(x, &st)), &st);
            let rr = a.leq(&a.plus(&one, &a.times(&st, x)), &st);
            ensure(l && rr, || format!("a={}", s(x)))
        });
        r.family("star-induction", Kat, 3, 0, &|e, _| {
            let (x, b, c) = (&e[0], &e[1], &e[2]);
            let st = a.star(x);
            let l = !a.leq(&a.plus(b, &a.times(x, c)), c) || a.leq(&a.times(&st, b), c);
            let rr = !a.leq(&a.plus(b, &a.times(c, x)), c) || a.leq(&a.times(b, &st), c);
            ensure(l && rr, || format!("a={} b={} c={}", s(x), s(b), s(c)))
        });
        r.family("test-boolean-algebra", Kat, 0, 2, &|_, t| {
            let (p, q) = (&t[0], &t[1]);
            let closed = is_test(&a.plus(p, q)) && is_test(&a.times(p, q));
            let meet = a.times(p, q) == a.times(q, p) && a.times(p, p) == *p;
            let complement = tests.iter().any(|n| a.plus(p, n) == one && a.times(p, n) == zero);
            let distrib = tests.iter().all(|r| a.times(p, &a.plus(q, r)) == a.plus(&a.times(p, q), &a.times(p, r)));
            ensure(closed && meet && complement && distrib, || format!("p={} q={}", s(p), s(q)))
        });
    }

    let bd = |x: &A::E, p: &A::E| a.bdia(x, p);
    let sd = |o: &Option<A::E>| o.as_ref().map_or("undefined".to_string(), |e| s(e));
    r.family("bd1", Diamond, 1, 2, &|e, t| {
        let (x, p, q) = (&e[0], &t[0], &t[1]);
        let Some(d) = bd(x, p) else {
            return Err(format!("no least test for a={} p={}", s(x), s(p)));
        };
        ensure(a.leq(&d, q) == a.leq(&a.times(p, x), &a.times(x, q)), || {
            format!("a={} p={} q={} <a]p={}", s(x), s(p), s(q), s(&d))
        })
    });
    r.family("bd2", Diamond, 2, 1, &|e, t| {
        let (x, y, p) = (&e[0], &e[1], &t[0]);
        let lhs = bd(&a.times(x, y), p);
        let rhs = bd(x, p).and_then(|d| bd(y, &d));
        ensure(lhs.is_some() && lhs == rhs, || {
            format!("a={} b={} p={} <ab]p={} <b]<a]p={}", s(x), s(y), s(p), sd(&lhs), sd(&rhs))
        })
    });
    let join = |u: Option<A::E>, v: Option<A::E>| Some(a.plus(&u?, &v?));
    r.family("additive-in-element", Diamond, 2, 1, &|e, t| {
        let (x, y, p) = (&e[0], &e[1], &t[0]);
        let lhs = bd(&a.plus(x, y), p);
        ensure(lhs.is_some() && lhs == join(bd(x, p), bd(y, p)), || format!("a={} b={} p={}", s(x), s(y), s(p)))
    });
    r.family("additive-in-test", Diamond, 1, 2, &|e, t| {
        let (x, p, q) = (&e[0], &t[0], &t[1]);
        let lhs = bd(x, &a.plus(p, q));
        ensure(lhs.is_some() && lhs == join(bd(x, p), bd(x, q)), || format!("a={} p={} q={}", s(x), s(p), s(q)))
    });
    r.family("isotone-in-element", Diamond, 2, 1, &|e, t| {
        let (x, y, p) = (&e[0], &e[1], &t[0]);
        let ok = !a.leq(x, y)
            || matches!((bd(x, p), bd(y, p)), (Some(u), Some(v)) if a.leq(&u, &v));
        ensure(ok, || format!("a={} b={} p={}", s(x), s(y), s(p)))
    });
    r.family("isotone-in-test", Diamond, 1, 2, &|e, t| {
        let (x, p, q) = (&e[0], &t[0], &t[1]);
        let ok = !a.leq(p, q) || matches!((bd(x, p), bd(x, q)), (Some(u), Some(v)) if a.leq(&u, &v));
        ensure(ok, || format!("a={} p={} q={}", s(x), s(p), s(q)))
    });
    r.family("diamond-of-test", Diamond, 0, 2, &|_, t| {
        let (sv, p) = (&t[0], &t[1]);
        ensure(bd(sv, p) == Some(a.times(p, sv)), || format!("s={} p={}", s(sv), s(p)))
    });
    r.family("diamond-star-unfold", Diamond, 1, 1, &|e, t| {
        let (x, p) = (&e[0], &t[0]);
        let st = bd(&a.star(x), p);
        let ok = match &st {
            Some(st) => matches!(bd(x, st), Some(d) if a.leq(&a.plus(p, &d), st)),
            None => false,
        };
        ensure(ok, || format!("a={} p={}", s(x), s(p)))
    });
    r.family("diamond-star-join", Diamond, 1, 1, &|e, t| {
        let (x, p) = (&e[0], &t[0]);
        let mut seen: Vec<A::E> = Vec::new();
        let mut power = one.clone();
        let mut acc = Some(zero.clone());
        while !seen.contains(&power) {
            acc = join(acc, bd(&power, p));
            seen.push(power.clone());
            power = a.times(&power, x);
        }
        let lhs = bd(&a.star(x), p);
        ensure(lhs.is_some() && lhs == acc, || format!("a={} p={} <a*]p={} join={}", s(x), s(p), sd(&lhs), sd(&acc)))
    });
    AxiomReport {
        families: r.out,
        seed: opts.seed,
    }
}

/// Runs every axiom family on a relational or table model.
pub fn check_kat_axioms(model: &Model, opts: AxiomOptions) -> Result<AxiomReport> {
    match model {
        Model::Relational(r) => Ok(run_suite(&RelAlgebra { n: r.size() }, opts)),
        Model::Table(t) => {
            if t.len() > 10_000 {
                return Err(Error::semantic("tables above 10^4 elements are not supported"));
            }
            Ok(run_suite(&TableAlgebra { t }, opts))
        }
        Model::Guarded(_) => Err(Error::semantic(
            "the guarded-string model only provides primitive diamond steps; axiom suites need materialized elements",
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionalityReport {
    pub relations: usize,
    /// Pairs of distinct relations with identical diamonds.
    pub violations: Vec<(Relation, Relation)>,
}

/// The first singleton test `{x}` on which the diamonds of `a` and `b` differ.
pub fn separating_test(a: &Relation, b: &Relation) -> Option<usize> {
    let n = a.carrier_size();
    (0..n).find(|&x| {
        let p = PointSet::singleton(n, x);
        a.image(&p) != b.image(&p)
    })
}

/// Checks that diamonds on singleton tests tell all relations apart.
pub fn check_extensionality(model: &Model) -> Result<ExtensionalityReport> {
    let Model::Relational(r) = model else {
        return Err(Error::semantic("extensionality is checked on relational models only"));
    };
    let n = r.size();
    if n > 4 {
        return Err(Error::semantic("extensionality enumeration needs a carrier of at most 4 points"));
    }
    let mut seen: HashMap<Vec<PointSet>, Relation> = HashMap::new();
    let mut violations = Vec::new();
    let mut relations = 0;
    for a in Relation::all(n) {
        relations += 1;
        let signature: Vec<PointSet> = (0..n).map(|x| a.image(&PointSet::singleton(n, x))).collect();
        if let Some(b) = seen.get(&signature) {
            violations.push((b.clone(), a));
        } else {
            seen.insert(signature, a);
        }
    }
    Ok(ExtensionalityReport { relations, violations })
}
