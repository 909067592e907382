//! Galois insertions between a powerset of points (tests, or codomains of
//! topped elements) and a finite abstract lattice.
//!
//! Every domain is stored through its concretization table. The image of `γ`
//! must be a Moore family (closed under intersection and containing the full
//! set); `α(c)` is then the element whose concretization is the intersection
//! of all concretizations covering `c`.

pub mod file;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Model};
use crate::pointset::PointSet;

pub use file::parse_domain_file;

/// Index of an abstract element.
pub type Abs = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    Table,
    /// Element `0` is bottom, then `[l,u]` for `l ≤ u` in lexicographic order.
    Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisInsertion {
    label: String,
    kind: ConcreteKind,
    universe: usize,
    names: Vec<String>,
    gammas: Vec<PointSet>,
    index: HashMap<PointSet, Abs>,
    shape: Shape,
    bottom: Abs,
    top: Abs,
    overrides: Vec<(PointSet, Abs)>,
}

impl GaloisInsertion {
    /// Builds a domain from named concretizations. Elements whose
    /// concretization repeats an earlier one are dropped.
    pub fn from_table(
        label: impl Into<String>,
        kind: ConcreteKind,
        universe: usize,
        elems: Vec<(String, PointSet)>,
    ) -> Result<Self> {
        let mut names = Vec::new();
        let mut gammas: Vec<PointSet> = Vec::new();
        for (name, g) in elems {
            if g.universe() != universe {
                return Err(Error::semantic(format!("concretization of `{name}` has the wrong universe")));
            }
            if names.contains(&name) {
                return Err(Error::semantic(format!("abstract element `{name}` declared twice")));
            }
            if !gammas.contains(&g) {
                names.push(name);
                gammas.push(g);
            }
        }
        let top = gammas
            .iter()
            .position(PointSet::is_full)
            .ok_or_else(|| Error::semantic("no abstract element concretizes to the full set"))?;
        let index: HashMap<PointSet, Abs> = gammas.iter().cloned().zip(0..).collect();
        for i in 0..gammas.len() {
            for j in i + 1..gammas.len() {
                let meet = gammas[i].intersection(&gammas[j]);
                if !index.contains_key(&meet) {
                    return Err(Error::semantic(format!(
                        "concretizations of `{}` and `{}` meet outside the domain, so no best abstraction exists",
                        names[i], names[j]
                    )));
                }
            }
        }
        let meet_all = gammas.iter().fold(PointSet::full(universe), |acc, g| acc.intersection(g));
        let bottom = index[&meet_all];
        Ok(GaloisInsertion {
            label: label.into(),
            kind,
            universe,
            names,
            gammas,
            index,
            shape: Shape::Table,
            bottom,
            top,
            overrides: Vec::new(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ConcreteKind {
        self.kind
    }

    /// Same domain over the other concrete powerset (both have the same points).
    pub fn with_kind(mut self, kind: ConcreteKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.names.len() == 1
    }

    pub fn name(&self, a: Abs) -> &str {
        &self.names[a]
    }

    pub fn element(&self, name: &str) -> Option<Abs> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<Abs> {
        0..self.names.len()
    }

    pub fn bottom(&self) -> Abs {
        self.bottom
    }

    pub fn top(&self) -> Abs {
        self.top
    }

    pub fn gamma(&self, a: Abs) -> &PointSet {
        &self.gammas[a]
    }

    pub fn alpha(&self, c: &PointSet) -> Abs {
        if let Some((_, a)) = self.overrides.iter().find(|(k, _)| k == c) {
            return *a;
        }
        match self.shape {
            Shape::Interval => match (c.first(), c.last()) {
                (Some(l), Some(u)) => interval_index(self.universe, l, u),
                _ => 0,
            },
            Shape::Table => {
                let mut meet = PointSet::full(self.universe);
                for g in &self.gammas {
                    if c.is_subset(g) {
                        meet = meet.intersection(g);
                    }
                }
                self.index[&meet]
            }
        }
    }

    /// `A(c) = γ(α(c))`.
    pub fn closure(&self, c: &PointSet) -> PointSet {
        self.gammas[self.alpha(c)].clone()
    }

    pub fn leq(&self, a: Abs, b: Abs) -> bool {
        self.gammas[a].is_subset(&self.gammas[b])
    }

    pub fn join(&self, a: Abs, b: Abs) -> Abs {
        if a == b {
            return a;
        }
        self.alpha(&self.gammas[a].union(&self.gammas[b]))
    }

    /// Overrides `α` on one input, for fault-injection tests.
    pub fn with_alpha_override(mut self, c: PointSet, a: Abs) -> Self {
        self.overrides.push((c, a));
        self
    }

    fn check_model(&self, model: &Model) -> Result<()> {
        if model.universe() != self.universe {
            return Err(Error::semantic(format!(
                "domain `{}` has {} points but the model has {}",
                self.label,
                self.universe,
                model.universe()
            )));
        }
        if !model.supports(self.kind) {
            return Err(Error::semantic(match (model, self.kind) {
                (Model::Table(_), ConcreteKind::Tests) => "table models have no powerset of tests to abstract",
                _ => "only relational models have topped codomains to abstract",
            }));
        }
        Ok(())
    }

    /// Checks that the domain fits the model and is meant for `kind`.
    pub fn ensure_compatible(&self, model: &Model, kind: ConcreteKind) -> Result<()> {
        self.check_model(model)?;
        if self.kind != kind {
            return Err(Error::semantic(format!(
                "domain `{}` abstracts {} but {} are required",
                self.label,
                kind_name(self.kind),
                kind_name(kind)
            )));
        }
        Ok(())
    }
}

fn kind_name(kind: ConcreteKind) -> &'static str {
    match kind {
        ConcreteKind::Tests => "tests",
        ConcreteKind::ToppCodomains => "topped codomains",
    }
}

fn interval_index(n: usize, l: usize, u: usize) -> Abs {
    1 + l * n - l * l.saturating_sub(1) / 2 + (u - l)
}

pub fn trivial_domain(model: &Model, kind: ConcreteKind) -> GaloisInsertion {
    let n = model.universe();
    GaloisInsertion::from_table("trivial", kind, n, vec![("top".into(), PointSet::full(n))])
        .expect("the trivial domain is a Moore family")
}

/// `{bot, e, o, top}` over two primitive tests: `e` holds the atoms where both
/// tests agree, `o` those where they differ.
pub fn parity_domain(model: &Model) -> Result<GaloisInsertion> {
    let Model::Guarded(g) = model else {
        return Err(Error::semantic("the parity domain needs the guarded-string model"));
    };
    if g.tests().len() != 2 {
        return Err(Error::semantic("the parity domain needs exactly two primitive tests"));
    }
    let n = g.atom_count();
    let (b1, b2) = (g.positive(0), g.positive(1));
    let even = b1.intersection(&b2).union(&b1.union(&b2).complement());
    let odd = even.complement();
    GaloisInsertion::from_table(
        "parity",
        ConcreteKind::Tests,
        n,
        vec![
            ("bot".into(), PointSet::empty(n)),
            ("e".into(), even),
            ("o".into(), odd),
            ("top".into(), PointSet::full(n)),
        ],
    )
}

/// The eight sign classes over a relational carrier containing 0. Classes that
/// coincide on the carrier are merged, keeping the first name.
pub fn sign_domain(model: &Model, kind: ConcreteKind) -> Result<GaloisInsertion> {
    let Some(r) = model.rel() else {
        return Err(Error::semantic("the sign domain needs a relational model"));
    };
    if r.index(0).is_none() {
        return Err(Error::semantic(format!("carrier {}..{} does not contain 0", r.lo(), r.hi())));
    }
    let classes: [(&str, fn(i64) -> bool); 8] = [
        ("empty", |_| false),
        ("Z=0", |z| z == 0),
        ("Z>0", |z| z > 0),
        ("Z<0", |z| z < 0),
        ("Z>=0", |z| z >= 0),
        ("Z<=0", |z| z <= 0),
        ("Z!=0", |z| z != 0),
        ("Z", |_| true),
    ];
    let elems = classes.iter().map(|(name, pred)| (name.to_string(), r.set_where(pred))).collect();
    GaloisInsertion::from_table("sign", kind, r.size(), elems)
}

/// Bottom plus every interval `[l,u]` inside the carrier.
pub fn interval_domain(model: &Model, kind: ConcreteKind) -> Result<GaloisInsertion> {
    let Some(r) = model.rel() else {
        return Err(Error::semantic("the interval domain needs a relational model"));
    };
    let n = r.size();
    let mut names = vec!["bot".to_string()];
    let mut gammas = vec![PointSet::empty(n)];
    for l in 0..n {
        for u in l..n {
            debug_assert_eq!(interval_index(n, l, u), names.len());
            names.push(format!("[{},{}]", r.value(l), r.value(u)));
            gammas.push(PointSet::from_points(n, l..=u));
        }
    }
    let index = gammas.iter().cloned().zip(0..).collect();
    Ok(GaloisInsertion {
        label: "interval".into(),
        kind,
        universe: n,
        top: interval_index(n, 0, n - 1),
        names,
        gammas,
        index,
        shape: Shape::Interval,
        bottom: 0,
        overrides: Vec::new(),
    })
}

/// Looks up a built-in domain by name.
pub fn builtin_domain(name: &str, model: &Model, kind: ConcreteKind) -> Result<GaloisInsertion> {
    match name {
        "trivial" => Ok(trivial_domain(model, kind)),
        "parity" if kind == ConcreteKind::Tests => parity_domain(model),
        "parity" => Err(Error::semantic("the parity domain abstracts tests only")),
        "sign" => sign_domain(model, kind),
        "interval" => interval_domain(model, kind),
        other => Err(Error::semantic(format!("unknown domain `{other}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub law: &'static str,
    pub checked: u64,
    pub exhaustive: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisReport {
    pub laws: Vec<LawReport>,
}

impl GaloisReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.witness.is_none())
    }

    pub fn law(&self, name: &str) -> Option<&LawReport> {
        self.laws.iter().find(|l| l.law == name)
    }
}

const EXHAUSTIVE_POINTS: usize = 20;
const PAIR_POINTS: usize = 10;

/// Checks the insertion laws; enumerates the concrete lattice when it has at
/// most 2^20 elements (2^10 for laws over pairs) and samples otherwise.
pub fn check_galois(d: &GaloisInsertion, model: &Model, samples: u64, seed: u64) -> Result<GaloisReport> {
    d.check_model(model)?;
    let n = d.universe;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fmt = |c: &PointSet| model.format_set(c, d.kind);
    let singles: Vec<PointSet> = if n <= EXHAUSTIVE_POINTS {
        PointSet::all(n).collect()
    } else {
        (0..samples).map(|_| random_set(&mut rng, n)).collect()
    };
    let pairs: Vec<(PointSet, PointSet)> = if n <= PAIR_POINTS {
        let all: Vec<PointSet> = PointSet::all(n).collect();
        all.iter().flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone()))).collect()
    } else {
        (0..samples).map(|_| (random_set(&mut rng, n), random_set(&mut rng, n))).collect()
    };
    let mut laws = Vec::new();
    let mut law = |name: &'static str, exhaustive: bool, results: &mut dyn Iterator<Item = Option<String>>| {
        let mut checked = 0;
        let mut witness = None;
        for r in results {
            checked += 1;
            if r.is_some() {
                witness = r;
                break;
            }
        }
        laws.push(LawReport {
            law: name,
            checked,
            exhaustive,
            witness,
        });
    };
    let elems: Vec<Abs> = d.elements().collect();
    law(
        "gamma-monotone",
        true,
        &mut elems.iter().flat_map(|&a| elems.iter().map(move |&b| (a, b))).map(|(a, b)| {
            (d.leq(a, b) && !d.gamma(a).is_subset(d.gamma(b))).then(|| format!("{} <= {}", d.name(a), d.name(b)))
        }),
    );
    law(
        "alpha-gamma-identity",
        true,
        &mut elems.iter().map(|&a| {
            let back = d.alpha(d.gamma(a));
            (back != a).then(|| format!("alpha(gamma({})) = {}", d.name(a), d.name(back)))
        }),
    );
    let ex1 = n <= EXHAUSTIVE_POINTS;
    let ex2 = n <= PAIR_POINTS;
    law(
        "extensive",
        ex1,
        &mut singles.iter().map(|c| {
            let a = d.alpha(c);
            (!c.is_subset(d.gamma(a))).then(|| format!("c={} alpha(c)={}", fmt(c), d.name(a)))
        }),
    );
    law(
        "closure-idempotent",
        ex1,
        &mut singles.iter().map(|c| {
            let once = d.closure(c);
            let twice = d.closure(&once);
            (once != twice).then(|| format!("c={} A(c)={} A(A(c))={}", fmt(c), fmt(&once), fmt(&twice)))
        }),
    );
    law(
        "adjunction",
        ex1,
        &mut singles.iter().map(|c| {
            let a = d.alpha(c);
            let covers = c.is_subset(d.gamma(a));
            let least = covers && elems.iter().all(|&o| !c.is_subset(d.gamma(o)) || d.leq(a, o));
            (!least).then(|| format!("c={} alpha(c)={} is not the least cover", fmt(c), d.name(a)))
        }),
    );
    law(
        "alpha-monotone",
        ex2,
        &mut pairs.iter().map(|(c1, c2)| {
            let (x, y) = (c1.intersection(c2), c1.union(c2));
            let (ax, ay) = (d.alpha(&x), d.alpha(&y));
            (!d.leq(ax, ay)).then(|| format!("{} <= {} but {} !<= {}", fmt(&x), fmt(&y), d.name(ax), d.name(ay)))
        }),
    );
    law(
        "alpha-additive",
        ex2,
        &mut pairs.iter().map(|(c1, c2)| {
            let lhs = d.alpha(&c1.union(c2));
            let rhs = d.join(d.alpha(c1), d.alpha(c2));
            (lhs != rhs).then(|| format!("c1={} c2={} alpha(c1+c2)={} join={}", fmt(c1), fmt(c2), d.name(lhs), d.name(rhs)))
        }),
    );
    Ok(GaloisReport { laws })
}

fn random_set(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    let density = [0.1, 0.3, 0.5, 0.8][rng.gen_range(0..4)];
    PointSet::from_points(n, (0..n).filter(|_| rng.gen_bool(density)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gs_model, rel_model};
    use proptest::prelude::*;

    fn gs() -> Model {
        gs_model(["b1", "b2"]).unwrap()
    }

    #[test]
    fn parity_tables() {
        let m = gs();
        let d = parity_domain(&m).unwrap();
        let set = |s: &str| m.parse_set(s, ConcreteKind::Tests).unwrap();
        assert_eq!(d.name(d.alpha(&set("{++}"))), "e");
        assert_eq!(d.name(d.alpha(&set("{}"))), "bot");
        assert_eq!(d.gamma(d.element("o").unwrap()), &set("{-+,+-}"));
        assert_eq!(d.name(d.alpha(&set("{++,+-}"))), "top");
        assert!(check_galois(&d, &m, 0, 0).unwrap().passed());
    }

    #[test]
    fn injected_alpha_fault_is_reported() {
        let m = gs();
        let d = parity_domain(&m).unwrap();
        let c = m.parse_set("{++}", ConcreteKind::Tests).unwrap();
        let bad = d.clone().with_alpha_override(c, d.element("o").unwrap());
        let report = check_galois(&bad, &m, 0, 0).unwrap();
        assert!(!report.passed());
        assert!(report.law("extensive").unwrap().witness.is_some());
    }

    #[test]
    fn trivial_domain_laws() {
        let m = rel_model(0, 5).unwrap();
        let d = trivial_domain(&m, ConcreteKind::Tests);
        assert_eq!(d.alpha(&PointSet::empty(6)), d.top());
        assert!(d.closure(&PointSet::singleton(6, 2)).is_full());
        assert!(check_galois(&d, &m, 0, 0).unwrap().passed());
    }

    #[test]
    fn sign_classes() {
        let m = rel_model(-5, 5).unwrap();
        let d = sign_domain(&m, ConcreteKind::Tests).unwrap();
        assert_eq!(d.len(), 8);
        let r = m.rel().unwrap();
        let zero_ten = rel_model(-8, 10).unwrap();
        let d10 = sign_domain(&zero_ten, ConcreteKind::Tests).unwrap();
        let c = zero_ten.parse_set("{0,10}", ConcreteKind::Tests).unwrap();
        assert_eq!(d10.name(d10.alpha(&c)), "Z>=0");
        assert_eq!(d.name(d.alpha(&PointSet::empty(11))), "empty");
        assert_eq!(d.gamma(d.element("Z>0").unwrap()), &r.set_where(|z| (1..=5).contains(&z)));
        assert!(check_galois(&d, &m, 500, 1).unwrap().passed());
    }

    #[test]
    fn sign_on_natural_carrier_merges_classes() {
        let m = rel_model(0, 4).unwrap();
        let d = sign_domain(&m, ConcreteKind::Tests).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.element("Z<0"), None);
        assert!(sign_domain(&rel_model(1, 4).unwrap(), ConcreteKind::Tests).is_err());
    }

    #[test]
    fn intervals() {
        let m = rel_model(0, 11).unwrap();
        let d = interval_domain(&m, ConcreteKind::Tests).unwrap();
        let set = |s: &str| m.parse_set(s, ConcreteKind::Tests).unwrap();
        assert_eq!(d.len(), 1 + 12 * 13 / 2);
        assert_eq!(d.name(d.alpha(&set("{0,2}"))), "[0,2]");
        assert_eq!(d.name(d.alpha(&set("{7}"))), "[7,7]");
        assert_eq!(d.closure(&set("{0,2}")), set("{0..2}"));
        assert_eq!(d.name(d.top()), "[0,11]");
        assert_eq!(d.alpha(&PointSet::empty(12)), d.bottom());
        assert!(check_galois(&d, &m, 2000, 3).unwrap().passed());
    }

    #[test]
    fn non_moore_table_is_rejected() {
        let n = 3;
        let elems = vec![
            ("a".to_string(), PointSet::from_points(n, [0, 1])),
            ("b".to_string(), PointSet::from_points(n, [1, 2])),
            ("top".to_string(), PointSet::full(n)),
        ];
        assert!(GaloisInsertion::from_table("t", ConcreteKind::Tests, n, elems).is_err());
    }

    proptest! {
        #[test]
        fn interval_alpha_is_the_adjoint(lo in -5i64..5, len in 1usize..14, mask in any::<u64>()) {
            let m = rel_model(lo, lo + len as i64 - 1).unwrap();
            let fast = interval_domain(&m, ConcreteKind::Tests).unwrap();
            let elems = fast.elements().map(|a| (fast.name(a).to_string(), fast.gamma(a).clone())).collect();
            let slow = GaloisInsertion::from_table("t", ConcreteKind::Tests, len, elems).unwrap();
            let c = PointSet::from_mask(len, mask);
            prop_assert_eq!(fast.name(fast.alpha(&c)), slow.name(slow.alpha(&c)));
        }

        #[test]
        fn closures_are_upper_closures(mask in any::<u64>(), mask2 in any::<u64>()) {
            let m = rel_model(-4, 4).unwrap();
            for d in [sign_domain(&m, ConcreteKind::Tests).unwrap(), interval_domain(&m, ConcreteKind::Tests).unwrap()] {
                let c = PointSet::from_mask(9, mask);
                let c2 = c.union(&PointSet::from_mask(9, mask2));
                let a = d.closure(&c);
                prop_assert!(c.is_subset(&a));
                prop_assert_eq!(d.closure(&a), a.clone());
                prop_assert!(a.is_subset(&d.closure(&c2)));
            }
        }
    }
}
