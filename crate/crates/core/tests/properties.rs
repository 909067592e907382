mod common;

use katlcl::domain::{interval_domain, sign_domain, trivial_domain};
use katlcl::logic::sexp::{parse_derivation, print_derivation};
use katlcl::logic::{conclude, synthesize, validity, verify, Judgment, Post, System};
use katlcl::model::ConcreteKind;
use katlcl::semantics::{apost, oracle_post, post, top_post, atop_post};
use katlcl::term::{parse_term, pretty_term, random_term, Atom, Term};
use proptest::prelude::*;

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::atom(Atom::action("a"))),
        Just(Term::atom(Atom::action("b"))),
        Just(Term::atom(Atom::test("p"))),
        Just(Term::Zero),
        Just(Term::One),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::plus(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::seq(l, r)),
            inner.prop_map(Term::star),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_then_parse_is_identity(t in term_strategy()) {
        let back = parse_term(&pretty_term(&t), &["a", "b"], &["p"]).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn post_agrees_with_materialized_relations(t in term_strategy(), n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, n);
        let p = common::random_set(&mut rng, n);
        prop_assert_eq!(post(&inst, &t, &p).unwrap(), oracle_post(&inst, &t, &p).unwrap());
    }

    #[test]
    fn abstract_posts_are_sound(t in term_strategy(), n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let inst = common::random_instance(&mut rng, n);
        let p = common::random_set(&mut rng, n);
        for d in [sign_domain(&inst.model, ConcreteKind::Tests).unwrap(), interval_domain(&inst.model, ConcreteKind::Tests).unwrap()] {
            let c = post(&inst, &t, &p).unwrap();
            let a = apost(&d, &inst, &t, d.alpha(&p)).unwrap();
            prop_assert!(d.leq(d.alpha(&c.ok), a.ok));
            prop_assert!(d.leq(d.alpha(&c.err), a.err));
        }
        let d = sign_domain(&inst.model, ConcreteKind::ToppCodomains).unwrap();
        let c = top_post(&inst, &t, &p).unwrap();
        let a = atop_post(&d, &inst, &t, d.alpha(&p)).unwrap();
        prop_assert!(d.leq(d.alpha(&c.ok), a.ok));
    }

    #[test]
    fn synthesized_derivations_verify_and_print_back(t in term_strategy(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 3;
        let inst = common::random_instance(&mut rng, n);
        let p = common::random_set(&mut rng, n);
        let exact = post(&inst, &t, &p).unwrap();
        let requests = [
            (System::Lck, Post::ok(exact.ok.clone())),
            (System::Lcil, Post::pair(exact.ok.clone(), exact.err.clone())),
            (System::Ul, Post::ok(common::random_set(&mut rng, n).intersection(&exact.ok))),
            (System::Il, Post::err(common::random_set(&mut rng, n).intersection(&exact.err))),
        ];
        for (sys, q) in requests {
            let d = trivial_domain(&inst.model, sys.kind());
            let j = Judgment::new(p.clone(), t.clone(), q);
            let dv = synthesize(sys, &d, &inst, &j).unwrap();
            let v = verify(sys, &d, &inst, &dv).unwrap();
            prop_assert!(v.is_pass(), "{}: {}", sys, v);
            prop_assert_eq!(verify(sys, &d, &inst, &dv).unwrap(), v);
            let concl = conclude(sys, &d, &inst, &dv).unwrap().unwrap();
            prop_assert_eq!(&concl, &j);
            prop_assert!(validity(sys, &d, &inst, &concl).unwrap().is_pass());
            let text = print_derivation(&inst, sys, &dv);
            prop_assert_eq!(parse_derivation(&inst, sys, &text).unwrap(), dv);
        }
    }

    #[test]
    fn random_terms_respect_the_size_bound(seed in any::<u64>(), max in 1usize..10) {
        let t = random_term(&mut common::rng(seed), &common::leaves(), max);
        prop_assert!(t.size() <= max);
    }
}
