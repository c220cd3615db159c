use proptest::prelude::*;

use reactive_mc::ast::{DataDecl, DataUniverse, Formula, Term};
use reactive_mc::corpus::load_corpus;
use reactive_mc::ltlsem::{bounded_check, enumerate_traces, sat_lasso, Bounded, LassoTrace, SemError};
use reactive_mc::parser::parse_formula;
use reactive_mc::witness::{generate, lassoify};

fn corpus_lassos() -> Vec<(LassoTrace, Vec<Formula>)> {
    let mut out = Vec::new();
    for e in load_corpus().unwrap() {
        let formulas: Vec<Formula> = e.properties.props.iter().map(|(_, f)| f.clone()).collect();
        for f in &formulas {
            let l = lassoify(&generate(&e.program, f, &e.fair()).unwrap().trace).unwrap();
            if l.is_infinite() {
                out.push((l, formulas.clone()));
            }
        }
    }
    out
}

#[test]
fn manifest_counterexamples_are_falsified() {
    for e in load_corpus().unwrap() {
        for (name, t) in &e.traces {
            let f = e.properties.get(name).unwrap();
            let l = lassoify(t).unwrap();
            if l.is_infinite() {
                assert!(!sat_lasso(&l, 0, f).unwrap());
            } else {
                assert_eq!(bounded_check(t, f, 0).unwrap(), Bounded::Unsat);
            }
        }
    }
}

#[test]
fn unrolling_and_negation_on_corpus_lassos() {
    for (l, formulas) in corpus_lassos() {
        let unrolled = LassoTrace::new([l.prefix.clone(), l.cycle.clone()].concat(), l.cycle.clone());
        let doubled = LassoTrace::new(l.prefix.clone(), [l.cycle.clone(), l.cycle.clone()].concat());
        for f in &formulas {
            for i in 0..l.prefix.len() + 2 * l.cycle.len() {
                let v = sat_lasso(&l, i, f).unwrap();
                assert_eq!(sat_lasso(&unrolled, i, f).unwrap(), v);
                assert_eq!(sat_lasso(&doubled, i, f).unwrap(), v);
                assert_eq!(sat_lasso(&l, i, &Formula::not(f.clone())).unwrap(), !v);
            }
        }
    }
}

#[test]
fn bounded_examples() {
    let c = load_corpus().unwrap();
    let mutex = c[0].properties.get("mutex").unwrap();
    let st = |x: &str| reactive_mc::parser::parse_term(x, &c[0].program.universe).unwrap();
    assert_eq!(bounded_check(&[st("ObsState T T"), st("ObsState U U")], mutex, 0).unwrap(), Bounded::Unsat);
    assert_eq!(bounded_check(&[st("ObsState T T")], mutex, 0).unwrap(), Bounded::Unknown);
    assert_eq!(bounded_check(&[], mutex, 0).unwrap(), Bounded::Unknown);
}

#[test]
fn enumeration_counts() {
    let c = load_corpus().unwrap();
    let one = enumerate_traces(&c[0].program, 1).unwrap();
    assert_eq!(one.len(), 6);
    assert!(one.iter().all(|t| t.len() == 2 && t[0].to_string() == "ObsState T T"));
    assert_eq!(enumerate_traces(&c[1].program, 0).unwrap().len(), 1);
    assert_eq!(enumerate_traces(&c[2].program, 2).unwrap().len(), 36);
    assert!(matches!(enumerate_traces(&c[2].program, 9), Err(SemError::DepthTooLarge(9))));
}

fn universe() -> DataUniverse {
    DataUniverse::with_decls([DataDecl::new("S", vec![("A", 0), ("B", 0), ("C", 0)])]).unwrap()
}

fn state() -> impl Strategy<Value = Term> {
    prop_oneof![Just(Term::atom("A")), Just(Term::atom("B")), Just(Term::atom("C"))]
}

fn formula() -> impl Strategy<Value = Formula> {
    let u = universe();
    let atom = prop_oneof![
        Just("{ case s of A -> True | _ -> False }"),
        Just("{ case s of B -> True | _ -> False }"),
        Just("{ case s of C -> False | _ -> True }"),
    ]
    .prop_map(move |t| parse_formula(t, &u).unwrap());
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::always),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn unrolling_is_invisible(
        prefix in prop::collection::vec(state(), 0..3),
        cycle in prop::collection::vec(state(), 1..3),
        f in formula(),
        i in 0usize..6,
    ) {
        let l = LassoTrace::new(prefix.clone(), cycle.clone());
        let u = LassoTrace::new([prefix, cycle.clone()].concat(), cycle);
        prop_assert_eq!(sat_lasso(&l, i, &f).unwrap(), sat_lasso(&u, i, &f).unwrap());
    }

    #[test]
    fn negation_flips(
        prefix in prop::collection::vec(state(), 0..3),
        cycle in prop::collection::vec(state(), 1..3),
        f in formula(),
    ) {
        let l = LassoTrace::new(prefix, cycle);
        prop_assert_eq!(sat_lasso(&l, 0, &Formula::not(f.clone())).unwrap(), !sat_lasso(&l, 0, &f).unwrap());
    }

    /// A definite bounded result holds for every infinite continuation.
    #[test]
    fn bounded_agrees_with_every_extension(
        prefix in prop::collection::vec(state(), 0..4),
        cycle in prop::collection::vec(state(), 1..3),
        f in formula(),
    ) {
        let l = LassoTrace::new(prefix.clone(), cycle);
        match bounded_check(&prefix, &f, 0).unwrap() {
            Bounded::Sat => prop_assert!(sat_lasso(&l, 0, &f).unwrap()),
            Bounded::Unsat => prop_assert!(!sat_lasso(&l, 0, &f).unwrap()),
            Bounded::Unknown => {}
        }
    }
}
