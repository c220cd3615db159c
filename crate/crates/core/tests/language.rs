mod common;

use proptest::prelude::*;

use reactive_mc::ast::{alpha_eq, check_well_formed, free_vars, substitute1, Alt, DataDecl, DataUniverse, Pattern, Term};
use reactive_mc::corpus::load_corpus;
use reactive_mc::eval::{eval_value, run_trace, DEFAULT_FUEL};
use reactive_mc::normform::{check_simplified, tail_calls_only};
use reactive_mc::parser::{parse_formula, parse_program, parse_properties, pretty, Program};

fn universe() -> DataUniverse {
    DataUniverse::with_decls([
        DataDecl::new("E", vec![("A", 0), ("B", 0)]),
        DataDecl::new("P", vec![("C", 2)]),
    ])
    .unwrap()
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(String::from)
}

/// Terms over `universe()`, mostly well-formed.
fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        name().prop_map(Term::var),
        Just(Term::atom("A")),
        Just(Term::atom("B")),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (name(), inner.clone()).prop_map(|(x, b)| Term::lam(x, b)),
            (name(), inner.clone()).prop_map(|(f, a)| Term::app(Term::var(f), a)),
            (name(), inner.clone(), inner.clone()).prop_map(|(x, b, a)| Term::app(Term::lam(x, b), a)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::con("C", vec![a, b])),
            (name(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| Term::let_(x, a, b)),
            (inner.clone(), inner.clone(), inner.clone(), any::<bool>()).prop_map(|(e, a, b, wild)| {
                let second = if wild {
                    Pattern::Wildcard
                } else {
                    Pattern::Con("B".into(), vec![])
                };
                Term::case(e, vec![Alt::new(Pattern::Con("A".into(), vec![]), a), Alt::new(second, b)])
            }),
            (inner.clone(), name(), name(), inner).prop_map(|(e, p, q, b)| {
                let q = if p == q { format!("{q}2") } else { q };
                Term::case(e, vec![Alt::new(Pattern::Con("C".into(), vec![p, q]), b)])
            }),
        ]
    })
}

proptest! {
    #[test]
    fn pretty_then_parse_is_identity(t in term()) {
        prop_assume!(check_well_formed(&t, &universe()).is_ok());
        let text = pretty::program(&universe(), &t);
        let sf = parse_program(&text);
        prop_assert!(sf.diagnostics.is_empty(), "{}\n{:?}", text, sf.diagnostics);
        prop_assert!(alpha_eq(&sf.term.unwrap(), &t), "{}", text);
    }

    #[test]
    fn substitution_free_variables(t in term(), u in term(), x in name()) {
        let r = substitute1(&t, &x, &u);
        let mut bound = free_vars(&t);
        let had_x = bound.remove(&x);
        if had_x {
            bound.extend(free_vars(&u));
        }
        prop_assert_eq!(free_vars(&r), bound);
    }

    #[test]
    fn substituting_an_absent_variable_changes_nothing(t in term(), u in term()) {
        prop_assert!(alpha_eq(&substitute1(&t, "w", &u), &t));
    }
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for e in load_corpus().unwrap() {
        let text = pretty::program(&e.program.universe, &e.program.term);
        let again = Program::parse(&text).unwrap();
        assert!(alpha_eq(&again.term, &e.program.term), "{}", e.name);
        let props = pretty::properties(&e.properties);
        let pf = parse_properties(&props, &again.universe).unwrap();
        assert_eq!(pf.props, e.properties.props);
        assert_eq!(pf.fair, e.properties.fair);
    }
}

#[test]
fn corpus_is_in_simplified_form() {
    for e in load_corpus().unwrap() {
        let r = check_simplified(&e.program.term);
        assert!(r.conforms, "{}: {:?}", e.name, r.violations);
        assert!(tail_calls_only(&e.program.term));
    }
}

#[test]
fn random_programs_are_in_simplified_form() {
    let mut rng = common::rng(9);
    for _ in 0..100 {
        let g = common::program(&mut rng, 6, 4);
        assert!(check_simplified(&g.program.term).conforms, "{}", g.source);
    }
}

#[test]
fn diagnostics_carry_positions() {
    let sf = parse_program("data E = A | B\n\ncase x of A -> B | A -> B\n");
    let d = &sf.diagnostics[0];
    assert_eq!(d.line, 3);
    assert!(d.message.contains("duplicate constructor A"), "{d}");
    let sf = parse_program("data E = A\n\nA B\n");
    assert!(sf.diagnostics[0].message.contains("unknown constructor"), "{}", sf.diagnostics[0]);
    let err = parse_formula("G { t }", &universe()).unwrap_err();
    assert!(err.to_string().contains("free variable t in atom"));
    let err = parse_properties("fair: Q\nprop p: { True }\n", &universe()).unwrap_err();
    assert!(err.to_string().contains("unknown fairness constructor Q"));
}

#[test]
fn simulation_with_cycle() {
    let c = load_corpus().unwrap();
    let ev = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let t = run_trace(&c[0].program.term, &ev(&["Request1", "Take1", "Release1"]), true, 7, DEFAULT_FUEL).unwrap();
    let shown: Vec<String> = t.iter().map(|s| s.to_string()).collect();
    assert_eq!(
        shown,
        ["ObsState T T", "ObsState W T", "ObsState U T", "ObsState T T", "ObsState W T", "ObsState U T", "ObsState T T"]
    );
    let finite = run_trace(&c[0].program.term, &ev(&["Request1"]), false, 7, DEFAULT_FUEL).unwrap();
    assert_eq!(finite.len(), 2);
}

#[test]
fn full_evaluation_of_atoms() {
    let u = universe();
    let f = parse_formula("{ case C A B of C p q -> q }", &u).unwrap();
    let reactive_mc::ast::Formula::Atom(t) = f else { unreachable!() };
    assert_eq!(eval_value(&t, &Default::default(), DEFAULT_FUEL).unwrap(), Term::atom("B"));
}
