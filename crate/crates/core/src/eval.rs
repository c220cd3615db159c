//! Call-by-name one-step reduction, evaluation to weak head normal form and
//! a trace simulator that feeds an event list to a reactive program.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{free_vars, substitute, substitute1, Bindings, DataUniverse, FunDef, Pattern, Term, CONS, NIL};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Function that stands for a cycled event list inside `run_trace`. The
/// name cannot be written in source files.
const CYCLE_FUN: &str = "%events";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    FunUnfold(String),
    ConElim(String),
    Beta,
    /// Entering a `where` block whose definitions are already in the
    /// environment.
    Scope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub kind: ReductionKind,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stuck {
    FreeVariable(String),
    UnknownFunction(String),
    NoMatchingAlternative(String),
    CaseOfLambda,
    ConstructorApplied(String),
}

impl fmt::Display for Stuck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stuck::FreeVariable(x) => write!(f, "free variable {x}"),
            Stuck::UnknownFunction(g) => write!(f, "unknown function {g}"),
            Stuck::NoMatchingAlternative(c) => write!(f, "no alternative matches {c}"),
            Stuck::CaseOfLambda => f.write_str("case of a lambda"),
            Stuck::ConstructorApplied(c) => write!(f, "constructor {c} applied to an argument"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Reduced(Reduction),
    Value,
    Stuck(Stuck),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation did not finish within {0} steps")]
    FuelExhausted(u64),
    #[error("evaluation is stuck: {0}")]
    Stuck(Stuck),
    #[error("program output is not a Cons cell: {0}")]
    NonConsOutput(String),
    #[error("cannot locate the event list: {0}")]
    NoEventList(String),
}

/// Function definitions visible to evaluation and verification.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FunEnv {
    defs: BTreeMap<String, Term>,
}

impl FunEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every definition made by a `where` block anywhere in `t`.
    pub fn from_term(t: &Term) -> Self {
        let mut env = FunEnv::new();
        env.collect(t);
        env
    }

    fn collect(&mut self, t: &Term) {
        match t {
            Term::Var(_) | Term::Fun(_) => {}
            Term::Con(_, args) => args.iter().for_each(|a| self.collect(a)),
            Term::Lam(_, b) => self.collect(b),
            Term::App(f, a) => {
                self.collect(f);
                self.collect(a);
            }
            Term::Case(e, alts) => {
                self.collect(e);
                alts.iter().for_each(|a| self.collect(&a.body));
            }
            Term::Let(_, e0, e1) => {
                self.collect(e0);
                self.collect(e1);
            }
            Term::Where(e, defs) => {
                for d in defs {
                    self.defs.insert(d.name.clone(), d.body.clone());
                    self.collect(&d.body);
                }
                self.collect(e);
            }
        }
    }

    /// Adds definitions; they shadow existing entries with the same name.
    pub fn extend(&self, defs: &[FunDef]) -> FunEnv {
        let mut env = self.clone();
        for d in defs {
            env.defs.insert(d.name.clone(), d.body.clone());
        }
        env
    }

    pub fn insert(&mut self, name: impl Into<String>, body: Term) {
        self.defs.insert(name.into(), body);
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

fn reduced(kind: ReductionKind, term: Term) -> Step {
    Step::Reduced(Reduction { kind, term })
}

pub fn step(t: &Term, env: &FunEnv) -> Step {
    match t {
        Term::Con(..) | Term::Lam(..) => Step::Value,
        Term::Var(x) => Step::Stuck(Stuck::FreeVariable(x.clone())),
        Term::Fun(f) => match env.get(f) {
            Some(body) => reduced(ReductionKind::FunUnfold(f.clone()), body.clone()),
            None => Step::Stuck(Stuck::UnknownFunction(f.clone())),
        },
        Term::App(e0, e1) => match e0.as_ref() {
            Term::Lam(x, body) => reduced(ReductionKind::Beta, substitute1(body, x, e1)),
            Term::Con(c, _) => Step::Stuck(Stuck::ConstructorApplied(c.clone())),
            _ => match step(e0, env) {
                Step::Reduced(r) => reduced(r.kind, Term::app(r.term, (**e1).clone())),
                other => other,
            },
        },
        Term::Let(x, e0, e1) => reduced(ReductionKind::Beta, substitute1(e1, x, e0)),
        Term::Case(e0, alts) => match e0.as_ref() {
            Term::Con(c, args) => {
                for alt in alts {
                    match &alt.pattern {
                        Pattern::Con(pc, xs) if pc == c => {
                            let b: Bindings = xs.iter().cloned().zip(args.iter().cloned()).collect();
                            return reduced(ReductionKind::ConElim(c.clone()), substitute(&alt.body, &b));
                        }
                        Pattern::Wildcard => {
                            return reduced(ReductionKind::ConElim(c.clone()), alt.body.clone())
                        }
                        _ => {}
                    }
                }
                Step::Stuck(Stuck::NoMatchingAlternative(c.clone()))
            }
            Term::Lam(..) => Step::Stuck(Stuck::CaseOfLambda),
            _ => match step(e0, env) {
                Step::Reduced(r) => reduced(r.kind, Term::case(r.term, alts.clone())),
                other => other,
            },
        },
        Term::Where(e, _) => reduced(ReductionKind::Scope, (**e).clone()),
    }
}

/// Evaluates to weak head normal form, returning the value and the number of
/// steps taken. Definitions of `where` blocks inside `t` are added to `env`.
pub fn eval_whnf_counted(t: &Term, env: &FunEnv, fuel: u64) -> Result<(Term, u64), EvalError> {
    let local = FunEnv::from_term(t);
    let merged;
    let env = if local.is_empty() {
        env
    } else {
        let mut e = env.clone();
        e.defs.extend(local.defs);
        merged = e;
        &merged
    };
    let mut cur = t.clone();
    let mut steps = 0u64;
    loop {
        match step(&cur, env) {
            Step::Value => return Ok((cur, steps)),
            Step::Stuck(s) => return Err(EvalError::Stuck(s)),
            Step::Reduced(r) => {
                steps += 1;
                if steps > fuel {
                    return Err(EvalError::FuelExhausted(fuel));
                }
                cur = r.term;
            }
        }
    }
}

pub fn eval_whnf(t: &Term, env: &FunEnv, fuel: u64) -> Result<Term, EvalError> {
    eval_whnf_counted(t, env, fuel).map(|(v, _)| v)
}

/// Evaluates a constructor tree completely, as needed for observable states.
pub fn eval_value(t: &Term, env: &FunEnv, fuel: u64) -> Result<Term, EvalError> {
    match eval_whnf(t, env, fuel)? {
        Term::Con(c, args) => {
            let args = args
                .iter()
                .map(|a| eval_value(a, env, fuel))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::Con(c, args))
        }
        lam => Ok(lam),
    }
}

/// Encodes events as a `Cons` list. With `cycle`, the list is the function
/// `%events` returned alongside its definition.
fn event_list(events: &[String], cycle: bool) -> (Term, Option<Term>) {
    let tail = if cycle {
        Term::fun(CYCLE_FUN)
    } else {
        Term::atom(NIL)
    };
    let list = events
        .iter()
        .rev()
        .fold(tail, |acc, e| Term::cons(Term::atom(e.clone()), acc));
    if cycle {
        (Term::fun(CYCLE_FUN), Some(list))
    } else {
        (list, None)
    }
}

/// Applies a reactive program to an event list and collects at most `n`
/// emitted states. The event list is the program's only free variable or,
/// for a closed program, its lambda parameter. A finite list ends the trace
/// when the program runs out of events.
pub fn run_trace(
    program: &Term,
    events: &[String],
    cycle: bool,
    n: usize,
    fuel: u64,
) -> Result<Vec<Term>, EvalError> {
    if cycle && events.is_empty() {
        return Err(EvalError::NoEventList("a cycled event list must not be empty".into()));
    }
    let (list, cycle_def) = event_list(events, cycle);
    let mut env = FunEnv::from_term(program);
    if let Some(def) = cycle_def {
        env.insert(CYCLE_FUN, def);
    }
    let free = free_vars(program);
    let mut cur = match free.len() {
        1 => substitute1(program, free.iter().next().unwrap(), &list),
        0 if matches!(program, Term::Lam(..)) => Term::app(program.clone(), list),
        0 => program.clone(),
        _ => {
            return Err(EvalError::NoEventList(format!(
                "program has {} free variables",
                free.len()
            )))
        }
    };
    let mut states = Vec::new();
    while states.len() < n {
        match eval_whnf(&cur, &env, fuel) {
            Ok(Term::Con(c, mut args)) if c == CONS => {
                let tail = args.pop().expect("Cons has two arguments");
                let head = args.pop().expect("Cons has two arguments");
                states.push(eval_value(&head, &env, fuel)?);
                cur = tail;
            }
            Ok(Term::Con(c, _)) if c == NIL => break,
            Ok(other) => return Err(EvalError::NonConsOutput(other.to_string())),
            Err(EvalError::Stuck(Stuck::NoMatchingAlternative(c))) if c == NIL && !cycle => break,
            Err(e) => return Err(e),
        }
    }
    Ok(states)
}

/// The external event constructors of a reactive program: the datatype of
/// the patterns that inspect the head of the event list, falling back to a
/// declared type named `Event`. Returned in declaration order.
pub fn event_alphabet(program: &Term, universe: &DataUniverse) -> Vec<String> {
    let mut heads = BTreeSet::new();
    let mut found = Vec::new();
    scan_events(program, &mut heads, &mut found);
    let decl = found
        .iter()
        .find_map(|c| universe.type_of(c))
        .or_else(|| universe.decl("Event"));
    decl.map(|d| d.constructors.iter().map(|(c, _)| c.clone()).collect())
        .unwrap_or_default()
}

fn scan_events(t: &Term, heads: &mut BTreeSet<String>, found: &mut Vec<String>) {
    match t {
        Term::Var(_) | Term::Fun(_) => {}
        Term::Con(_, args) => args.iter().for_each(|a| scan_events(a, heads, found)),
        Term::Lam(_, b) => scan_events(b, heads, found),
        Term::App(f, a) => {
            scan_events(f, heads, found);
            scan_events(a, heads, found);
        }
        Term::Case(e, alts) => {
            if let Term::Var(x) = e.as_ref() {
                if heads.contains(x) {
                    found.extend(alts.iter().filter_map(|a| a.pattern.constructor().map(String::from)));
                }
            }
            for alt in alts {
                if let Pattern::Con(c, xs) = &alt.pattern {
                    if c == CONS {
                        heads.insert(xs[0].clone());
                    }
                }
                scan_events(&alt.body, heads, found);
            }
        }
        Term::Let(_, e0, e1) => {
            scan_events(e0, heads, found);
            scan_events(e1, heads, found);
        }
        Term::Where(e, defs) => {
            scan_events(e, heads, found);
            defs.iter().for_each(|d| scan_events(&d.body, heads, found));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Alt;

    #[test]
    fn beta() {
        let t = Term::app(Term::lam("x", Term::var("x")), Term::atom("A"));
        assert_eq!(
            step(&t, &FunEnv::new()),
            reduced(ReductionKind::Beta, Term::atom("A"))
        );
    }

    #[test]
    fn constructor_elimination_projects() {
        let t = Term::case(
            Term::cons(Term::atom("A"), Term::atom("Nil")),
            vec![Alt::new(
                Pattern::Con("Cons".into(), vec!["h".into(), "t".into()]),
                Term::var("h"),
            )],
        );
        assert_eq!(
            step(&t, &FunEnv::new()),
            reduced(ReductionKind::ConElim("Cons".into()), Term::atom("A"))
        );
    }

    #[test]
    fn unfold_and_congruence() {
        let mut env = FunEnv::new();
        env.insert("f", Term::lam("x", Term::var("x")));
        let t = Term::app(Term::fun("f"), Term::atom("B"));
        assert_eq!(
            step(&t, &env),
            reduced(
                ReductionKind::FunUnfold("f".into()),
                Term::app(Term::lam("x", Term::var("x")), Term::atom("B"))
            )
        );
        assert_eq!(eval_whnf_counted(&t, &env, 10), Ok((Term::atom("B"), 2)));
    }

    #[test]
    fn let_is_beta() {
        let t = Term::let_("x", Term::atom("A"), Term::con("C", vec![Term::var("x")]));
        assert_eq!(
            step(&t, &FunEnv::new()),
            reduced(ReductionKind::Beta, Term::con("C", vec![Term::atom("A")]))
        );
    }

    #[test]
    fn values_take_no_steps() {
        let v = Term::con("C", vec![Term::var("x")]);
        assert_eq!(eval_whnf_counted(&v, &FunEnv::new(), 1), Ok((v, 0)));
    }

    #[test]
    fn stuck_configurations() {
        let env = FunEnv::new();
        let case_lam = Term::case(
            Term::lam("x", Term::var("x")),
            vec![Alt::new(Pattern::Wildcard, Term::atom("A"))],
        );
        assert_eq!(step(&case_lam, &env), Step::Stuck(Stuck::CaseOfLambda));
        assert_eq!(
            step(&Term::fun("g"), &env),
            Step::Stuck(Stuck::UnknownFunction("g".into()))
        );
    }

    #[test]
    fn fuel_bounds_divergence() {
        let mut env = FunEnv::new();
        env.insert("loop", Term::fun("loop"));
        assert_eq!(
            eval_whnf(&Term::fun("loop"), &env, 100),
            Err(EvalError::FuelExhausted(100))
        );
    }

    #[test]
    fn where_definitions_are_picked_up() {
        let t = Term::where_(
            Term::fun("k"),
            vec![FunDef::new("k", Term::atom("A"))],
        );
        assert_eq!(eval_whnf(&t, &FunEnv::new(), 10), Ok(Term::atom("A")));
    }
}
