//! Verdicts with counterexample and witness traces, their reading as lassos,
//! and validation against the reference semantics.

use std::fmt;

use thiserror::Error;

use crate::ast::{Formula, Term, CONS};
use crate::eval::FunEnv;
use crate::kleene::{not_v, Connective, Selection, Trace, TraceChoice, TruthVal, Verdict};
pub use crate::ltlsem::LassoTrace;
use crate::ltlsem::{bounded_check, sat_lasso, Bounded};
use crate::normform::check_simplified;
use crate::parser::Program;
use crate::verify::{eval_atom, unfold, FairSet, Limits, VerifyError, VisitedSet};

pub struct Generator<'a> {
    universe: &'a crate::ast::DataUniverse,
    fair: FairSet,
    limits: Limits,
    choice: TraceChoice,
    rules: u64,
    observe: Option<&'a mut dyn FnMut(Selection)>,
}

impl<'a> Generator<'a> {
    pub fn new(universe: &'a crate::ast::DataUniverse, fair: FairSet, limits: Limits, choice: TraceChoice) -> Self {
        Generator {
            universe,
            fair,
            limits,
            choice,
            rules: 0,
            observe: None,
        }
    }

    /// Reports every binary trace selection to `observe`.
    pub fn observing(mut self, observe: &'a mut dyn FnMut(Selection)) -> Self {
        self.observe = Some(observe);
        self
    }

    pub fn rules(&self) -> u64 {
        self.rules
    }

    fn combine(&mut self, op: Connective, a: Verdict, b: Verdict) -> Verdict {
        match self.observe.as_mut() {
            Some(obs) => self.choice.combine(op, a, b, &mut **obs),
            None => self.choice.combine(op, a, b, &mut |_| {}),
        }
    }

    pub fn gen(
        &mut self,
        t: &Term,
        f: &Formula,
        env: &FunEnv,
        visited: &VisitedSet,
        acc: &Trace,
    ) -> Result<Verdict, VerifyError> {
        self.rules += 1;
        if self.rules > self.limits.max_rules {
            return Err(VerifyError::Budget(self.limits.max_rules));
        }
        match t {
            Term::Let(_, _, body) => return self.gen(body, f, env, visited, acc),
            Term::Where(body, defs) => return self.gen(body, f, &env.extend(defs), visited, acc),
            _ => {}
        }
        match f {
            Formula::And(a, b) => {
                let x = self.gen(t, a, env, visited, acc)?;
                let y = self.gen(t, b, env, visited, acc)?;
                return Ok(self.combine(Connective::And, x, y));
            }
            Formula::Or(a, b) => {
                let x = self.gen(t, a, env, visited, acc)?;
                let y = self.gen(t, b, env, visited, acc)?;
                return Ok(self.combine(Connective::Or, x, y));
            }
            Formula::Implies(a, b) => {
                let x = self.gen(t, a, env, visited, acc)?;
                let y = self.gen(t, b, env, visited, acc)?;
                return Ok(self.combine(Connective::Or, not_v(x), y));
            }
            Formula::Not(a) => return Ok(not_v(self.gen(t, a, env, visited, acc)?)),
            _ => {}
        }
        match t {
            Term::Con(c, args) if c == CONS => {
                let (state, rest) = (&args[0], &args[1]);
                let mut extended = acc.clone();
                extended.push(state.clone());
                match f {
                    Formula::Always(g) | Formula::Eventually(g) => {
                        let now = self.gen(t, g, env, &VisitedSet::new(), acc)?;
                        let later = self.gen(rest, f, env, visited, &extended)?;
                        let op = if matches!(f, Formula::Always(_)) {
                            Connective::And
                        } else {
                            Connective::Or
                        };
                        Ok(self.combine(op, now, later))
                    }
                    Formula::Next(g) => self.gen(rest, g, env, visited, &extended),
                    Formula::Atom(a) => Ok(Verdict::new(eval_atom(a, state, env, self.limits.fuel)?, extended)),
                    _ => unreachable!("connectives are handled above"),
                }
            }
            Term::Case(_, alts) => {
                let mut values = Vec::with_capacity(alts.len());
                for alt in alts {
                    values.push(self.gen(&alt.body, f, env, visited, acc)?);
                }
                let fair: Vec<Verdict> = if matches!(f, Formula::Eventually(_)) {
                    (0..alts.len())
                        .filter(|i| self.fair.branch_is_fair(alts, *i, self.universe))
                        .map(|i| values[i].clone())
                        .collect()
                } else {
                    Vec::new()
                };
                let all = self.fold(Connective::And, values);
                if fair.is_empty() {
                    Ok(all)
                } else {
                    let some_fair = self.fold(Connective::Or, fair);
                    Ok(self.combine(Connective::Or, some_fair, all))
                }
            }
            Term::Fun(_) | Term::App(..) | Term::Var(_) => {
                let (head, args) = t.spine();
                match head {
                    Term::Fun(name) => {
                        if visited.contains(name) {
                            let truth = match f {
                                Formula::Always(_) => TruthVal::True,
                                Formula::Eventually(_) => TruthVal::False,
                                _ => TruthVal::Undefined,
                            };
                            return Ok(Verdict::new(truth, acc.clone()));
                        }
                        let body = unfold(name, &args, env)?;
                        let mut seen = visited.clone();
                        seen.insert(name.clone());
                        self.gen(&body, f, env, &seen, acc)
                    }
                    Term::Var(_) => Ok(Verdict::new(TruthVal::Undefined, acc.clone())),
                    other => Err(VerifyError::Shape(other.to_string())),
                }
            }
            other => Err(VerifyError::Shape(other.to_string())),
        }
    }

    fn fold(&mut self, op: Connective, vs: Vec<Verdict>) -> Verdict {
        let mut it = vs.into_iter();
        let first = it.next().expect("case has alternatives");
        it.fold(first, |a, b| self.combine(op, a, b))
    }
}

pub fn generate_with(
    program: &Program,
    f: &Formula,
    fair: &FairSet,
    limits: Limits,
    choice: TraceChoice,
    observe: Option<&mut dyn FnMut(Selection)>,
) -> Result<(Verdict, u64), VerifyError> {
    let report = check_simplified(&program.term);
    if !report.conforms {
        return Err(VerifyError::NotSimplified(report));
    }
    let mut g = Generator::new(&program.universe, fair.clone(), limits, choice);
    if let Some(obs) = observe {
        g = g.observing(obs);
    }
    let v = g.gen(&program.term, f, &FunEnv::new(), &VisitedSet::new(), &Vec::new())?;
    let rules = g.rules();
    Ok((v, rules))
}

pub fn generate(program: &Program, f: &Formula, fair: &FairSet) -> Result<Verdict, VerifyError> {
    generate_with(program, f, fair, Limits::default(), TraceChoice::default(), None).map(|(v, _)| v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot form a lasso from an empty trace")]
pub struct EmptyTrace;

/// Splits a trace at the earliest earlier occurrence of its final state.
pub fn lassoify(t: &[Term]) -> Result<LassoTrace, EmptyTrace> {
    let last = t.len().checked_sub(1).ok_or(EmptyTrace)?;
    match t[..last].iter().position(|s| *s == t[last]) {
        Some(i) => Ok(LassoTrace::new(t[..i].to_vec(), t[i..last].to_vec())),
        None => Ok(LassoTrace::new(t.to_vec(), Vec::new())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Valid,
    Invalid,
    /// No semantic claim could be checked; carries the reason.
    Inconclusive(String),
}

impl Validation {
    pub fn label(&self) -> &'static str {
        match self {
            Validation::Valid => "Valid",
            Validation::Invalid => "Invalid",
            Validation::Inconclusive(_) => "Inconclusive",
        }
    }
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validation::Inconclusive(why) => write!(f, "Inconclusive ({why})"),
            other => f.write_str(other.label()),
        }
    }
}

/// Checks a definite verdict against the reference semantics. A looping
/// trace is checked exactly; a finite one only when its prefix already
/// decides the formula.
pub fn validate_verdict(v: &Verdict, f: &Formula) -> Validation {
    if v.truth == TruthVal::Undefined {
        return Validation::Inconclusive("verdict is Undefined".into());
    }
    let lasso = match lassoify(&v.trace) {
        Ok(l) => l,
        Err(e) => return Validation::Inconclusive(e.to_string()),
    };
    let expect = v.truth == TruthVal::True;
    if lasso.is_infinite() {
        return match sat_lasso(&lasso, 0, f) {
            Ok(sat) if sat == expect => Validation::Valid,
            Ok(_) => Validation::Invalid,
            Err(e) => Validation::Inconclusive(e.to_string()),
        };
    }
    match bounded_check(&v.trace, f, 0) {
        Ok(Bounded::Unknown) => Validation::Inconclusive("trace has no loop; bounded check Unknown".into()),
        Ok(b) if (b == Bounded::Sat) == expect => Validation::Valid,
        Ok(_) => Validation::Invalid,
        Err(e) => Validation::Inconclusive(e.to_string()),
    }
}
