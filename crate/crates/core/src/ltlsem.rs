//! Reference semantics for LTL over observable-state traces: exact
//! satisfaction on lassos, a three-valued check on finite prefixes, and
//! brute-force trace enumeration.

use std::fmt;

use thiserror::Error;

use crate::ast::{Formula, Term, STATE_VAR};
use crate::eval::{event_alphabet, eval_whnf, run_trace, EvalError, FunEnv, DEFAULT_FUEL};
use crate::kleene::Trace;
use crate::parser::Program;

pub const MAX_DEPTH: usize = 8;

/// `prefix · cycle^ω`, or just `prefix` when `cycle` is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoTrace {
    pub prefix: Trace,
    pub cycle: Trace,
}

impl LassoTrace {
    pub fn new(prefix: Trace, cycle: Trace) -> Self {
        LassoTrace { prefix, cycle }
    }

    pub fn is_infinite(&self) -> bool {
        !self.cycle.is_empty()
    }

    /// The state at position `i` of the infinite trace.
    pub fn state(&self, i: usize) -> &Term {
        let p = self.prefix.len();
        if i < p {
            &self.prefix[i]
        } else {
            &self.cycle[(i - p) % self.cycle.len()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("atom {atom} is Undefined in state {state}")]
    AtomUndefined { atom: String, state: String },
    #[error("atom {atom} evaluated to {value} in state {state}")]
    NotTruthValue {
        atom: String,
        state: String,
        value: String,
    },
    #[error("lasso has an empty loop")]
    EmptyLoop,
    #[error("depth {0} exceeds the maximum of {MAX_DEPTH}")]
    DepthTooLarge(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn atom_holds(atom: &Term, state: &Term) -> Result<bool, SemError> {
    let t = crate::ast::substitute1(atom, STATE_VAR, state);
    let v = eval_whnf(&t, &FunEnv::new(), DEFAULT_FUEL)?;
    match &v {
        Term::Con(c, args) if args.is_empty() && c == "True" => Ok(true),
        Term::Con(c, args) if args.is_empty() && c == "False" => Ok(false),
        Term::Con(c, args) if args.is_empty() && c == "Undefined" => Err(SemError::AtomUndefined {
            atom: atom.to_string(),
            state: state.to_string(),
        }),
        _ => Err(SemError::NotTruthValue {
            atom: atom.to_string(),
            state: state.to_string(),
            value: v.to_string(),
        }),
    }
}

/// Whether the infinite trace satisfies `f` at position `i`.
pub fn sat_lasso(m: &LassoTrace, i: usize, f: &Formula) -> Result<bool, SemError> {
    if m.cycle.is_empty() {
        return Err(SemError::EmptyLoop);
    }
    let p = m.prefix.len();
    let l = m.cycle.len();
    // Positions past the first loop pass are equivalent to one inside it.
    let i = if i >= p + l { p + (i - p) % l } else { i };
    match f {
        Formula::Atom(a) => atom_holds(a, m.state(i)),
        Formula::Not(g) => Ok(!sat_lasso(m, i, g)?),
        Formula::And(a, b) => Ok(sat_lasso(m, i, a)? && sat_lasso(m, i, b)?),
        Formula::Or(a, b) => Ok(sat_lasso(m, i, a)? || sat_lasso(m, i, b)?),
        Formula::Implies(a, b) => Ok(!sat_lasso(m, i, a)? || sat_lasso(m, i, b)?),
        Formula::Next(g) => sat_lasso(m, i + 1, g),
        Formula::Always(g) => {
            for j in i..i.max(p) + l {
                if !sat_lasso(m, j, g)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Eventually(g) => {
            for j in i..i.max(p) + l {
                if sat_lasso(m, j, g)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bounded {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Bounded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bounded::Sat => "Sat",
            Bounded::Unsat => "Unsat",
            Bounded::Unknown => "Unknown",
        })
    }
}

fn b_not(a: Bounded) -> Bounded {
    match a {
        Bounded::Sat => Bounded::Unsat,
        Bounded::Unsat => Bounded::Sat,
        Bounded::Unknown => Bounded::Unknown,
    }
}

fn b_and(a: Bounded, b: Bounded) -> Bounded {
    match (a, b) {
        (Bounded::Unsat, _) | (_, Bounded::Unsat) => Bounded::Unsat,
        (Bounded::Sat, Bounded::Sat) => Bounded::Sat,
        _ => Bounded::Unknown,
    }
}

fn b_or(a: Bounded, b: Bounded) -> Bounded {
    b_not(b_and(b_not(a), b_not(b)))
}

/// Evaluates `f` at position `i` of a finite prefix whose continuation is
/// unknown.
pub fn bounded_check(t: &[Term], f: &Formula, i: usize) -> Result<Bounded, SemError> {
    if i >= t.len() {
        return Ok(Bounded::Unknown);
    }
    Ok(match f {
        Formula::Atom(a) => {
            if atom_holds(a, &t[i])? {
                Bounded::Sat
            } else {
                Bounded::Unsat
            }
        }
        Formula::Not(g) => b_not(bounded_check(t, g, i)?),
        Formula::And(a, b) => b_and(bounded_check(t, a, i)?, bounded_check(t, b, i)?),
        Formula::Or(a, b) => b_or(bounded_check(t, a, i)?, bounded_check(t, b, i)?),
        Formula::Implies(a, b) => b_or(b_not(bounded_check(t, a, i)?), bounded_check(t, b, i)?),
        Formula::Next(g) => bounded_check(t, g, i + 1)?,
        Formula::Always(g) => {
            let mut acc = Bounded::Unknown;
            for j in i..t.len() {
                acc = b_and(acc, bounded_check(t, g, j)?);
            }
            acc
        }
        Formula::Eventually(g) => {
            let mut acc = Bounded::Unknown;
            for j in i..t.len() {
                acc = b_or(acc, bounded_check(t, g, j)?);
            }
            acc
        }
    })
}

/// Every event sequence of length `k` with the trace it produces.
pub fn enumerate_runs(
    program: &Program,
    k: usize,
) -> Result<Vec<(Vec<String>, Trace)>, SemError> {
    if k > MAX_DEPTH {
        return Err(SemError::DepthTooLarge(k));
    }
    let alphabet = event_alphabet(&program.term, &program.universe);
    let mut seqs: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..k {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                alphabet.iter().map(move |e| {
                    let mut s2 = s.clone();
                    s2.push(e.clone());
                    s2
                })
            })
            .collect();
    }
    seqs.into_iter()
        .map(|events| {
            let trace = run_trace(&program.term, &events, false, k + 1, DEFAULT_FUEL)?;
            Ok((events, trace))
        })
        .collect()
}

pub fn enumerate_traces(program: &Program, k: usize) -> Result<Vec<Trace>, SemError> {
    Ok(enumerate_runs(program, k)?
        .into_iter()
        .map(|(_, t)| t)
        .collect())
}
