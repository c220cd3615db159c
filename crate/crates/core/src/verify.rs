//! Three-valued verification of LTL properties over programs in simplified
//! form.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{substitute, substitute1, Alt, Bindings, DataUniverse, Formula, Pattern, Term, CONS, STATE_VAR};
use crate::eval::{eval_whnf, EvalError, FunEnv, DEFAULT_FUEL};
use crate::kleene::{and3, imp3, not3, or3, TruthVal};
use crate::normform::{check_simplified, FormReport};
use crate::parser::Program;

pub const DEFAULT_RULE_BUDGET: u64 = 1_000_000;

/// Functions already unfolded on the current path.
pub type VisitedSet = BTreeSet<String>;

/// Event constructors assumed to occur infinitely often.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FairSet {
    events: BTreeSet<String>,
}

impl FairSet {
    pub fn new<I, S>(events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FairSet {
            events: events.into_iter().map(Into::into).collect(),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn contains(&self, c: &str) -> bool {
        self.events.contains(c)
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.events.iter().map(String::as_str)
    }

    /// Whether alternative `i` of a case is taken by some fair event. A
    /// wildcard stands for the constructors not matched before it; a lone
    /// wildcard stands for every event.
    pub fn branch_is_fair(&self, alts: &[Alt], i: usize, universe: &DataUniverse) -> bool {
        match &alts[i].pattern {
            Pattern::Con(c, _) => self.contains(c),
            Pattern::Wildcard => {
                let matched: BTreeSet<&str> = alts[..i]
                    .iter()
                    .filter_map(|a| a.pattern.constructor())
                    .collect();
                match matched.iter().next() {
                    Some(sibling) => universe
                        .residual(sibling, &matched)
                        .into_iter()
                        .any(|c| self.contains(c)),
                    None => !self.is_empty(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("program is not in simplified form:\n{}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    NotSimplified(FormReport),
    #[error("atom {atom} evaluated to {value} in state {state}, not a truth value")]
    Atom {
        atom: String,
        state: String,
        value: String,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("call to undefined function {0}")]
    UnknownFunction(String),
    #[error("function {name} takes {expected} argument(s) but is called with {found}")]
    CallArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unexpected term shape: {0}")]
    Shape(String),
    #[error("exceeded the budget of {0} rule applications")]
    Budget(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Reduction steps per atom evaluation.
    pub fuel: u64,
    pub max_rules: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fuel: DEFAULT_FUEL,
            max_rules: DEFAULT_RULE_BUDGET,
        }
    }
}

/// Evaluates `atom[state/s]` to a truth value.
pub(crate) fn eval_atom(atom: &Term, state: &Term, env: &FunEnv, fuel: u64) -> Result<TruthVal, VerifyError> {
    let t = substitute1(atom, STATE_VAR, state);
    match eval_whnf(&t, env, fuel)? {
        Term::Con(c, args) if args.is_empty() => TruthVal::from_constructor(&c).ok_or_else(|| {
            VerifyError::Atom {
                atom: atom.to_string(),
                state: state.to_string(),
                value: c,
            }
        }),
        v => Err(VerifyError::Atom {
            atom: atom.to_string(),
            state: state.to_string(),
            value: v.to_string(),
        }),
    }
}

/// Unfolds `f a1 ... an`, renaming the parameters to the arguments.
pub(crate) fn unfold(name: &str, args: &[&Term], env: &FunEnv) -> Result<Term, VerifyError> {
    let def = env
        .get(name)
        .ok_or_else(|| VerifyError::UnknownFunction(name.to_string()))?;
    let (params, body) = def.lambdas();
    if params.len() != args.len() {
        return Err(VerifyError::CallArity {
            name: name.to_string(),
            expected: params.len(),
            found: args.len(),
        });
    }
    let b: Bindings = params
        .iter()
        .map(|p| p.to_string())
        .zip(args.iter().map(|a| (*a).clone()))
        .collect();
    Ok(substitute(body, &b))
}

pub struct Prover<'u> {
    universe: &'u DataUniverse,
    fair: FairSet,
    limits: Limits,
    rules: u64,
}

impl<'u> Prover<'u> {
    pub fn new(universe: &'u DataUniverse, fair: FairSet, limits: Limits) -> Self {
        Prover {
            universe,
            fair,
            limits,
            rules: 0,
        }
    }

    /// Rule applications performed so far.
    pub fn rules(&self) -> u64 {
        self.rules
    }

    pub fn prove(
        &mut self,
        t: &Term,
        f: &Formula,
        env: &FunEnv,
        visited: &VisitedSet,
    ) -> Result<TruthVal, VerifyError> {
        self.rules += 1;
        if self.rules > self.limits.max_rules {
            return Err(VerifyError::Budget(self.limits.max_rules));
        }
        match t {
            Term::Let(_, _, body) => return self.prove(body, f, env, visited),
            Term::Where(body, defs) => return self.prove(body, f, &env.extend(defs), visited),
            _ => {}
        }
        match f {
            Formula::And(a, b) => {
                let x = self.prove(t, a, env, visited)?;
                let y = self.prove(t, b, env, visited)?;
                return Ok(and3(x, y));
            }
            Formula::Or(a, b) => {
                let x = self.prove(t, a, env, visited)?;
                let y = self.prove(t, b, env, visited)?;
                return Ok(or3(x, y));
            }
            Formula::Implies(a, b) => {
                let x = self.prove(t, a, env, visited)?;
                let y = self.prove(t, b, env, visited)?;
                return Ok(imp3(x, y));
            }
            Formula::Not(a) => return Ok(not3(self.prove(t, a, env, visited)?)),
            _ => {}
        }
        match t {
            Term::Con(c, args) if c == CONS => {
                let (state, rest) = (&args[0], &args[1]);
                match f {
                    Formula::Always(g) => {
                        let now = self.prove(t, g, env, &VisitedSet::new())?;
                        let later = self.prove(rest, f, env, visited)?;
                        Ok(and3(now, later))
                    }
                    Formula::Eventually(g) => {
                        let now = self.prove(t, g, env, &VisitedSet::new())?;
                        let later = self.prove(rest, f, env, visited)?;
                        Ok(or3(now, later))
                    }
                    Formula::Next(g) => self.prove(rest, g, env, visited),
                    Formula::Atom(a) => eval_atom(a, state, env, self.limits.fuel),
                    _ => unreachable!("connectives are handled above"),
                }
            }
            Term::Case(_, alts) => {
                let mut values = Vec::with_capacity(alts.len());
                for alt in alts {
                    values.push(self.prove(&alt.body, f, env, visited)?);
                }
                let all = values.iter().copied().reduce(and3).expect("case has alternatives");
                if let Formula::Eventually(_) = f {
                    let fair = values
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| self.fair.branch_is_fair(alts, *i, self.universe))
                        .map(|(_, v)| *v)
                        .reduce(or3);
                    if let Some(fair) = fair {
                        return Ok(or3(fair, all));
                    }
                }
                Ok(all)
            }
            Term::Fun(_) | Term::App(..) | Term::Var(_) => {
                let (head, args) = t.spine();
                match head {
                    Term::Fun(name) => {
                        if visited.contains(name) {
                            return Ok(match f {
                                Formula::Always(_) => TruthVal::True,
                                Formula::Eventually(_) => TruthVal::False,
                                _ => TruthVal::Undefined,
                            });
                        }
                        let body = unfold(name, &args, env)?;
                        let mut seen = visited.clone();
                        seen.insert(name.clone());
                        self.prove(&body, f, env, &seen)
                    }
                    Term::Var(_) => Ok(TruthVal::Undefined),
                    other => Err(VerifyError::Shape(other.to_string())),
                }
            }
            other => Err(VerifyError::Shape(other.to_string())),
        }
    }
}

/// `prove` with a fresh prover and the default limits.
pub fn prove(
    t: &Term,
    f: &Formula,
    env: &FunEnv,
    visited: &VisitedSet,
    fair: &FairSet,
    universe: &DataUniverse,
) -> Result<TruthVal, VerifyError> {
    Prover::new(universe, fair.clone(), Limits::default()).prove(t, f, env, visited)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub truth: TruthVal,
    pub rules: u64,
}

pub fn verify_with(program: &Program, f: &Formula, fair: &FairSet, limits: Limits) -> Result<Outcome, VerifyError> {
    let report = check_simplified(&program.term);
    if !report.conforms {
        return Err(VerifyError::NotSimplified(report));
    }
    let mut p = Prover::new(&program.universe, fair.clone(), limits);
    let truth = p.prove(&program.term, f, &FunEnv::new(), &VisitedSet::new())?;
    Ok(Outcome {
        truth,
        rules: p.rules(),
    })
}

pub fn verify(program: &Program, f: &Formula, fair: &FairSet) -> Result<TruthVal, VerifyError> {
    verify_with(program, f, fair, Limits::default()).map(|o| o.truth)
}
