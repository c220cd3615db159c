//! Strong Kleene logic and verdicts (a truth value paired with a trace).

use std::fmt;
use std::str::FromStr;

use crate::ast::{Term, FALSE, TRUE, UNDEFINED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthVal {
    True,
    False,
    Undefined,
}

use TruthVal::{False as F, True as T, Undefined as U};

pub const ALL: [TruthVal; 3] = [TruthVal::True, TruthVal::False, TruthVal::Undefined];

pub fn and3(a: TruthVal, b: TruthVal) -> TruthVal {
    match (a, b) {
        (F, _) | (_, F) => F,
        (T, T) => T,
        _ => U,
    }
}

pub fn or3(a: TruthVal, b: TruthVal) -> TruthVal {
    match (a, b) {
        (T, _) | (_, T) => T,
        (F, F) => F,
        _ => U,
    }
}

pub fn not3(a: TruthVal) -> TruthVal {
    match a {
        T => F,
        F => T,
        U => U,
    }
}

pub fn imp3(a: TruthVal, b: TruthVal) -> TruthVal {
    or3(not3(a), b)
}

impl TruthVal {
    pub fn from_constructor(c: &str) -> Option<TruthVal> {
        match c {
            TRUE => Some(T),
            FALSE => Some(F),
            UNDEFINED => Some(U),
            _ => None,
        }
    }

    pub fn constructor(self) -> &'static str {
        match self {
            T => TRUE,
            F => FALSE,
            U => UNDEFINED,
        }
    }

    pub fn to_term(self) -> Term {
        Term::atom(self.constructor())
    }

    /// Information order: `Undefined` is below both definite values.
    pub fn refines(self, other: TruthVal) -> bool {
        self == other || other == U
    }
}

impl fmt::Display for TruthVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.constructor())
    }
}

impl FromStr for TruthVal {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        TruthVal::from_constructor(s).ok_or_else(|| format!("not a truth value: {s}"))
    }
}

/// Observable states in emission order.
pub type Trace = Vec<Term>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub truth: TruthVal,
    pub trace: Trace,
}

impl Verdict {
    pub fn new(truth: TruthVal, trace: Trace) -> Self {
        Verdict { truth, trace }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [", self.truth)?;
        for (i, s) in self.trace.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("])")
    }
}

/// How a binary verdict connective picks a trace when both operands carry
/// the result truth value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TraceChoice {
    /// Shortest trace, except where the result needs both operands (a false
    /// disjunction or a true conjunction): then the longer trace, which
    /// extends far enough to decide both.
    #[default]
    Covering,
    /// Shortest trace in every case.
    Shortest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

/// One binary combination, recorded for trace-selection checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub connective: Connective,
    pub truth: TruthVal,
    pub chosen_len: usize,
    /// Length of the other operand's trace when its truth also matched.
    pub rival_len: Option<usize>,
}

impl TraceChoice {
    pub fn and(self, a: Verdict, b: Verdict) -> Verdict {
        self.combine(Connective::And, a, b, &mut |_| {})
    }

    pub fn or(self, a: Verdict, b: Verdict) -> Verdict {
        self.combine(Connective::Or, a, b, &mut |_| {})
    }

    pub fn imp(self, a: Verdict, b: Verdict) -> Verdict {
        self.or(not_v(a), b)
    }

    pub fn combine(
        self,
        op: Connective,
        a: Verdict,
        b: Verdict,
        observe: &mut dyn FnMut(Selection),
    ) -> Verdict {
        let truth = match op {
            Connective::And => and3(a.truth, b.truth),
            Connective::Or => or3(a.truth, b.truth),
        };
        let needs_both = match op {
            Connective::And => truth == T,
            Connective::Or => truth == F,
        };
        let prefer_longer = self == TraceChoice::Covering && needs_both;
        let (trace, rival_len) = match (a.truth == truth, b.truth == truth) {
            (true, true) => {
                let take_b = if prefer_longer {
                    b.trace.len() > a.trace.len()
                } else {
                    b.trace.len() < a.trace.len()
                };
                if take_b {
                    (b.trace, Some(a.trace.len()))
                } else {
                    let rival = b.trace.len();
                    (a.trace, Some(rival))
                }
            }
            (true, false) => (a.trace, None),
            (false, true) => (b.trace, None),
            (false, false) => unreachable!("Kleene and/or always returns one of its operands"),
        };
        observe(Selection {
            connective: op,
            truth,
            chosen_len: trace.len(),
            rival_len,
        });
        Verdict { truth, trace }
    }
}

pub fn and_v(a: Verdict, b: Verdict) -> Verdict {
    TraceChoice::default().and(a, b)
}

pub fn or_v(a: Verdict, b: Verdict) -> Verdict {
    TraceChoice::default().or(a, b)
}

pub fn imp_v(a: Verdict, b: Verdict) -> Verdict {
    TraceChoice::default().imp(a, b)
}

pub fn not_v(a: Verdict) -> Verdict {
    Verdict {
        truth: not3(a.truth),
        trace: a.trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(names: &[&str]) -> Trace {
        names.iter().map(|n| Term::atom(*n)).collect()
    }

    #[test]
    fn kleene_tables() {
        assert_eq!(and3(T, U), U);
        assert_eq!(or3(T, U), T);
        assert_eq!(not3(U), U);
        assert_eq!(imp3(F, U), T);
        assert_eq!(imp3(U, F), U);
    }

    #[test]
    fn and_v_single_match() {
        let v = and_v(Verdict::new(T, tr(&["a"])), Verdict::new(F, tr(&["a", "b", "c"])));
        assert_eq!(v, Verdict::new(F, tr(&["a", "b", "c"])));
    }

    #[test]
    fn and_v_takes_shorter() {
        let v = and_v(Verdict::new(F, tr(&["a", "b"])), Verdict::new(F, tr(&["a"])));
        assert_eq!(v, Verdict::new(F, tr(&["a"])));
        let v = TraceChoice::Shortest.and(Verdict::new(T, tr(&["a", "b"])), Verdict::new(T, tr(&["a"])));
        assert_eq!(v, Verdict::new(T, tr(&["a"])));
    }

    #[test]
    fn true_conjunction_policy() {
        let v = and_v(Verdict::new(T, tr(&["a"])), Verdict::new(T, tr(&["a", "b"])));
        assert_eq!(v.trace.len(), 2);
        let v = or_v(Verdict::new(T, tr(&["a", "b"])), Verdict::new(T, tr(&["a"])));
        assert_eq!(v.trace.len(), 1);
    }

    #[test]
    fn or_v_undefined_wins_over_false() {
        let v = or_v(Verdict::new(F, tr(&["a"])), Verdict::new(U, tr(&["a", "b"])));
        assert_eq!(v, Verdict::new(U, tr(&["a", "b"])));
    }

    #[test]
    fn ties_go_left() {
        for choice in [TraceChoice::Covering, TraceChoice::Shortest] {
            let v = choice.and(Verdict::new(T, tr(&["a"])), Verdict::new(T, tr(&["b"])));
            assert_eq!(v.trace, tr(&["a"]));
            let v = choice.or(Verdict::new(F, tr(&["a"])), Verdict::new(F, tr(&["b"])));
            assert_eq!(v.trace, tr(&["a"]));
        }
    }

    #[test]
    fn false_disjunction_policy() {
        let a = Verdict::new(F, tr(&["a"]));
        let b = Verdict::new(F, tr(&["a", "b"]));
        assert_eq!(TraceChoice::Covering.or(a.clone(), b.clone()).trace.len(), 2);
        assert_eq!(TraceChoice::Shortest.or(a, b).trace.len(), 1);
    }

    #[test]
    fn truth_constructor_round_trip() {
        for v in ALL {
            assert_eq!(TruthVal::from_constructor(v.constructor()), Some(v));
            assert_eq!(v.to_string().parse::<TruthVal>(), Ok(v));
        }
        assert_eq!(TruthVal::from_constructor("Nil"), None);
    }
}
