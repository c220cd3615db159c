//! Recognises the tail-recursive simplified form that verification requires.
//!
//! The accepted language, threading the set `rho` of let-bound variables:
//!
//! ```text
//! e ::= Cons e0 e1
//!     | f x1 ... xn
//!     | case x of p1 -> e1 | ... | pk -> ek      (x not in rho)
//!     | x e1 ... en                              (x in rho)
//!     | let x = \x1 ... xn -> e0 in e1           (e1 checked with x in rho)
//!     | e0 where f1 = \xs -> e1 ... fn = \xs -> en
//! ```
//!
//! The state `e0` of a `Cons` cell must be a constructor term over variables
//! unless [`FormOptions::strict_state`] is turned off, in which case it is
//! checked as an ordinary `e`.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Term, CONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormRule {
    Cons,
    Call,
    Case,
    LetVarApp,
    Let,
    Where,
}

impl fmt::Display for FormRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormRule::Cons => "cons",
            FormRule::Call => "call",
            FormRule::Case => "case",
            FormRule::LetVarApp => "let-variable application",
            FormRule::Let => "let",
            FormRule::Where => "where",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Slash-separated route from the program root, e.g. `f2/Take1/head`.
    pub position: String,
    pub rule: FormRule,
    pub message: String,
    pub term: Term,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos = if self.position.is_empty() { "<root>" } else { &self.position };
        write!(f, "{pos}: {} [{} rule]: {}", self.message, self.rule, self.term)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormReport {
    pub conforms: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormOptions {
    pub strict_state: bool,
}

impl Default for FormOptions {
    fn default() -> Self {
        FormOptions { strict_state: true }
    }
}

pub fn check_simplified(program: &Term) -> FormReport {
    check_simplified_with(program, FormOptions::default())
}

pub fn check_simplified_with(program: &Term, options: FormOptions) -> FormReport {
    let mut c = Checker {
        options,
        path: Vec::new(),
        violations: Vec::new(),
    };
    c.check(program, &BTreeSet::new());
    FormReport {
        conforms: c.violations.is_empty(),
        violations: c.violations,
    }
}

struct Checker {
    options: FormOptions,
    path: Vec<String>,
    violations: Vec<Violation>,
}

fn without<'a>(rho: &BTreeSet<&'a str>, names: impl IntoIterator<Item = &'a str>) -> BTreeSet<&'a str> {
    let mut r = rho.clone();
    for n in names {
        r.remove(n);
    }
    r
}

fn is_state_term(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Con(_, args) => args.iter().all(is_state_term),
        _ => false,
    }
}

impl Checker {
    fn violation(&mut self, rule: FormRule, message: &str, term: &Term) {
        self.violations.push(Violation {
            position: self.path.join("/"),
            rule,
            message: message.to_string(),
            term: term.clone(),
        });
    }

    fn nested<'a>(&mut self, seg: impl Into<String>, t: &'a Term, rho: &BTreeSet<&'a str>) {
        self.path.push(seg.into());
        self.check(t, rho);
        self.path.pop();
    }

    fn check<'a>(&mut self, t: &'a Term, rho: &BTreeSet<&'a str>) {
        match t {
            Term::Con(c, args) if c == CONS => {
                let (head, tail) = (&args[0], &args[1]);
                if self.options.strict_state {
                    if !is_state_term(head) {
                        self.path.push("head".into());
                        self.violation(
                            FormRule::Cons,
                            "state must be a constructor term over variables",
                            head,
                        );
                        self.path.pop();
                    }
                } else {
                    self.nested("head", head, rho);
                }
                self.nested("tail", tail, rho);
            }
            Term::Con(..) => self.violation(FormRule::Cons, "expected a Cons cell", t),
            Term::Fun(_) | Term::App(..) | Term::Var(_) => {
                let (head, args) = t.spine();
                match head {
                    Term::Fun(_) => {
                        if !args.iter().all(|a| matches!(a, Term::Var(_))) {
                            self.violation(FormRule::Call, "function call arguments must be variables", t);
                        }
                    }
                    Term::Var(x) if rho.contains(x.as_str()) => {
                        for (i, a) in args.into_iter().enumerate() {
                            self.nested(format!("arg{i}"), a, rho);
                        }
                    }
                    Term::Var(_) => self.violation(
                        FormRule::LetVarApp,
                        "only let-bound variables may be applied or returned",
                        t,
                    ),
                    _ => self.violation(
                        FormRule::Call,
                        "application head must be a function or a let-bound variable",
                        t,
                    ),
                }
            }
            Term::Case(e, alts) => match e.as_ref() {
                Term::Var(x) if rho.contains(x.as_str()) => {
                    self.violation(FormRule::Case, "case scrutinee must not be let-bound", t)
                }
                Term::Var(_) => {
                    for alt in alts {
                        let inner = without(rho, alt.pattern.binders().iter().map(String::as_str));
                        let seg = alt.pattern.constructor().unwrap_or("_").to_string();
                        self.nested(seg, &alt.body, &inner);
                    }
                }
                _ => self.violation(FormRule::Case, "case scrutinee must be a variable", t),
            },
            Term::Let(x, e0, e1) => {
                let (params, body) = e0.lambdas();
                let inner = without(rho, params);
                self.nested(format!("let {x}"), body, &inner);
                let mut rho2 = rho.clone();
                rho2.insert(x.as_str());
                self.nested("in", e1, &rho2);
            }
            Term::Where(e, defs) => {
                self.nested("where", e, rho);
                for d in defs {
                    let (params, body) = d.body.lambdas();
                    let inner = without(rho, params);
                    self.nested(d.name.clone(), body, &inner);
                }
            }
            Term::Lam(..) => self.violation(FormRule::Where, "lambda outside a definition", t),
        }
    }
}

/// Every call to a `where`-defined function is in tail position: no `Fun`
/// occurs as an application operand, inside a constructor argument other
/// than the tail of a `Cons`, or in a case scrutinee.
pub fn tail_calls_only(t: &Term) -> bool {
    fn no_fun(t: &Term) -> bool {
        match t {
            Term::Fun(_) => false,
            Term::Var(_) => true,
            Term::Con(_, args) => args.iter().all(no_fun),
            Term::Lam(_, b) => no_fun(b),
            Term::App(f, a) => no_fun(f) && no_fun(a),
            Term::Case(e, alts) => no_fun(e) && alts.iter().all(|a| no_fun(&a.body)),
            Term::Let(_, e0, e1) => no_fun(e0) && no_fun(e1),
            Term::Where(e, defs) => no_fun(e) && defs.iter().all(|d| no_fun(&d.body)),
        }
    }
    match t {
        Term::Fun(_) | Term::Var(_) => true,
        Term::Con(c, args) if c == CONS => no_fun(&args[0]) && tail_calls_only(&args[1]),
        Term::Con(_, args) => args.iter().all(no_fun),
        Term::Lam(_, b) => tail_calls_only(b),
        Term::App(..) => {
            let (head, args) = t.spine();
            (matches!(head, Term::Fun(_)) || tail_calls_only(head)) && args.into_iter().all(no_fun)
        }
        Term::Case(e, alts) => no_fun(e) && alts.iter().all(|a| tail_calls_only(&a.body)),
        Term::Let(_, e0, e1) => tail_calls_only(e0) && tail_calls_only(e1),
        Term::Where(e, defs) => tail_calls_only(e) && defs.iter().all(|d| tail_calls_only(&d.body)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Alt, FunDef, Pattern};

    fn loop_program() -> Term {
        // Cons A (f es) where f = \es -> case es of Cons e es -> case e of _ -> Cons A (f es)
        Term::where_(
            Term::cons(Term::atom("A"), Term::app(Term::fun("f"), Term::var("es"))),
            vec![FunDef::new(
                "f",
                Term::lam(
                    "es",
                    Term::case(
                        Term::var("es"),
                        vec![Alt::new(
                            Pattern::Con("Cons".into(), vec!["e".into(), "es".into()]),
                            Term::case(
                                Term::var("e"),
                                vec![Alt::new(
                                    Pattern::Wildcard,
                                    Term::cons(Term::atom("A"), Term::app(Term::fun("f"), Term::var("es"))),
                                )],
                            ),
                        )],
                    ),
                ),
            )],
        )
    }

    #[test]
    fn loop_program_conforms() {
        let r = check_simplified(&loop_program());
        assert!(r.conforms, "{:?}", r.violations);
        assert!(tail_calls_only(&loop_program()));
    }

    #[test]
    fn scrutinee_must_be_variable() {
        let t = Term::case(
            Term::app(Term::fun("f"), Term::var("x")),
            vec![Alt::new(Pattern::Wildcard, Term::app(Term::fun("f"), Term::var("x")))],
        );
        let r = check_simplified(&t);
        assert!(!r.conforms);
        assert_eq!(r.violations[0].message, "case scrutinee must be a variable");
        assert_eq!(r.violations[0].rule, FormRule::Case);
    }

    #[test]
    fn case_on_let_variable() {
        let t = Term::let_(
            "x",
            Term::lam("y", Term::app(Term::fun("f"), Term::var("y"))),
            Term::case(Term::var("x"), vec![Alt::new(Pattern::Wildcard, Term::fun("f"))]),
        );
        let r = check_simplified(&t);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].position, "in");
    }

    #[test]
    fn let_variable_application() {
        let t = Term::let_(
            "k",
            Term::lam("y", Term::app(Term::fun("f"), Term::var("y"))),
            Term::app(Term::var("k"), Term::app(Term::fun("f"), Term::var("z"))),
        );
        assert!(check_simplified(&t).conforms);
    }

    #[test]
    fn call_arguments_must_be_variables() {
        let t = Term::app(Term::fun("f"), Term::atom("A"));
        let r = check_simplified(&t);
        assert_eq!(r.violations[0].rule, FormRule::Call);
    }

    #[test]
    fn strict_state_reading() {
        let t = Term::cons(Term::app(Term::fun("g"), Term::var("x")), Term::fun("f"));
        assert!(!check_simplified(&t).conforms);
        let relaxed = check_simplified_with(&t, FormOptions { strict_state: false });
        assert!(relaxed.conforms);
        assert!(!tail_calls_only(&t));
    }
}
