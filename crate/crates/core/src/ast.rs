//! Syntax trees for object-language programs and LTL properties.
//!
//! Terms are plain immutable trees. Variables and function names live in
//! separate namespaces: `Var` refers to a lambda, let or pattern binder (or a
//! free variable such as the event list), `Fun` refers to a definition made by
//! an enclosing `where` block.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Name of the reserved state variable inside property atoms.
pub const STATE_VAR: &str = "s";

pub const TRUE: &str = "True";
pub const FALSE: &str = "False";
pub const UNDEFINED: &str = "Undefined";
pub const NIL: &str = "Nil";
pub const CONS: &str = "Cons";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Con(String, Vec<Term>),
    Lam(String, Box<Term>),
    Fun(String),
    App(Box<Term>, Box<Term>),
    Case(Box<Term>, Vec<Alt>),
    Let(String, Box<Term>, Box<Term>),
    Where(Box<Term>, Vec<FunDef>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Wildcard,
    Con(String, Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alt {
    pub pattern: Pattern,
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunDef {
    pub name: String,
    pub body: Term,
}

impl Pattern {
    pub fn constructor(&self) -> Option<&str> {
        match self {
            Pattern::Wildcard => None,
            Pattern::Con(c, _) => Some(c),
        }
    }

    pub fn binders(&self) -> &[String] {
        match self {
            Pattern::Wildcard => &[],
            Pattern::Con(_, xs) => xs,
        }
    }
}

impl Alt {
    pub fn new(pattern: Pattern, body: Term) -> Self {
        Alt { pattern, body }
    }
}

impl FunDef {
    pub fn new(name: impl Into<String>, body: Term) -> Self {
        FunDef {
            name: name.into(),
            body,
        }
    }
}

// Small constructors used all over the crate and its tests.
impl Term {
    pub fn var(x: impl Into<String>) -> Term {
        Term::Var(x.into())
    }

    pub fn con(c: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Con(c.into(), args)
    }

    /// Nullary constructor.
    pub fn atom(c: impl Into<String>) -> Term {
        Term::Con(c.into(), Vec::new())
    }

    pub fn fun(f: impl Into<String>) -> Term {
        Term::Fun(f.into())
    }

    pub fn lam(x: impl Into<String>, body: Term) -> Term {
        Term::Lam(x.into(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn case(scrutinee: Term, alts: Vec<Alt>) -> Term {
        Term::Case(Box::new(scrutinee), alts)
    }

    pub fn let_(x: impl Into<String>, bound: Term, body: Term) -> Term {
        Term::Let(x.into(), Box::new(bound), Box::new(body))
    }

    pub fn where_(body: Term, defs: Vec<FunDef>) -> Term {
        Term::Where(Box::new(body), defs)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Con(CONS.to_string(), vec![head, tail])
    }

    /// Splits `h a1 ... an` into its head and argument list.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(a.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Strips leading lambdas, returning the parameters and the body.
    pub fn lambdas(&self) -> (Vec<&str>, &Term) {
        let mut params = Vec::new();
        let mut t = self;
        while let Term::Lam(x, b) = t {
            params.push(x.as_str());
            t = b;
        }
        (params, t)
    }

    pub fn is_whnf(&self) -> bool {
        matches!(self, Term::Con(..) | Term::Lam(..))
    }

    /// A closed constructor tree (no variables, calls or redexes).
    pub fn is_constructor_value(&self) -> bool {
        match self {
            Term::Con(_, args) => args.iter().all(Term::is_constructor_value),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Fun(_) => 1,
            Term::Con(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Case(e, alts) => 1 + e.size() + alts.iter().map(|a| a.body.size()).sum::<usize>(),
            Term::Let(_, e0, e1) => 1 + e0.size() + e1.size(),
            Term::Where(e, defs) => 1 + e.size() + defs.iter().map(|d| d.body.size()).sum::<usize>(),
        }
    }
}

/// LTL formulae whose atoms are terms over the state variable `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
    Next(Box<Formula>),
}

impl Formula {
    pub fn atom(t: Term) -> Formula {
        Formula::Atom(t)
    }
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn always(f: Formula) -> Formula {
        Formula::Always(Box::new(f))
    }
    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }
    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Always(f) | Formula::Eventually(f) | Formula::Next(f) => {
                1 + f.size()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// All atom terms, left to right.
    pub fn atoms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Formula::Atom(t) => out.push(t),
            Formula::Not(f) | Formula::Always(f) | Formula::Eventually(f) | Formula::Next(f) => {
                f.collect_atoms(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Data declarations
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataDecl {
    pub name: String,
    pub constructors: Vec<(String, usize)>,
}

impl DataDecl {
    pub fn new(name: impl Into<String>, constructors: Vec<(&str, usize)>) -> Self {
        DataDecl {
            name: name.into(),
            constructors: constructors
                .into_iter()
                .map(|(c, n)| (c.to_string(), n))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclError {
    #[error("constructor {0} is declared more than once")]
    DuplicateConstructor(String),
    #[error("type {0} is declared more than once")]
    DuplicateType(String),
    #[error("{0} is reserved by a builtin declaration")]
    Reserved(String),
}

/// The set of datatypes a program may use: the builtin `TruthVal` and
/// `List` plus user declarations.
#[derive(Clone, Debug)]
pub struct DataUniverse {
    decls: Vec<DataDecl>,
    index: HashMap<String, (usize, usize)>,
}

impl Default for DataUniverse {
    fn default() -> Self {
        Self::builtin()
    }
}

impl DataUniverse {
    pub fn builtin() -> Self {
        let mut u = DataUniverse {
            decls: Vec::new(),
            index: HashMap::new(),
        };
        u.push(DataDecl::new("TruthVal", vec![(TRUE, 0), (FALSE, 0), (UNDEFINED, 0)]))
            .expect("builtin");
        u.push(DataDecl::new("List", vec![(NIL, 0), (CONS, 2)]))
            .expect("builtin");
        u
    }

    pub fn with_decls(decls: impl IntoIterator<Item = DataDecl>) -> Result<Self, DeclError> {
        let mut u = Self::builtin();
        for d in decls {
            u.declare(d)?;
        }
        Ok(u)
    }

    /// Adds a user declaration; builtin names may not be redeclared.
    pub fn declare(&mut self, decl: DataDecl) -> Result<(), DeclError> {
        if decl.name == "TruthVal" || decl.name == "List" {
            return Err(DeclError::Reserved(decl.name));
        }
        for (c, _) in &decl.constructors {
            if [TRUE, FALSE, UNDEFINED, NIL, CONS].contains(&c.as_str()) {
                return Err(DeclError::Reserved(c.clone()));
            }
        }
        self.push(decl)
    }

    fn push(&mut self, decl: DataDecl) -> Result<(), DeclError> {
        if self.decls.iter().any(|d| d.name == decl.name) {
            return Err(DeclError::DuplicateType(decl.name));
        }
        let ty = self.decls.len();
        let mut seen = BTreeSet::new();
        for (c, _) in &decl.constructors {
            if self.index.contains_key(c) || !seen.insert(c.clone()) {
                return Err(DeclError::DuplicateConstructor(c.clone()));
            }
        }
        for (i, (c, _)) in decl.constructors.iter().enumerate() {
            self.index.insert(c.clone(), (ty, i));
        }
        self.decls.push(decl);
        Ok(())
    }

    pub fn decls(&self) -> &[DataDecl] {
        &self.decls
    }

    /// User declarations only, in declaration order.
    pub fn user_decls(&self) -> &[DataDecl] {
        &self.decls[2..]
    }

    pub fn arity(&self, constructor: &str) -> Option<usize> {
        self.index
            .get(constructor)
            .map(|&(t, i)| self.decls[t].constructors[i].1)
    }

    pub fn type_of(&self, constructor: &str) -> Option<&DataDecl> {
        self.index.get(constructor).map(|&(t, _)| &self.decls[t])
    }

    pub fn decl(&self, name: &str) -> Option<&DataDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Constructors of the same datatype that are not in `matched`, in
    /// declaration order.
    pub fn residual<'a>(&'a self, sibling: &str, matched: &BTreeSet<&str>) -> Vec<&'a str> {
        match self.type_of(sibling) {
            Some(d) => d
                .constructors
                .iter()
                .map(|(c, _)| c.as_str())
                .filter(|c| !matched.contains(c))
                .collect(),
            None => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
    #[error("constructor arity: {constructor} expects {expected} argument(s), found {found}")]
    Arity {
        constructor: String,
        expected: usize,
        found: usize,
    },
    #[error("case expression has no alternatives")]
    EmptyCase,
    #[error("wildcard pattern must be the last alternative")]
    WildcardNotLast,
    #[error("constructor {0} appears in more than one pattern")]
    DuplicatePattern(String),
    #[error("repeated pattern variable {0}")]
    RepeatedPatternVar(String),
    #[error("function {0} is defined more than once")]
    DuplicateFunction(String),
}

/// Checks the structural invariants of a term against a data universe.
///
/// Function names must be unique across all `where` blocks of a program so
/// that a single flat [`crate::eval::FunEnv`] resolves every call.
pub fn check_well_formed(term: &Term, universe: &DataUniverse) -> Result<(), WellFormedError> {
    let mut funs = BTreeSet::new();
    check_wf(term, universe, &mut funs)
}

fn check_wf(
    term: &Term,
    u: &DataUniverse,
    funs: &mut BTreeSet<String>,
) -> Result<(), WellFormedError> {
    match term {
        Term::Var(_) | Term::Fun(_) => Ok(()),
        Term::Con(c, args) => {
            let expected = u
                .arity(c)
                .ok_or_else(|| WellFormedError::UnknownConstructor(c.clone()))?;
            if expected != args.len() {
                return Err(WellFormedError::Arity {
                    constructor: c.clone(),
                    expected,
                    found: args.len(),
                });
            }
            args.iter().try_for_each(|a| check_wf(a, u, funs))
        }
        Term::Lam(_, b) => check_wf(b, u, funs),
        Term::App(f, a) => {
            check_wf(f, u, funs)?;
            check_wf(a, u, funs)
        }
        Term::Case(e, alts) => {
            check_wf(e, u, funs)?;
            check_alternatives(alts, u)?;
            alts.iter().try_for_each(|a| check_wf(&a.body, u, funs))
        }
        Term::Let(_, e0, e1) => {
            check_wf(e0, u, funs)?;
            check_wf(e1, u, funs)
        }
        Term::Where(e, defs) => {
            for d in defs {
                if !funs.insert(d.name.clone()) {
                    return Err(WellFormedError::DuplicateFunction(d.name.clone()));
                }
            }
            check_wf(e, u, funs)?;
            defs.iter().try_for_each(|d| check_wf(&d.body, u, funs))
        }
    }
}

/// Pattern rules for one case: nonempty, flat, wildcard last, no repeated
/// constructor, no repeated binder.
pub fn check_alternatives(alts: &[Alt], u: &DataUniverse) -> Result<(), WellFormedError> {
    if alts.is_empty() {
        return Err(WellFormedError::EmptyCase);
    }
    let mut seen = BTreeSet::new();
    for (i, alt) in alts.iter().enumerate() {
        match &alt.pattern {
            Pattern::Wildcard => {
                if i + 1 != alts.len() {
                    return Err(WellFormedError::WildcardNotLast);
                }
            }
            Pattern::Con(c, xs) => {
                let expected = u
                    .arity(c)
                    .ok_or_else(|| WellFormedError::UnknownConstructor(c.clone()))?;
                if expected != xs.len() {
                    return Err(WellFormedError::Arity {
                        constructor: c.clone(),
                        expected,
                        found: xs.len(),
                    });
                }
                if !seen.insert(c.as_str()) {
                    return Err(WellFormedError::DuplicatePattern(c.clone()));
                }
                let mut vars = BTreeSet::new();
                for x in xs {
                    if !vars.insert(x.as_str()) {
                        return Err(WellFormedError::RepeatedPatternVar(x.clone()));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Free variables and substitution
// ---------------------------------------------------------------------------

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(t, &mut bound, &mut out);
    out
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::Fun(_) => {}
        Term::Con(_, args) => args.iter().for_each(|a| collect_free(a, bound, out)),
        Term::Lam(x, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Case(e, alts) => {
            collect_free(e, bound, out);
            for alt in alts {
                let n = bound.len();
                bound.extend(alt.pattern.binders().iter().map(String::as_str));
                collect_free(&alt.body, bound, out);
                bound.truncate(n);
            }
        }
        Term::Let(x, e0, e1) => {
            collect_free(e0, bound, out);
            bound.push(x);
            collect_free(e1, bound, out);
            bound.pop();
        }
        Term::Where(e, defs) => {
            collect_free(e, bound, out);
            defs.iter().for_each(|d| collect_free(&d.body, bound, out));
        }
    }
}

/// Every variable name occurring in the term, bound or free.
pub fn all_var_names(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_names(t, &mut out);
    out
}

fn collect_names(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Fun(_) => {}
        Term::Con(_, args) => args.iter().for_each(|a| collect_names(a, out)),
        Term::Lam(x, b) => {
            out.insert(x.clone());
            collect_names(b, out);
        }
        Term::App(f, a) => {
            collect_names(f, out);
            collect_names(a, out);
        }
        Term::Case(e, alts) => {
            collect_names(e, out);
            for alt in alts {
                out.extend(alt.pattern.binders().iter().cloned());
                collect_names(&alt.body, out);
            }
        }
        Term::Let(x, e0, e1) => {
            out.insert(x.clone());
            collect_names(e0, out);
            collect_names(e1, out);
        }
        Term::Where(e, defs) => {
            collect_names(e, out);
            defs.iter().for_each(|d| collect_names(&d.body, out));
        }
    }
}

pub type Bindings = BTreeMap<String, Term>;

/// Capture-avoiding simultaneous substitution.
///
/// A binder that would capture a free variable of a substituted term is
/// renamed to `name{n}` with the smallest `n >= 1` that is unused anywhere in
/// the input term and the bindings.
pub fn substitute(t: &Term, bindings: &Bindings) -> Term {
    if bindings.is_empty() {
        return t.clone();
    }
    let mut avoid = all_var_names(t);
    for (x, b) in bindings {
        avoid.insert(x.clone());
        avoid.extend(all_var_names(b));
    }
    let mut s = Substitution { avoid };
    s.apply(t, bindings)
}

/// Single-variable convenience wrapper around [`substitute`].
pub fn substitute1(t: &Term, x: &str, value: &Term) -> Term {
    let mut b = Bindings::new();
    b.insert(x.to_string(), value.clone());
    substitute(t, &b)
}

struct Substitution {
    avoid: BTreeSet<String>,
}

impl Substitution {
    fn fresh(&mut self, base: &str) -> String {
        let name = (1..)
            .map(|n| format!("{base}{n}"))
            .find(|c| !self.avoid.contains(c))
            .expect("unbounded suffixes");
        self.avoid.insert(name.clone());
        name
    }

    /// Free variables of the substituted terms that stay live under `env`.
    fn captures(env: &Bindings, body_free: &BTreeSet<String>, binder: &str) -> bool {
        env.iter()
            .filter(|(x, _)| body_free.contains(*x))
            .any(|(_, b)| free_vars(b).contains(binder))
    }

    /// Enters a binder: drops shadowed bindings and renames the binder when
    /// it would capture. Returns the binder name to use and the environment
    /// for the body (which may map the old binder to the fresh one).
    fn bind(&mut self, binder: &str, body_free: &BTreeSet<String>, env: &Bindings) -> (String, Bindings) {
        let mut inner = env.clone();
        inner.remove(binder);
        if Self::captures(&inner, body_free, binder) {
            let fresh = self.fresh(binder);
            inner.insert(binder.to_string(), Term::Var(fresh.clone()));
            (fresh, inner)
        } else {
            (binder.to_string(), inner)
        }
    }

    fn apply(&mut self, t: &Term, env: &Bindings) -> Term {
        if env.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(x) => env.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::Fun(_) => t.clone(),
            Term::Con(c, args) => Term::Con(c.clone(), args.iter().map(|a| self.apply(a, env)).collect()),
            Term::Lam(x, b) => {
                let (x2, inner) = self.bind(x, &free_vars(b), env);
                Term::Lam(x2, Box::new(self.apply(b, &inner)))
            }
            Term::App(f, a) => Term::app(self.apply(f, env), self.apply(a, env)),
            Term::Case(e, alts) => {
                let e2 = self.apply(e, env);
                let alts2 = alts
                    .iter()
                    .map(|alt| self.apply_alt(alt, env))
                    .collect();
                Term::Case(Box::new(e2), alts2)
            }
            Term::Let(x, e0, e1) => {
                let e0b = self.apply(e0, env);
                let (x2, inner) = self.bind(x, &free_vars(e1), env);
                Term::Let(x2, Box::new(e0b), Box::new(self.apply(e1, &inner)))
            }
            Term::Where(e, defs) => Term::Where(
                Box::new(self.apply(e, env)),
                defs.iter()
                    .map(|d| FunDef::new(d.name.clone(), self.apply(&d.body, env)))
                    .collect(),
            ),
        }
    }

    fn apply_alt(&mut self, alt: &Alt, env: &Bindings) -> Alt {
        match &alt.pattern {
            Pattern::Wildcard => Alt::new(Pattern::Wildcard, self.apply(&alt.body, env)),
            Pattern::Con(c, xs) => {
                let body_free = free_vars(&alt.body);
                let mut inner = env.clone();
                for x in xs {
                    inner.remove(x);
                }
                let mut renamed = Vec::with_capacity(xs.len());
                for x in xs {
                    if Self::captures(&inner, &body_free, x) {
                        let fresh = self.fresh(x);
                        inner.insert(x.clone(), Term::Var(fresh.clone()));
                        renamed.push(fresh);
                    } else {
                        renamed.push(x.clone());
                    }
                }
                Alt::new(Pattern::Con(c.clone(), renamed), self.apply(&alt.body, &inner))
            }
        }
    }
}

/// Structural equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn alpha<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if *l == x || *r == y {
                    return *l == x && *r == y;
                }
            }
            x == y
        }
        (Term::Fun(f), Term::Fun(g)) => f == g,
        (Term::Con(c, xs), Term::Con(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha(x, y, env))
        }
        (Term::Lam(x, b1), Term::Lam(y, b2)) => {
            env.push((x, y));
            let r = alpha(b1, b2, env);
            env.pop();
            r
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => alpha(f1, f2, env) && alpha(a1, a2, env),
        (Term::Case(e1, as1), Term::Case(e2, as2)) => {
            alpha(e1, e2, env)
                && as1.len() == as2.len()
                && as1.iter().zip(as2).all(|(p, q)| match (&p.pattern, &q.pattern) {
                    (Pattern::Wildcard, Pattern::Wildcard) => alpha(&p.body, &q.body, env),
                    (Pattern::Con(c, xs), Pattern::Con(d, ys)) if c == d && xs.len() == ys.len() => {
                        let n = env.len();
                        env.extend(xs.iter().map(String::as_str).zip(ys.iter().map(String::as_str)));
                        let r = alpha(&p.body, &q.body, env);
                        env.truncate(n);
                        r
                    }
                    _ => false,
                })
        }
        (Term::Let(x, a0, a1), Term::Let(y, b0, b1)) => {
            if !alpha(a0, b0, env) {
                return false;
            }
            env.push((x, y));
            let r = alpha(a1, b1, env);
            env.pop();
            r
        }
        (Term::Where(e1, d1), Term::Where(e2, d2)) => {
            alpha(e1, e2, env)
                && d1.len() == d2.len()
                && d1
                    .iter()
                    .zip(d2)
                    .all(|(p, q)| p.name == q.name && alpha(&p.body, &q.body, env))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Display: compact single-line rendering used in messages and traces.
// The parseable layout lives in `parser::pretty`.
// ---------------------------------------------------------------------------

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::pretty::term_inline(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::pretty::formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn free_vars_single_variable() {
        assert_eq!(free_vars(&v("x")), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn free_vars_identity_is_closed() {
        assert!(free_vars(&Term::lam("x", v("x"))).is_empty());
    }

    #[test]
    fn free_vars_case_pattern_binds() {
        let t = Term::case(
            v("es"),
            vec![Alt::new(
                Pattern::Con("Cons".into(), vec!["e".into(), "es".into()]),
                v("e"),
            )],
        );
        assert_eq!(free_vars(&t), BTreeSet::from(["es".to_string()]));
    }

    #[test]
    fn free_vars_ignore_function_names() {
        let t = Term::apps(Term::fun("f"), [v("es")]);
        assert_eq!(free_vars(&t), BTreeSet::from(["es".to_string()]));
    }

    #[test]
    fn substitute_variable() {
        let out = substitute1(&v("x"), "x", &Term::atom("A"));
        assert_eq!(out, Term::atom("A"));
    }

    #[test]
    fn substitute_renames_capturing_binder() {
        let out = substitute1(&Term::lam("y", v("x")), "x", &v("y"));
        assert_eq!(out, Term::lam("y1", v("y")));
    }

    #[test]
    fn substitute_respects_shadowing() {
        let t = Term::lam("x", v("x"));
        assert_eq!(substitute1(&t, "x", &Term::atom("A")), t);
    }

    #[test]
    fn substitute_renames_pattern_binders() {
        // case z of C y -> x   with x := y
        let t = Term::case(
            v("z"),
            vec![Alt::new(Pattern::Con("C".into(), vec!["y".into()]), v("x"))],
        );
        let out = substitute1(&t, "x", &v("y"));
        let expected = Term::case(
            v("z"),
            vec![Alt::new(Pattern::Con("C".into(), vec!["y1".into()]), v("y"))],
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn fresh_suffix_skips_names_in_use() {
        // \y -> x y1   with x := y ; y1 is taken so the binder becomes y2
        let t = Term::lam("y", Term::app(v("x"), v("y1")));
        let out = substitute1(&t, "x", &v("y"));
        assert_eq!(out, Term::lam("y2", Term::app(v("y"), v("y1"))));
    }

    #[test]
    fn simultaneous_substitution() {
        let t = Term::app(v("x"), v("y"));
        let mut b = Bindings::new();
        b.insert("x".into(), v("y"));
        b.insert("y".into(), v("x"));
        assert_eq!(substitute(&t, &b), Term::app(v("y"), v("x")));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Term::lam("x", Term::lam("y", v("x")));
        let b = Term::lam("p", Term::lam("q", v("p")));
        let c = Term::lam("p", Term::lam("q", v("q")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
        assert!(!alpha_eq(&v("x"), &v("y")));
    }

    #[test]
    fn universe_rejects_reserved_and_duplicates() {
        let mut u = DataUniverse::builtin();
        assert_eq!(
            u.declare(DataDecl::new("Bool", vec![("True", 0)])),
            Err(DeclError::Reserved("True".into()))
        );
        u.declare(DataDecl::new("P", vec![("T", 0), ("W", 0)])).unwrap();
        assert_eq!(
            u.declare(DataDecl::new("Q", vec![("T", 0)])),
            Err(DeclError::DuplicateConstructor("T".into()))
        );
        assert_eq!(u.arity("Cons"), Some(2));
        assert_eq!(u.arity("W"), Some(0));
    }

    #[test]
    fn well_formedness_errors() {
        let u = DataUniverse::builtin();
        let bad_arity = Term::con("Cons", vec![Term::atom("Nil")]);
        assert!(matches!(
            check_well_formed(&bad_arity, &u),
            Err(WellFormedError::Arity { .. })
        ));
        let wildcard_first = Term::case(
            v("x"),
            vec![
                Alt::new(Pattern::Wildcard, v("x")),
                Alt::new(Pattern::Con("Nil".into(), vec![]), v("x")),
            ],
        );
        assert_eq!(
            check_well_formed(&wildcard_first, &u),
            Err(WellFormedError::WildcardNotLast)
        );
        let repeated = Term::case(
            v("x"),
            vec![Alt::new(
                Pattern::Con("Cons".into(), vec!["y".into(), "y".into()]),
                v("y"),
            )],
        );
        assert_eq!(
            check_well_formed(&repeated, &u),
            Err(WellFormedError::RepeatedPatternVar("y".into()))
        );
    }
}
