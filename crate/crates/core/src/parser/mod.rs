//! Concrete syntax for program files (`.rsl`) and property files (`.ltl`).
//!
//! See `docs/syntax.md` for the grammar. Lowercase identifiers are variables
//! or functions (resolved by scope after parsing), uppercase identifiers are
//! constructors. Data declarations end at the end of their line unless the
//! next line continues with `|` or `=`.

pub mod lexer;
pub mod pretty;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{
    free_vars, Alt, DataDecl, DataUniverse, Formula, FunDef, Pattern, Term, STATE_VAR,
};
use lexer::{lex, Pos, Tok, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, Error)]
#[error("{}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl From<Diagnostic> for ParseError {
    fn from(d: Diagnostic) -> Self {
        ParseError {
            diagnostics: vec![d],
        }
    }
}

/// Result of parsing a program file. `term` is present iff `diagnostics` is
/// empty.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub decls: Vec<DataDecl>,
    pub universe: DataUniverse,
    pub term: Option<Term>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SourceFile {
    pub fn into_program(self) -> Result<Program, ParseError> {
        match self.term {
            Some(term) if self.diagnostics.is_empty() => Ok(Program {
                universe: self.universe,
                term,
            }),
            _ => Err(ParseError {
                diagnostics: self.diagnostics,
            }),
        }
    }
}

/// A well-formed program together with the datatypes it was checked against.
#[derive(Clone, Debug)]
pub struct Program {
    pub universe: DataUniverse,
    pub term: Term,
}

impl Program {
    pub fn parse(text: &str) -> Result<Program, ParseError> {
        parse_program(text).into_program()
    }
}

#[derive(Clone, Debug, Default)]
pub struct PropertyFile {
    pub props: Vec<(String, Formula)>,
    /// Fairness set from the `fair:` header, `None` when absent.
    pub fair: Option<BTreeSet<String>>,
}

impl PropertyFile {
    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.props.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.props.iter().map(|(n, _)| n.as_str())
    }
}

pub fn parse_program(text: &str) -> SourceFile {
    let mut sf = SourceFile {
        decls: Vec::new(),
        universe: DataUniverse::builtin(),
        term: None,
        diagnostics: Vec::new(),
    };
    let tokens = match lex(text) {
        Ok(t) => t,
        Err((pos, msg)) => {
            sf.diagnostics.push(Diagnostic::at(pos, msg));
            return sf;
        }
    };
    let mut p = Parser::new(tokens, DataUniverse::builtin());
    let result = p.program_file(&mut sf.decls);
    sf.universe = p.universe;
    match result {
        Ok(t) => sf.term = Some(t),
        Err(d) => sf.diagnostics.push(d),
    }
    sf
}

/// Parses a property file against the datatypes of the program it describes.
pub fn parse_properties(text: &str, universe: &DataUniverse) -> Result<PropertyFile, ParseError> {
    let tokens = lex(text).map_err(|(pos, msg)| Diagnostic::at(pos, msg))?;
    let mut p = Parser::new(tokens, universe.clone());
    Ok(p.property_file()?)
}

/// Parses a single formula, as written after `prop NAME:`.
pub fn parse_formula(text: &str, universe: &DataUniverse) -> Result<Formula, ParseError> {
    let tokens = lex(text).map_err(|(pos, msg)| Diagnostic::at(pos, msg))?;
    let mut p = Parser::new(tokens, universe.clone());
    let f = p.formula()?;
    p.expect(&Tok::Eof)?;
    Ok(f)
}

/// Parses a single expression, such as a state written `ObsState T W`.
pub fn parse_term(text: &str, universe: &DataUniverse) -> Result<Term, ParseError> {
    let tokens = lex(text).map_err(|(pos, msg)| Diagnostic::at(pos, msg))?;
    let mut p = Parser::new(tokens, universe.clone());
    let raw = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(resolve(&raw, &mut Vec::new()))
}

type PResult<T> = Result<T, Diagnostic>;

enum AppPart {
    Ctor(String, Pos),
    Term(Term),
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    universe: DataUniverse,
    functions: BTreeSet<String>,
}

impl Parser {
    fn new(toks: Vec<Token>, universe: DataUniverse) -> Self {
        Parser {
            toks,
            i: 0,
            universe,
            functions: BTreeSet::new(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {t}")))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::at(self.pos(), format!("{what}, found {}", self.peek()))
    }

    fn lower(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lower(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.unexpected("expected a variable name")),
        }
    }

    // -- data declarations -------------------------------------------------

    fn program_file(&mut self, decls: &mut Vec<DataDecl>) -> PResult<Term> {
        while *self.peek() == Tok::Data {
            let pos = self.pos();
            let d = self.data_decl()?;
            self.universe
                .declare(d.clone())
                .map_err(|e| Diagnostic::at(pos, e.to_string()))?;
            decls.push(d);
        }
        let raw = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("expected end of program"));
        }
        Ok(resolve(&raw, &mut Vec::new()))
    }

    /// True when the current token continues the declaration that ended on
    /// `prev_line`.
    fn continues(&self, prev_line: usize) -> bool {
        matches!(self.peek(), Tok::Bar | Tok::Eq) || self.pos().line == prev_line
    }

    fn data_decl(&mut self) -> PResult<DataDecl> {
        self.expect(&Tok::Data)?;
        let name = match self.bump() {
            Token {
                tok: Tok::Upper(n), ..
            } => n,
            t => {
                return Err(Diagnostic::at(
                    t.pos,
                    format!("expected a type name, found {}", t.tok),
                ))
            }
        };
        while let Tok::Lower(_) = self.peek() {
            self.bump();
        }
        self.expect(&Tok::Eq)?;
        let mut ctors = Vec::new();
        loop {
            let ctor_tok = self.bump();
            let Tok::Upper(c) = ctor_tok.tok else {
                return Err(Diagnostic::at(
                    ctor_tok.pos,
                    format!("expected a constructor name, found {}", ctor_tok.tok),
                ));
            };
            let mut line = ctor_tok.pos.line;
            let mut arity = 0;
            loop {
                if self.pos().line != line || matches!(self.peek(), Tok::Bar | Tok::Eof) {
                    break;
                }
                match self.peek() {
                    Tok::Upper(_) | Tok::Lower(_) => {
                        line = self.bump().pos.line;
                    }
                    Tok::LParen => {
                        line = self.skip_type_parens()?;
                    }
                    _ => break,
                }
                arity += 1;
            }
            ctors.push((c, arity));
            if *self.peek() == Tok::Bar && self.continues(line) {
                self.bump();
            } else {
                break;
            }
        }
        Ok(DataDecl {
            name,
            constructors: ctors,
        })
    }

    fn skip_type_parens(&mut self) -> PResult<usize> {
        let mut depth = 0usize;
        loop {
            let t = self.bump();
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(t.pos.line);
                    }
                }
                Tok::Upper(_) | Tok::Lower(_) => {}
                other => {
                    return Err(Diagnostic::at(t.pos, format!("unexpected {other} in type")))
                }
            }
        }
    }

    // -- expressions -------------------------------------------------------

    fn expr(&mut self) -> PResult<Term> {
        let body = self.open()?;
        if *self.peek() == Tok::Where {
            self.bump();
            let mut defs = Vec::new();
            loop {
                let pos = self.pos();
                let name = self.lower()?;
                if !self.functions.insert(name.clone()) {
                    return Err(Diagnostic::at(
                        pos,
                        format!("function {name} is defined more than once"),
                    ));
                }
                self.expect(&Tok::Eq)?;
                let body = self.expr()?;
                defs.push(FunDef::new(name, body));
                if !self.at_definition() {
                    break;
                }
            }
            return Ok(Term::where_(body, defs));
        }
        Ok(body)
    }

    fn at_definition(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_)) && *self.peek2() == Tok::Eq
    }

    fn open(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let mut params = vec![self.lower()?];
                while let Tok::Lower(_) = self.peek() {
                    params.push(self.lower()?);
                }
                self.expect(&Tok::Arrow)?;
                let body = self.expr()?;
                Ok(params.into_iter().rev().fold(body, |b, x| Term::lam(x, b)))
            }
            Tok::Case => {
                self.bump();
                let scrutinee = self.expr()?;
                self.expect(&Tok::Of)?;
                let alts = self.alternatives()?;
                Ok(Term::case(scrutinee, alts))
            }
            Tok::Let => {
                self.bump();
                let x = self.lower()?;
                self.expect(&Tok::Eq)?;
                let bound = self.expr()?;
                self.expect(&Tok::In)?;
                let body = self.expr()?;
                Ok(Term::let_(x, bound, body))
            }
            _ => self.application(),
        }
    }

    fn alternatives(&mut self) -> PResult<Vec<Alt>> {
        let mut alts: Vec<Alt> = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            let pos = self.pos();
            if alts.last().is_some_and(|a| a.pattern == Pattern::Wildcard) {
                return Err(Diagnostic::at(pos, "wildcard pattern must be the last alternative"));
            }
            let pattern = self.pattern()?;
            if let Pattern::Con(c, _) = &pattern {
                if !seen.insert(c.clone()) {
                    return Err(Diagnostic::at(
                        pos,
                        format!("duplicate constructor {c} in case alternatives"),
                    ));
                }
            }
            self.expect(&Tok::Arrow)?;
            let body = self.expr()?;
            alts.push(Alt::new(pattern, body));
            if !self.eat(&Tok::Bar) {
                return Ok(alts);
            }
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let t = self.bump();
        match t.tok {
            Tok::Underscore => Ok(Pattern::Wildcard),
            Tok::Upper(c) => {
                let mut vars: Vec<String> = Vec::new();
                loop {
                    let pos = self.pos();
                    match self.peek().clone() {
                        Tok::Lower(x) => {
                            if vars.contains(&x) {
                                return Err(Diagnostic::at(
                                    pos,
                                    format!("repeated pattern variable {x}"),
                                ));
                            }
                            self.bump();
                            vars.push(x);
                        }
                        Tok::Upper(_) | Tok::LParen | Tok::Underscore => {
                            return Err(Diagnostic::at(
                                pos,
                                "nested pattern: pattern arguments must be variables",
                            ))
                        }
                        _ => break,
                    }
                }
                match self.universe.arity(&c) {
                    None => Err(Diagnostic::at(t.pos, format!("unknown constructor {c}"))),
                    Some(n) if n != vars.len() => Err(Diagnostic::at(
                        t.pos,
                        format!(
                            "constructor arity: {c} expects {n} argument(s), found {}",
                            vars.len()
                        ),
                    )),
                    Some(_) => Ok(Pattern::Con(c, vars)),
                }
            }
            other => Err(Diagnostic::at(t.pos, format!("expected a pattern, found {other}"))),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Lower(_) => !self.at_definition(),
            Tok::Upper(_) | Tok::LParen => true,
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<AppPart> {
        let t = self.bump();
        match t.tok {
            Tok::Lower(x) => Ok(AppPart::Term(Term::Var(x))),
            Tok::Upper(c) => Ok(AppPart::Ctor(c, t.pos)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(AppPart::Term(e))
            }
            other => Err(Diagnostic::at(t.pos, format!("expected an expression, found {other}"))),
        }
    }

    fn saturate(&self, c: String, pos: Pos, args: Vec<Term>) -> PResult<Term> {
        match self.universe.arity(&c) {
            None => Err(Diagnostic::at(pos, format!("unknown constructor {c}"))),
            Some(n) if n != args.len() => Err(Diagnostic::at(
                pos,
                format!(
                    "constructor arity: {c} expects {n} argument(s), found {}",
                    args.len()
                ),
            )),
            Some(_) => Ok(Term::Con(c, args)),
        }
    }

    fn application(&mut self) -> PResult<Term> {
        if !self.starts_atom() {
            return Err(self.unexpected("expected an expression"));
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(match self.atom()? {
                AppPart::Ctor(c, pos) => self.saturate(c, pos, Vec::new())?,
                AppPart::Term(t) => t,
            });
        }
        match head {
            AppPart::Ctor(c, pos) => self.saturate(c, pos, args),
            AppPart::Term(t) => Ok(Term::apps(t, args)),
        }
    }

    // -- properties --------------------------------------------------------

    fn property_file(&mut self) -> PResult<PropertyFile> {
        let mut file = PropertyFile::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(file),
                Tok::Fair => {
                    let pos = self.pos();
                    self.bump();
                    self.expect(&Tok::Colon)?;
                    if file.fair.is_some() {
                        return Err(Diagnostic::at(pos, "duplicate fair: header"));
                    }
                    file.fair = Some(self.fair_list()?);
                }
                Tok::Prop => {
                    self.bump();
                    let pos = self.pos();
                    let name = match self.bump().tok {
                        Tok::Lower(n) | Tok::Upper(n) => n,
                        other => {
                            return Err(Diagnostic::at(
                                pos,
                                format!("expected a property name, found {other}"),
                            ))
                        }
                    };
                    if file.get(&name).is_some() {
                        return Err(Diagnostic::at(pos, format!("duplicate property {name}")));
                    }
                    self.expect(&Tok::Colon)?;
                    let f = self.formula()?;
                    if !matches!(self.peek(), Tok::Prop | Tok::Fair | Tok::Eof) {
                        return Err(self.unexpected("expected end of formula"));
                    }
                    file.props.push((name, f));
                }
                _ => return Err(self.unexpected("expected `prop` or `fair:`")),
            }
        }
    }

    fn fair_list(&mut self) -> PResult<BTreeSet<String>> {
        let mut out = BTreeSet::new();
        while let Tok::Upper(c) = self.peek().clone() {
            let pos = self.pos();
            self.bump();
            let is_builtin = DataUniverse::builtin().arity(&c).is_some();
            if self.universe.arity(&c) != Some(0) || is_builtin {
                return Err(Diagnostic::at(pos, format!("unknown fairness constructor {c}")));
            }
            out.insert(c);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::FatArrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::BarBar) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::AmpAmp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Upper(op) if op == "G" || op == "F" || op == "X" => {
                self.bump();
                let f = self.unary()?;
                Ok(match op.as_str() {
                    "G" => Formula::always(f),
                    "F" => Formula::eventually(f),
                    _ => Formula::next(f),
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrace => {
                self.bump();
                let raw = self.expr()?;
                self.expect(&Tok::RBrace)?;
                let t = resolve(&raw, &mut Vec::new());
                if let Some(x) = free_vars(&t).into_iter().find(|x| x != STATE_VAR) {
                    return Err(Diagnostic::at(pos, format!("free variable {x} in atom")));
                }
                Ok(Formula::Atom(t))
            }
            _ => Err(self.unexpected("expected a formula")),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Binding {
    Var,
    Fun,
}

/// Turns identifiers that refer to `where`-defined functions into `Fun`
/// nodes. The innermost binder wins.
fn resolve(t: &Term, scope: &mut Vec<(String, Binding)>) -> Term {
    match t {
        Term::Var(x) => match scope.iter().rev().find(|(n, _)| n == x) {
            Some((_, Binding::Fun)) => Term::Fun(x.clone()),
            _ => Term::Var(x.clone()),
        },
        Term::Fun(_) => t.clone(),
        Term::Con(c, args) => Term::Con(c.clone(), args.iter().map(|a| resolve(a, scope)).collect()),
        Term::Lam(x, b) => {
            scope.push((x.clone(), Binding::Var));
            let b2 = resolve(b, scope);
            scope.pop();
            Term::lam(x.clone(), b2)
        }
        Term::App(f, a) => Term::app(resolve(f, scope), resolve(a, scope)),
        Term::Case(e, alts) => {
            let e2 = resolve(e, scope);
            let alts2 = alts
                .iter()
                .map(|alt| {
                    let n = scope.len();
                    scope.extend(alt.pattern.binders().iter().map(|x| (x.clone(), Binding::Var)));
                    let body = resolve(&alt.body, scope);
                    scope.truncate(n);
                    Alt::new(alt.pattern.clone(), body)
                })
                .collect();
            Term::case(e2, alts2)
        }
        Term::Let(x, e0, e1) => {
            let e0b = resolve(e0, scope);
            scope.push((x.clone(), Binding::Var));
            let e1b = resolve(e1, scope);
            scope.pop();
            Term::let_(x.clone(), e0b, e1b)
        }
        Term::Where(e, defs) => {
            let n = scope.len();
            scope.extend(defs.iter().map(|d| (d.name.clone(), Binding::Fun)));
            let e2 = resolve(e, scope);
            let defs2 = defs
                .iter()
                .map(|d| FunDef::new(d.name.clone(), resolve(&d.body, scope)))
                .collect();
            scope.truncate(n);
            Term::where_(e2, defs2)
        }
    }
}
