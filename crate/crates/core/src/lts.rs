//! Labelled transition systems read off reactive programs, with DOT and JSON
//! export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::ast::{DataUniverse, Pattern, Term, CONS};
use crate::eval::event_alphabet;
use crate::parser::Program;

pub const WILDCARD_LABEL: &str = "_";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsNode {
    pub id: String,
    pub fun: String,
    pub state: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsEdge {
    pub from: String,
    /// An event constructor, or `_` for a wildcard branch.
    pub label: String,
    pub to: String,
    /// Events covered by a wildcard branch.
    pub residual: Option<Vec<String>>,
}

impl LtsEdge {
    pub fn accepts(&self, event: &str) -> bool {
        match &self.residual {
            Some(r) => r.iter().any(|e| e == event),
            None => self.label == event,
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub initial: String,
    pub nodes: Vec<LtsNode>,
    pub edges: Vec<LtsEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("not a reactive program: {0}")]
    NotReactiveShape(String),
    #[error("function {fun} is entered with state {first} and with state {second}")]
    InconsistentNodeState { fun: String, first: String, second: String },
}

fn shape(msg: impl Into<String>) -> LtsError {
    LtsError::NotReactiveShape(msg.into())
}

/// `Cons s (f x)` as `(s, f)`.
fn emit(t: &Term) -> Option<(&Term, &str)> {
    match t {
        Term::Con(c, args) if c == CONS => match &args[1] {
            Term::App(f, x) => match (f.as_ref(), x.as_ref()) {
                (Term::Fun(name), Term::Var(_)) => Some((&args[0], name.as_str())),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// The event alternatives of `\es -> case es of Cons e rest -> case e of alts`.
fn event_alts<'a>(name: &str, body: &'a Term) -> Result<&'a [crate::ast::Alt], LtsError> {
    let (params, body) = body.lambdas();
    let bad = || shape(format!("{name} does not dispatch on the next event"));
    let [list] = params.as_slice() else {
        return Err(bad());
    };
    let Term::Case(scrut, alts) = body else {
        return Err(bad());
    };
    if !matches!(scrut.as_ref(), Term::Var(x) if x == list) {
        return Err(bad());
    }
    let (head, inner) = alts
        .iter()
        .find_map(|a| match &a.pattern {
            Pattern::Con(c, xs) if c == CONS => Some((xs[0].as_str(), &a.body)),
            _ => None,
        })
        .ok_or_else(bad)?;
    match inner {
        Term::Case(e, alts) if matches!(e.as_ref(), Term::Var(x) if x == head) => Ok(alts),
        _ => Err(bad()),
    }
}

pub fn extract_lts(program: &Program) -> Result<Lts, LtsError> {
    let Term::Where(top, defs) = &program.term else {
        return Err(shape("expected a top-level where"));
    };
    let (s0, initial) = emit(top).ok_or_else(|| shape("expected Cons s0 (f es) at the top"))?;
    let alphabet = event_alphabet(&program.term, &program.universe);
    if !defs.iter().any(|d| d.name == initial) {
        return Err(shape(format!("{initial} is not defined")));
    }
    let mut states: BTreeMap<&str, &Term> = BTreeMap::new();
    record(&mut states, initial, s0)?;

    let mut edges = Vec::new();
    for d in defs {
        let alts = event_alts(&d.name, &d.body)?;
        let mut matched: BTreeSet<&str> = BTreeSet::new();
        for alt in alts {
            let (s, target) = emit(&alt.body)
                .ok_or_else(|| shape(format!("a branch of {} does not emit Cons s (f es)", d.name)))?;
            if !defs.iter().any(|x| x.name == target) {
                return Err(shape(format!("{target} is not defined")));
            }
            record(&mut states, target, s)?;
            let (label, residual) = match &alt.pattern {
                Pattern::Con(c, _) => {
                    matched.insert(c.as_str());
                    (c.clone(), None)
                }
                Pattern::Wildcard => {
                    let residual: Vec<String> = match matched.iter().next() {
                        Some(sib) => residual_of(&program.universe, sib, &matched),
                        None => alphabet.clone(),
                    };
                    (WILDCARD_LABEL.to_string(), Some(residual))
                }
            };
            edges.push(LtsEdge {
                from: d.name.clone(),
                label,
                to: target.to_string(),
                residual,
            });
        }
    }
    let nodes = defs
        .iter()
        .map(|d| {
            let state = states
                .get(d.name.as_str())
                .ok_or_else(|| shape(format!("no transition enters {}", d.name)))?;
            Ok(LtsNode {
                id: d.name.clone(),
                fun: d.name.clone(),
                state: (*state).clone(),
            })
        })
        .collect::<Result<Vec<_>, LtsError>>()?;
    Ok(Lts {
        initial: initial.to_string(),
        nodes,
        edges,
    })
}

fn record<'a>(states: &mut BTreeMap<&'a str, &'a Term>, fun: &'a str, s: &'a Term) -> Result<(), LtsError> {
    match states.get(fun) {
        Some(prev) if *prev != s => Err(LtsError::InconsistentNodeState {
            fun: fun.to_string(),
            first: prev.to_string(),
            second: s.to_string(),
        }),
        _ => {
            states.insert(fun, s);
            Ok(())
        }
    }
}

fn residual_of(universe: &DataUniverse, sibling: &str, matched: &BTreeSet<&str>) -> Vec<String> {
    universe
        .residual(sibling, matched)
        .into_iter()
        .map(String::from)
        .collect()
}

impl Lts {
    pub fn node(&self, id: &str) -> Option<&LtsNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edges_without_self_loops(&self) -> impl Iterator<Item = &LtsEdge> {
        self.edges.iter().filter(|e| !e.is_self_loop())
    }

    /// The states visited from the initial node, starting with its own.
    /// Stops early if no edge accepts an event.
    pub fn walk(&self, events: &[String]) -> Vec<Term> {
        let mut cur = self.initial.as_str();
        let mut out = vec![self.node(cur).expect("initial node exists").state.clone()];
        for e in events {
            match self.edges.iter().find(|x| x.from == cur && x.accepts(e)) {
                Some(edge) => {
                    cur = edge.to.as_str();
                    out.push(self.node(cur).expect("edge target exists").state.clone());
                }
                None => break,
            }
        }
        out
    }

    pub fn to_dot(&self, include_self_loops: bool) -> String {
        let mut out = String::from("digraph lts {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {} [label=\"{}\\n{}\"];", n.id, n.fun, state_label(&n.state));
        }
        for e in &self.edges {
            if e.is_self_loop() && !include_self_loops {
                continue;
            }
            let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", e.from, e.to, e.label);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, include_self_loops: bool) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| json!({"id": n.id, "fun": n.fun, "state": term_json(&n.state)}))
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .filter(|e| include_self_loops || !e.is_self_loop())
            .map(|e| {
                let mut v = json!({"from": e.from, "label": e.label, "to": e.to});
                if let Some(r) = &e.residual {
                    v["residual"] = json!(r);
                }
                v
            })
            .collect();
        json!({"initial": self.initial, "nodes": nodes, "edges": edges})
    }
}

/// `s1=T s2=W` for a state with fields, the constructor alone otherwise.
fn state_label(s: &Term) -> String {
    match s {
        Term::Con(_, args) if !args.is_empty() => args
            .iter()
            .enumerate()
            .map(|(i, a)| format!("s{}={}", i + 1, crate::parser::pretty::term_inline(a)))
            .collect::<Vec<_>>()
            .join(" "),
        other => crate::parser::pretty::term_inline(other),
    }
}

/// `{"con": C, "args": [...]}` for constructor terms, the printed term
/// otherwise.
pub fn term_json(t: &Term) -> Value {
    match t {
        Term::Con(c, args) => json!({"con": c, "args": args.iter().map(term_json).collect::<Vec<_>>()}),
        other => Value::String(other.to_string()),
    }
}
