//! Printers producing text that `parse_program` / `parse_properties` accept.

use crate::ast::{DataDecl, DataUniverse, Formula, Pattern, Term};
use crate::parser::PropertyFile;

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    /// Nothing follows on the right except the enclosing context.
    Tail,
    /// Something follows that an open form would swallow.
    Closed,
    /// Operand of an application or constructor.
    Arg,
}

pub fn term_inline(t: &Term) -> String {
    let mut out = String::new();
    term(t, Ctx::Top, " ", &mut out);
    out
}

fn is_atomic(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Fun(_) => true,
        Term::Con(_, args) => args.is_empty(),
        _ => false,
    }
}

fn is_open(t: &Term) -> bool {
    matches!(t, Term::Lam(..) | Term::Case(..) | Term::Let(..) | Term::Where(..))
}

fn term(t: &Term, ctx: Ctx, def_sep: &str, out: &mut String) {
    let parens = match ctx {
        Ctx::Top => false,
        Ctx::Tail => matches!(t, Term::Where(..)),
        Ctx::Closed => is_open(t),
        Ctx::Arg => !is_atomic(t),
    };
    if parens {
        out.push('(');
        term(t, Ctx::Top, " ", out);
        out.push(')');
        return;
    }
    match t {
        Term::Var(x) | Term::Fun(x) => out.push_str(x),
        Term::Con(c, args) => {
            out.push_str(c);
            for a in args {
                out.push(' ');
                term(a, Ctx::Arg, " ", out);
            }
        }
        Term::Lam(..) => {
            let (params, body) = t.lambdas();
            out.push('\\');
            out.push_str(&params.join(" "));
            out.push_str(" -> ");
            term(body, Ctx::Tail, " ", out);
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            term(head, Ctx::Arg, " ", out);
            for a in args {
                out.push(' ');
                term(a, Ctx::Arg, " ", out);
            }
        }
        Term::Case(e, alts) => {
            out.push_str("case ");
            term(e, Ctx::Closed, " ", out);
            out.push_str(" of ");
            for (i, alt) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                pattern(&alt.pattern, out);
                out.push_str(" -> ");
                let last = i + 1 == alts.len();
                term(&alt.body, if last { Ctx::Tail } else { Ctx::Closed }, " ", out);
            }
        }
        Term::Let(x, e0, e1) => {
            out.push_str("let ");
            out.push_str(x);
            out.push_str(" = ");
            term(e0, Ctx::Closed, " ", out);
            out.push_str(" in ");
            term(e1, Ctx::Tail, " ", out);
        }
        Term::Where(e, defs) => {
            term(e, Ctx::Closed, " ", out);
            out.push_str(" where");
            for d in defs {
                out.push_str(def_sep);
                out.push_str(&d.name);
                out.push_str(" = ");
                term(&d.body, Ctx::Tail, " ", out);
            }
        }
    }
}

fn pattern(p: &Pattern, out: &mut String) {
    match p {
        Pattern::Wildcard => out.push('_'),
        Pattern::Con(c, xs) => {
            out.push_str(c);
            for x in xs {
                out.push(' ');
                out.push_str(x);
            }
        }
    }
}

/// Field types are not retained, so fields print as type parameters; the
/// declared arities are what the checker uses.
pub fn data_decl(d: &DataDecl) -> String {
    let width = d.constructors.iter().map(|(_, n)| *n).max().unwrap_or(0);
    let params: Vec<String> = (0..width).map(|i| format!("a{}", i + 1)).collect();
    let mut out = format!("data {}", d.name);
    for p in &params {
        out.push(' ');
        out.push_str(p);
    }
    out.push_str(" =");
    for (i, (c, n)) in d.constructors.iter().enumerate() {
        if i > 0 {
            out.push_str(" |");
        }
        out.push(' ');
        out.push_str(c);
        for p in &params[..*n] {
            out.push(' ');
            out.push_str(p);
        }
    }
    out
}

/// A complete program file: user declarations, then the term with one
/// top-level definition per line.
pub fn program(universe: &DataUniverse, t: &Term) -> String {
    let mut out = String::new();
    for d in universe.user_decls() {
        out.push_str(&data_decl(d));
        out.push('\n');
    }
    if !out.is_empty() {
        out.push('\n');
    }
    term(t, Ctx::Top, "\n  ", &mut out);
    out.push('\n');
    out
}

pub fn formula(f: &Formula) -> String {
    let mut out = String::new();
    formula_at(f, 1, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn formula_at(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        formula_at(f, 1, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Atom(t) => {
            out.push_str("{ ");
            out.push_str(&term_inline(t));
            out.push_str(" }");
        }
        Formula::Not(g) => {
            out.push('!');
            formula_at(g, 4, out);
        }
        Formula::Always(g) | Formula::Eventually(g) | Formula::Next(g) => {
            out.push_str(match f {
                Formula::Always(_) => "G ",
                Formula::Eventually(_) => "F ",
                _ => "X ",
            });
            formula_at(g, 4, out);
        }
        Formula::And(a, b) => {
            formula_at(a, 3, out);
            out.push_str(" && ");
            formula_at(b, 4, out);
        }
        Formula::Or(a, b) => {
            formula_at(a, 2, out);
            out.push_str(" || ");
            formula_at(b, 3, out);
        }
        Formula::Implies(a, b) => {
            formula_at(a, 2, out);
            out.push_str(" => ");
            formula_at(b, 1, out);
        }
    }
}

pub fn properties(pf: &PropertyFile) -> String {
    let mut out = String::new();
    if let Some(fair) = &pf.fair {
        out.push_str("fair: ");
        out.push_str(&fair.iter().cloned().collect::<Vec<_>>().join(", "));
        out.push('\n');
    }
    for (name, f) in &pf.props {
        out.push_str(&format!("prop {name}: {}\n", formula(f)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{alpha_eq, Alt, FunDef};
    use crate::parser::{parse_formula, parse_program};

    fn universe() -> DataUniverse {
        DataUniverse::with_decls([DataDecl::new("E", vec![("A", 0), ("B", 0), ("C", 2)])]).unwrap()
    }

    fn round_trip(t: &Term) {
        let text = program(&universe(), t);
        let sf = parse_program(&text);
        assert!(sf.diagnostics.is_empty(), "{text}\n{:?}", sf.diagnostics);
        assert!(alpha_eq(&sf.term.unwrap(), t), "{text}");
    }

    #[test]
    fn nested_case_in_middle_alternative() {
        let inner = Term::case(
            Term::var("y"),
            vec![
                Alt::new(Pattern::Con("A".into(), vec![]), Term::atom("B")),
                Alt::new(Pattern::Wildcard, Term::atom("A")),
            ],
        );
        let t = Term::lam(
            "y",
            Term::case(
                Term::var("y"),
                vec![
                    Alt::new(Pattern::Con("A".into(), vec![]), inner.clone()),
                    Alt::new(Pattern::Con("B".into(), vec![]), inner),
                ],
            ),
        );
        round_trip(&t);
    }

    #[test]
    fn where_inside_definition() {
        let t = Term::where_(
            Term::app(Term::fun("f"), Term::var("es")),
            vec![
                FunDef::new(
                    "f",
                    Term::lam(
                        "x",
                        Term::where_(Term::fun("g"), vec![FunDef::new("g", Term::var("x"))]),
                    ),
                ),
                FunDef::new("h", Term::lam("z", Term::app(Term::fun("f"), Term::var("z")))),
            ],
        );
        round_trip(&t);
    }

    #[test]
    fn applications_of_open_forms() {
        let t = Term::app(
            Term::lam("x", Term::var("x")),
            Term::con("C", vec![Term::let_("k", Term::atom("A"), Term::var("k")), Term::atom("B")]),
        );
        round_trip(&t);
    }

    #[test]
    fn formula_round_trip() {
        let u = universe();
        for src in [
            "G ({ A } => F { B })",
            "(G { A } => { B }) => { A }",
            "!({ A } && { B }) || X !{ A }",
            "{ A } || ({ B } || { A })",
        ] {
            let f = parse_formula(src, &u).unwrap();
            assert_eq!(parse_formula(&formula(&f), &u).unwrap(), f, "{src}");
        }
        let f = parse_formula("{ A } => { B } => { A }", &u).unwrap();
        assert_eq!(formula(&f), "{ A } => { B } => { A }");
    }
}
