use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use reactive_mc::ast::Formula;
use reactive_mc::corpus::load_corpus;
use reactive_mc::eval::{run_trace, DEFAULT_FUEL};
use reactive_mc::kleene::TraceChoice;
use reactive_mc::lts::extract_lts;
use reactive_mc::normform::check_simplified;
use reactive_mc::parser::{parse_formula, Program};
use reactive_mc::verify::{verify_with, FairSet, Limits};
use reactive_mc::witness::{generate_with, lassoify, validate_verdict};

fn program(source: &str) -> PyResult<Program> {
    Program::parse(source).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn formula(p: &Program, text: &str) -> PyResult<Formula> {
    parse_formula(text, &p.universe).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn fair_set(fair: Option<Vec<String>>) -> FairSet {
    fair.map(FairSet::new).unwrap_or_else(FairSet::none)
}

/// Simplified-form violations, empty when the program conforms.
#[pyfunction]
fn check(source: &str) -> PyResult<Vec<String>> {
    let p = program(source)?;
    Ok(check_simplified(&p.term).violations.iter().map(|v| v.to_string()).collect())
}

/// Returns "True", "False" or "Undefined".
#[pyfunction]
#[pyo3(signature = (source, prop, fair=None))]
fn verify(source: &str, prop: &str, fair: Option<Vec<String>>) -> PyResult<String> {
    let p = program(source)?;
    let f = formula(&p, prop)?;
    let o = verify_with(&p, &f, &fair_set(fair), Limits::default()).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(o.truth.to_string())
}

#[pyfunction]
#[pyo3(signature = (source, prop, fair=None, shortest=false))]
fn witness<'py>(
    py: Python<'py>,
    source: &str,
    prop: &str,
    fair: Option<Vec<String>>,
    shortest: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let p = program(source)?;
    let f = formula(&p, prop)?;
    let choice = if shortest { TraceChoice::Shortest } else { TraceChoice::Covering };
    let (v, rules) = generate_with(&p, &f, &fair_set(fair), Limits::default(), choice, None)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("truth", v.truth.to_string())?;
    d.set_item("trace", v.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>())?;
    if let Ok(l) = lassoify(&v.trace) {
        d.set_item("prefix_len", l.prefix.len())?;
        d.set_item("loop_len", l.cycle.len())?;
    }
    d.set_item("validation", validate_verdict(&v, &f).label())?;
    d.set_item("rules", rules)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (source, self_loops=false))]
fn lts_dot(source: &str, self_loops: bool) -> PyResult<String> {
    let p = program(source)?;
    let l = extract_lts(&p).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(l.to_dot(self_loops))
}

#[pyfunction]
#[pyo3(signature = (source, events, cycle=false, n=20))]
fn simulate(source: &str, events: Vec<String>, cycle: bool, n: usize) -> PyResult<Vec<String>> {
    let p = program(source)?;
    let t = run_trace(&p.term, &events, cycle, n, DEFAULT_FUEL).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(t.iter().map(|s| s.to_string()).collect())
}

/// The bundled examples as dicts with name, source, properties and expected verdicts.
#[pyfunction]
fn corpus<'py>(py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let entries = load_corpus().map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    entries
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("name", &e.name)?;
            d.set_item("source", &e.source)?;
            let props: Vec<(String, String)> = e.properties.props.iter().map(|(n, f)| (n.clone(), f.to_string())).collect();
            d.set_item("properties", props)?;
            d.set_item("fair", e.fair().iter().map(String::from).collect::<Vec<_>>())?;
            let expected = PyDict::new(py);
            for (k, v) in &e.expected {
                expected.set_item(k, v.to_string())?;
            }
            d.set_item("expected", expected)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "reactive_mc")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(lts_dot, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}
