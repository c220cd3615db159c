//! The bundled example systems with their properties and expected results.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::kleene::{Trace, TruthVal};
use crate::parser::{parse_properties, parse_term, ParseError, Program, PropertyFile};
use crate::verify::FairSet;

const MANIFEST: &str = include_str!("../../../corpus/manifest.json");
const PROPERTIES: &str = include_str!("../../../corpus/mutex.ltl");
const SOURCES: [(&str, &str); 3] = [
    ("example1.rsl", include_str!("../../../corpus/example1.rsl")),
    ("example2.rsl", include_str!("../../../corpus/example2.rsl")),
    ("example3.rsl", include_str!("../../../corpus/example3.rsl")),
];

#[derive(Deserialize)]
struct Manifest {
    entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct ManifestEntry {
    name: String,
    program: String,
    note: String,
    expected: BTreeMap<String, String>,
    traces: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub note: String,
    pub file: String,
    pub source: &'static str,
    pub program: Program,
    pub properties: PropertyFile,
    pub expected: BTreeMap<String, TruthVal>,
    pub traces: BTreeMap<String, Trace>,
}

impl CorpusEntry {
    /// The fairness set declared by the property file.
    pub fn fair(&self) -> FairSet {
        FairSet::new(self.properties.fair.clone().unwrap_or_default())
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corrupted manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error("{0}")]
    Bundle(String),
}

pub fn property_source() -> &'static str {
    PROPERTIES
}

pub fn load_corpus() -> Result<Vec<CorpusEntry>, CorpusError> {
    let manifest: Manifest = serde_json::from_str(MANIFEST)?;
    manifest
        .entries
        .into_iter()
        .map(|e| {
            let source = SOURCES
                .iter()
                .find(|(f, _)| *f == e.program)
                .map(|(_, s)| *s)
                .ok_or_else(|| CorpusError::Bundle(format!("no bundled file {}", e.program)))?;
            let parse_err = |error| CorpusError::Parse {
                file: e.program.clone(),
                error,
            };
            let program = Program::parse(source).map_err(parse_err)?;
            let properties = parse_properties(PROPERTIES, &program.universe).map_err(|error| CorpusError::Parse {
                file: "mutex.ltl".into(),
                error,
            })?;
            let expected = e
                .expected
                .iter()
                .map(|(k, v)| {
                    if properties.get(k).is_none() {
                        return Err(CorpusError::Bundle(format!("unknown property {k}")));
                    }
                    let t = v.parse().map_err(CorpusError::Bundle)?;
                    Ok((k.clone(), t))
                })
                .collect::<Result<_, _>>()?;
            let traces = e
                .traces
                .iter()
                .map(|(k, states)| {
                    let t = states
                        .iter()
                        .map(|s| parse_term(s, &program.universe))
                        .collect::<Result<Trace, _>>()
                        .map_err(parse_err)?;
                    Ok((k.clone(), t))
                })
                .collect::<Result<_, CorpusError>>()?;
            Ok(CorpusEntry {
                name: e.name,
                note: e.note,
                file: e.program,
                source,
                program,
                properties,
                expected,
                traces,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_three_entries() {
        let c = load_corpus().unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].expected["mutex"], TruthVal::False);
        assert_eq!(c[1].traces["nonstarve1"].len(), 4);
        assert!(c[2].note.contains("bakery"));
        assert_eq!(c[0].fair().iter().count(), 6);
    }
}
