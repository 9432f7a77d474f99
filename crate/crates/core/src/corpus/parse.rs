//! JSONL ingestion and serialization for debate corpora.
//!
//! One debate record per line. Malformed or structurally invalid lines are
//! skipped and reported; they never abort the whole file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{validate_graph, Debate};

/// Corpus file schema version. Only one exists so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SchemaVersion {
    #[default]
    V1,
}

/// Diagnostic for one skipped input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

/// Outcome of parsing one corpus file: the structurally valid debates in
/// file order, plus one diagnostic per rejected line.
#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub debates: Vec<Debate>,
    pub errors: Vec<LineError>,
}

/// Parse a JSONL corpus file. Whitespace-only lines are ignored. A line is
/// rejected (with a diagnostic) if it is not valid JSON for the schema or if
/// the debate violates a structural invariant: zero rounds, a proposition
/// type list whose length differs from the sentence list, or an edge that is
/// out of range, a self-loop, or a duplicate.
pub fn parse_corpus(path: impl AsRef<Path>, _schema: SchemaVersion) -> Result<ParsedCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut out = ParsedCorpus::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        match serde_json::from_str::<Debate>(&line) {
            Ok(debate) => match structural_error(&debate) {
                None => out.debates.push(debate),
                Some(reason) => out.errors.push(LineError { line: lineno, reason }),
            },
            Err(e) => out.errors.push(LineError {
                line: lineno,
                reason: format!("invalid record: {e}"),
            }),
        }
    }
    Ok(out)
}

fn structural_error(d: &Debate) -> Option<String> {
    if d.rounds.is_empty() {
        return Some(format!("debate {}: no rounds", d.id));
    }
    for (round, side, u) in d.utterances() {
        if u.prop_types.len() != u.sentences.len() {
            return Some(format!(
                "debate {}: round {} {} side has {} sentences but {} proposition types",
                d.id,
                round + 1,
                side,
                u.sentences.len(),
                u.prop_types.len()
            ));
        }
        let report = validate_graph(u);
        if let Some(finding) = report.findings.first() {
            return Some(format!(
                "debate {}: round {} {} side: {finding}",
                d.id,
                round + 1,
                side
            ));
        }
    }
    None
}

/// Serialize debates to a JSONL file, one record per line. Parsing the
/// result yields a field-by-field equal corpus.
pub fn write_corpus(path: impl AsRef<Path>, debates: &[Debate]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for d in debates {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Opaque per-debate feature vectors from an external sidecar file, used by
/// the logistic-regression baseline for linguistic/user features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalFeatures {
    pub id: String,
    #[serde(default)]
    pub pro_features: Vec<f64>,
    #[serde(default)]
    pub con_features: Vec<f64>,
    #[serde(default)]
    pub shared_features: Vec<f64>,
}

/// Parse an external-feature sidecar JSONL file into a map keyed by debate
/// id. Later lines with a repeated id overwrite earlier ones.
pub fn parse_external_features(
    path: impl AsRef<Path>,
) -> Result<BTreeMap<String, ExternalFeatures>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut map = BTreeMap::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExternalFeatures = serde_json::from_str(&line)?;
        map.insert(rec.id.clone(), rec);
    }
    Ok(map)
}
