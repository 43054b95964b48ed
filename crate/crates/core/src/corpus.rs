//! Corpus manifests: which functions on which intervals the harness sweeps.
//!
//! Format: one entry per line, `label function a b`, whitespace separated.
//! `#` starts a comment; blank lines are ignored. `function` uses the
//! [`Family`](crate::functions::Family) grammar (`poly:…`, `exp:c,k`,
//! `recip:s`, `g`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::Interval;
use crate::error::{Error, Result};
use crate::functions::{Family, FunctionSpec};

/// Environment variable naming a manifest that replaces the shipped corpus.
pub const CORPUS_ENV: &str = "QUASIQUAD_CORPUS";

/// The manifest compiled into the library.
pub const DEFAULT_MANIFEST: &str = include_str!("../corpus/default.txt");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub function: FunctionSpec,
    pub interval: Interval,
}

pub fn parse_manifest(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let at = |msg: String| Error::Parse(format!("manifest line {}: {msg}", lineno + 1));
        let [label, func, a, b] = fields[..] else {
            return Err(at(format!(
                "expected `label function a b`, got {} fields",
                fields.len()
            )));
        };
        let family = func.parse::<Family>().map_err(|e| at(e.to_string()))?;
        let function = FunctionSpec::new(family, label).map_err(|e| at(e.to_string()))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| at(format!("bad endpoint `{s}`")))
        };
        let interval = Interval::new(parse(a)?, parse(b)?).map_err(|e| at(e.to_string()))?;
        function
            .check_domain(interval)
            .map_err(|e| at(e.to_string()))?;
        entries.push(CorpusEntry { function, interval });
    }
    Ok(entries)
}

/// The shipped corpus.
pub fn default_corpus() -> Vec<CorpusEntry> {
    parse_manifest(DEFAULT_MANIFEST).expect("shipped manifest parses")
}

/// Loads `path` if given, else the manifest named by [`CORPUS_ENV`], else
/// the shipped corpus.
pub fn load_corpus(path: Option<&Path>) -> Result<Vec<CorpusEntry>> {
    let from_env = std::env::var_os(CORPUS_ENV);
    match path.or(from_env.as_deref().map(Path::new)) {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Parse(format!("cannot read manifest {}: {e}", p.display())))?;
            parse_manifest(&text)
        }
        None => Ok(default_corpus()),
    }
}
