//! Gold-standard evaluation: load entries, run converters, score with
//! tree edit distance, report.

mod converter;
mod report;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::latex::{parse_latex, MacroRegistry};
use crate::mathml::{emit, parse_mathml, ParallelMarkup};
use crate::mlp::{ContextDocument, MlpError};
use crate::pipeline::{convert, ConvertOptions};

pub use converter::{
    load_adapters, parse_adapters, run_eval, AdapterConfig, Converter, GoldEcho, InputMode, InternalConverter,
    Missing, Score, SubprocessAdapter, TexSource, EvalResult, DEFAULT_TIMEOUT,
};
pub use report::{plot_csv, read_results, report, write_report, write_results, Report, ReportRow};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("entry {id}: {message}")]
    Parse { id: u32, message: String },
    #[error("duplicate entry id {0}")]
    DuplicateId(u32),
    #[error("adapter configuration: {0}")]
    Adapter(String),
    #[error("no results to report")]
    EmptyResults,
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaType {
    Definition,
    Equation,
    Relation,
    General,
}

/// Text around a formula: plain prose with `$…$` math, or XHTML.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContextSource {
    Plain(String),
    Xhtml { xhtml: String },
}

impl ContextSource {
    pub fn document(&self, target_tex: &str) -> Result<ContextDocument, MlpError> {
        match self {
            ContextSource::Plain(s) => ContextDocument::from_plain(s, target_tex),
            ContextSource::Xhtml { xhtml } => ContextDocument::from_xhtml(xhtml, target_tex),
        }
    }
}

/// One line of a gold file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldRecord {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub formula_type: FormulaType,
    pub original_tex: String,
    pub corrected_tex: String,
    pub semantic_tex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_mathml: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperlink: Option<String>,
}

/// A validated record with its gold markup parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldEntry {
    pub record: GoldRecord,
    pub gold: ParallelMarkup,
}

impl GoldEntry {
    pub fn id(&self) -> u32 {
        self.record.id
    }

    pub fn from_record(record: GoldRecord, registry: &MacroRegistry) -> Result<Self, BenchError> {
        let id = record.id;
        let fail = |message: String| BenchError::Parse { id, message };
        for (field, tex) in [("corrected_tex", &record.corrected_tex), ("semantic_tex", &record.semantic_tex)] {
            parse_latex(tex, registry).map_err(|e| fail(format!("{field}: {e}")))?;
        }
        if let Some(ctx) = &record.context {
            ctx.document(&record.corrected_tex).map_err(|e| fail(format!("context: {e}")))?;
        }
        let xml = record.gold_mathml.as_deref().ok_or_else(|| fail("gold_mathml is missing".into()))?;
        let gold = parse_mathml(xml).map_err(|e| fail(format!("gold_mathml: {e}")))?;
        Ok(GoldEntry { record, gold })
    }
}

/// Reads one JSON record per line, skipping blank lines.
pub fn parse_records(src: &str) -> Result<Vec<GoldRecord>, BenchError> {
    let mut out = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: GoldRecord = serde_json::from_str(line)
            .map_err(|e| BenchError::Schema { line: idx + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

/// Loads and validates a gold file; entries come back sorted by id.
pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldEntry>, BenchError> {
    parse_gold(&std::fs::read_to_string(path)?)
}

pub fn parse_gold(src: &str) -> Result<Vec<GoldEntry>, BenchError> {
    let registry = MacroRegistry::standard();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rec in parse_records(src)? {
        if !seen.insert(rec.id) {
            return Err(BenchError::DuplicateId(rec.id));
        }
        out.push(GoldEntry::from_record(rec, &registry)?);
    }
    out.sort_by_key(GoldEntry::id);
    Ok(out)
}

/// Fills `gold_mathml` by converting the semantic TeX (with context, all
/// refinements) — how the bundled fixtures are produced.
pub fn fill_gold(mut rec: GoldRecord, opts: &ConvertOptions) -> Result<GoldRecord, BenchError> {
    let id = rec.id;
    let fail = |message: String| BenchError::Parse { id, message };
    let doc = rec
        .context
        .as_ref()
        .map(|c| c.document(&rec.semantic_tex))
        .transpose()
        .map_err(|e| fail(e.to_string()))?;
    let pm = convert(&rec.semantic_tex, doc.as_ref(), opts).map_err(|e| fail(e.to_string()))?;
    rec.gold_mathml = Some(emit(&pm));
    Ok(rec)
}

pub fn write_records(records: &[GoldRecord]) -> Result<String, BenchError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Bundled gold fixture (general formulae).
pub const GOLD_FIXTURE: &str = include_str!("../../fixtures/gold.jsonl");
/// Bundled function-application fixture with context sentences.
pub const FUNCTIONS_FIXTURE: &str = include_str!("../../fixtures/functions.jsonl");
