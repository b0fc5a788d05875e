//! Content-dictionary bindings and the context-free lexicon.
//!
//! The lexicon file is UTF-8, one reading per line, tab separated:
//!
//! ```text
//! lexeme  role  cd  symbol_id  label  description
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. The description
//! column may be empty or omitted. The schema is our own stand-in for a
//! part-of-math tagger dictionary.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::tree::ExprTree;

/// Lexicon shipped with the crate.
pub const BUNDLED_LEXICON: &str = include_str!("../fixtures/lexicon.tsv");

pub const WIKIDATA: &str = "wikidata";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("empty content dictionary name")]
    EmptyCd,
    #[error("empty symbol id")]
    EmptySymbol,
    #[error("`{0}` is not a Wikidata item id")]
    BadQid(String),
}

/// Binding of a token to a symbol of a content dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemanticAnnotation {
    pub cd: String,
    pub symbol_id: String,
    pub label: String,
    pub description: Option<String>,
}

impl SemanticAnnotation {
    pub fn new(
        cd: impl Into<String>,
        symbol_id: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self, AnnotationError> {
        let ann = SemanticAnnotation {
            cd: cd.into(),
            symbol_id: symbol_id.into(),
            label: label.into(),
            description: None,
        };
        ann.validate()?;
        Ok(ann)
    }

    pub fn wikidata(qid: &str, label: &str) -> Result<Self, AnnotationError> {
        Self::new(WIKIDATA, qid, label)
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn validate(&self) -> Result<(), AnnotationError> {
        if self.cd.is_empty() {
            return Err(AnnotationError::EmptyCd);
        }
        if self.symbol_id.is_empty() {
            return Err(AnnotationError::EmptySymbol);
        }
        if self.cd == WIKIDATA && !is_qid(&self.symbol_id) {
            return Err(AnnotationError::BadQid(self.symbol_id.clone()));
        }
        Ok(())
    }

    /// Copies the binding onto a content node as `csymbol` attributes.
    pub fn apply_to(&self, node: &mut ExprTree) {
        node.attrs.insert("kind".into(), "csymbol".into());
        node.attrs.insert("cd".into(), self.cd.clone());
        node.attrs.insert("symbol".into(), self.symbol_id.clone());
        node.attrs.insert("name".into(), self.label.clone());
    }
}

pub fn is_qid(s: &str) -> bool {
    s.len() > 1 && s.starts_with('Q') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Identifier,
    Function,
    Operator,
    Constant,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Identifier, Role::Function, Role::Operator, Role::Constant];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Identifier => "identifier",
            Role::Function => "function",
            Role::Operator => "operator",
            Role::Constant => "constant",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role `{s}`"))
    }
}

/// One context-free reading of a lexeme.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reading {
    pub annotation: SemanticAnnotation,
    pub role: Role,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
}

fn format_err(line: usize, message: impl Into<String>) -> LexiconError {
    LexiconError::Format { line, message: message.into() }
}

/// Map from TeX lexeme to its readings, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Reading>>,
}

impl Lexicon {
    pub fn bundled() -> Lexicon {
        Lexicon::parse(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        Lexicon::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(src: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, raw) in src.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if !(5..=6).contains(&fields.len()) {
                return Err(format_err(line, format!("expected 5 or 6 fields, found {}", fields.len())));
            }
            let lexeme = fields[0].trim();
            if lexeme.is_empty() {
                return Err(format_err(line, "empty lexeme"));
            }
            let role: Role = fields[1].trim().parse().map_err(|m: String| format_err(line, m))?;
            let mut annotation = SemanticAnnotation::new(fields[2].trim(), fields[3].trim(), fields[4].trim())
                .map_err(|e| format_err(line, e.to_string()))?;
            if let Some(desc) = fields.get(5).map(|d| d.trim()).filter(|d| !d.is_empty()) {
                annotation.description = Some(desc.to_string());
            }
            lex.insert(lexeme, Reading { annotation, role })
                .map_err(|m| format_err(line, m))?;
        }
        Ok(lex)
    }

    /// Adds a reading. A lexeme may carry one reading per annotation.
    pub fn insert(&mut self, lexeme: &str, reading: Reading) -> Result<(), String> {
        let readings = self.entries.entry(lexeme.to_string()).or_default();
        if readings.iter().any(|r| r.annotation == reading.annotation) {
            return Err(format!(
                "duplicate reading {}:{} for `{lexeme}`",
                reading.annotation.cd, reading.annotation.symbol_id
            ));
        }
        readings.push(reading);
        Ok(())
    }

    /// All context-free readings of `lexeme`; empty when unknown.
    pub fn lookup(&self, lexeme: &str) -> &[Reading] {
        self.entries.get(lexeme).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of (lexeme, reading) rows.
    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Reading)> {
        self.entries
            .iter()
            .flat_map(|(k, rs)| rs.iter().map(move |r| (k.as_str(), r)))
    }

    /// Lexicon readings whose label equals `phrase` (case-insensitive).
    pub fn readings_labelled<'a>(&'a self, phrase: &'a str) -> impl Iterator<Item = (&'a str, &'a Reading)> {
        self.iter()
            .filter(move |(_, r)| r.annotation.label.eq_ignore_ascii_case(phrase))
    }
}
