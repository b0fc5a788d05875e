//! Symbol hierarchy grouped after the MathML content dictionaries.

use std::collections::BTreeMap;
use std::path::Path;

use super::MetricsError;
use crate::tree::ExprTree;

pub const BUNDLED_TAXONOMY: &str = include_str!("../../fixtures/taxonomy.tsv");

/// Depth of the content-dictionary group level used as "data type".
const TYPE_LEVEL: usize = 2;

/// Forest of classes; symbols are classes too.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    parent: BTreeMap<String, Option<String>>,
}

impl Taxonomy {
    pub fn bundled() -> Self {
        Taxonomy::parse(BUNDLED_TAXONOMY).expect("bundled taxonomy is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MetricsError> {
        Taxonomy::parse(&std::fs::read_to_string(path)?)
    }

    /// `class<TAB>parent` lines; `-` marks a root. Parents must be declared
    /// first, which also rules out cycles.
    pub fn parse(src: &str) -> Result<Self, MetricsError> {
        let mut tax = Taxonomy::default();
        for (idx, raw) in src.lines().enumerate() {
            let err = |message: String| MetricsError::Taxonomy { line: idx + 1, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (class, parent) = line
                .split_once('\t')
                .map(|(c, p)| (c.trim(), p.trim()))
                .ok_or_else(|| err("expected `class<TAB>parent`".into()))?;
            if tax.parent.contains_key(class) {
                return Err(err(format!("class `{class}` declared twice")));
            }
            let parent = match parent {
                "-" => None,
                p if tax.parent.contains_key(p) => Some(p.to_string()),
                p => return Err(err(format!("unknown parent `{p}`"))),
            };
            tax.parent.insert(class.to_string(), parent);
        }
        Ok(tax)
    }

    pub fn contains(&self, class: &str) -> bool {
        self.parent.contains_key(class)
    }

    /// Class chain from `class` up to its root.
    pub fn ancestors<'a>(&'a self, class: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut cur = self.parent.get_key_value(class).map(|(k, _)| k.as_str());
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent.get(c).and_then(|p| p.as_deref());
        }
        out
    }

    pub fn depth(&self, class: &str) -> Option<usize> {
        self.contains(class).then(|| self.ancestors(class).len() - 1)
    }

    /// Longest root-to-class path, in edges.
    pub fn height(&self) -> usize {
        self.parent.keys().filter_map(|c| self.depth(c)).max().unwrap_or(0)
    }

    /// Class of a content node: its dictionary symbol, `name`, or label.
    pub fn class_of<'a>(&self, node: &'a ExprTree) -> Option<&'a str> {
        [node.attr("symbol"), node.attr("name"), Some(node.label.as_str())]
            .into_iter()
            .flatten()
            .find(|c| self.contains(c))
    }

    /// Edges between two classes through their nearest common ancestor.
    pub fn path_length(&self, x: &str, y: &str) -> Option<usize> {
        let ax = self.ancestors(x);
        let ay = self.ancestors(y);
        if ax.is_empty() || ay.is_empty() {
            return None;
        }
        ax.iter().enumerate().find_map(|(i, c)| ay.iter().position(|d| d == c).map(|j| i + j))
    }

    fn normalized(&self, x: &str, y: &str) -> f64 {
        let h = self.height().max(1) as f64;
        match self.path_length(x, y) {
            // paths through the root can be twice the height
            Some(p) => (p as f64 / h).min(1.0),
            None => 1.0,
        }
    }
}

/// Path length between the nodes' classes over the taxonomy height,
/// clamped to 1; unmapped nodes are at distance 1.
pub fn taxonomic_distance(x: &ExprTree, y: &ExprTree, tax: &Taxonomy) -> f64 {
    match (tax.class_of(x), tax.class_of(y)) {
        (Some(cx), Some(cy)) => tax.normalized(cx, cy),
        _ => 1.0,
    }
}

/// Taxonomic distance between the dictionary groups (arith, relation,
/// calculus, ...) the nodes belong to.
pub fn data_type_distance(x: &ExprTree, y: &ExprTree, tax: &Taxonomy) -> f64 {
    let group = |n: &ExprTree| -> Option<String> {
        let chain = tax.ancestors(tax.class_of(n)?);
        let depth = chain.len() - 1;
        Some(chain[depth.saturating_sub(TYPE_LEVEL.min(depth))].to_string())
    };
    match (group(x), group(y)) {
        (Some(gx), Some(gy)) => tax.normalized(&gx, &gy),
        _ => 1.0,
    }
}
