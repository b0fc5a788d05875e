//! Tree edit distance with a pluggable cost model, plus the lighter
//! similarity measures: taxonomic distance, match depth, coverage.

mod shortcut;
mod taxonomy;
mod ted;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::tree::{ExprTree, NodeId};

pub use shortcut::{
    builtin_rules, equivalence_rules, fraction_rules, load_rules, parse_rules, Pattern, ShortcutRule, BUILTIN_RULES,
};
pub use taxonomy::{data_type_distance, taxonomic_distance, Taxonomy, BUNDLED_TAXONOMY};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("query has no tokens")]
    EmptyQuery,
    #[error("rule line {line}: {message}")]
    Rule { line: usize, message: String },
    #[error("taxonomy line {line}: {message}")]
    Taxonomy { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Prices of insert (`i`), delete (`d`), rename (`r`) and shortcut (`e`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub insert: f64,
    pub delete: f64,
    pub rename: f64,
    pub shortcut: f64,
}

impl Default for CostModel {
    /// `i = d = 1`, `r = 0.75`, `e = 0.5`.
    fn default() -> Self {
        CostModel { insert: 1.0, delete: 1.0, rename: 0.75, shortcut: 0.5 }
    }
}

impl CostModel {
    pub fn new(insert: f64, delete: f64, rename: f64, shortcut: f64) -> Result<Self, MetricsError> {
        let cm = CostModel { insert, delete, rename, shortcut };
        cm.validate(false)?;
        Ok(cm)
    }

    /// Label-blind costs: `i = d = 1`, `r = 0`.
    pub fn structural() -> Self {
        CostModel { insert: 1.0, delete: 1.0, rename: 0.0, shortcut: 0.0 }
    }

    /// Parses `i,d,r,e`.
    pub fn parse(s: &str) -> Result<Self, MetricsError> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| MetricsError::InvalidCostModel(format!("`{s}`: {e}")))?;
        match parts.as_slice() {
            [i, d, r, e] => CostModel::new(*i, *d, *r, *e),
            [i, d, r] => CostModel::new(*i, *d, *r, CostModel::default().shortcut.min(*r)),
            _ => Err(MetricsError::InvalidCostModel(format!("`{s}`: expected i,d,r[,e]"))),
        }
    }

    /// All costs finite and non-negative; with shortcuts also `e < r < i`.
    pub fn validate(&self, shortcuts: bool) -> Result<(), MetricsError> {
        for (name, v) in [("i", self.insert), ("d", self.delete), ("r", self.rename), ("e", self.shortcut)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(MetricsError::InvalidCostModel(format!("{name} = {v} is not a non-negative number")));
            }
        }
        if shortcuts && !(self.shortcut < self.rename && self.rename < self.insert) {
            return Err(MetricsError::InvalidCostModel(format!(
                "shortcuts need e < r < i, got e={}, r={}, i={}",
                self.shortcut, self.rename, self.insert
            )));
        }
        Ok(())
    }
}

/// Ordered tree edit distance. Nodes compare by label; attributes are
/// ignored. Each rule may replace one whole subtree pair at its price.
pub fn ted(a: &ExprTree, b: &ExprTree, cm: &CostModel, rules: &[ShortcutRule]) -> Result<f64, MetricsError> {
    cm.validate(!rules.is_empty())?;
    Ok(ted::distance(a, b, cm, rules))
}

/// Label-blind distance with `i = d = 1`, `r = 0` and no shortcuts.
pub fn structural_ted(a: &ExprTree, b: &ExprTree) -> f64 {
    ted::distance(a, b, &CostModel::structural(), &[])
}

/// Whether `a` and `b` are zero apart under `rules` (default costs).
pub fn equivalence_zero_check(a: &ExprTree, b: &ExprTree, rules: &[ShortcutRule]) -> bool {
    ted::distance(a, b, &CostModel::default(), rules) <= 1e-9
}

/// Weight `2^-depth` of a match rooted at node `id`; `None` if `id` is not
/// in `tree`.
pub fn match_depth(id: NodeId, tree: &ExprTree) -> Option<f64> {
    tree.node_depth(id).map(|d| 0.5f64.powi(d as i32))
}

/// Share of the query's leaf tokens (as a multiset) found in `b`.
pub fn query_coverage(a: &ExprTree, b: &ExprTree) -> Result<f64, MetricsError> {
    fn bag(t: &ExprTree) -> BTreeMap<&str, usize> {
        let mut m = BTreeMap::new();
        for l in t.leaves() {
            *m.entry(l.label.as_str()).or_insert(0) += 1;
        }
        m
    }
    let (qa, qb) = (bag(a), bag(b));
    let total: usize = qa.values().sum();
    if total == 0 {
        return Err(MetricsError::EmptyQuery);
    }
    let common: usize = qa.iter().map(|(k, n)| (*n).min(qb.get(k).copied().unwrap_or(0))).sum();
    Ok(common as f64 / total as f64)
}
