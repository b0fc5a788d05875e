//! Shortcut rules: `lhs <=> rhs [@ cost]` over term patterns with `?var`
//! placeholders. A rule without a price costs the model's `e`.

use std::collections::BTreeMap;
use std::path::Path;

use super::MetricsError;
use crate::term::{self, Term};
use crate::tree::ExprTree;

/// Fraction spellings priced at `e`, and exact equivalences at zero.
pub const BUILTIN_RULES: &str = include_str!("../../fixtures/shortcuts.rules");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern(Term);

impl Pattern {
    pub fn parse(src: &str) -> Result<Self, MetricsError> {
        term::parse(src).map(Pattern).map_err(|e| MetricsError::Rule { line: 0, message: e.to_string() })
    }

    pub fn vars(&self) -> Vec<String> {
        let mut v = Vec::new();
        self.0.vars(&mut v);
        v.sort();
        v
    }

    /// Matches labels exactly; a repeated variable must bind equal
    /// subtrees (attributes ignored).
    pub fn bind<'t>(&self, t: &'t ExprTree) -> Option<BTreeMap<&str, &'t ExprTree>> {
        fn go<'p, 't>(p: &'p Term, t: &'t ExprTree, env: &mut BTreeMap<&'p str, &'t ExprTree>) -> bool {
            match p {
                Term::Var(v) => match env.get(v.as_str()) {
                    Some(prev) => prev.same_shape(t),
                    None => {
                        env.insert(v, t);
                        true
                    }
                },
                Term::Node(label, cs) => {
                    *label == t.label
                        && cs.len() == t.children.len()
                        && cs.iter().zip(&t.children).all(|(c, tc)| go(c, tc, env))
                }
            }
        }
        let mut env = BTreeMap::new();
        go(&self.0, t, &mut env).then_some(env)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortcutRule {
    pub lhs: Pattern,
    pub rhs: Pattern,
    /// `None`: priced at the cost model's shortcut cost.
    pub cost: Option<f64>,
}

impl ShortcutRule {
    pub fn new(lhs: Pattern, rhs: Pattern, cost: Option<f64>) -> Result<Self, MetricsError> {
        if lhs.vars() != rhs.vars() {
            return Err(MetricsError::Rule { line: 0, message: "both sides must bind the same variables".into() });
        }
        if cost.is_some_and(|c| !(c >= 0.0 && c.is_finite())) {
            return Err(MetricsError::Rule { line: 0, message: "cost must be a non-negative number".into() });
        }
        Ok(ShortcutRule { lhs, rhs, cost })
    }

    /// Rules are symmetric.
    pub fn directions(&self) -> [(&Pattern, &Pattern); 2] {
        [(&self.lhs, &self.rhs), (&self.rhs, &self.lhs)]
    }

    pub fn parse_line(line: &str) -> Result<Self, MetricsError> {
        let (body, cost) = match line.rsplit_once('@') {
            Some((b, c)) => {
                let c: f64 = c.trim().parse().map_err(|_| MetricsError::Rule {
                    line: 0,
                    message: format!("bad cost `{}`", c.trim()),
                })?;
                (b, Some(c))
            }
            None => (line, None),
        };
        let (l, r) = body
            .split_once("<=>")
            .ok_or_else(|| MetricsError::Rule { line: 0, message: "expected `lhs <=> rhs`".into() })?;
        ShortcutRule::new(Pattern::parse(l.trim())?, Pattern::parse(r.trim())?, cost)
    }
}

/// One rule per line; `#` starts a comment line.
pub fn parse_rules(src: &str) -> Result<Vec<ShortcutRule>, MetricsError> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = ShortcutRule::parse_line(line).map_err(|e| match e {
            MetricsError::Rule { message, .. } => MetricsError::Rule { line: idx + 1, message },
            other => other,
        })?;
        out.push(rule);
    }
    Ok(out)
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<Vec<ShortcutRule>, MetricsError> {
    parse_rules(&std::fs::read_to_string(path)?)
}

pub fn builtin_rules() -> Vec<ShortcutRule> {
    parse_rules(BUILTIN_RULES).expect("bundled rules are valid")
}

/// Only the `a/b ↔ a·b⁻¹` spellings.
pub fn fraction_rules() -> Vec<ShortcutRule> {
    builtin_rules().into_iter().filter(|r| r.cost.is_none()).collect()
}

/// Only the exact (zero-priced) equivalences.
pub fn equivalence_rules() -> Vec<ShortcutRule> {
    builtin_rules().into_iter().filter(|r| r.cost == Some(0.0)).collect()
}
