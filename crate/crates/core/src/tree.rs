//! Ordered, labeled expression trees.
//!
//! [`ExprTree`] is the common currency of the crate: LaTeX presentation
//! trees, content (operator) trees and arbitrary XML trees handed in by
//! third-party converters are all represented with it.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Structural label of a presentation row. Rows are layout containers and
/// are transparent for token accounting.
pub const ROW: &str = "Row";

/// Preorder index of a node inside a tree (root is `0`).
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprTree {
    pub label: String,
    pub children: Vec<ExprTree>,
    pub attrs: BTreeMap<String, String>,
}

impl ExprTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        ExprTree {
            label: label.into(),
            children: Vec::new(),
            attrs: BTreeMap::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ExprTree>) -> Self {
        ExprTree {
            label: label.into(),
            children,
            attrs: BTreeMap::new(),
        }
    }

    pub fn row(children: Vec<ExprTree>) -> Self {
        Self::node(ROW, children)
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(key.into(), value.into());
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    pub fn kind(&self) -> Option<&str> {
        self.attr("kind")
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_row(&self) -> bool {
        self.label == ROW
    }

    /// Total number of nodes, layout rows included.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ExprTree::size).sum::<usize>()
    }

    /// Number of token nodes: every node except layout rows.
    pub fn token_count(&self) -> usize {
        let own = usize::from(!self.is_row());
        own + self.children.iter().map(ExprTree::token_count).sum::<usize>()
    }

    /// Number of token levels on the deepest root-to-leaf path. Layout rows
    /// do not open a level of their own.
    pub fn depth(&self) -> usize {
        let below = self.children.iter().map(ExprTree::depth).max().unwrap_or(0);
        below + usize::from(!self.is_row())
    }

    /// Raw height in nodes, rows included.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ExprTree::height).max().unwrap_or(0)
    }

    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    /// Leaf nodes in reading order, ignoring childless layout rows.
    pub fn leaves(&self) -> Vec<&ExprTree> {
        self.preorder()
            .filter(|n| n.is_leaf() && !n.is_row())
            .collect()
    }

    pub fn get(&self, id: NodeId) -> Option<&ExprTree> {
        self.preorder().nth(id)
    }

    /// Depth of node `id` counted in edges from the root.
    pub fn node_depth(&self, id: NodeId) -> Option<usize> {
        fn walk(t: &ExprTree, target: NodeId, next: &mut NodeId, depth: usize) -> Option<usize> {
            if *next == target {
                return Some(depth);
            }
            *next += 1;
            for c in &t.children {
                if let Some(d) = walk(c, target, next, depth + 1) {
                    return Some(d);
                }
            }
            None
        }
        let mut next = 0;
        walk(self, id, &mut next, 0)
    }

    /// Label/shape equality, ignoring attributes.
    pub fn same_shape(&self, other: &ExprTree) -> bool {
        self.label == other.label
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_shape(b))
    }

    pub fn map_attrs(&mut self, f: &mut impl FnMut(&mut BTreeMap<String, String>)) {
        f(&mut self.attrs);
        for c in &mut self.children {
            c.map_attrs(f);
        }
    }

    pub fn strip_attrs(&mut self, keys: &[&str]) {
        self.map_attrs(&mut |attrs| {
            for k in keys {
                attrs.remove(*k);
            }
        });
    }

    /// Parses the term notation produced by `Display`: `plus(a, times(b, c))`.
    pub fn parse_term(src: &str) -> Result<ExprTree, TermError> {
        let term = crate::term::parse(src)?;
        term.into_tree()
            .ok_or(TermError::Unexpected { pos: 0, found: '?' })
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a ExprTree>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a ExprTree;

    fn next(&mut self) -> Option<&'a ExprTree> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"' | '?'))
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if needs_quotes(&self.label) {
            write!(f, "\"{}\"", self.label.replace('\\', "\\\\").replace('"', "\\\""))?;
        } else {
            f.write_str(&self.label)?;
        }
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("unexpected `{found}` at byte {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unexpected end of term")]
    Eof,
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}
