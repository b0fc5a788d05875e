//! Presentation/content MathML with `id`/`xref` cross references.

mod codec;
pub(crate) mod dom;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::content::SRC;
use crate::tree::{ExprTree, ROW};

pub use codec::{emit, parse_mathml, parse_xml_tree};

pub const MATHML_NS: &str = "http://www.w3.org/1998/Math/MathML";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MathmlError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("root element is <{0}>, not <math>")]
    NotMathML(String),
    #[error("invalid cross reference: {0}")]
    InvalidXref(String),
}

/// Presentation and content trees of one formula. Cross references live in
/// the trees as `id`/`xref` attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelMarkup {
    pub presentation: ExprTree,
    pub content: Option<ExprTree>,
    /// Other `annotation`/`annotation-xml` children of `semantics`, kept
    /// verbatim as generic trees.
    pub annotations: Vec<ExprTree>,
}

/// Parser-only attributes that are not part of the markup.
const PARSER_ATTRS: &[&str] = &["tex", "macro", "font", "env"];

impl ParallelMarkup {
    pub fn empty() -> Self {
        ParallelMarkup { presentation: ExprTree::row(vec![]), content: None, annotations: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.presentation.is_row() && self.presentation.children.is_empty() && self.content.is_none()
    }

    /// Joins a parsed presentation tree and its contentized form.
    ///
    /// Presentation tokens (every non-row node) are numbered 1.. in
    /// preorder; content nodes continue the numbering. A content node
    /// derived from presentation node `p` gets `xref=p` and `p` gets the
    /// content id back; only the first content node claiming `p` links.
    pub fn build(presentation: &ExprTree, content: Option<&ExprTree>) -> Self {
        // preorder index -> presentation id
        let mut pid_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut next = 1;
        for (idx, n) in presentation.preorder().enumerate() {
            if !n.is_row() {
                pid_of.insert(idx, next);
                next += 1;
            }
        }
        let mut back: BTreeMap<usize, usize> = BTreeMap::new();
        let content = content.map(|c| {
            let mut c = c.clone();
            number_content(&mut c, &mut next, &pid_of, &mut back);
            c
        });

        let mut pres = presentation.clone();
        let mut idx = 0;
        number_presentation(&mut pres, &mut idx, &pid_of, &back);
        pres.strip_attrs(PARSER_ATTRS);
        ParallelMarkup {
            presentation: normalize_presentation(&pres),
            content,
            annotations: Vec::new(),
        }
    }

    /// `(presentation id, content id)` pairs, read from the content side.
    pub fn xrefs(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let Some(c) = &self.content {
            for n in c.preorder() {
                if let (Some(id), Some(x)) = (n.attr("id"), n.attr("xref")) {
                    out.insert(x.to_string(), id.to_string());
                }
            }
        }
        out
    }

    /// Checks id uniqueness and that every xref resolves, one-to-one.
    pub fn validate(&self) -> Result<(), MathmlError> {
        let err = |m: String| Err(MathmlError::InvalidXref(m));
        let mut ids = BTreeSet::new();
        let trees = std::iter::once(&self.presentation).chain(&self.content);
        for t in trees.clone() {
            for n in t.preorder() {
                if let Some(id) = n.attr("id") {
                    if !ids.insert(id) {
                        return err(format!("duplicate id {id}"));
                    }
                }
            }
        }
        let mut targets = BTreeSet::new();
        for t in trees {
            for n in t.preorder() {
                if let Some(x) = n.attr("xref") {
                    if !ids.contains(x) {
                        return err(format!("xref {x} has no target"));
                    }
                    if n.attr("id").is_none() {
                        return err(format!("xref {x} from a node without id"));
                    }
                    if !targets.insert(x) {
                        return err(format!("xref {x} is not injective"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn number_content(
    t: &mut ExprTree,
    next: &mut usize,
    pid_of: &BTreeMap<usize, usize>,
    back: &mut BTreeMap<usize, usize>,
) {
    let id = *next;
    *next += 1;
    t.attrs.insert("id".into(), id.to_string());
    if let Some(src) = t.attrs.remove(SRC).and_then(|s| s.parse::<usize>().ok()) {
        if let Some(&pid) = pid_of.get(&src) {
            if let std::collections::btree_map::Entry::Vacant(e) = back.entry(pid) {
                e.insert(id);
                t.attrs.insert("xref".into(), pid.to_string());
            }
        }
    }
    for c in &mut t.children {
        number_content(c, next, pid_of, back);
    }
}

fn number_presentation(
    t: &mut ExprTree,
    idx: &mut usize,
    pid_of: &BTreeMap<usize, usize>,
    back: &BTreeMap<usize, usize>,
) {
    if let Some(&pid) = pid_of.get(idx) {
        t.attrs.insert("id".into(), pid.to_string());
        if let Some(cid) = back.get(&pid) {
            t.attrs.insert("xref".into(), cid.to_string());
        }
    }
    *idx += 1;
    for c in &mut t.children {
        number_presentation(c, idx, pid_of, back);
    }
}

fn plain_row(t: &ExprTree) -> bool {
    t.is_row() && t.attrs.is_empty()
}

/// Removes layout freedom: single-child rows collapse, rows nested in rows
/// are spliced, and `mfenced` is expanded into explicit fence operators.
pub fn normalize_presentation(t: &ExprTree) -> ExprTree {
    let t = if t.label == "mfenced" { expand_mfenced(t) } else { t.clone() };
    let mut children = Vec::with_capacity(t.children.len());
    for c in &t.children {
        let c = normalize_presentation(c);
        if t.is_row() && plain_row(&c) {
            children.extend(c.children);
        } else {
            children.push(c);
        }
    }
    let mut out = ExprTree { label: t.label, attrs: t.attrs, children };
    while plain_row(&out) && out.children.len() == 1 {
        out = out.children.pop().unwrap();
    }
    out
}

fn expand_mfenced(t: &ExprTree) -> ExprTree {
    let mo = |s: &str| ExprTree::leaf(s).with_attr("kind", "mo");
    let open = t.attr("open").unwrap_or("(");
    let close = t.attr("close").unwrap_or(")");
    let seps: Vec<String> = t
        .attr("separators")
        .unwrap_or(",")
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(String::from)
        .collect();
    let mut items = Vec::new();
    if !open.is_empty() {
        items.push(mo(open));
    }
    for (i, c) in t.children.iter().enumerate() {
        if i > 0 && !seps.is_empty() {
            items.push(mo(&seps[(i - 1).min(seps.len() - 1)]));
        }
        items.push(c.clone());
    }
    if !close.is_empty() {
        items.push(mo(close));
    }
    let mut row = ExprTree::node(ROW, items);
    for (k, v) in &t.attrs {
        if !matches!(k.as_str(), "open" | "close" | "separators") {
            row.attrs.insert(k.clone(), v.clone());
        }
    }
    row
}
