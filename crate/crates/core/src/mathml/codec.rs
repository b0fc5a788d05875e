//! ExprTree <-> MathML text.
//!
//! Presentation: `Row`↔`mrow`, `Fraction`↔`mfrac`, `Script`↔`msub`/`msup`/
//! `msubsup`, `Sqrt`↔`msqrt`, `Root`↔`mroot`, `Table`/`TableRow`/`Cell`↔
//! `mtable`/`mtr`/`mtd`, `Tag`↔`mrow class="tag"`, token leaves by `kind`.
//!
//! Content: see [`crate::content`] for node kinds. Operator heads outside
//! the MathML operator vocabulary are written as `csymbol` without `cd`.
//!
//! Anything else is written and read back generically: element name as
//! label, character data as `#text` leaves.

use super::dom::{self, empty_element, is_xml_name, open_tag, text_element, XmlElement, XmlNode};
use super::{MathmlError, ParallelMarkup, MATHML_NS};
use crate::tree::{ExprTree, ROW};

const TEXT: &str = "#text";
const CONTENT_ENCODING: &str = "MathML-Content";

const TOKEN_ELEMENTS: &[&str] = &["mi", "mn", "mo", "mtext", "ms"];

/// Operator elements of MathML content markup we emit as `<name/>`.
const MATHML_OPS: &[&str] = &[
    "implies", "equivalent", "eq", "neq", "lt", "gt", "leq", "geq", "approx", "or", "and", "not",
    "xor", "plus", "minus", "times", "divide", "power", "root", "abs", "floor", "ceiling",
    "factorial", "in", "notin", "subset", "prsubset", "union", "intersect", "setdiff", "tendsto",
    "sum", "product", "int", "diff", "partialdiff", "compose", "sin", "cos", "tan", "exp", "ln",
    "log", "max", "min", "gcd", "determinant", "transpose", "real", "imaginary", "conjugate",
    "arg", "inverse", "factorof", "rem", "quotient", "limit", "forall", "exists",
];

const CONTAINERS: &[&str] = &[
    "interval", "set", "list", "vector", "matrix", "matrixrow", "piecewise", "piece", "otherwise",
    "angle", "bvar", "degree", "lowlimit", "uplimit", "condition", "domainofapplication",
];

fn attr_list<'a>(t: &'a ExprTree, skip: &[&str]) -> Vec<(&'a str, &'a str)> {
    t.attrs
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "kind" | "symbol" | "form") && !skip.contains(&k.as_str()))
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect()
}

/// Serializes a parallel markup document. Output is compact (no
/// indentation) and deterministic.
pub fn emit(pm: &ParallelMarkup) -> String {
    let mut out = String::new();
    if pm.is_empty() && pm.annotations.is_empty() {
        empty_element(&mut out, "math", &[("xmlns", MATHML_NS)]);
        return out;
    }
    open_tag(&mut out, "math", &[("xmlns", MATHML_NS)]);
    out.push('>');
    let semantics = pm.content.is_some() || !pm.annotations.is_empty();
    if semantics {
        out.push_str("<semantics>");
    }
    presentation(&mut out, &pm.presentation);
    if let Some(c) = &pm.content {
        open_tag(&mut out, "annotation-xml", &[("encoding", CONTENT_ENCODING)]);
        out.push('>');
        content(&mut out, c);
        out.push_str("</annotation-xml>");
    }
    for a in &pm.annotations {
        generic(&mut out, a);
    }
    if semantics {
        out.push_str("</semantics>");
    }
    out.push_str("</math>");
    out
}

fn children_element(out: &mut String, name: &str, attrs: &[(&str, &str)], t: &ExprTree, f: fn(&mut String, &ExprTree)) {
    if t.children.is_empty() {
        empty_element(out, name, attrs);
        return;
    }
    open_tag(out, name, attrs);
    out.push('>');
    for c in &t.children {
        f(out, c);
    }
    out.push_str("</");
    out.push_str(name);
    out.push('>');
}

fn presentation(out: &mut String, t: &ExprTree) {
    let attrs = attr_list(t, &[]);
    if t.is_leaf() && !t.is_row() {
        if let Some(kind) = t.kind().filter(|k| TOKEN_ELEMENTS.contains(k)) {
            text_element(out, kind, &attrs, &t.label);
            return;
        }
    }
    let name = match t.label.as_str() {
        ROW => "mrow",
        "Tag" => {
            let mut attrs = attrs;
            attrs.push(("class", "tag"));
            attrs.sort();
            children_element(out, "mrow", &attrs, t, presentation);
            return;
        }
        "Fraction" => "mfrac",
        "Sqrt" => "msqrt",
        "Root" => "mroot",
        "Script" => match t.attr("form") {
            Some("sup") => "msup",
            Some("subsup") => "msubsup",
            _ => "msub",
        },
        "Table" => "mtable",
        "TableRow" => "mtr",
        "Cell" => "mtd",
        _ => return generic(out, t),
    };
    children_element(out, name, &attrs, t, presentation);
}

fn generic(out: &mut String, t: &ExprTree) {
    if t.kind() == Some(TEXT) {
        out.push_str(&quick_xml::escape::escape(t.label.as_str()));
        return;
    }
    let name = if is_xml_name(&t.label) { t.label.as_str() } else { "mi" };
    let attrs = attr_list(t, &[]);
    if !is_xml_name(&t.label) {
        // not representable as an element; keep the text at least
        text_element(out, name, &attrs, &t.label);
        return;
    }
    children_element(out, name, &attrs, t, generic);
}

const HEAD_ATTRS: &[&str] = &["cd", "id", "name", "xref"];

/// Head element of an `apply`: carries the node's id/xref and, for
/// dictionary symbols, the binding.
fn head(out: &mut String, t: &ExprTree, own_attrs: bool) {
    let mut attrs: Vec<(&str, &str)> = if own_attrs {
        attr_list(t, &[])
    } else {
        HEAD_ATTRS.iter().filter_map(|&k| t.attr(k).map(|v| (k, v))).collect()
    };
    match t.kind() {
        Some("csymbol") => {
            attrs.push(("label", &t.label));
            attrs.sort();
            text_element(out, "csymbol", &attrs, t.attr("symbol").unwrap_or(&t.label));
        }
        Some("op") if MATHML_OPS.contains(&t.label.as_str()) => empty_element(out, &t.label, &attrs),
        Some("op") => text_element(out, "csymbol", &attrs, &t.label),
        Some(kind @ ("ci" | "cn")) => text_element(out, kind, &attrs, &t.label),
        _ => text_element(out, "ci", &attrs, &t.label),
    }
}

fn content(out: &mut String, t: &ExprTree) {
    let kind = t.kind();
    if t.is_leaf() {
        let attrs = attr_list(t, &[]);
        match kind {
            Some("ci" | "cn") => text_element(out, kind.unwrap(), &attrs, &t.label),
            Some("empty") => empty_element(out, "none", &attrs),
            Some("csymbol" | "op") => head(out, t, true),
            Some("container") => empty_element(out, &t.label, &attrs),
            _ => generic(out, t),
        }
        return;
    }
    match kind {
        Some("op" | "csymbol" | "ci" | "cn") => {
            let rest = attr_list(t, HEAD_ATTRS);
            open_tag(out, "apply", &rest);
            out.push('>');
            head(out, t, false);
            for c in &t.children {
                content(out, c);
            }
            out.push_str("</apply>");
        }
        Some("apply") => children_element(out, "apply", &attr_list(t, &[]), t, content),
        Some("container") => children_element(out, &t.label, &attr_list(t, &[]), t, content),
        _ => generic(out, t),
    }
}

/// Reads a MathML document. The presentation part is always returned; the
/// content part when an `annotation-xml` with content encoding is present.
pub fn parse_mathml(xml: &str) -> Result<ParallelMarkup, MathmlError> {
    let root = dom::parse_document(xml).map_err(MathmlError::Xml)?;
    if root.name != "math" {
        return Err(MathmlError::NotMathML(root.name));
    }
    let mut pm = ParallelMarkup::empty();
    let kids: Vec<&XmlElement> = root.elements().collect();
    let body: Vec<&XmlElement> = match kids.as_slice() {
        [sem] if sem.name == "semantics" => {
            let mut parts = sem.elements();
            let pres: Vec<&XmlElement> = parts.next().into_iter().collect();
            for a in parts {
                let content_part = a.name == "annotation-xml"
                    && a.attr("encoding").is_some_and(|e| e.eq_ignore_ascii_case(CONTENT_ENCODING));
                if content_part && pm.content.is_none() {
                    let inner: Vec<ExprTree> = a.elements().map(read_content).collect();
                    pm.content = Some(match inner.len() {
                        1 => inner.into_iter().next().unwrap(),
                        _ => ExprTree::node("list", inner).with_attr("kind", "container"),
                    });
                } else {
                    pm.annotations.push(read_generic(a));
                }
            }
            pres
        }
        _ => kids,
    };
    pm.presentation = match body.as_slice() {
        [] => ExprTree::row(vec![]),
        [one] => read_presentation(one),
        many => ExprTree::row(many.iter().map(|e| read_presentation(e)).collect()),
    };
    Ok(pm)
}

/// Reads arbitrary XML (e.g. a tagger export) as a generic tree.
pub fn parse_xml_tree(xml: &str) -> Result<ExprTree, MathmlError> {
    let root = dom::parse_document(xml).map_err(MathmlError::Xml)?;
    Ok(read_generic(&root))
}

fn attrs_of(e: &XmlElement, t: &mut ExprTree, skip: &[&str]) {
    for (k, v) in &e.attrs {
        if !skip.contains(&k.as_str()) {
            t.attrs.insert(k.clone(), v.clone());
        }
    }
}

fn read_generic(e: &XmlElement) -> ExprTree {
    let mut t = ExprTree::leaf(e.name.clone());
    attrs_of(e, &mut t, &[]);
    for c in &e.children {
        match c {
            XmlNode::Element(el) => t.children.push(read_generic(el)),
            XmlNode::Text(s) if !s.trim().is_empty() => {
                t.children.push(ExprTree::leaf(s.trim()).with_attr("kind", TEXT))
            }
            XmlNode::Text(_) => {}
        }
    }
    t
}

fn read_presentation(e: &XmlElement) -> ExprTree {
    let name = e.name.as_str();
    if TOKEN_ELEMENTS.contains(&name) {
        let mut t = ExprTree::leaf(e.text().trim()).with_attr("kind", name);
        attrs_of(e, &mut t, &[]);
        return t;
    }
    let children: Vec<ExprTree> = e.elements().map(read_presentation).collect();
    let (label, form) = match name {
        "mrow" if e.attr("class") == Some("tag") => ("Tag", None),
        "mrow" => (ROW, None),
        "mfrac" => ("Fraction", None),
        "msqrt" => ("Sqrt", None),
        "mroot" => ("Root", None),
        "msub" => ("Script", Some("sub")),
        "msup" => ("Script", Some("sup")),
        "msubsup" => ("Script", Some("subsup")),
        "mtable" => ("Table", None),
        "mtr" => ("TableRow", None),
        "mtd" => ("Cell", None),
        _ => {
            let mut t = read_generic(e);
            // keep generic nodes' element children in presentation form
            let mut pres_children = e.elements().map(read_presentation);
            for c in t.children.iter_mut().filter(|c| c.kind() != Some(TEXT)) {
                *c = pres_children.next().unwrap();
            }
            return t;
        }
    };
    let children = if label == "Sqrt" && children.len() != 1 {
        vec![ExprTree::row(children)]
    } else {
        children
    };
    let mut t = ExprTree::node(label, children);
    attrs_of(e, &mut t, if label == "Tag" { &["class"] } else { &[] });
    if let Some(f) = form {
        t.attrs.insert("form".into(), f.into());
    }
    t
}

fn read_content(e: &XmlElement) -> ExprTree {
    let name = e.name.as_str();
    let has_elements = e.elements().next().is_some();
    match name {
        "ci" | "cn" if !has_elements => {
            let mut t = ExprTree::leaf(e.text().trim()).with_attr("kind", name);
            attrs_of(e, &mut t, &[]);
            t
        }
        "csymbol" if !has_elements => {
            let text = e.text().trim().to_string();
            if e.attr("cd").is_some() {
                let label = e.attr("label").map(str::to_string).unwrap_or_else(|| text.clone());
                let mut t = ExprTree::leaf(label).with_attr("kind", "csymbol").with_attr("symbol", text);
                attrs_of(e, &mut t, &["label"]);
                t
            } else {
                let mut t = ExprTree::leaf(text).with_attr("kind", "op");
                attrs_of(e, &mut t, &[]);
                t
            }
        }
        "none" if !has_elements => {
            let mut t = ExprTree::leaf("none").with_attr("kind", "empty");
            attrs_of(e, &mut t, &[]);
            t
        }
        "apply" => {
            let kids: Vec<&XmlElement> = e.elements().collect();
            let simple_head = kids
                .first()
                .is_some_and(|h| h.name != "apply" && h.elements().next().is_none() && !CONTAINERS.contains(&h.name.as_str()));
            if !simple_head {
                let mut t = ExprTree::node("apply", kids.iter().map(|k| read_content(k)).collect())
                    .with_attr("kind", "apply");
                attrs_of(e, &mut t, &[]);
                return t;
            }
            let mut t = read_content(kids[0]);
            t.children = kids[1..].iter().map(|k| read_content(k)).collect();
            attrs_of(e, &mut t, &[]);
            t
        }
        _ if CONTAINERS.contains(&name) => {
            let mut t = ExprTree::node(name, e.elements().map(read_content).collect()).with_attr("kind", "container");
            attrs_of(e, &mut t, &[]);
            t
        }
        _ if !has_elements && e.text().trim().is_empty() && MATHML_OPS.contains(&name) => {
            let mut t = ExprTree::leaf(name).with_attr("kind", "op");
            attrs_of(e, &mut t, &[]);
            t
        }
        _ => read_generic(e),
    }
}
