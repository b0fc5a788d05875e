//! Refinement passes over content trees and the two presentation-level
//! analyses (index pairing, invisible operators) that feed them.

use std::collections::{BTreeMap, BTreeSet};

use super::{Annotations, SRC};
use crate::latex::symbols;
use crate::semantics::{Role, SemanticAnnotation};
use crate::tree::{ExprTree, NodeId};

/// Index leaf belonging to an upper/lower pair.
pub(crate) const EINSTEIN: &str = "einstein";
/// Subscript written in text mode (`x_\text{max}`).
pub(crate) const TEXTMODE: &str = "textmode";

pub const INVISIBLE_TIMES: &str = "\u{2062}";
pub const INVISIBLE_APPLY: &str = "\u{2061}";

pub(crate) const OPEN_FENCES: &[&str] = &["(", "[", "{", "⟨", "⌊", "⌈"];
pub(crate) const CLOSE_FENCES: &[&str] = &[")", "]", "}", "⟩", "⌋", "⌉"];


fn is_mo_in(n: &ExprTree, set: &[&str]) -> bool {
    n.kind() == Some("mo") && set.contains(&n.label.as_str())
}

pub(crate) fn is_prime(n: &ExprTree) -> bool {
    n.kind() == Some("mo") && !n.label.is_empty() && n.label.chars().all(|c| c == '′')
}

/// Copies `p` with every node's preorder index stored under [`SRC`].
pub(crate) fn tag_ids(p: &ExprTree) -> ExprTree {
    fn walk(t: &ExprTree, next: &mut NodeId) -> ExprTree {
        let id = *next;
        *next += 1;
        let mut out = ExprTree {
            label: t.label.clone(),
            attrs: t.attrs.clone(),
            children: Vec::with_capacity(t.children.len()),
        };
        out.attrs.insert(SRC.into(), id.to_string());
        out.children = t.children.iter().map(|c| walk(c, next)).collect();
        out
    }
    walk(p, &mut 0)
}

pub(crate) fn src_of(n: &ExprTree) -> Option<NodeId> {
    n.attr(SRC).and_then(|s| s.parse().ok())
}

/// Leaf whose role decides whether `n` applies to what follows: the node
/// itself, or the base of a script.
pub(crate) fn head_leaf(n: &ExprTree) -> Option<&ExprTree> {
    match n.label.as_str() {
        "Script" => head_leaf(&n.children[0]),
        _ if n.is_leaf() && n.kind() == Some("mi") => Some(n),
        _ => None,
    }
}

pub(crate) fn applicable(n: &ExprTree, ann: &Annotations) -> bool {
    head_leaf(n)
        .and_then(src_of)
        .map(|id| matches!(ann.role_of(id), Role::Function | Role::Operator))
        .unwrap_or(false)
}

fn operand_end(n: &ExprTree) -> bool {
    if n.kind() == Some("mo") {
        return is_mo_in(n, CLOSE_FENCES) || n.label == "!" || is_prime(n);
    }
    n.label != "Tag"
}

fn operand_start(n: &ExprTree) -> bool {
    if n.kind() == Some("mo") {
        return is_mo_in(n, OPEN_FENCES);
    }
    n.label != "Tag" && !(n.is_row() && n.children.is_empty())
}

/// Invisible operator between two adjacent row items, if any.
pub(crate) fn invisible_between(left: &ExprTree, right: &ExprTree, ann: &Annotations) -> Option<&'static str> {
    if !operand_end(left) || !operand_start(right) {
        return None;
    }
    if applicable(left, ann) {
        Some(INVISIBLE_APPLY)
    } else {
        Some(INVISIBLE_TIMES)
    }
}

/// Makes every implicit adjacency explicit: U+2061 (apply) when the left
/// item's role is function or operator, U+2062 (times) otherwise.
pub fn disambiguate_invisible(p: &ExprTree, ann: &Annotations) -> ExprTree {
    fn walk(t: &ExprTree, ann: &Annotations) -> ExprTree {
        let children: Vec<ExprTree> = t.children.iter().map(|c| walk(c, ann)).collect();
        let sequence = (t.is_row() && t.attr("macro").is_none()) || t.label == "Cell";
        let children = if sequence {
            let mut out = Vec::with_capacity(children.len() * 2);
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    if let Some(op) = invisible_between(&t.children[i - 1], &t.children[i], ann) {
                        out.push(ExprTree::leaf(op).with_attr("kind", "mo"));
                    }
                }
                out.push(c.clone());
            }
            out
        } else {
            children
        };
        ExprTree { label: t.label.clone(), attrs: t.attrs.clone(), children }
    }
    let mut out = walk(&tag_ids(p), ann);
    out.strip_attrs(&[SRC]);
    out
}

fn splits_terms(n: &ExprTree) -> bool {
    n.kind() == Some("mo")
        && (matches!(n.label.as_str(), "+" | "−" | "±" | "∓" | "," | ";") || is_relation(&n.label) || is_logical(&n.label))
}

pub(crate) fn is_relation(label: &str) -> bool {
    matches!(
        label,
        "=" | "<" | ">" | "≤" | "≥" | "≠" | "≡" | "≈" | "∼" | "≃" | "≅" | "∝" | "≪" | "≫" | "∈" | "∉"
            | "⊂" | "⊆" | "⊃" | "→" | "↦" | "∣" | "⊥" | "∥"
    )
}

pub(crate) fn is_logical(label: &str) -> bool {
    matches!(label, "⇒" | "⟹" | "⇐" | "⇔" | "⟺" | "∨" | "∧")
}

fn index_letters<'a>(t: &'a ExprTree, out: &mut Vec<&'a ExprTree>) {
    let is_letter = |n: &ExprTree| {
        n.is_leaf() && n.kind() == Some("mi") && n.label.chars().count() == 1
            && n.label.chars().all(char::is_alphabetic)
    };
    if is_letter(t) {
        out.push(t);
    } else if t.is_row() && t.attr("macro").is_none() {
        out.extend(t.children.iter().filter(|c| is_letter(c)));
    }
}

/// Preorder ids of index leaves that occur exactly once as a superscript
/// and once as a subscript of the same letter within one product term.
pub fn detect_einstein(p: &ExprTree) -> BTreeSet<NodeId> {
    let tagged = tag_ids(p);
    let mut found = BTreeSet::new();
    scan_rows(&tagged, &mut found);
    found
}

fn scan_rows(t: &ExprTree, found: &mut BTreeSet<NodeId>) {
    let items: Vec<&ExprTree> = if t.is_row() || t.label == "Cell" {
        t.children.iter().collect()
    } else if t.label == "Script" {
        vec![t]
    } else {
        Vec::new()
    };
    for term in items.split(|n| splits_terms(n)) {
        let mut uses: BTreeMap<&str, (Vec<NodeId>, Vec<NodeId>)> = BTreeMap::new();
        for item in term.iter().filter(|n| n.label == "Script") {
            let form = item.attr("form").unwrap_or("sub");
            let (sub, sup) = match form {
                "sub" => (item.children.get(1), None),
                "sup" => (None, item.children.get(1)),
                _ => (item.children.get(1), item.children.get(2)),
            };
            let mut letters = Vec::new();
            if let Some(s) = sup {
                index_letters(s, &mut letters);
                for l in letters.drain(..) {
                    uses.entry(&l.label).or_default().0.extend(src_of(l));
                }
            }
            if let Some(s) = sub {
                index_letters(s, &mut letters);
                for l in letters.drain(..) {
                    uses.entry(&l.label).or_default().1.extend(src_of(l));
                }
            }
        }
        for (upper, lower) in uses.values() {
            if upper.len() == 1 && lower.len() == 1 {
                found.insert(upper[0]);
                found.insert(lower[0]);
            }
        }
    }
    if t.label != "Script" {
        for c in &t.children {
            scan_rows(c, found);
        }
    } else {
        for c in &t.children {
            if !c.is_leaf() {
                scan_rows(c, found);
            }
        }
    }
}

fn map_bottom_up(t: &ExprTree, f: &impl Fn(ExprTree) -> ExprTree) -> ExprTree {
    let node = ExprTree {
        label: t.label.clone(),
        attrs: t.attrs.clone(),
        children: t.children.iter().map(|c| map_bottom_up(c, f)).collect(),
    };
    f(node)
}

pub(crate) fn op(label: &str, children: Vec<ExprTree>) -> ExprTree {
    ExprTree::node(label, children).with_attr("kind", "op")
}

fn inherit_src(mut to: ExprTree, from: &ExprTree) -> ExprTree {
    if let Some(s) = from.attr(SRC) {
        to.attrs.insert(SRC.into(), s.to_string());
    }
    to
}

/// `superscript(b, e)` becomes `power(b, e)`; primes become `diff`.
/// Superscripts whose index is part of an upper/lower pair are kept.
pub fn apply_power_rule(t: &ExprTree) -> ExprTree {
    map_bottom_up(t, &|node| {
        if node.label != "superscript" || node.children.len() != 2 {
            return node;
        }
        let exp = &node.children[1];
        if exp.attr(EINSTEIN).is_some() {
            return node;
        }
        if exp.is_leaf() && !exp.label.is_empty() && exp.label.chars().all(|c| c == '′') {
            let order = exp.label.chars().count();
            let mut d = inherit_src(op("diff", vec![node.children[0].clone()]), exp);
            if order > 1 {
                d.attrs.insert("order".into(), order.to_string());
            }
            return d;
        }
        inherit_src(op("power", node.children.clone()), &node)
    })
}

/// Math-mode subscripts on identifiers become parameters (children);
/// text-mode subscripts fuse with the base into one identifier.
pub fn apply_subscript_rule(t: &ExprTree) -> ExprTree {
    map_bottom_up(t, &|node| {
        if node.label != "subscript" || node.children.len() != 2 {
            return node;
        }
        let (base, sub) = (&node.children[0], &node.children[1]);
        let leaf_base = base.is_leaf() && matches!(base.kind(), Some("ci" | "csymbol"));
        if !leaf_base {
            return node;
        }
        if sub.attr(TEXTMODE).is_some() && sub.is_leaf() {
            let fused = ExprTree::leaf(format!("{}_{}", base.label, sub.label)).with_attr("kind", "ci");
            return inherit_src(fused, base);
        }
        let mut head = base.clone();
        head.children.push(sub.clone());
        head
    })
}

fn special_annotation(label: &str) -> Option<SemanticAnnotation> {
    let qid = match label {
        "degree" => "Q28390",
        "adjoint" => "Q2051983",
        _ => return None,
    };
    SemanticAnnotation::wikidata(qid, label).ok()
}

/// Drops equation labels and reads bare `x^\circ` / `x^\dagger` as the
/// degree and adjoint heads.
pub fn apply_special_heads(t: &ExprTree) -> ExprTree {
    let t = map_bottom_up(t, &|node| {
        if node.label == "superscript" && node.children.len() == 2 && node.children[1].is_leaf() {
            let head = match node.children[1].label.as_str() {
                "∘" => "degree",
                "†" => "adjoint",
                _ => return node,
            };
            let mut out = ExprTree::node(head, vec![node.children[0].clone()]);
            special_annotation(head).unwrap().apply_to(&mut out);
            return inherit_src(out, &node.children[1]);
        }
        node
    });
    untag(t)
}

fn untag(mut t: ExprTree) -> ExprTree {
    while t.label == "tag" && !t.children.is_empty() {
        let keep_attrs = std::mem::take(&mut t.attrs);
        t = t.children.swap_remove(0);
        // root-level attributes such as constraints survive the unwrap
        for (k, v) in keep_attrs {
            if k != SRC && k != "kind" {
                t.attrs.entry(k).or_insert(v);
            }
        }
    }
    t.children = t.children.into_iter().map(untag).collect();
    t
}

pub(crate) fn is_large(n: &ExprTree) -> bool {
    n.kind() == Some("mo")
        && n.attr("tex")
            .and_then(symbols::symbol)
            .is_some_and(|(_, c)| c == symbols::SymbolClass::Large)
}
