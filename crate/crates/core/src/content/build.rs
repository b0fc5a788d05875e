//! Row parser: presentation items to raw content with a fixed precedence
//! table (loosest first):
//!
//! ```text
//! ,  <  ⇒ ⇔  <  ∨  <  ∧  <  relations  <  + − ∪ ∩  <  ⋅ × / juxtaposition
//!    <  prefix − ¬, big operators  <  postfix !  <  application  <  atoms
//! ```

use std::collections::BTreeSet;

use super::rules::{
    applicable, is_large, is_logical, is_relation, op, src_of, tag_ids, CLOSE_FENCES,
    EINSTEIN, OPEN_FENCES, TEXTMODE,
};
use super::{Annotations, RefinementConfig, CONSTRAINT, SRC};
use crate::latex::{MacroRegistry, MacroSemantics};
use crate::tree::{ExprTree, NodeId};

pub(super) fn build(
    p: &ExprTree,
    ann: &Annotations,
    cfg: RefinementConfig,
    registry: &MacroRegistry,
    einstein: &BTreeSet<NodeId>,
) -> ExprTree {
    let tagged = tag_ids(p);
    let mut b = Builder { ann, cfg, registry, einstein, constraints: Vec::new() };
    let mut t = if tagged.is_row() && tagged.attr("macro").is_none() {
        b.row(&tagged.children, true)
    } else {
        b.row(std::slice::from_ref(&tagged), true)
    };
    if !b.constraints.is_empty() {
        t.attrs.insert(CONSTRAINT.into(), b.constraints.join("; "));
    }
    t
}

#[derive(Debug, Clone)]
enum Unit {
    Op { label: String, src: Option<String> },
    Term { c: ExprTree, applies: bool },
    Big { head: &'static str, bounds: Vec<ExprTree>, src: Option<String> },
    Fenced { open: String, close: String, inner: Vec<Unit>, src: Option<String> },
}

impl Unit {
    fn is_op(&self, label: &str) -> bool {
        matches!(self, Unit::Op { label: l, .. } if l == label)
    }

    fn starts_operand(&self) -> bool {
        match self {
            Unit::Op { label, .. } => !is_known_op(label),
            _ => true,
        }
    }
}

const ADDITIVE: &[&str] = &["+", "−", "±", "∓", "∪", "∩", "∖", "⊕"];
const MULTIPLICATIVE: &[&str] = &["⋅", "×", "∗", "*", "/", "÷", "∘", "⊗", "\u{2062}", "∙"];
const PREFIX: &[&str] = &["−", "+", "±", "∓", "¬"];

fn is_known_op(label: &str) -> bool {
    is_relation(label)
        || is_logical(label)
        || ADDITIVE.contains(&label)
        || MULTIPLICATIVE.contains(&label)
        || PREFIX.contains(&label)
        || matches!(label, "," | "!")
}

fn op_name(label: &str) -> &'static str {
    match label {
        "=" => "eq",
        "<" => "lt",
        ">" => "gt",
        "≤" => "leq",
        "≥" => "geq",
        "≠" => "neq",
        "≡" => "equivalent",
        "≈" => "approx",
        "∼" | "≃" | "≅" => "similar",
        "∝" => "proportional",
        "≪" => "much_less",
        "≫" => "much_greater",
        "∈" => "in",
        "∉" => "notin",
        "⊂" => "prsubset",
        "⊆" => "subset",
        "⊃" => "prsupset",
        "→" => "tendsto",
        "↦" => "mapsto",
        "∣" => "divides",
        "⊥" => "perpendicular",
        "∥" => "parallel",
        "⇒" | "⟹" | "⇐" => "implies",
        "⇔" | "⟺" => "equivalent",
        "∨" => "or",
        "∧" => "and",
        "¬" => "not",
        "+" => "plus",
        "−" => "minus",
        "±" => "plusminus",
        "∓" => "minusplus",
        "∪" => "union",
        "∩" => "intersect",
        "∖" => "setdiff",
        "⊕" => "direct_sum",
        "⋅" | "×" | "∗" | "*" | "\u{2062}" | "∙" => "times",
        "/" | "÷" => "divide",
        "∘" => "compose",
        "⊗" => "tensor_product",
        "!" => "factorial",
        _ => "unknown",
    }
}

fn big_head(n: &ExprTree) -> &'static str {
    match n.attr("tex") {
        Some(r"\sum") => "sum",
        Some(r"\prod") => "product",
        Some(r"\bigcup") => "union",
        Some(r"\bigcap") => "intersect",
        _ => "int",
    }
}

fn with_src(mut t: ExprTree, src: &Option<String>) -> ExprTree {
    if let Some(s) = src {
        t.attrs.insert(SRC.into(), s.clone());
    }
    t
}

fn container(label: &str, children: Vec<ExprTree>) -> ExprTree {
    ExprTree::node(label, children).with_attr("kind", "container")
}

fn empty() -> ExprTree {
    ExprTree::leaf("none").with_attr("kind", "empty")
}

/// `head(args...)`, folding the arguments under a leaf head.
fn apply(head: ExprTree, args: Vec<ExprTree>) -> ExprTree {
    if head.is_leaf() {
        let mut h = head;
        h.children = args;
        h
    } else {
        let src = head.attr(SRC).map(str::to_string);
        let mut children = vec![head];
        children.extend(args);
        with_src(ExprTree::node("apply", children).with_attr("kind", "apply"), &src)
    }
}

fn is_text_leaf(n: &ExprTree) -> bool {
    n.is_leaf()
        && (n.kind() == Some("mtext")
            || (matches!(n.attr("font"), Some(r"\mathrm" | r"\operatorname"))
                && n.label.chars().count() > 1))
}

struct Builder<'a> {
    ann: &'a Annotations,
    cfg: RefinementConfig,
    registry: &'a MacroRegistry,
    einstein: &'a BTreeSet<NodeId>,
    constraints: Vec<String>,
}

impl Builder<'_> {
    /// Content of a sequence of presentation items.
    fn row(&mut self, items: &[ExprTree], root: bool) -> ExprTree {
        let mut tags = Vec::new();
        let mut rest = Vec::with_capacity(items.len());
        for item in items {
            if item.label == "Tag" {
                tags.push(item);
            } else {
                rest.push(item.clone());
            }
        }
        let units = self.units(&rest);
        let mut e = parse_list(&units, root);
        for tag in tags {
            let label = self.node(&tag.children[0]);
            let src = tag.attr(SRC).map(str::to_string);
            e = with_src(op("tag", vec![e, label]), &src);
        }
        e
    }

    /// Row items split on top-level commas, one content tree per part.
    fn row_parts(&mut self, items: &[ExprTree]) -> Vec<ExprTree> {
        let units = self.units(items);
        units
            .split(|u| u.is_op(","))
            .map(|part| parse_list(part, false))
            .collect()
    }

    fn units(&mut self, items: &[ExprTree]) -> Vec<Unit> {
        // stack of open fences: (open label, src, units so far)
        let mut stack: Vec<(String, Option<String>, Vec<Unit>)> = vec![(String::new(), None, Vec::new())];
        for item in items {
            let src = item.attr(SRC).map(str::to_string);
            if item.kind() == Some("mo") && item.is_leaf() {
                let l = item.label.as_str();
                let bar = l == "|" || l == "‖";
                let top_open = &stack.last().unwrap().0;
                if bar && stack.len() > 1 && top_open == l || (!bar && CLOSE_FENCES.contains(&l) && stack.len() > 1) {
                    let (open, osrc, inner) = stack.pop().unwrap();
                    stack.last_mut().unwrap().2.push(Unit::Fenced {
                        open,
                        close: l.to_string(),
                        inner,
                        src: osrc,
                    });
                    continue;
                }
                if bar || OPEN_FENCES.contains(&l) {
                    stack.push((l.to_string(), src, Vec::new()));
                    continue;
                }
            }
            if let Some(u) = self.unit(item) {
                stack.last_mut().unwrap().2.push(u);
            }
        }
        // unclosed fences read as plain symbols
        while stack.len() > 1 {
            let (open, src, inner) = stack.pop().unwrap();
            let parent = &mut stack.last_mut().unwrap().2;
            parent.push(Unit::Op { label: open, src });
            parent.extend(inner);
        }
        stack.pop().unwrap().2
    }

    fn unit(&mut self, item: &ExprTree) -> Option<Unit> {
        let src = item.attr(SRC).map(str::to_string);
        if item.kind() == Some("mo") && item.is_leaf() {
            if is_large(item) {
                return Some(Unit::Big { head: big_head(item), bounds: Vec::new(), src });
            }
            return Some(Unit::Op { label: item.label.clone(), src });
        }
        if item.label == "Script" && is_large(&item.children[0]) {
            let bounds = item.children[1..].iter().map(|c| self.node(c)).collect();
            let src = item.children[0].attr(SRC).map(str::to_string);
            return Some(Unit::Big { head: big_head(&item.children[0]), bounds, src });
        }
        if let Some(def) = self.registry.def_of(item) {
            if let MacroSemantics::Constraint { label } = &def.semantics {
                let args: Vec<ExprTree> = def
                    .bind(item)
                    .unwrap_or_default()
                    .into_iter()
                    .flatten()
                    .map(|a| self.node(&a))
                    .collect();
                self.constraints.push(ExprTree::node(label.clone(), args).to_string());
                return None;
            }
        }
        let applies = self.cfg.function_apply_rule && applicable(item, self.ann);
        Some(Unit::Term { c: self.node(item), applies })
    }

    fn leaf(&self, n: &ExprTree) -> ExprTree {
        let kind = match n.kind() {
            Some("mn") => "cn",
            _ => "ci",
        };
        let mut out = ExprTree::leaf(n.label.clone()).with_attr("kind", kind);
        if let Some(s) = n.attr(SRC) {
            out.attrs.insert(SRC.into(), s.to_string());
        }
        if is_text_leaf(n) {
            out.attrs.insert(TEXTMODE.into(), "true".into());
        }
        if let Some(id) = src_of(n) {
            if let Some(a) = self.ann.get(id).and_then(|i| i.annotation.as_ref()) {
                a.apply_to(&mut out);
            }
            if self.einstein.contains(&id) {
                out.attrs.insert(EINSTEIN.into(), "true".into());
            }
        }
        out
    }

    /// Content of one presentation node.
    fn node(&mut self, n: &ExprTree) -> ExprTree {
        let src = n.attr(SRC).map(str::to_string);
        if n.is_row() {
            if n.attr("macro").is_some() {
                return self.macro_node(n);
            }
            if n.children.is_empty() {
                return with_src(empty(), &src);
            }
            return self.row(&n.children, false);
        }
        if n.is_leaf() {
            return self.leaf(n);
        }
        let out = match n.label.as_str() {
            "Fraction" => {
                let int = |c: &ExprTree| c.kind() == Some("mn") && c.label.bytes().all(|b| b.is_ascii_digit());
                let (a, b) = (self.node(&n.children[0]), self.node(&n.children[1]));
                if int(&n.children[0]) && int(&n.children[1]) {
                    let mut r = ExprTree::node("rational", vec![a, b]);
                    r.attrs.insert("kind".into(), "csymbol".into());
                    r.attrs.insert("cd".into(), "nums1".into());
                    r.attrs.insert("symbol".into(), "rational".into());
                    r.attrs.insert("name".into(), "rational".into());
                    r
                } else {
                    op("divide", vec![a, b])
                }
            }
            "Sqrt" => op("root", vec![self.node(&n.children[0])]),
            "Root" => {
                let (x, k) = (self.node(&n.children[0]), self.node(&n.children[1]));
                op("root", vec![x, k])
            }
            "Script" => {
                let base = self.node(&n.children[0]);
                let rest: Vec<ExprTree> = n.children[1..].iter().map(|c| self.node(c)).collect();
                match (n.attr("form").unwrap_or("sub"), rest.as_slice()) {
                    ("sup", [p]) => op("superscript", vec![base, p.clone()]),
                    ("subsup", [s, p]) => {
                        let inner = with_src(op("subscript", vec![base, s.clone()]), &src);
                        op("superscript", vec![inner, p.clone()])
                    }
                    (_, [s, ..]) => op("subscript", vec![base, s.clone()]),
                    _ => base,
                }
            }
            "Table" => self.table(n),
            "Tag" => return with_src(empty(), &src),
            "TableRow" | "Cell" => return self.row(&n.children, false),
            other => {
                let children = n.children.iter().map(|c| self.node(c)).collect();
                ExprTree::node(other, children)
            }
        };
        with_src(out, &src)
    }

    fn macro_node(&mut self, n: &ExprTree) -> ExprTree {
        let Some((def, args)) = self
            .registry
            .def_of(n)
            .and_then(|d| Some((d.clone(), d.bind(n)?)))
        else {
            return self.row(&n.children, false);
        };
        let first_leaf_src = n.leaves().first().and_then(|l| l.attr(SRC)).map(str::to_string);
        match &def.semantics {
            MacroSemantics::Head { label, annotation } => {
                let children = args.iter().flatten().map(|a| self.node(a)).collect();
                let mut out = ExprTree::node(label.clone(), children);
                annotation.apply_to(&mut out);
                with_src(out, &first_leaf_src)
            }
            MacroSemantics::Apply => {
                let mut it = args.into_iter().flatten();
                let head = it.next().map(|f| self.node(&f)).unwrap_or_else(empty);
                let mut params = Vec::new();
                for a in it {
                    if a.is_row() && a.attr("macro").is_none() {
                        params.extend(self.row_parts(&a.children));
                    } else {
                        params.push(self.node(&a));
                    }
                }
                apply(head, params)
            }
            MacroSemantics::Constraint { .. } => empty(),
            MacroSemantics::Rewrite => self.row(&n.children, false),
        }
    }

    fn table(&mut self, n: &ExprTree) -> ExprTree {
        let env = n.attr("env").unwrap_or("matrix");
        let rows = &n.children;
        if env == "cases" {
            let pieces = rows
                .iter()
                .map(|row| {
                    let value = row.children.first().map(|c| self.row(&c.children, false)).unwrap_or_else(empty);
                    let cond: Vec<ExprTree> = row
                        .children
                        .get(1)
                        .map(|c| c.children.iter().filter(|i| i.kind() != Some("mtext")).cloned().collect())
                        .unwrap_or_default();
                    if cond.is_empty() {
                        container("otherwise", vec![value])
                    } else {
                        container("piece", vec![value, self.row(&cond, false)])
                    }
                })
                .collect();
            return container("piecewise", pieces);
        }
        if env.contains("matrix") {
            let rows = rows
                .iter()
                .map(|row| {
                    let cells = row.children.iter().map(|c| self.row(&c.children, false)).collect();
                    container("matrixrow", cells)
                })
                .collect();
            return container("matrix", rows);
        }
        // alignment environments: each row reads as one expression
        let mut lines: Vec<ExprTree> = rows
            .iter()
            .map(|row| {
                let items: Vec<ExprTree> = row.children.iter().flat_map(|c| c.children.clone()).collect();
                self.row(&items, false)
            })
            .collect();
        if lines.len() == 1 {
            lines.pop().unwrap()
        } else {
            container("list", lines)
        }
    }
}

/// Comma level. At the root a list whose first part is a relation keeps
/// only that first part.
fn parse_list(units: &[Unit], root: bool) -> ExprTree {
    let parts: Vec<&[Unit]> = units.split(|u| u.is_op(",")).collect();
    if parts.len() == 1 {
        return parse_seq(units);
    }
    let first_is_relation = parts[0]
        .iter()
        .any(|u| matches!(u, Unit::Op { label, .. } if is_relation(label)));
    if root && first_is_relation {
        return parse_seq(parts[0]);
    }
    container("list", parts.into_iter().map(parse_seq).collect())
}

fn parse_seq(units: &[Unit]) -> ExprTree {
    let mut p = Parser { units, pos: 0 };
    let mut parts = Vec::new();
    while p.pos < units.len() {
        let before = p.pos;
        if let Some(e) = p.implies() {
            parts.push(e);
        }
        if p.pos == before {
            // an operator with nothing to bind to
            let u = &units[p.pos];
            p.pos += 1;
            if let Unit::Op { label, src } = u {
                parts.push(with_src(op(op_name_or_label(label), vec![]), src));
            }
        }
    }
    match parts.len() {
        0 => empty(),
        1 => parts.pop().unwrap(),
        _ => container("list", parts),
    }
}

fn op_name_or_label(label: &str) -> &str {
    match op_name(label) {
        "unknown" => label,
        name => name,
    }
}

struct Parser<'u> {
    units: &'u [Unit],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Unit> {
        self.units.get(self.pos)
    }

    fn peek_op(&self) -> Option<(&str, &Option<String>)> {
        match self.peek()? {
            Unit::Op { label, src } => Some((label.as_str(), src)),
            _ => None,
        }
    }

    fn binary(label: &str, src: &Option<String>, lhs: Option<ExprTree>, rhs: Option<ExprTree>) -> ExprTree {
        let children = lhs.into_iter().chain(rhs).collect();
        with_src(op(op_name(label), children), src)
    }

    fn implies(&mut self) -> Option<ExprTree> {
        let lhs = self.or();
        let Some((label, src)) = self.peek_op() else { return lhs };
        if !matches!(label, "⇒" | "⟹" | "⇐" | "⇔" | "⟺") {
            return lhs;
        }
        let (label, src) = (label.to_string(), src.clone());
        self.pos += 1;
        let rhs = self.implies();
        Some(if label == "⇐" {
            Self::binary(&label, &src, rhs, lhs)
        } else {
            Self::binary(&label, &src, lhs, rhs)
        })
    }

    fn nary(&mut self, symbol: &str, next: fn(&mut Self) -> Option<ExprTree>) -> Option<ExprTree> {
        let first = next(self);
        let mut acc: Option<ExprTree> = None;
        while let Some((label, src)) = self.peek_op() {
            if label != symbol {
                break;
            }
            let src = src.clone();
            self.pos += 1;
            let rhs = next(self);
            match acc.as_mut() {
                Some(node) => node.children.extend(rhs),
                None => acc = Some(Self::binary(symbol, &src, first.clone(), rhs)),
            }
        }
        acc.or(first)
    }

    fn or(&mut self) -> Option<ExprTree> {
        self.nary("∨", Self::and)
    }

    fn and(&mut self) -> Option<ExprTree> {
        self.nary("∧", Self::relation)
    }

    fn relation(&mut self) -> Option<ExprTree> {
        let first = self.additive();
        let mut chain: Vec<(String, Option<String>, Option<ExprTree>)> = Vec::new();
        while let Some((label, src)) = self.peek_op() {
            if !is_relation(label) {
                break;
            }
            let (label, src) = (label.to_string(), src.clone());
            self.pos += 1;
            chain.push((label, src, self.additive()));
        }
        if chain.is_empty() {
            return first;
        }
        if chain.iter().all(|(l, ..)| op_name(l) == op_name(&chain[0].0)) {
            let (label, src) = (chain[0].0.clone(), chain[0].1.clone());
            let children = first.into_iter().chain(chain.into_iter().filter_map(|c| c.2)).collect();
            return Some(with_src(op(op_name(&label), children), &src));
        }
        // mixed chain: left-nested, so no operand is duplicated
        let mut acc = first;
        for (label, src, rhs) in chain {
            acc = Some(Self::binary(&label, &src, acc, rhs));
        }
        acc
    }

    fn additive(&mut self) -> Option<ExprTree> {
        let mut acc = match self.peek_op() {
            Some((l, src)) if matches!(l, "−" | "+" | "±" | "∓") => {
                let (l, src) = (l.to_string(), src.clone());
                self.pos += 1;
                let x = self.multiplicative();
                if l == "+" {
                    x
                } else {
                    Some(Self::binary(&l, &src, None, x))
                }
            }
            _ => self.multiplicative(),
        };
        let mut open_nary: Option<String> = None;
        while let Some((label, src)) = self.peek_op() {
            if !ADDITIVE.contains(&label) {
                break;
            }
            let (label, src) = (label.to_string(), src.clone());
            self.pos += 1;
            let rhs = self.multiplicative();
            let nary = matches!(label.as_str(), "+" | "∪" | "∩");
            match acc.as_mut() {
                Some(node) if nary && open_nary.as_deref() == Some(label.as_str()) => node.children.extend(rhs),
                _ => {
                    acc = Some(Self::binary(&label, &src, acc, rhs));
                    open_nary = nary.then_some(label);
                }
            }
        }
        acc
    }

    fn multiplicative(&mut self) -> Option<ExprTree> {
        let mut acc = self.unary();
        let mut open_times = false;
        loop {
            let (label, src) = match self.peek() {
                Some(Unit::Op { label, src }) if MULTIPLICATIVE.contains(&label.as_str()) => {
                    let r = (label.clone(), src.clone());
                    self.pos += 1;
                    r
                }
                Some(u) if u.starts_operand() && acc.is_some() => ("\u{2062}".to_string(), None),
                _ => break,
            };
            let rhs = self.unary();
            if rhs.is_none() && label == "\u{2062}" {
                break;
            }
            let times = op_name(&label) == "times";
            match acc.as_mut() {
                Some(node) if times && open_times => node.children.extend(rhs),
                _ => {
                    acc = Some(Self::binary(&label, &src, acc, rhs));
                    open_times = times;
                }
            }
        }
        acc
    }

    fn unary(&mut self) -> Option<ExprTree> {
        match self.peek()? {
            Unit::Op { label, src } if matches!(label.as_str(), "¬" | "−") => {
                let (label, src) = (label.clone(), src.clone());
                self.pos += 1;
                let x = self.unary();
                Some(Self::binary(&label, &src, None, x))
            }
            Unit::Big { head, bounds, src } => {
                let (head, mut children, src) = (*head, bounds.clone(), src.clone());
                self.pos += 1;
                children.extend(self.multiplicative());
                Some(with_src(op(head, children), &src))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Option<ExprTree> {
        let mut x = self.application()?;
        while let Some((label, src)) = self.peek_op() {
            if label != "!" {
                break;
            }
            let src = src.clone();
            self.pos += 1;
            x = Self::binary("!", &src, Some(x), None);
        }
        Some(x)
    }

    fn application(&mut self) -> Option<ExprTree> {
        let unit = self.peek()?.clone();
        match unit {
            Unit::Term { c, applies } => {
                self.pos += 1;
                if !applies {
                    return Some(c);
                }
                match self.peek() {
                    Some(Unit::Fenced { open, inner, .. }) if open == "(" => {
                        let args = inner
                            .split(|u| u.is_op(","))
                            .map(parse_seq)
                            .collect();
                        self.pos += 1;
                        Some(apply(c, args))
                    }
                    Some(Unit::Term { .. }) | Some(Unit::Fenced { .. }) => {
                        let arg = self.application();
                        Some(apply(c, arg.into_iter().collect()))
                    }
                    _ => Some(c),
                }
            }
            Unit::Fenced { open, close, inner, src } => {
                self.pos += 1;
                Some(fenced(&open, &close, &inner, &src))
            }
            Unit::Op { label, src } if !is_known_op(&label) => {
                self.pos += 1;
                Some(with_src(ExprTree::leaf(label).with_attr("kind", "ci"), &src))
            }
            _ => None,
        }
    }
}

fn fenced(open: &str, close: &str, inner: &[Unit], src: &Option<String>) -> ExprTree {
    let parts: Vec<ExprTree> = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(|u| u.is_op(",")).map(parse_seq).collect()
    };
    let single = || parts.first().cloned().unwrap_or_else(empty);
    let out = match (open, close, parts.len()) {
        ("|", "|", 1) => op("abs", parts.clone()),
        ("‖", "‖", 1) => op("norm", parts.clone()),
        ("⌊", "⌋", 1) => op("floor", parts.clone()),
        ("⌈", "⌉", 1) => op("ceiling", parts.clone()),
        ("{", "}", _) => container("set", parts.clone()),
        ("⟨", "⟩", _) => container("angle", parts.clone()),
        ("[" | "(", "]" | ")", 2) if open == "[" || close == "]" => {
            let closure = match (open, close) {
                ("[", "]") => "closed",
                ("[", _) => "closed-open",
                (_, "]") => "open-closed",
                _ => "open",
            };
            container("interval", parts.clone()).with_attr("closure", closure)
        }
        (_, _, 1) => return single(),
        _ => container("list", parts.clone()),
    };
    with_src(out, src)
}
