//! Presentation tree back to LaTeX. `parse(print(t)) == t` for trees the
//! parser produced.

use super::registry::{ArgKind, MacroRegistry, SLOT_KIND};
use crate::tree::ExprTree;

pub fn print(tree: &ExprTree, registry: &MacroRegistry) -> String {
    let p = Printer { registry };
    if tree.is_row() && tree.attrs.is_empty() {
        p.items(&tree.children)
    } else {
        p.node(tree)
    }
}

struct Printer<'a> {
    registry: &'a MacroRegistry,
}

impl Printer<'_> {
    fn items(&self, items: &[ExprTree]) -> String {
        items.iter().map(|c| self.node(c)).collect::<Vec<_>>().join(" ")
    }

    /// `{...}` around an argument; plain rows are unwrapped first.
    fn braced(&self, t: &ExprTree) -> String {
        if t.is_row() && t.attrs.is_empty() {
            format!("{{{}}}", self.items(&t.children))
        } else {
            format!("{{{}}}", self.node(t))
        }
    }

    fn node(&self, t: &ExprTree) -> String {
        if let Some(font) = t.attr("font") {
            if t.is_leaf() && !t.is_row() {
                let text_like = matches!(t.kind(), Some("mtext")) || matches!(font, r"\mathrm" | r"\operatorname");
                let body = if text_like { &t.label } else { t.attr("tex").unwrap_or(&t.label) };
                return format!("{font}{{{body}}}");
            }
            let mut inner = t.clone();
            inner.attrs.remove("font");
            inner.attrs.remove("mathvariant");
            return format!("{font}{}", self.braced(&inner));
        }
        if t.is_row() {
            if let Some(s) = self.macro_call(t) {
                return s;
            }
            return format!("{{{}}}", self.items(&t.children));
        }
        if t.is_leaf() {
            if t.kind() == Some(SLOT_KIND) {
                return t.label.clone();
            }
            return t.attr("tex").unwrap_or(&t.label).to_string();
        }
        match t.label.as_str() {
            "Fraction" => format!(r"\frac{}{}", self.braced(&t.children[0]), self.braced(&t.children[1])),
            "Sqrt" => format!(r"\sqrt{}", self.braced(&t.children[0])),
            "Root" => format!(r"\sqrt[{}]{}", self.node(&t.children[1]), self.braced(&t.children[0])),
            "Tag" => format!(r"\tag{}", self.braced(&t.children[0])),
            "Script" => self.script(t),
            "Table" => self.table(t),
            _ => {
                // foreign structure; print its leaves in order
                self.items(&t.children)
            }
        }
    }

    fn script(&self, t: &ExprTree) -> String {
        let base = &t.children[0];
        // a scripted base needs its own group or the scripts would collide
        let mut out = if (base.is_row() && base.attrs.is_empty()) || base.label == "Script" {
            self.braced(base)
        } else {
            self.node(base)
        };
        let form = t.attr("form").unwrap_or("sub");
        let (sub, sup) = match form {
            "sub" => (t.children.get(1), None),
            "sup" => (None, t.children.get(1)),
            _ => (t.children.get(1), t.children.get(2)),
        };
        if let Some(sub) = sub {
            out.push_str(&format!("_{}", self.braced(sub)));
        }
        if let Some(sup) = sup {
            out.push_str(&self.superscript(sup));
        }
        out
    }

    fn superscript(&self, sup: &ExprTree) -> String {
        let is_prime = |n: &ExprTree| n.attr("tex").is_some_and(|s| !s.is_empty() && s.chars().all(|c| c == '\''));
        if is_prime(sup) {
            return sup.attr("tex").unwrap().to_string();
        }
        if sup.is_row() && sup.attrs.is_empty() && sup.children.len() == 2 && is_prime(&sup.children[0]) {
            return format!("{}^{}", sup.children[0].attr("tex").unwrap(), self.braced(&sup.children[1]));
        }
        format!("^{}", self.braced(sup))
    }

    fn table(&self, t: &ExprTree) -> String {
        let env = t.attr("env").unwrap_or("matrix");
        let rows: Vec<String> = t
            .children
            .iter()
            .map(|row| {
                row.children
                    .iter()
                    .map(|cell| self.items(&cell.children))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        format!(r"\begin{{{env}}} {} \end{{{env}}}", rows.join(r" \\ "))
    }

    fn macro_call(&self, t: &ExprTree) -> Option<String> {
        let def = self.registry.def_of(t)?;
        let args = def.bind(t)?;
        let mut out = def.name.clone();
        for (kind, arg) in def.args.iter().zip(&args) {
            match (kind, arg) {
                (ArgKind::Optional, Some(a)) => out.push_str(&format!("[{}]", self.inline(a))),
                (ArgKind::Optional, None) => {}
                (ArgKind::Mandatory, Some(a)) => out.push_str(&self.braced(a)),
                (ArgKind::At, Some(a)) => out.push_str(&format!("@{}", self.braced(a))),
                (_, None) => return None,
            }
        }
        Some(out)
    }

    fn inline(&self, t: &ExprTree) -> String {
        if t.is_row() && t.attrs.is_empty() {
            self.items(&t.children)
        } else {
            self.node(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latex::parse_latex;

    fn fixed_point(src: &str) {
        let reg = MacroRegistry::standard();
        let t = parse_latex(src, &reg).unwrap();
        let printed = print(&t, &reg);
        let again = parse_latex(&printed, &reg).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(again, t, "{src} -> {printed}");
    }

    #[test]
    fn round_trips() {
        for src in [
            r"\zeta(s) = 0 \Rightarrow \Re s = \frac12 \lor \Im s = 0",
            "x^a_b",
            "f''(x) + f'^2",
            r"\sqrt[3]{x+1} - \sqrt{y}",
            r"\BesselJ{\nu}@{z} = \LegendreQ[m]{n}@{x} + \LegendreQ{n}@{x}",
            r"\commutator{a}{b} + \tensor{T}{i}{j} + \adjoint{A} + \degree{90}",
            r"\mathbf{ab} \cdot \mathbb{R} + \text{if } x_\text{max}",
            r"\operatorname{mod} \mathrm{d}x",
            r"f(x) = \begin{cases} 1 & x > 0 \\ 0 & \text{otherwise} \end{cases}",
            r"{a+b}^2 {}_1 x \tag{3}",
            r"a \pmod{n}",
        ] {
            fixed_point(src);
        }
    }
}
