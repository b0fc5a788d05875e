//! Token stream to presentation tree.
//!
//! Leaves carry a `kind` attribute (`mi`, `mn`, `mo`, `mtext`) and, when
//! they came from a command, the command spelling in `tex`. Structural
//! nodes are `Row`, `Fraction`, `Script`, `Sqrt`, `Root`, `Tag` and
//! `Table`/`TableRow`/`Cell`.

use super::registry::{ArgKind, MacroRegistry, SLOT_KIND};
use super::symbols::{self, SymbolClass};
use super::token::{tokenize, Token, TokenKind};
use super::LatexError;
use crate::tree::ExprTree;

/// Parses LaTeX math source against `registry`.
pub fn parse_latex(src: &str, registry: &MacroRegistry) -> Result<ExprTree, LatexError> {
    parse(&tokenize(src)?, registry)
}

pub fn parse(tokens: &[Token], registry: &MacroRegistry) -> Result<ExprTree, LatexError> {
    Parser::new(tokens, registry, false).root()
}

/// Parses a macro template in which `#k` marks argument slots.
pub(crate) fn parse_template(src: &str) -> Result<ExprTree, LatexError> {
    let mut replaced = String::with_capacity(src.len() + 8);
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, chars.peek()) {
            ('#', Some(d)) if d.is_ascii_digit() => {
                replaced.push_str(r"\slot{");
                replaced.push(*d);
                replaced.push('}');
                chars.next();
            }
            _ => replaced.push(c),
        }
    }
    let tokens = tokenize(&replaced)?;
    let empty = MacroRegistry::new();
    Parser::new(&tokens, &empty, true).root()
}

pub(crate) fn mi(label: impl Into<String>) -> ExprTree {
    ExprTree::leaf(label).with_attr("kind", "mi")
}

pub(crate) fn mn(label: impl Into<String>) -> ExprTree {
    ExprTree::leaf(label).with_attr("kind", "mn")
}

pub(crate) fn mo(label: impl Into<String>) -> ExprTree {
    ExprTree::leaf(label).with_attr("kind", "mo")
}

fn group_tree(mut items: Vec<ExprTree>) -> ExprTree {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        ExprTree::row(items)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Stop {
    End,
    Group,
    Bracket,
    Cell,
}

struct Parser<'a> {
    toks: Vec<&'a Token>,
    pos: usize,
    registry: &'a MacroRegistry,
    slots: bool,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token], registry: &'a MacroRegistry, slots: bool) -> Self {
        let toks = tokens
            .iter()
            .filter(|t| t.kind != TokenKind::Whitespace)
            .collect();
        Parser { toks, pos: 0, registry, slots }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.peek()?;
        self.pos += 1;
        Some(t)
    }

    fn root(mut self) -> Result<ExprTree, LatexError> {
        let items = self.sequence(Stop::End)?;
        if let Some(t) = self.peek() {
            return Err(LatexError::Unexpected { lexeme: t.lexeme.clone(), pos: t.position });
        }
        Ok(group_tree(items))
    }

    fn at_stop(&self, stop: Stop) -> bool {
        let Some(t) = self.peek() else { return true };
        match stop {
            Stop::End => false,
            Stop::Group => t.kind == TokenKind::GroupClose,
            Stop::Bracket => t.is(TokenKind::CloseFence, "]"),
            Stop::Cell => {
                t.is(TokenKind::Operator, "&") || t.is(TokenKind::Command, r"\\") || t.is(TokenKind::Command, r"\end")
            }
        }
    }

    fn sequence(&mut self, stop: Stop) -> Result<Vec<ExprTree>, LatexError> {
        let mut items = Vec::new();
        while !self.at_stop(stop) {
            if let Some(item) = self.scripted()? {
                items.push(item);
            }
        }
        Ok(items)
    }

    /// An atom followed by any sub/superscripts and primes.
    fn scripted(&mut self) -> Result<Option<ExprTree>, LatexError> {
        let t = self.peek().expect("caller checked");
        let base = if is_script_start(t) {
            ExprTree::row(vec![])
        } else {
            match self.atom()? {
                Some(b) => b,
                None => return Ok(None),
            }
        };
        let mut sub: Option<ExprTree> = None;
        let mut sup: Option<ExprTree> = None;
        let mut primed = false;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::SubscriptMarker => {
                    self.next();
                    if sub.is_some() {
                        return Err(LatexError::DoubleScript { pos: t.position });
                    }
                    sub = Some(self.argument("_", t.position)?);
                }
                TokenKind::SuperscriptMarker => {
                    self.next();
                    let arg = self.argument("^", t.position)?;
                    sup = match sup {
                        None => Some(arg),
                        Some(prime) if primed => {
                            primed = false;
                            Some(ExprTree::row(vec![prime, arg]))
                        }
                        Some(_) => return Err(LatexError::DoubleScript { pos: t.position }),
                    };
                }
                TokenKind::Operator if t.lexeme == "'" => {
                    if sup.is_some() {
                        return Err(LatexError::DoubleScript { pos: t.position });
                    }
                    let mut n = 0;
                    while self.peek().is_some_and(|t| t.is(TokenKind::Operator, "'")) {
                        self.next();
                        n += 1;
                    }
                    sup = Some(mo("′".repeat(n)).with_attr("tex", "'".repeat(n)));
                    primed = true;
                }
                _ => break,
            }
        }
        let script = match (sub, sup) {
            (None, None) => return Ok(Some(base)),
            (Some(b), None) => ExprTree::node("Script", vec![base, b]).with_attr("form", "sub"),
            (None, Some(p)) => ExprTree::node("Script", vec![base, p]).with_attr("form", "sup"),
            (Some(b), Some(p)) => {
                ExprTree::node("Script", vec![base, b, p]).with_attr("form", "subsup")
            }
        };
        Ok(Some(script))
    }

    /// A single argument: a braced group or one token's worth of atom.
    /// Number arguments take one digit, as in TeX.
    fn argument(&mut self, name: &str, pos: usize) -> Result<ExprTree, LatexError> {
        let arity = || LatexError::Arity { name: name.to_string(), pos };
        let t = self.peek().ok_or_else(arity)?;
        match t.kind {
            TokenKind::GroupOpen => self.group(),
            TokenKind::GroupClose | TokenKind::SubscriptMarker | TokenKind::SuperscriptMarker => {
                Err(arity())
            }
            TokenKind::Number => {
                self.next();
                Ok(mn(t.lexeme.clone()))
            }
            _ => self.atom()?.ok_or_else(arity),
        }
    }

    fn group(&mut self) -> Result<ExprTree, LatexError> {
        let open = self.next().expect("group start");
        debug_assert_eq!(open.kind, TokenKind::GroupOpen);
        let items = self.sequence(Stop::Group)?;
        match self.next() {
            Some(t) if t.kind == TokenKind::GroupClose => Ok(group_tree(items)),
            _ => Err(LatexError::UnbalancedGroup { pos: open.position }),
        }
    }

    /// Parses one atom. `None` means the tokens carried no content
    /// (spacing, display-only commands, labels, stray alignment marks).
    fn atom(&mut self) -> Result<Option<ExprTree>, LatexError> {
        let t = self.next().expect("caller checked");
        let leaf = match t.kind {
            TokenKind::Identifier => mi(t.lexeme.clone()),
            TokenKind::Number => {
                let mut digits = t.lexeme.clone();
                while let Some(n) = self.peek() {
                    if n.kind == TokenKind::Number {
                        digits.push_str(&n.lexeme);
                        self.next();
                    } else if n.lexeme == "."
                        && !digits.contains('.')
                        && self.toks.get(self.pos + 1).is_some_and(|d| d.kind == TokenKind::Number)
                    {
                        digits.push('.');
                        self.next();
                    } else {
                        break;
                    }
                }
                mn(digits)
            }
            TokenKind::Operator if t.lexeme == "&" => return Ok(None),
            TokenKind::Operator if t.lexeme == "-" => mo("−").with_attr("tex", "-"),
            TokenKind::Operator
            | TokenKind::Relation
            | TokenKind::OpenFence
            | TokenKind::CloseFence => mo(t.lexeme.clone()),
            TokenKind::GroupOpen => {
                self.pos -= 1;
                return self.group().map(Some);
            }
            TokenKind::Command => return self.command(t),
            TokenKind::GroupClose
            | TokenKind::Text
            | TokenKind::SubscriptMarker
            | TokenKind::SuperscriptMarker
            | TokenKind::Whitespace => {
                return Err(LatexError::Unexpected { lexeme: t.lexeme.clone(), pos: t.position })
            }
        };
        Ok(Some(leaf))
    }

    /// Raw text of a text-argument command, as split off by the tokenizer.
    fn text_arg(&mut self, cmd: &Token) -> Result<String, LatexError> {
        let arity = || LatexError::Arity { name: cmd.lexeme.clone(), pos: cmd.position };
        if !self.peek().is_some_and(|t| t.kind == TokenKind::GroupOpen) {
            return Err(arity());
        }
        self.next();
        let mut text = String::new();
        if let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Text) {
            text = t.lexeme.clone();
            self.next();
        }
        match self.next() {
            Some(t) if t.kind == TokenKind::GroupClose => Ok(text),
            _ => Err(arity()),
        }
    }

    fn command(&mut self, t: &'a Token) -> Result<Option<ExprTree>, LatexError> {
        let cmd = t.lexeme.as_str();
        let pos = t.position;

        if symbols::is_spacing(cmd) || cmd == r"\\" {
            return Ok(None);
        }
        if symbols::is_display_only(cmd) {
            if matches!(cmd, r"\left" | r"\right" | r"\middle")
                && self.peek().is_some_and(|n| n.is(TokenKind::Operator, "."))
            {
                self.next();
            }
            return Ok(None);
        }
        if let Some((label, class)) = symbols::symbol(cmd) {
            let leaf = match class {
                SymbolClass::Ident => mi(label),
                _ => mo(label),
            };
            return Ok(Some(leaf.with_attr("tex", cmd)));
        }
        if let Some(name) = symbols::operator_name(cmd) {
            return Ok(Some(mi(name).with_attr("tex", cmd)));
        }
        if let Some(modern) = symbols::font_switch(cmd) {
            return self.font_switch(modern);
        }
        if let Some(variant) = symbols::font_variant(cmd) {
            let arg = self.argument(cmd, pos)?;
            return Ok(Some(arg.with_attr("mathvariant", variant).with_attr("font", cmd)));
        }

        let node = match cmd {
            r"\slot" if self.slots => {
                let text = self.argument(cmd, pos)?;
                ExprTree::leaf(format!("#{}", text.label)).with_attr("kind", SLOT_KIND)
            }
            r"\frac" | r"\dfrac" | r"\tfrac" => {
                let num = self.argument(cmd, pos)?;
                let den = self.argument(cmd, pos)?;
                ExprTree::node("Fraction", vec![num, den])
            }
            r"\sqrt" => {
                let index = self.bracket()?;
                let radicand = self.argument(cmd, pos)?;
                match index {
                    Some(n) => ExprTree::node("Root", vec![radicand, n]),
                    None => ExprTree::node("Sqrt", vec![radicand]),
                }
            }
            r"\tag" => {
                let arg = self.argument(cmd, pos)?;
                ExprTree::node("Tag", vec![arg])
            }
            r"\label" => {
                self.text_arg(t)?;
                return Ok(None);
            }
            r"\mathrm" | r"\operatorname" => {
                let text = self.text_arg(t)?;
                mi(text.trim()).with_attr("mathvariant", "normal").with_attr("font", cmd)
            }
            r"\begin" => self.environment(t)?,
            r"\end" => {
                let name = self.text_arg(t).unwrap_or_default();
                return Err(LatexError::Environment { name, pos });
            }
            _ if symbols::is_text_command(cmd) => {
                let text = self.text_arg(t)?;
                ExprTree::leaf(text).with_attr("kind", "mtext").with_attr("font", cmd)
            }
            _ => return self.macro_call(t).map(Some),
        };
        Ok(Some(node))
    }

    /// Old-style `{\rm ...}`: the switch covers the rest of the group and
    /// is read as the corresponding `\math..` command.
    fn font_switch(&mut self, modern: &'static str) -> Result<Option<ExprTree>, LatexError> {
        let mut items = Vec::new();
        while !(self.at_stop(Stop::Group) || self.at_stop(Stop::Bracket) || self.at_stop(Stop::Cell)) {
            if let Some(item) = self.scripted()? {
                items.push(item);
            }
        }
        if items.is_empty() {
            return Ok(None);
        }
        let plain = items.iter().all(|n| n.is_leaf() && matches!(n.kind(), Some("mi" | "mn")) && n.attrs.len() == 1);
        if modern == r"\mathrm" {
            if plain {
                let text: String = items.iter().map(|n| n.label.as_str()).collect();
                return Ok(Some(mi(text).with_attr("mathvariant", "normal").with_attr("font", modern)));
            }
            return Ok(Some(group_tree(items)));
        }
        let variant = symbols::font_variant(modern).expect("switches map to font commands");
        Ok(Some(group_tree(items).with_attr("mathvariant", variant).with_attr("font", modern)))
    }

    /// Optional `[...]` argument.
    fn bracket(&mut self) -> Result<Option<ExprTree>, LatexError> {
        if !self.peek().is_some_and(|t| t.is(TokenKind::OpenFence, "[")) {
            return Ok(None);
        }
        let open = self.next().unwrap();
        let items = self.sequence(Stop::Bracket)?;
        match self.next() {
            Some(t) if t.is(TokenKind::CloseFence, "]") => Ok(Some(group_tree(items))),
            _ => Err(LatexError::Unexpected { lexeme: "[".into(), pos: open.position }),
        }
    }

    fn macro_call(&mut self, t: &'a Token) -> Result<ExprTree, LatexError> {
        let Some(def) = self.registry.get(&t.lexeme) else {
            return Err(LatexError::UnknownMacro { name: t.lexeme.clone(), pos: t.position });
        };
        let mut args = Vec::with_capacity(def.args.len());
        for kind in &def.args {
            let arg = match kind {
                ArgKind::Optional => self.bracket()?,
                ArgKind::Mandatory => Some(self.argument(&def.name, t.position)?),
                ArgKind::At => {
                    while self.peek().is_some_and(|n| n.is(TokenKind::Operator, "@")) {
                        self.next();
                    }
                    Some(self.argument(&def.name, t.position)?)
                }
            };
            args.push(arg);
        }
        Ok(def.instantiate(&args))
    }

    fn environment(&mut self, begin: &'a Token) -> Result<ExprTree, LatexError> {
        let name = self.text_arg(begin)?;
        let env_err = |pos| LatexError::Environment { name: name.clone(), pos };
        if !symbols::ENVIRONMENTS.contains(&name.as_str()) {
            return Err(env_err(begin.position));
        }
        let mut rows = Vec::new();
        let mut cells = Vec::new();
        loop {
            let items = self.sequence(Stop::Cell)?;
            cells.push(ExprTree::node("Cell", items));
            let Some(t) = self.next() else {
                return Err(env_err(begin.position));
            };
            match t.lexeme.as_str() {
                "&" => {}
                r"\\" => rows.push(ExprTree::node("TableRow", std::mem::take(&mut cells))),
                _ => {
                    let end = self.text_arg(t)?;
                    if end != name {
                        return Err(env_err(t.position));
                    }
                    let trailing_empty = cells.len() == 1 && cells[0].children.is_empty();
                    if !trailing_empty || rows.is_empty() {
                        rows.push(ExprTree::node("TableRow", cells));
                    }
                    break;
                }
            }
        }
        Ok(ExprTree::node("Table", rows).with_attr("env", name.clone()))
    }
}

fn is_script_start(t: &Token) -> bool {
    matches!(t.kind, TokenKind::SubscriptMarker | TokenKind::SuperscriptMarker)
        || t.is(TokenKind::Operator, "'")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> ExprTree {
        parse_latex(src, &MacroRegistry::standard()).unwrap()
    }

    fn labels(t: &ExprTree) -> Vec<&str> {
        t.preorder().map(|n| n.label.as_str()).collect()
    }

    #[test]
    fn font_switches() {
        assert_eq!(p(r"x_{\rm max}"), p(r"x_\mathrm{max}"));
        assert_eq!(p(r"{\bf v}"), p(r"\mathbf{v}"));
        assert_eq!(p(r"{\rm d}x").children.len(), 2);
    }

    #[test]
    fn riemann_hypothesis_has_eighteen_tokens() {
        let t = p(r"\zeta(s) = 0 \Rightarrow \Re s = \frac12 \lor \Im s = 0");
        assert_eq!(t.token_count(), 18);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.children[0].attr("tex"), Some(r"\zeta"));
    }

    #[test]
    fn scripts_and_primes() {
        let t = p("x^a_b");
        assert_eq!(t, p("x_b^a"));
        assert_eq!(t.attr("form"), Some("subsup"));
        assert_eq!(labels(&t), ["Script", "x", "b", "a"]);
        let f = p("f''(x)");
        assert_eq!(f.children[0].children[1].label, "′′");
        assert!(matches!(
            parse_latex("x_1_2", &MacroRegistry::new()),
            Err(LatexError::DoubleScript { .. })
        ));
    }

    #[test]
    fn digits_merge_but_script_arguments_take_one() {
        assert_eq!(labels(&p("12.5")), ["12.5"]);
        assert_eq!(labels(&p("x^23")), ["Row", "Script", "x", "2", "3"]);
    }

    #[test]
    fn errors() {
        let reg = MacroRegistry::standard();
        assert!(matches!(parse_latex(r"\nosuch x", &reg), Err(LatexError::UnknownMacro { .. })));
        assert!(matches!(parse_latex(r"\frac{1}", &reg), Err(LatexError::Arity { .. })));
        assert!(matches!(parse_latex(r"x^", &reg), Err(LatexError::Arity { .. })));
        assert!(matches!(
            parse_latex(r"\begin{cases} a \end{matrix}", &reg),
            Err(LatexError::Environment { .. })
        ));
    }

    #[test]
    fn display_markup_is_dropped() {
        assert_eq!(p(r"\left( x \right.\,"), p("(x"));
        assert_eq!(p(r"a \quad b"), p("ab"));
    }

    #[test]
    fn macro_expansion_keeps_arguments_recoverable() {
        let reg = MacroRegistry::standard();
        let t = p(r"\BesselJ{\nu}@{z}");
        assert_eq!(t.attr("macro"), Some(r"\BesselJ"));
        let args = reg.get(r"\BesselJ").unwrap().bind(&t).unwrap();
        assert_eq!(args[0].as_ref().unwrap().label, "ν");
        assert_eq!(args[1].as_ref().unwrap().label, "z");

        let q = p(r"\LegendreQ{n}@{x}");
        let args = reg.get(r"\LegendreQ").unwrap().bind(&q).unwrap();
        assert_eq!(args[0], None);
        let q = p(r"\LegendreQ[m]{n}@{x}");
        let args = reg.get(r"\LegendreQ").unwrap().bind(&q).unwrap();
        assert_eq!(args[0].as_ref().unwrap().label, "m");
    }

    #[test]
    fn environments_become_tables() {
        let t = p(r"\begin{pmatrix} a & b \\ c & d \\ \end{pmatrix}");
        assert_eq!(t.label, "Table");
        assert_eq!(t.children.len(), 2);
        assert_eq!(t.children[1].children.len(), 2);
    }

    #[test]
    fn empty_input_is_an_empty_row() {
        let t = p("  ");
        assert!(t.is_row() && t.children.is_empty());
    }
}
