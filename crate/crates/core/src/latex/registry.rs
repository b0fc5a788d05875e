//! Macro definitions: DLMF-style semantic macros and the special content
//! symbols (commutator, tensor, adjoint, ...) used by the gold standard.
//!
//! A macro expands to a presentation template with argument slots. The
//! expansion is kept as a [`ROW`] node tagged with the macro name so that
//! printers and the contentizer can recover the arguments by matching the
//! template again.

use std::collections::BTreeMap;
use std::path::Path;

use crate::semantics::SemanticAnnotation;
use crate::tree::{ExprTree, ROW};

use super::parser::parse_template;
use super::LatexError;

const SEMANTIC_MACROS: &str = include_str!("../../fixtures/semantic_macros.tsv");
const BUILTIN_MACROS: &str = include_str!("../../fixtures/macros.tsv");

pub(crate) const SLOT_KIND: &str = "slot";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    /// `{...}`
    Mandatory,
    /// `[...]`
    Optional,
    /// DLMF argument list `@{...}`
    At,
}

/// What a macro means once the content tree is built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacroSemantics {
    /// A content head bound to a content-dictionary symbol; the arguments
    /// become its children in slot order.
    Head { label: String, annotation: SemanticAnnotation },
    /// First argument applied to the remaining ones.
    Apply,
    /// Applies to the whole formula; stored as a root attribute.
    Constraint { label: String },
    /// Pure presentation rewrite.
    Rewrite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroDef {
    pub name: String,
    pub args: Vec<ArgKind>,
    pub template: ExprTree,
    /// Template used when optional arguments are absent.
    pub short_template: Option<ExprTree>,
    pub semantics: MacroSemantics,
}

impl MacroDef {
    pub fn new(
        name: &str,
        args: Vec<ArgKind>,
        template: &str,
        short_template: Option<&str>,
        semantics: MacroSemantics,
    ) -> Result<MacroDef, LatexError> {
        let def = MacroDef {
            name: name.to_string(),
            template: parse_template(template)?,
            short_template: short_template.map(parse_template).transpose()?,
            args,
            semantics,
        };
        let slots = def.args.len();
        for t in std::iter::once(&def.template).chain(&def.short_template) {
            for node in t.preorder().filter(|n| n.kind() == Some(SLOT_KIND)) {
                let k: usize = node.label[1..].parse().unwrap_or(0);
                if k == 0 || k > slots {
                    return Err(LatexError::Registry {
                        line: 0,
                        message: format!("{name}: template references slot #{k} of {slots}"),
                    });
                }
            }
        }
        Ok(def)
    }

    /// Count of mandatory arguments (braced and `@`-delimited).
    pub fn arity(&self) -> usize {
        self.args.iter().filter(|a| **a != ArgKind::Optional).count()
    }

    pub fn optional_args(&self) -> usize {
        self.args.len() - self.arity()
    }

    pub fn annotation(&self) -> Option<&SemanticAnnotation> {
        match &self.semantics {
            MacroSemantics::Head { annotation, .. } => Some(annotation),
            _ => None,
        }
    }

    /// Builds the tagged expansion row from parsed arguments.
    pub fn instantiate(&self, args: &[Option<ExprTree>]) -> ExprTree {
        let all_optional = args.iter().all(Option::is_some);
        let template = match (&self.short_template, all_optional) {
            (Some(short), false) => short,
            _ => &self.template,
        };
        let body = fill(template, args);
        let children = if template.is_row() && template.attrs.is_empty() {
            body.children
        } else {
            vec![body]
        };
        ExprTree::row(children).with_attr("macro", self.name.clone())
    }

    /// Recovers the arguments of an expansion produced by [`instantiate`].
    /// Absent optional arguments come back as `None`.
    ///
    /// [`instantiate`]: MacroDef::instantiate
    pub fn bind(&self, expansion: &ExprTree) -> Option<Vec<Option<ExprTree>>> {
        if expansion.attr("macro") != Some(self.name.as_str()) {
            return None;
        }
        let body = ExprTree::row(expansion.children.clone());
        let templates = std::iter::once(&self.template).chain(&self.short_template);
        for template in templates {
            let wrapped;
            let template = if template.is_row() && template.attrs.is_empty() {
                template
            } else {
                wrapped = ExprTree::row(vec![template.clone()]);
                &wrapped
            };
            let mut slots = vec![None; self.args.len()];
            if match_template(template, &body, &mut slots) {
                return Some(slots);
            }
        }
        None
    }
}

fn fill(template: &ExprTree, args: &[Option<ExprTree>]) -> ExprTree {
    if template.kind() == Some(SLOT_KIND) {
        let k: usize = template.label[1..].parse().expect("validated slot");
        return args[k - 1].clone().unwrap_or_else(|| ExprTree::row(vec![]));
    }
    ExprTree {
        label: template.label.clone(),
        attrs: template.attrs.clone(),
        children: template.children.iter().map(|c| fill(c, args)).collect(),
    }
}

fn match_template(t: &ExprTree, node: &ExprTree, slots: &mut [Option<ExprTree>]) -> bool {
    if t.kind() == Some(SLOT_KIND) {
        let k: usize = t.label[1..].parse().expect("validated slot");
        let slot = &mut slots[k - 1];
        return match slot {
            Some(prev) => prev == node,
            None => {
                *slot = Some(node.clone());
                true
            }
        };
    }
    // template attributes must be present; extra provenance on `node` is fine
    t.label == node.label
        && t.attrs.iter().all(|(k, v)| node.attrs.get(k) == Some(v))
        && t.children.len() == node.children.len()
        && t.children
            .iter()
            .zip(&node.children)
            .all(|(a, b)| match_template(a, b, slots))
}

/// Name-keyed macro table. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroRegistry {
    macros: BTreeMap<String, MacroDef>,
}

impl MacroRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builtin DLMF macros, helpers and the special content symbols.
    pub fn standard() -> Self {
        let reg = MacroRegistry::parse(BUILTIN_MACROS).expect("builtin macros are valid");
        register_table1_macros(reg).expect("no collisions with the semantic macros")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LatexError> {
        let src = std::fs::read_to_string(path).map_err(|e| LatexError::Registry {
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse(&src)
    }

    /// Reads the tab-separated record format
    /// `name args template short_template semantics cd symbol label`.
    pub fn parse(src: &str) -> Result<Self, LatexError> {
        let mut reg = MacroRegistry::new();
        reg.extend_from(src)?;
        Ok(reg)
    }

    pub fn extend_from(&mut self, src: &str) -> Result<(), LatexError> {
        for (idx, raw) in src.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |message: String| LatexError::Registry { line, message };
            let f: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if f.len() != 8 {
                return Err(err(format!("expected 8 fields, found {}", f.len())));
            }
            let args = if f[1] == "-" { "" } else { f[1] };
            let args = args
                .chars()
                .map(|c| match c {
                    'm' => Ok(ArgKind::Mandatory),
                    'o' => Ok(ArgKind::Optional),
                    'a' => Ok(ArgKind::At),
                    other => Err(err(format!("unknown argument kind `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let semantics = match f[4].split_once(':') {
                Some(("head", label)) => {
                    let annotation = SemanticAnnotation::new(f[5], f[6], f[7])
                        .map_err(|e| err(e.to_string()))?;
                    MacroSemantics::Head { label: label.to_string(), annotation }
                }
                Some(("constraint", label)) => MacroSemantics::Constraint { label: label.to_string() },
                None if f[4] == "apply" => MacroSemantics::Apply,
                None if f[4] == "rewrite" => MacroSemantics::Rewrite,
                _ => return Err(err(format!("unknown semantics `{}`", f[4]))),
            };
            let short = (f[3] != "-").then_some(f[3]);
            let def = MacroDef::new(f[0], args, f[2], short, semantics).map_err(|e| match e {
                LatexError::Registry { message, .. } => err(message),
                other => err(other.to_string()),
            })?;
            self.insert(def).map_err(|e| err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn insert(&mut self, def: MacroDef) -> Result<(), LatexError> {
        if self.macros.contains_key(&def.name) {
            return Err(LatexError::DuplicateMacro(def.name));
        }
        self.macros.insert(def.name.clone(), def);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MacroDef> {
        self.macros.get(name)
    }

    pub fn len(&self) -> usize {
        self.macros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.macros.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MacroDef> {
        self.macros.values()
    }

    /// Definition behind a tagged expansion row.
    pub fn def_of(&self, node: &ExprTree) -> Option<&MacroDef> {
        if node.label != ROW {
            return None;
        }
        self.get(node.attr("macro")?)
    }
}

/// Adds the six special content symbols: commutator, tensor, adjoint,
/// transformation, degree and contraction.
pub fn register_table1_macros(mut registry: MacroRegistry) -> Result<MacroRegistry, LatexError> {
    let table = MacroRegistry::parse(SEMANTIC_MACROS)?;
    for def in table.macros.into_values() {
        registry.insert(def)?;
    }
    Ok(registry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_six_macros_with_their_qids() {
        let reg = register_table1_macros(MacroRegistry::new()).unwrap();
        assert_eq!(reg.len(), 6);
        let qid = |n: &str| reg.get(n).unwrap().annotation().unwrap().symbol_id.clone();
        assert_eq!(qid(r"\commutator"), "Q2989763");
        assert_eq!(qid(r"\tensor"), "Q188524");
        assert_eq!(qid(r"\adjoint"), "Q2051983");
        assert_eq!(qid(r"\transformation"), "Q12202238");
        assert_eq!(qid(r"\degree"), "Q28390");
        assert_eq!(qid(r"\contraction"), "Q5165685");
    }

    #[test]
    fn registering_twice_collides() {
        let reg = register_table1_macros(MacroRegistry::new()).unwrap();
        assert!(matches!(
            register_table1_macros(reg),
            Err(LatexError::DuplicateMacro(_))
        ));
    }

    #[test]
    fn arity_counts() {
        let reg = MacroRegistry::standard();
        let q = reg.get(r"\LegendreQ").unwrap();
        assert_eq!((q.arity(), q.optional_args()), (2, 1));
        let j = reg.get(r"\JacobiP").unwrap();
        assert_eq!((j.arity(), j.optional_args()), (4, 0));
    }

    #[test]
    fn template_slots_are_checked() {
        let bad = MacroDef::new(r"\bad", vec![ArgKind::Mandatory], "#1+#2", None, MacroSemantics::Rewrite);
        assert!(matches!(bad, Err(LatexError::Registry { .. })));
    }

    #[test]
    fn registry_file_errors_carry_line_numbers() {
        let src = "# header\n\\x\tm\t#1\t-\tbogus\t-\t-\t-\n";
        match MacroRegistry::parse(src) {
            Err(LatexError::Registry { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bind_inverts_instantiate() {
        let reg = MacroRegistry::standard();
        let def = reg.get(r"\BesselJ").unwrap();
        let args = vec![
            Some(ExprTree::leaf("ν")),
            Some(ExprTree::row(vec![ExprTree::leaf("z"), ExprTree::leaf("+"), ExprTree::leaf("1")])),
        ];
        let row = def.instantiate(&args);
        assert_eq!(def.bind(&row), Some(args));
    }
}
