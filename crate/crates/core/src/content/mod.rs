//! Presentation tree to content (operator) tree.
//!
//! Content trees are head-folded: an internal node's label is the operator
//! or function and its children are the arguments, so `f(x+y)` becomes
//! `f(plus(x, y))`. Node kinds:
//!
//! * leaves: `ci`, `cn`, `csymbol` (dictionary-bound), `empty`
//! * internal: `op` (MathML operator element), `csymbol`, `ci` (applied
//!   identifier), `container` (interval, set, list, piecewise, ...)
//!
//! Every content node derived from a presentation node carries that node's
//! preorder index in the `src` attribute.

mod build;
mod rules;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::latex::MacroRegistry;
use crate::semantics::{Lexicon, Role, SemanticAnnotation};
use crate::tree::{ExprTree, NodeId};

pub use rules::{
    apply_power_rule, apply_special_heads, apply_subscript_rule, detect_einstein,
    disambiguate_invisible, INVISIBLE_APPLY, INVISIBLE_TIMES,
};

/// Attribute holding the presentation preorder index of a content node.
pub const SRC: &str = "src";
/// Root attribute for constraints such as `\pmod`.
pub const CONSTRAINT: &str = "constraint";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContentError {
    #[error("`{lexeme}` has conflicting roles and every refinement rule is off")]
    AmbiguityUnresolved { lexeme: String },
}

/// The four refinement rules. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefinementConfig {
    pub power_rule: bool,
    pub subscript_rule: bool,
    pub function_apply_rule: bool,
    pub einstein_detection: bool,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            power_rule: true,
            subscript_rule: true,
            function_apply_rule: true,
            einstein_detection: true,
        }
    }
}

impl RefinementConfig {
    pub fn none() -> Self {
        RefinementConfig {
            power_rule: false,
            subscript_rule: false,
            function_apply_rule: false,
            einstein_detection: false,
        }
    }

    /// `all`, `none`, or a comma list of `power`, `subscript`, `apply`,
    /// `einstein`.
    pub fn parse(flags: &str) -> Result<Self, String> {
        match flags.trim() {
            "all" => return Ok(Self::default()),
            "none" | "" => return Ok(Self::none()),
            _ => {}
        }
        let mut cfg = Self::none();
        for f in flags.split(',').map(str::trim) {
            match f {
                "power" => cfg.power_rule = true,
                "subscript" => cfg.subscript_rule = true,
                "apply" => cfg.function_apply_rule = true,
                "einstein" => cfg.einstein_detection = true,
                other => return Err(format!("unknown refinement `{other}`")),
            }
        }
        Ok(cfg)
    }

    pub fn any(&self) -> bool {
        self.power_rule || self.subscript_rule || self.function_apply_rule || self.einstein_detection
    }
}

/// What is known about one presentation node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeInfo {
    pub annotation: Option<SemanticAnnotation>,
    /// Candidate roles; more than one means the node is ambiguous.
    pub roles: Vec<Role>,
}

impl NodeInfo {
    /// Role used when nothing else decides: identifier wins a conflict,
    /// otherwise the first candidate.
    pub fn resolved_role(&self) -> Role {
        match self.roles.as_slice() {
            [] => Role::Identifier,
            [only] => *only,
            many if many.contains(&Role::Identifier) => Role::Identifier,
            many => many[0],
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.roles.len() > 1
    }
}

/// Per-node annotations keyed by presentation preorder index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Annotations {
    nodes: BTreeMap<NodeId, NodeInfo>,
}

/// Spelling of a presentation leaf used for dictionary lookups.
pub fn lexeme_of(leaf: &ExprTree) -> &str {
    leaf.attr("tex").unwrap_or(&leaf.label)
}

impl Annotations {
    pub fn new() -> Self {
        Self::default()
    }

    /// Context-free annotations: every leaf and macro row found in the
    /// lexicon gets its first reading and the set of all reading roles.
    pub fn from_lexicon(p: &ExprTree, lexicon: &Lexicon) -> Self {
        let mut out = Annotations::new();
        for (id, node) in p.preorder().enumerate() {
            let key = match node.attr("macro") {
                Some(m) => m,
                None if node.is_leaf() && !node.is_row() => lexeme_of(node),
                None => continue,
            };
            let readings = lexicon.lookup(key);
            if readings.is_empty() {
                continue;
            }
            let mut roles = Vec::new();
            for r in readings {
                if !roles.contains(&r.role) {
                    roles.push(r.role);
                }
            }
            out.nodes.insert(
                id,
                NodeInfo { annotation: Some(readings[0].annotation.clone()), roles },
            );
        }
        out
    }

    pub fn get(&self, id: NodeId) -> Option<&NodeInfo> {
        self.nodes.get(&id)
    }

    pub fn insert(&mut self, id: NodeId, info: NodeInfo) {
        self.nodes.insert(id, info);
    }

    /// Overrides a node with one decided reading.
    pub fn set(&mut self, id: NodeId, annotation: Option<SemanticAnnotation>, role: Role) {
        self.nodes.insert(id, NodeInfo { annotation, roles: vec![role] });
    }

    pub fn role_of(&self, id: NodeId) -> Role {
        self.get(id).map(NodeInfo::resolved_role).unwrap_or(Role::Identifier)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &NodeInfo)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Converts presentation trees with a fixed macro registry.
#[derive(Debug, Clone)]
pub struct Contentizer {
    pub registry: MacroRegistry,
    pub cfg: RefinementConfig,
}

impl Contentizer {
    pub fn new(registry: MacroRegistry, cfg: RefinementConfig) -> Self {
        Contentizer { registry, cfg }
    }

    pub fn contentize(&self, p: &ExprTree, ann: &Annotations) -> Result<ExprTree, ContentError> {
        contentize_with(p, ann, self.cfg, &self.registry)
    }
}

/// [`contentize_with`] using the standard macro registry.
pub fn contentize(p: &ExprTree, ann: &Annotations, cfg: RefinementConfig) -> Result<ExprTree, ContentError> {
    contentize_with(p, ann, cfg, &MacroRegistry::standard())
}

pub fn contentize_with(
    p: &ExprTree,
    ann: &Annotations,
    cfg: RefinementConfig,
    registry: &MacroRegistry,
) -> Result<ExprTree, ContentError> {
    if !cfg.any() {
        if let Some((id, _)) = ann.iter().find(|(_, info)| info.is_ambiguous()) {
            let lexeme = p.get(id).map(|n| lexeme_of(n).to_string()).unwrap_or_default();
            return Err(ContentError::AmbiguityUnresolved { lexeme });
        }
    }
    let einstein = if cfg.einstein_detection {
        detect_einstein(p)
    } else {
        Default::default()
    };
    let mut t = build::build(p, ann, cfg, registry, &einstein);
    t = apply_special_heads(&t);
    if cfg.power_rule {
        t = apply_power_rule(&t);
    }
    if cfg.subscript_rule {
        t = apply_subscript_rule(&t);
    }
    t.strip_attrs(&[rules::EINSTEIN, rules::TEXTMODE]);
    Ok(t)
}

#[cfg(test)]
mod tests;
