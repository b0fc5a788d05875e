//! TeX in, parallel MathML out.

use thiserror::Error;

use crate::content::{contentize_with, Annotations, ContentError, RefinementConfig};
use crate::latex::{parse_latex, LatexError, MacroRegistry};
use crate::mathml::ParallelMarkup;
use crate::mlp::{context_annotations, ContextDocument, MlpConfig};
use crate::semantics::Lexicon;
use crate::tree::ExprTree;

pub const TEX_ENCODING: &str = "application/x-tex";

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("empty input")]
    Empty,
    #[error(transparent)]
    Latex(#[from] LatexError),
    #[error(transparent)]
    Content(#[from] ContentError),
}

#[derive(Debug, Clone)]
pub struct ConvertOptions {
    pub registry: MacroRegistry,
    pub lexicon: Lexicon,
    pub refine: RefinementConfig,
    /// Emit the content tree next to the presentation tree.
    pub content: bool,
    pub mlp: MlpConfig,
    /// Keep the source TeX as an annotation.
    pub tex_annotation: bool,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            registry: MacroRegistry::standard(),
            lexicon: Lexicon::bundled(),
            refine: RefinementConfig::default(),
            content: true,
            mlp: MlpConfig::default(),
            tex_annotation: true,
        }
    }
}

/// Parses, annotates (from `context` when given, else the lexicon alone),
/// contentizes and cross-links one formula.
pub fn convert(tex: &str, context: Option<&ContextDocument>, opts: &ConvertOptions) -> Result<ParallelMarkup, ConvertError> {
    if tex.trim().is_empty() {
        return Err(ConvertError::Empty);
    }
    let p = parse_latex(tex, &opts.registry)?;
    let content = if opts.content {
        let ann = match context {
            Some(doc) => context_annotations(&p, doc, &opts.registry, &opts.lexicon, &opts.mlp),
            None => Annotations::from_lexicon(&p, &opts.lexicon),
        };
        Some(contentize_with(&p, &ann, opts.refine, &opts.registry)?)
    } else {
        None
    };
    let mut pm = ParallelMarkup::build(&p, content.as_ref());
    if opts.tex_annotation {
        pm.annotations.push(
            ExprTree::node("annotation", vec![ExprTree::leaf(tex.trim()).with_attr("kind", "#text")])
                .with_attr("encoding", TEX_ENCODING),
        );
    }
    Ok(pm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathml::{emit, parse_mathml};

    #[test]
    fn zeta_is_annotated() {
        let pm = convert(r"\zeta(s)=0", None, &ConvertOptions::default()).unwrap();
        let xml = emit(&pm);
        assert!(xml.contains("Q187235"));
        assert!(xml.contains(r#"<annotation encoding="application/x-tex">\zeta(s)=0</annotation>"#));
        assert_eq!(parse_mathml(&xml).unwrap(), pm);
    }

    #[test]
    fn empty_and_presentation_only() {
        assert!(matches!(convert("  ", None, &ConvertOptions::default()), Err(ConvertError::Empty)));
        let opts = ConvertOptions { content: false, ..Default::default() };
        let pm = convert("x", None, &opts).unwrap();
        assert!(pm.content.is_none());
        assert!(matches!(convert("{x", None, &opts), Err(ConvertError::Latex(_))));
    }
}
