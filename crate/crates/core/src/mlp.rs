//! Identifier-definiens extraction from the text around a formula.
//!
//! Three phases: rank noun phrases near each identifier, keep the ones the
//! lexicon knows about, and turn the winners into contentizer annotations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::content::{lexeme_of, Annotations};
use crate::latex::{parse_latex, MacroRegistry};
use crate::mathml::dom::{self, XmlElement, XmlNode};
use crate::semantics::{Lexicon, Role, SemanticAnnotation};
use crate::tree::ExprTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MlpError {
    #[error("target formula {index} out of range ({len} formulae)")]
    TargetOutOfRange { index: usize, len: usize },
    #[error("formula {index}: position is not increasing or lies outside the text")]
    BadPosition { index: usize },
    #[error("unbalanced `$` in context text")]
    UnbalancedDollar,
    #[error("malformed XHTML: {0}")]
    Xhtml(String),
}

/// Prose with formulae cut out. Each formula is anchored at a byte offset
/// of `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDocument {
    pub text: String,
    pub formulae: Vec<(usize, String)>,
    pub target_index: usize,
}

impl ContextDocument {
    pub fn new(text: impl Into<String>, formulae: Vec<(usize, String)>, target_index: usize) -> Result<Self, MlpError> {
        let doc = ContextDocument { text: text.into(), formulae, target_index };
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), MlpError> {
        if self.target_index >= self.formulae.len() {
            return Err(MlpError::TargetOutOfRange { index: self.target_index, len: self.formulae.len() });
        }
        let mut last = None;
        for (index, (pos, _)) in self.formulae.iter().enumerate() {
            if *pos > self.text.len() || !self.text.is_char_boundary(*pos) || last.is_some_and(|l| l >= *pos) {
                return Err(MlpError::BadPosition { index });
            }
            last = Some(*pos);
        }
        Ok(())
    }

    pub fn target(&self) -> &str {
        &self.formulae[self.target_index].1
    }

    /// Plain text with `$…$` / `$$…$$` math. The target is the first
    /// formula spelled `target_tex`; if there is none it is appended.
    pub fn from_plain(src: &str, target_tex: &str) -> Result<Self, MlpError> {
        let mut text = String::new();
        let mut formulae = Vec::new();
        let mut rest = src;
        while let Some(open) = rest.find('$') {
            text.push_str(&rest[..open]);
            let delim = if rest[open..].starts_with("$$") { "$$" } else { "$" };
            let body_start = open + delim.len();
            let close = rest[body_start..].find(delim).ok_or(MlpError::UnbalancedDollar)?;
            push_formula(&mut text, &mut formulae, rest[body_start..body_start + close].trim());
            rest = &rest[body_start + close + delim.len()..];
        }
        text.push_str(rest);
        Self::with_target(text, formulae, target_tex)
    }

    /// XHTML where formulae are `<math>` elements. The TeX of a formula
    /// is taken from `alttext` or a TeX annotation, else its text content.
    pub fn from_xhtml(src: &str, target_tex: &str) -> Result<Self, MlpError> {
        let root = dom::parse_document(src).map_err(MlpError::Xhtml)?;
        let mut text = String::new();
        let mut formulae = Vec::new();
        flatten_xhtml(&root, &mut text, &mut formulae);
        Self::with_target(text, formulae, target_tex)
    }

    fn with_target(mut text: String, mut formulae: Vec<(usize, String)>, target_tex: &str) -> Result<Self, MlpError> {
        let target = target_tex.trim();
        let target_index = match formulae.iter().position(|(_, f)| f == target) {
            Some(i) => i,
            None => {
                push_formula(&mut text, &mut formulae, target);
                formulae.len() - 1
            }
        };
        ContextDocument::new(text, formulae, target_index)
    }
}

/// Formulae are replaced by one space so that anchors stay distinct.
fn push_formula(text: &mut String, formulae: &mut Vec<(usize, String)>, tex: &str) {
    formulae.push((text.len(), tex.to_string()));
    text.push(' ');
}

const BLOCKS: &[&str] = &["p", "div", "li", "br", "tr", "h1", "h2", "h3", "h4", "h5", "h6", "section", "title"];

fn flatten_xhtml(e: &XmlElement, text: &mut String, formulae: &mut Vec<(usize, String)>) {
    match e.name.as_str() {
        "script" | "style" => return,
        "math" => {
            let tex = e
                .attr("alttext")
                .map(str::to_string)
                .or_else(|| tex_annotation(e))
                .unwrap_or_else(|| {
                    let mut s = String::new();
                    e.deep_text(&mut s);
                    s
                });
            push_formula(text, formulae, tex.trim());
            return;
        }
        _ => {}
    }
    for c in &e.children {
        match c {
            XmlNode::Text(t) => text.push_str(t),
            XmlNode::Element(el) => flatten_xhtml(el, text, formulae),
        }
    }
    if BLOCKS.contains(&e.name.as_str()) {
        text.push_str("\n\n");
    }
}

fn tex_annotation(e: &XmlElement) -> Option<String> {
    e.elements().find_map(|c| {
        if c.name == "annotation" && c.attr("encoding").is_some_and(|enc| enc.contains("tex")) {
            Some(c.text())
        } else {
            tex_annotation(c)
        }
    })
}

/// Ranking parameters. Score is
/// `alpha·exp(−lambda_words·dw) + (1−alpha)·exp(−lambda_formulae·df)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpConfig {
    pub alpha: f64,
    pub lambda_words: f64,
    pub lambda_formulae: f64,
    /// Largest word distance between identifier and noun phrase.
    pub window: usize,
    /// Candidates below this score are not considered "highly ranked".
    pub threshold: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig { alpha: 0.75, lambda_words: 0.1, lambda_formulae: 0.5, window: 15, threshold: 0.5 }
    }
}

impl MlpConfig {
    pub fn score(&self, distance_words: usize, distance_formulae: usize) -> f64 {
        self.alpha * (-self.lambda_words * distance_words as f64).exp()
            + (1.0 - self.alpha) * (-self.lambda_formulae * distance_formulae as f64).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefiniensCandidate {
    pub identifier: String,
    pub definiens: String,
    pub score: f64,
    pub distance_words: usize,
    pub distance_formulae: usize,
}

/// Identifier tokens of a formula: TeX lexeme -> rendered label.
pub fn identifiers(formula: &ExprTree) -> BTreeMap<String, String> {
    formula
        .leaves()
        .into_iter()
        .filter(|n| n.kind() == Some("mi"))
        .map(|n| (lexeme_of(n).to_string(), n.label.clone()))
        .collect()
}

/// Simple tokens that are not identifiers and so may denote symbols:
/// operators, command-spelled letters and macro heads. Fences and
/// invisible operators are structure, not symbols.
pub fn identify_symbols(formula: &ExprTree) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for n in formula.preorder() {
        if let Some(m) = n.attr("macro") {
            out.insert(m.to_string());
            continue;
        }
        if !n.is_leaf() || n.is_row() {
            continue;
        }
        let command = n.attr("tex").is_some_and(|t| t.starts_with('\\'));
        let symbol = match n.kind() {
            Some("mo") => !matches!(n.label.as_str(), "(" | ")" | "[" | "]" | "{" | "}" | "|" | "," | "\u{2061}" | "\u{2062}"),
            Some("mi") => command && !is_greek_letter(&n.label),
            _ => false,
        };
        if symbol {
            out.insert(n.label.clone());
        }
    }
    out
}

/// Greek letters act as ordinary identifiers unless a lexicon says
/// otherwise; ζ, Γ and friends are covered there.
fn is_greek_letter(label: &str) -> bool {
    let mut chars = label.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if ('\u{391}'..='\u{3C9}').contains(&c) && c != 'ζ' && c != 'Γ')
}

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every", "its", "their", "our", "his", "her",
];
const CUES: &[&str] = &[
    "is", "are", "be", "being", "been", "was", "were", "denotes", "denote", "denoted", "represents", "represent",
    "represented", "called", "named", "means", "describes",
];
const STOPWORDS: &[&str] = &[
    "and", "or", "of", "for", "with", "by", "as", "in", "on", "at", "to", "from", "where", "let", "then", "we", "it",
    "which", "who", "whose", "if", "when", "not", "no", "so", "such", "than", "into", "over", "under", "between",
    "defined", "given", "maps", "map", "takes", "holds", "gives", "yields", "can", "may", "will", "has", "have",
    "here", "there", "also", "all", "both", "using", "via", "while", "thus", "hence", "above", "below", "satisfies",
];
const MAX_PHRASE: usize = 4;

#[derive(Debug)]
enum Token<'a> {
    Word(&'a str),
    Formula(usize),
}

/// Sentences of indexed tokens; indices run over the whole document.
fn tokenize<'a>(doc: &'a ContextDocument) -> Vec<Vec<(usize, Token<'a>)>> {
    let mut sentences = vec![Vec::new()];
    let mut index = 0;
    let mut anchors = doc.formulae.iter().enumerate().map(|(k, (pos, _))| (*pos, k)).peekable();
    let text = doc.text.as_str();
    let mut word_start = None;
    let mut newlines = 0;
    let mut push = |sentences: &mut Vec<Vec<(usize, Token<'a>)>>, t: Token<'a>| {
        sentences.last_mut().unwrap().push((index, t));
        index += 1;
    };
    let ends_sentence = |sentences: &mut Vec<Vec<(usize, Token<'a>)>>| {
        if !sentences.last().unwrap().is_empty() {
            sentences.push(Vec::new());
        }
    };
    for (i, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        let wordy = ch.is_alphanumeric() || (word_start.is_some() && matches!(ch, '\'' | '-'));
        if wordy {
            word_start.get_or_insert(i);
            newlines = 0;
            continue;
        }
        if let Some(s) = word_start.take() {
            let w = text[s..i].trim_end_matches(['\'', '-']);
            push(&mut sentences, Token::Word(w));
        }
        while anchors.peek().is_some_and(|(pos, _)| *pos <= i) {
            let (_, k) = anchors.next().unwrap();
            push(&mut sentences, Token::Formula(k));
        }
        match ch {
            '.' | '!' | '?' | ';' | ':' => ends_sentence(&mut sentences),
            '\n' => {
                newlines += 1;
                if newlines >= 2 {
                    ends_sentence(&mut sentences);
                }
            }
            c if !c.is_whitespace() => newlines = 0,
            _ => {}
        }
    }
    sentences
}

fn lower(w: &str) -> String {
    w.to_lowercase()
}

/// Noun phrases of one sentence as `(first index, last index, text)`.
fn noun_phrases(
    sentence: &[(usize, Token<'_>)],
    is_identifier: &dyn Fn(&str) -> bool,
    lexicon: Option<&Lexicon>,
) -> Vec<(usize, usize, String)> {
    let content = |pos: usize| match &sentence[pos].1 {
        Token::Word(w) => {
            let l = lower(w);
            w.chars().count() > 1
                && w.chars().any(char::is_alphabetic)
                && !is_identifier(w)
                && !DETERMINERS.contains(&l.as_str())
                && !CUES.contains(&l.as_str())
                && !STOPWORDS.contains(&l.as_str())
        }
        Token::Formula(_) => false,
    };
    let word = |pos: usize| match &sentence[pos].1 {
        Token::Word(w) => Some(*w),
        Token::Formula(_) => None,
    };
    // "the function describing …": verb forms end a phrase
    let participle = |pos: usize| word(pos).is_some_and(|w| w.len() > 4 && (w.ends_with("ing") || w.ends_with("ed")));
    let mut phrases: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let mut emit = |from: usize, to: usize| {
        let text = (from..=to).filter_map(word).collect::<Vec<_>>().join(" ");
        phrases.insert((sentence[from].0, sentence[to].0), text);
    };
    for pos in 0..sentence.len() {
        let trigger = match word(pos) {
            Some(w) => {
                let l = lower(w);
                DETERMINERS.contains(&l.as_str()) || CUES.contains(&l.as_str())
            }
            None => false,
        };
        let capitalized = pos > 0
            && content(pos)
            && word(pos).is_some_and(|w| w.chars().next().is_some_and(char::is_uppercase))
            && !(pos > 0 && content(pos - 1));
        let start = if trigger { pos + 1 } else if capitalized { pos } else { continue };
        let mut end = start;
        while end < sentence.len() && end - start < MAX_PHRASE && content(end) && !(end > start && participle(end)) {
            end += 1;
        }
        if end > start {
            emit(start, end - 1);
        }
    }
    // lexicon labels spelled out verbatim, e.g. "speed of light"
    if let Some(lex) = lexicon {
        let labels: BTreeSet<String> = lex.iter().map(|(_, r)| lower(&r.annotation.label)).collect();
        for label in labels {
            let parts: Vec<&str> = label.split_whitespace().collect();
            if parts.is_empty() || parts.len() > sentence.len() {
                continue;
            }
            for from in 0..=sentence.len() - parts.len() {
                let hit = parts
                    .iter()
                    .enumerate()
                    .all(|(k, p)| word(from + k).is_some_and(|w| lower(w) == *p));
                if hit {
                    emit(from, from + parts.len() - 1);
                }
            }
        }
    }
    phrases.into_iter().map(|((a, b), t)| (a, b, t)).collect()
}

/// Ranked identifier-definiens pairs for the target formula of `doc`.
///
/// An identifier occurs where the text spells it as a word, where a
/// formula containing it is anchored, and at the target itself. Each
/// (identifier, phrase) pair keeps its best-scoring occurrence.
pub fn extract_candidates(
    doc: &ContextDocument,
    registry: &MacroRegistry,
    lexicon: Option<&Lexicon>,
    cfg: &MlpConfig,
) -> Vec<DefiniensCandidate> {
    if doc.text.trim().is_empty() || doc.validate().is_err() {
        return Vec::new();
    }
    let Ok(target) = parse_latex(doc.target(), registry) else {
        return Vec::new();
    };
    let target_ids = identifiers(&target);
    let formula_ids: Vec<BTreeSet<String>> = doc
        .formulae
        .iter()
        .map(|(_, tex)| {
            parse_latex(tex, registry)
                .map(|t| identifiers(&t).into_keys().filter(|k| target_ids.contains_key(k)).collect())
                .unwrap_or_default()
        })
        .collect();
    let word_identifier = |w: &str| -> Option<&str> {
        if DETERMINERS.contains(&lower(w).as_str()) {
            return None;
        }
        target_ids.iter().find(|(lexeme, label)| *lexeme == w || *label == w).map(|(l, _)| l.as_str())
    };
    let is_identifier = |w: &str| word_identifier(w).is_some();

    let sentences = tokenize(doc);
    let target_pos = sentences
        .iter()
        .flatten()
        .find_map(|(i, t)| matches!(t, Token::Formula(k) if *k == doc.target_index).then_some(*i))
        .unwrap_or(0);
    let formula_positions: Vec<usize> = sentences
        .iter()
        .flatten()
        .filter_map(|(i, t)| matches!(t, Token::Formula(_)).then_some(*i))
        .collect();

    let mut best: BTreeMap<(String, String), DefiniensCandidate> = BTreeMap::new();
    for sentence in &sentences {
        let phrases = noun_phrases(sentence, &is_identifier, lexicon);
        if phrases.is_empty() {
            continue;
        }
        for (pos, tok) in sentence {
            let (found, df): (Vec<&str>, usize) = match tok {
                Token::Word(w) => match word_identifier(w) {
                    Some(l) => {
                        let (lo, hi) = if *pos < target_pos { (*pos, target_pos) } else { (target_pos, *pos) };
                        (vec![l], formula_positions.iter().filter(|&&f| f > lo && f < hi).count())
                    }
                    None => continue,
                },
                Token::Formula(k) => {
                    (formula_ids[*k].iter().map(String::as_str).collect(), k.abs_diff(doc.target_index))
                }
            };
            for ident in found {
                for (from, to, phrase) in &phrases {
                    let dw = if to < pos {
                        pos - to - 1
                    } else if from > pos {
                        from - pos - 1
                    } else {
                        continue;
                    };
                    if dw > cfg.window {
                        continue;
                    }
                    let cand = DefiniensCandidate {
                        identifier: ident.to_string(),
                        definiens: phrase.clone(),
                        score: cfg.score(dw, df),
                        distance_words: dw,
                        distance_formulae: df,
                    };
                    let key = (cand.identifier.clone(), cand.definiens.clone());
                    match best.get(&key) {
                        Some(old) if old.score >= cand.score => {}
                        _ => {
                            best.insert(key, cand);
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<DefiniensCandidate> = best.into_values().collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.identifier.cmp(&b.identifier))
            .then_with(|| a.definiens.cmp(&b.definiens))
    });
    out
}

/// The reading chosen for one identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Sense {
    /// `None` when no candidate survived the lexicon.
    pub definiens: Option<String>,
    pub role: Role,
    pub annotation: Option<SemanticAnnotation>,
    pub score: f64,
}

fn role_word(phrase: &str) -> Option<Role> {
    let head = lower(phrase.split_whitespace().last()?);
    let singular = head.strip_suffix('s').unwrap_or(&head).to_string();
    head.parse().ok().or_else(|| singular.parse().ok())
}

/// Lexicon match for a definiens: the reading labelled with it, preferring
/// one attached to the identifier itself, or a bare role word.
fn lexicon_match(identifier: &str, definiens: &str, lex: &Lexicon) -> Option<(Role, Option<SemanticAnnotation>)> {
    let mut labelled: Vec<(&str, &crate::semantics::Reading)> = lex.readings_labelled(definiens).collect();
    labelled.sort_by_key(|(lexeme, _)| *lexeme != identifier);
    if let Some((lexeme, r)) = labelled.first() {
        let ann = (*lexeme == identifier).then(|| r.annotation.clone());
        return Some((r.role, ann));
    }
    role_word(definiens).map(|role| (role, None))
}

/// Keeps, per identifier, the best candidate the lexicon vouches for.
/// Identifiers without a survivor default to the identifier role.
pub fn filter_with_lexicon(cands: &[DefiniensCandidate], lex: &Lexicon) -> BTreeMap<String, Sense> {
    let mut out: BTreeMap<String, Sense> = BTreeMap::new();
    let mut sorted: Vec<&DefiniensCandidate> = cands.iter().collect();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score));
    for c in sorted {
        let decided = out.get(&c.identifier).is_some_and(|s| s.definiens.is_some());
        if decided {
            continue;
        }
        let sense = match lexicon_match(&c.identifier, &c.definiens, lex) {
            Some((role, annotation)) => {
                Sense { definiens: Some(c.definiens.clone()), role, annotation, score: c.score }
            }
            None => Sense { definiens: None, role: Role::Identifier, annotation: None, score: 0.0 },
        };
        out.insert(c.identifier.clone(), sense);
    }
    out
}

/// Context-free lexicon annotations, overridden where the context decided
/// an identifier's reading.
pub fn annotations_for(p: &ExprTree, senses: &BTreeMap<String, Sense>, lex: &Lexicon) -> Annotations {
    let mut ann = Annotations::from_lexicon(p, lex);
    for (id, n) in p.preorder().enumerate() {
        if !n.is_leaf() || n.kind() != Some("mi") {
            continue;
        }
        let Some(sense) = senses.get(lexeme_of(n)).filter(|s| s.definiens.is_some()) else {
            continue;
        };
        let annotation = sense.annotation.clone().or_else(|| {
            lex.lookup(lexeme_of(n)).iter().find(|r| r.role == sense.role).map(|r| r.annotation.clone())
        });
        ann.set(id, annotation, sense.role);
    }
    ann
}

/// All three phases: extract, drop low-ranked pairs, filter, annotate.
pub fn context_annotations(
    p: &ExprTree,
    doc: &ContextDocument,
    registry: &MacroRegistry,
    lex: &Lexicon,
    cfg: &MlpConfig,
) -> Annotations {
    let cands: Vec<DefiniensCandidate> = extract_candidates(doc, registry, Some(lex), cfg)
        .into_iter()
        .filter(|c| c.score >= cfg.threshold)
        .collect();
    annotations_for(p, &filter_with_lexicon(&cands, lex), lex)
}
