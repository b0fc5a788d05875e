//! Minimal element tree on top of quick-xml, plus the matching writer
//! helpers. Namespace prefixes are dropped; `xmlns` declarations ignored.

use quick_xml::escape::{escape, resolve_predefined_entity};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum XmlNode {
    Element(XmlElement),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct XmlElement {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<XmlNode>,
}

impl XmlElement {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &XmlElement> {
        self.children.iter().filter_map(|c| match c {
            XmlNode::Element(e) => Some(e),
            XmlNode::Text(_) => None,
        })
    }

    /// Concatenated character data of the direct children.
    pub fn text(&self) -> String {
        self.children
            .iter()
            .filter_map(|c| match c {
                XmlNode::Text(t) => Some(t.as_str()),
                XmlNode::Element(_) => None,
            })
            .collect()
    }

    /// All character data below this element, in document order.
    pub fn deep_text(&self, out: &mut String) {
        for c in &self.children {
            match c {
                XmlNode::Text(t) => out.push_str(t),
                XmlNode::Element(e) => e.deep_text(out),
            }
        }
    }
}

/// Entities commonly found in MathML and XHTML exports.
fn resolve_entity(name: &str) -> Option<&'static str> {
    resolve_predefined_entity(name).or(match name {
        "InvisibleTimes" | "it" => Some("\u{2062}"),
        "ApplyFunction" | "af" => Some("\u{2061}"),
        "InvisibleComma" | "ic" => Some("\u{2063}"),
        "nbsp" | "NonBreakingSpace" => Some("\u{a0}"),
        "thinsp" | "ThinSpace" => Some("\u{2009}"),
        "minus" => Some("−"),
        "times" => Some("×"),
        "sdot" => Some("⋅"),
        "prime" => Some("′"),
        "infin" => Some("∞"),
        "ndash" => Some("–"),
        "mdash" => Some("—"),
        "hellip" => Some("…"),
        _ => None,
    })
}

fn local(name: &[u8]) -> String {
    let s = String::from_utf8_lossy(name);
    match s.rsplit_once(':') {
        Some((_, l)) => l.to_string(),
        None => s.into_owned(),
    }
}

fn element(start: &BytesStart<'_>) -> Result<XmlElement, String> {
    let mut attrs = Vec::new();
    for a in start.attributes() {
        let a = a.map_err(|e| e.to_string())?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        if key == "xmlns" || key.starts_with("xmlns:") {
            continue;
        }
        let value = a.unescape_value_with(resolve_entity).map_err(|e| e.to_string())?;
        attrs.push((local(key.as_bytes()), value.into_owned()));
    }
    Ok(XmlElement { name: local(start.local_name().as_ref()), attrs, children: Vec::new() })
}

/// Parses a document and returns its root element.
pub(crate) fn parse_document(xml: &str) -> Result<XmlElement, String> {
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<XmlElement> = Vec::new();
    let mut root: Option<XmlElement> = None;
    loop {
        let event = reader.read_event().map_err(|e| format!("at byte {}: {e}", reader.error_position()))?;
        match event {
            Event::Start(s) => stack.push(element(&s)?),
            Event::Empty(s) => {
                let e = element(&s)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(e)),
                    None if root.is_none() => root = Some(e),
                    None => return Err("multiple root elements".into()),
                }
            }
            Event::End(_) => {
                let e = stack.pop().ok_or("unbalanced end tag")?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Element(e)),
                    None if root.is_none() => root = Some(e),
                    None => return Err("multiple root elements".into()),
                }
            }
            Event::Text(t) => {
                let text = t.unescape_with(resolve_entity).map_err(|e| e.to_string())?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(XmlNode::Text(text.into_owned())),
                    None if text.trim().is_empty() => {}
                    None => return Err("text outside the root element".into()),
                }
            }
            Event::CData(c) => {
                let text = String::from_utf8_lossy(&c.into_inner()).into_owned();
                if let Some(parent) = stack.last_mut() {
                    parent.children.push(XmlNode::Text(text));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed element <{}>", stack.last().unwrap().name));
    }
    root.ok_or_else(|| "empty document".to_string())
}

pub(crate) fn open_tag(out: &mut String, name: &str, attrs: &[(&str, &str)]) {
    out.push('<');
    out.push_str(name);
    for (k, v) in attrs {
        out.push(' ');
        out.push_str(k);
        out.push_str("=\"");
        out.push_str(&escape(*v));
        out.push('"');
    }
}

/// Writes `<name attrs>text</name>`.
pub(crate) fn text_element(out: &mut String, name: &str, attrs: &[(&str, &str)], text: &str) {
    open_tag(out, name, attrs);
    out.push('>');
    out.push_str(&escape(text));
    out.push_str("</");
    out.push_str(name);
    out.push('>');
}

pub(crate) fn empty_element(out: &mut String, name: &str, attrs: &[(&str, &str)]) {
    open_tag(out, name, attrs);
    out.push_str("/>");
}

pub(crate) fn is_xml_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}
