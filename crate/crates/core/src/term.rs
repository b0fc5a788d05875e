//! Tiny term language: `label(child, child)`, quoted labels and `?var`
//! placeholders. Used for test fixtures and shortcut rule files.

use crate::tree::{ExprTree, TermError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Node(String, Vec<Term>),
    Var(String),
}

impl Term {
    /// Converts a variable-free term into a tree.
    pub fn into_tree(self) -> Option<ExprTree> {
        match self {
            Term::Var(_) => None,
            Term::Node(label, children) => {
                let children = children
                    .into_iter()
                    .map(Term::into_tree)
                    .collect::<Option<Vec<_>>>()?;
                Some(ExprTree::node(label, children))
            }
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Node(_, cs) => cs.iter().for_each(|c| c.vars(out)),
        }
    }
}

pub fn parse(src: &str) -> Result<Term, TermError> {
    let mut p = Parser { src, pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(TermError::Trailing(p.pos));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        match self.peek() {
            None => Err(TermError::Eof),
            Some('?') => {
                self.bump();
                let name = self.bare();
                if name.is_empty() {
                    return Err(self.unexpected());
                }
                Ok(Term::Var(name))
            }
            Some('"') => {
                let label = self.quoted()?;
                self.children(label)
            }
            Some(c) if c == '(' || c == ')' || c == ',' => Err(self.unexpected()),
            Some(_) => {
                let label = self.bare();
                self.children(label)
            }
        }
    }

    fn unexpected(&self) -> TermError {
        match self.peek() {
            Some(found) => TermError::Unexpected { pos: self.pos, found },
            None => TermError::Eof,
        }
    }

    fn bare(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '"' | '?'))
        {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    fn quoted(&mut self) -> Result<String, TermError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(TermError::Eof),
                Some('"') => return Ok(out),
                Some('\\') => out.push(self.bump().ok_or(TermError::Eof)?),
                Some(c) => out.push(c),
            }
        }
    }

    fn children(&mut self, label: String) -> Result<Term, TermError> {
        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.bump();
            loop {
                children.push(self.term()?);
                self.skip_ws();
                match self.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    Some(c) => {
                        return Err(TermError::Unexpected { pos: self.pos - c.len_utf8(), found: c })
                    }
                    None => return Err(TermError::Eof),
                }
            }
        }
        Ok(Term::Node(label, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_vars_and_nesting() {
        let t = parse("divide(?a, power(?b, minus(1)))").unwrap();
        let mut vars = Vec::new();
        t.vars(&mut vars);
        assert_eq!(vars, ["a", "b"]);
        assert!(t.into_tree().is_none());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("f(a,").is_err());
        assert!(parse("f(a) b").is_err());
        assert!(parse("?").is_err());
    }
}
