use super::symbols;
use super::token::{tokenize, Token, TokenKind};

/// Removes spacing commands, comments and display-only markup (`\left`,
/// `\big`, `\displaystyle`, ...). Everything else is left byte-for-byte.
/// Input that does not tokenize is returned unchanged.
pub fn strip_formatting(src: &str) -> String {
    let Ok(tokens) = tokenize(src) else {
        return src.to_string();
    };
    let mut kept: Vec<Token> = Vec::with_capacity(tokens.len());
    let mut iter = tokens.into_iter().peekable();
    while let Some(t) = iter.next() {
        if t.kind == TokenKind::Command && symbols::is_spacing(&t.lexeme) {
            continue;
        }
        if t.kind == TokenKind::Command && symbols::is_display_only(&t.lexeme) {
            if matches!(t.lexeme.as_str(), r"\left" | r"\right" | r"\middle") {
                // `\left.` is an invisible delimiter; drop it with its command
                while iter.peek().is_some_and(|n| n.kind == TokenKind::Whitespace) {
                    iter.next();
                }
                if iter.peek().is_some_and(|n| n.is(TokenKind::Operator, ".")) {
                    iter.next();
                }
            }
            continue;
        }
        if t.kind == TokenKind::Whitespace && t.lexeme.starts_with('%') {
            kept.push(Token::new(TokenKind::Whitespace, " ", t.position));
            continue;
        }
        kept.push(t);
    }

    let mut out = String::with_capacity(src.len());
    let mut prev: Option<&Token> = None;
    for t in &kept {
        if t.kind == TokenKind::Whitespace {
            if prev.is_some_and(|p| p.kind == TokenKind::Whitespace) {
                continue;
            }
            // normalise comment residue and runs to one blank
            if t.lexeme.chars().all(|c| c == ' ') || t.lexeme.contains('%') {
                out.push(' ');
            } else {
                out.push_str(&t.lexeme);
            }
        } else {
            let glued = prev.is_some_and(|p| {
                p.kind == TokenKind::Command
                    && p.lexeme[1..].starts_with(|c: char| c.is_ascii_alphabetic())
                    && t.lexeme.starts_with(|c: char| c.is_ascii_alphabetic())
            });
            if glued {
                out.push(' ');
            }
            out.push_str(&t.lexeme);
        }
        prev = Some(t);
    }
    out
}
