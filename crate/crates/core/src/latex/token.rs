use super::LatexError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Number,
    Operator,
    Relation,
    OpenFence,
    CloseFence,
    Command,
    Text,
    SubscriptMarker,
    SuperscriptMarker,
    GroupOpen,
    GroupClose,
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset into the source.
    pub position: usize,
}

impl Token {
    pub fn new(kind: TokenKind, lexeme: impl Into<String>, position: usize) -> Self {
        Token { kind, lexeme: lexeme.into(), position }
    }

    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

/// Commands whose braced argument is raw text rather than math.
pub(crate) const TEXT_ARG_COMMANDS: &[&str] = &[
    r"\text", r"\textrm", r"\textit", r"\textbf", r"\textsf", r"\texttt", r"\mbox",
    r"\operatorname", r"\mathrm", r"\label", r"\begin", r"\end",
];

/// Splits a math-mode LaTeX string into tokens.
///
/// Digits are single tokens, as in TeX; the parser merges adjacent digits
/// into numbers. Whitespace runs and `%` comments become `Whitespace`
/// tokens so that concatenating all lexemes gives back the input.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LatexError> {
    let mut out: Vec<Token> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut chars = src.char_indices().peekable();

    while let Some((pos, c)) = chars.next() {
        let kind = match c {
            '\\' => {
                let mut end = pos + 1;
                match chars.peek().copied() {
                    None => return Err(LatexError::IllegalCharacter { ch: '\\', pos }),
                    Some((_, n)) if n.is_ascii_alphabetic() => {
                        while let Some(&(i, n)) = chars.peek() {
                            if !n.is_ascii_alphabetic() {
                                break;
                            }
                            end = i + n.len_utf8();
                            chars.next();
                        }
                    }
                    Some((i, n)) => {
                        chars.next();
                        end = i + n.len_utf8();
                    }
                }
                let name = &src[pos..end];
                out.push(Token::new(TokenKind::Command, name, pos));
                if TEXT_ARG_COMMANDS.contains(&name) {
                    text_argument(src, &mut chars, &mut out)?;
                }
                continue;
            }
            '%' => {
                let mut end = src.len();
                for (i, n) in chars.by_ref() {
                    if n == '\n' {
                        end = i + 1;
                        break;
                    }
                }
                out.push(Token::new(TokenKind::Whitespace, &src[pos..end], pos));
                continue;
            }
            c if c.is_whitespace() || c == '~' => {
                let mut end = pos + c.len_utf8();
                while let Some(&(i, n)) = chars.peek() {
                    if !(n.is_whitespace() || n == '~') {
                        break;
                    }
                    end = i + n.len_utf8();
                    chars.next();
                }
                out.push(Token::new(TokenKind::Whitespace, &src[pos..end], pos));
                continue;
            }
            '{' => {
                depth.push(pos);
                TokenKind::GroupOpen
            }
            '}' => {
                if depth.pop().is_none() {
                    return Err(LatexError::UnbalancedGroup { pos });
                }
                TokenKind::GroupClose
            }
            '_' => TokenKind::SubscriptMarker,
            '^' => TokenKind::SuperscriptMarker,
            '(' | '[' => TokenKind::OpenFence,
            ')' | ']' => TokenKind::CloseFence,
            '=' | '<' | '>' => TokenKind::Relation,
            '$' | '#' => return Err(LatexError::IllegalCharacter { ch: c, pos }),
            c if c.is_control() => return Err(LatexError::IllegalCharacter { ch: c, pos }),
            c if c.is_ascii_digit() => TokenKind::Number,
            c if c.is_alphabetic() => TokenKind::Identifier,
            _ => TokenKind::Operator,
        };
        out.push(Token::new(kind, c.to_string(), pos));
    }
    if let Some(pos) = depth.pop() {
        return Err(LatexError::UnbalancedGroup { pos });
    }
    Ok(out)
}

fn text_argument(
    src: &str,
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
    out: &mut Vec<Token>,
) -> Result<(), LatexError> {
    // optional whitespace between the command and its argument
    if let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            let mut end = start;
            while let Some(&(i, n)) = chars.peek() {
                if !n.is_whitespace() {
                    break;
                }
                end = i + n.len_utf8();
                chars.next();
            }
            out.push(Token::new(TokenKind::Whitespace, &src[start..end], start));
        }
    }
    let Some(&(open, '{')) = chars.peek() else {
        return Ok(());
    };
    chars.next();
    out.push(Token::new(TokenKind::GroupOpen, "{", open));
    let body_start = open + 1;
    let mut level = 0usize;
    for (i, c) in chars.by_ref() {
        match c {
            '{' => level += 1,
            '}' if level == 0 => {
                if i > body_start {
                    out.push(Token::new(TokenKind::Text, &src[body_start..i], body_start));
                }
                out.push(Token::new(TokenKind::GroupClose, "}", i));
                return Ok(());
            }
            '}' => level -= 1,
            c if c.is_control() && !c.is_whitespace() => {
                return Err(LatexError::IllegalCharacter { ch: c, pos: i })
            }
            _ => {}
        }
    }
    Err(LatexError::UnbalancedGroup { pos: open })
}
