//! Span-tracking s-expression reader for `.tsm` sources.
//!
//! The reader is iterative, so deeply nested input cannot overflow the stack;
//! nesting beyond [`MAX_DEPTH`] is rejected outright.

use super::{ParseError, SourceSpan};

pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Symbol(String),
    /// Decimal literal kept as text; range checking happens at conversion.
    Numeral(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    Atom(Atom),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: SourceSpan,
}

impl Sexp {
    pub fn as_symbol(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(Atom::Symbol(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(xs) => Some(xs),
            _ => None,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self, length: usize) -> SourceSpan {
        SourceSpan::new(self.line, self.col, length)
    }
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

/// Reads every top-level s-expression in `src`.
///
/// Lexical errors are collected and reading continues past them; unbalanced
/// parentheses and excessive nesting stop the reader.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, Vec<ParseError>> {
    let mut cur = Cursor { src, pos: 0, line: 1, col: 1 };
    let mut errors = Vec::new();
    let mut top = Vec::new();
    // open lists: (span of '(', children)
    let mut stack: Vec<(SourceSpan, Vec<Sexp>)> = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == ';' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let start = cur.here(1);
        if c == '(' {
            cur.bump();
            if stack.len() >= MAX_DEPTH {
                errors.push(ParseError::new(start, format!("nesting deeper than {MAX_DEPTH} levels")));
                return Err(errors);
            }
            stack.push((start, Vec::new()));
            continue;
        }
        if c == ')' {
            cur.bump();
            match stack.pop() {
                Some((open, items)) => {
                    let span = if open.line == start.line {
                        SourceSpan::new(open.line, open.column, start.column + 1 - open.column)
                    } else {
                        open
                    };
                    push(&mut stack, &mut top, Sexp { kind: SexpKind::List(items), span });
                }
                None => {
                    errors.push(ParseError::new(start, "unexpected `)`").expecting(&["`(`"]));
                    return Err(errors);
                }
            }
            continue;
        }
        if is_symbol_char(c) || c == '|' {
            let begin = cur.pos;
            let quoted = c == '|';
            if quoted {
                cur.bump();
                while let Some(c) = cur.peek() {
                    cur.bump();
                    if c == '|' {
                        break;
                    }
                }
            } else {
                while cur.peek().is_some_and(is_symbol_char) {
                    cur.bump();
                }
            }
            let text = &src[begin..cur.pos];
            let span = SourceSpan::new(start.line, start.column, text.chars().count().max(1));
            if quoted {
                errors.push(ParseError::new(span, "quoted symbols are not supported"));
                continue;
            }
            let numeric = text.bytes().all(|b| b.is_ascii_digit())
                || (text.len() > 1 && text.starts_with('-') && text[1..].bytes().all(|b| b.is_ascii_digit()));
            let atom = if numeric {
                Atom::Numeral(text.to_string())
            } else if text.as_bytes()[0].is_ascii_digit() {
                errors.push(ParseError::new(span, format!("malformed numeral `{text}`")));
                continue;
            } else {
                Atom::Symbol(text.to_string())
            };
            push(&mut stack, &mut top, Sexp { kind: SexpKind::Atom(atom), span });
            continue;
        }
        cur.bump();
        errors.push(ParseError::new(start, format!("unexpected character {c:?}")));
    }

    if let Some((open, _)) = stack.pop() {
        errors.push(ParseError::new(open, "unclosed `(`").expecting(&["`)`"]));
    }
    if errors.is_empty() {
        Ok(top)
    } else {
        Err(errors)
    }
}

fn push(stack: &mut [(SourceSpan, Vec<Sexp>)], top: &mut Vec<Sexp>, item: Sexp) {
    match stack.last_mut() {
        Some((_, items)) => items.push(item),
        None => top.push(item),
    }
}
