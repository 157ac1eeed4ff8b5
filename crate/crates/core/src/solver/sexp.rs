//! Lenient s-expression reader for solver output.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Atom(String),
    Str(String),
    List(Vec<Node>),
}

impl Node {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Node::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Node]> {
        match self {
            Node::List(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|xs| xs.first()).and_then(Node::atom)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Atom(s) => f.write_str(s),
            Node::Str(s) => write!(f, "{s:?}"),
            Node::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A top-level item with its byte range in the source text.
#[derive(Debug, Clone)]
pub struct Item {
    pub node: Node,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadError {
    pub offset: usize,
    pub message: String,
}

/// Reads all top-level items. Handles `"strings"` (with `""` escapes),
/// `|quoted symbols|` and `;` comments.
pub fn read_items(text: &str) -> Result<Vec<Item>, ReadError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut top = Vec::new();
    let mut stack: Vec<(usize, Vec<Node>)> = Vec::new();

    let finish = |stack: &mut Vec<(usize, Vec<Node>)>, top: &mut Vec<Item>, node: Node, start: usize, end: usize| {
        match stack.last_mut() {
            Some((_, xs)) => xs.push(node),
            None => top.push(Item { node, start, end }),
        }
    };

    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                stack.push((i, Vec::new()));
                i += 1;
            }
            b')' => {
                let (start, xs) = stack.pop().ok_or(ReadError { offset: i, message: "unexpected `)`".into() })?;
                i += 1;
                finish(&mut stack, &mut top, Node::List(xs), start, i);
            }
            b'"' => {
                let start = i;
                i += 1;
                let mut s = String::new();
                loop {
                    match bytes.get(i) {
                        None => return Err(ReadError { offset: start, message: "unterminated string".into() }),
                        Some(b'"') if bytes.get(i + 1) == Some(&b'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(b'"') => {
                            i += 1;
                            break;
                        }
                        Some(_) => {
                            let ch = text[i..].chars().next().unwrap();
                            s.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                finish(&mut stack, &mut top, Node::Str(s), start, i);
            }
            b'|' => {
                let start = i;
                let close = text[i + 1..]
                    .find('|')
                    .ok_or(ReadError { offset: start, message: "unterminated quoted symbol".into() })?;
                i = i + 1 + close + 1;
                let sym = text[start + 1..i - 1].to_string();
                finish(&mut stack, &mut top, Node::Atom(sym), start, i);
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'(' | b')' | b'"' | b';') {
                    i += 1;
                }
                finish(&mut stack, &mut top, Node::Atom(text[start..i].to_string()), start, i);
            }
        }
    }
    if let Some((start, _)) = stack.last() {
        return Err(ReadError { offset: *start, message: "unclosed `(`".into() });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strings_and_quoted_symbols() {
        let items = read_items("sat\n(error \"line 1: \"\"x\"\" (bad)\")\n(|a b| 1)").unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].node, Node::Atom("sat".into()));
        assert_eq!(items[1].node.list().unwrap()[1], Node::Str("line 1: \"x\" (bad)".into()));
        assert_eq!(items[2].node.list().unwrap()[0], Node::Atom("a b".into()));
    }

    #[test]
    fn byte_ranges_cover_items() {
        let text = "unsat\n(\n  (define-fun x () Int 3)\n)\n";
        let items = read_items(text).unwrap();
        assert_eq!(&text[items[1].start..items[1].end], "(\n  (define-fun x () Int 3)\n)");
    }
}
