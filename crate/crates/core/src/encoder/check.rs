use thiserror::Error;

use super::SmtScript;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("unbalanced parentheses at byte {0}")]
    Unbalanced(usize),
    #[error("{0} unclosed parentheses at end of script")]
    Unclosed(usize),
    #[error("`{0}` is used before it is declared")]
    UseBeforeDeclaration(String),
    #[error("`{0}` is in the symbol map but never declared")]
    Undeclared(String),
    #[error("script does not end with the expected check-sat/get-model commands")]
    BadFooter,
}

/// Atoms of an SMT-LIB text, ignoring comments; parentheses are tokens.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b';' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c == b'(' || c == b')' {
            out.push((i, &text[i..i + 1]));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'(' | b')' | b';') {
                i += 1;
            }
            out.push((start, &text[start..i]));
        }
    }
    out
}

/// Structural checks on a generated script: balanced parentheses, every
/// mapped name declared before any other use, and the expected footer.
pub fn check_script(script: &SmtScript) -> Result<(), WellFormedError> {
    let toks = tokens(&script.text);
    let mut depth = 0usize;
    for (pos, t) in &toks {
        match *t {
            "(" => depth += 1,
            ")" => depth = depth.checked_sub(1).ok_or(WellFormedError::Unbalanced(*pos))?,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(WellFormedError::Unclosed(depth));
    }

    for name in script.symbol_map.names() {
        let first = toks.iter().position(|(_, t)| *t == name).ok_or_else(|| WellFormedError::Undeclared(name.into()))?;
        let declared = first > 0 && matches!(toks[first - 1].1, "declare-const" | "declare-fun" | "define-fun");
        if !declared {
            return Err(WellFormedError::UseBeforeDeclaration(name.into()));
        }
    }

    let tail: Vec<&str> = toks.iter().rev().take(6).map(|(_, t)| *t).collect();
    let expected: &[&str] = if script.config.produce_model {
        &[")", "get-model", "(", ")", "check-sat", "("]
    } else {
        &[")", "check-sat", "("]
    };
    if !tail.starts_with(expected) {
        return Err(WellFormedError::BadFooter);
    }
    Ok(())
}
