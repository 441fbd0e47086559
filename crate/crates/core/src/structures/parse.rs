//! Text format for anchored structures.
//!
//! ```text
//! # comment
//! v: a b c
//! A: a
//! E: a-b
//! O: b-c
//! ```
//!
//! Declarations appear in this order, one per line (`;` also separates
//! declarations). `A`, `E` and `O` may be omitted.

use thiserror::Error;

use super::{AnchoredPair, GraphStructure, StructureError};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> StructureError {
    StructureError::Parse(ParseError {
        line,
        column,
        message: message.into(),
    })
}

/// One token with its 1-based position.
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(body: &str, line: usize, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        if ch.is_whitespace() || ch == ',' {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &body[s..i],
                    line,
                    column: offset + s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

pub fn parse_structure(text: &str) -> Result<AnchoredPair, StructureError> {
    const KEYS: [&str; 4] = ["v", "A", "E", "O"];
    let mut decls: Vec<(usize, usize, usize, &str)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for part in line.split(';') {
            let start = offset;
            offset += part.len() + 1;
            if part.trim().is_empty() {
                continue;
            }
            let lead = part.len() - part.trim_start().len();
            let col = start + lead + 1;
            let Some((key, body)) = part.split_once(':') else {
                return Err(err(ln + 1, col, "expected `<key>: <items>`"));
            };
            let key = key.trim();
            let Some(k) = KEYS.iter().position(|&x| x == key) else {
                return Err(err(ln + 1, col, format!("unknown declaration {key:?}")));
            };
            if let Some(&(_, _, prev, _)) = decls.last() {
                if k <= prev {
                    return Err(err(ln + 1, col, format!("declaration {key:?} out of order or repeated")));
                }
            } else if k != 0 {
                return Err(err(ln + 1, col, "the first declaration must be `v:`"));
            }
            decls.push((ln + 1, start + part.find(':').unwrap() + 2, k, body));
        }
    }
    if decls.is_empty() {
        return Err(err(1, 1, "missing `v:` declaration"));
    }

    let mut structure: Option<GraphStructure> = None;
    let mut anchor = Vec::new();
    for &(line, col, k, body) in &decls {
        let toks = tokens(body, line, col - 1);
        match k {
            0 => {
                let mut names: Vec<String> = Vec::new();
                for t in &toks {
                    if t.text.contains('-') {
                        return Err(err(t.line, t.column, format!("vertex name {:?} contains '-'", t.text)));
                    }
                    if names.iter().any(|n| n == t.text) {
                        return Err(err(t.line, t.column, format!("duplicate vertex {:?}", t.text)));
                    }
                    names.push(t.text.to_string());
                }
                structure = Some(GraphStructure::new(names)?);
            }
            1 => {
                let s = structure.as_ref().expect("v declared first");
                for t in &toks {
                    let idx = s
                        .index_of(t.text)
                        .ok_or_else(|| err(t.line, t.column, format!("unknown vertex {:?}", t.text)))?;
                    if !anchor.contains(&idx) {
                        anchor.push(idx);
                    }
                }
            }
            _ => {
                let s = structure.as_mut().expect("v declared first");
                for t in &toks {
                    let Some((a, b)) = t.text.split_once('-') else {
                        return Err(err(t.line, t.column, format!("expected a pair `x-y`, got {:?}", t.text)));
                    };
                    let find = |name: &str| {
                        s.index_of(name)
                            .ok_or_else(|| err(t.line, t.column, format!("unknown vertex {name:?}")))
                    };
                    let (ia, ib) = (find(a)?, find(b)?);
                    if ia == ib {
                        return Err(err(t.line, t.column, "a pair needs two distinct vertices"));
                    }
                    let res = if k == 2 { s.add_edge(ia, ib) } else { s.add_open(ia, ib) };
                    if let Err(StructureError::EdgeAndOpen(x, y)) = res {
                        return Err(err(t.line, t.column, format!("{x}-{y} is both an edge and an open edge")));
                    }
                    res?;
                }
            }
        }
    }
    let structure = structure.expect("v declared");
    Ok(AnchoredPair::from_names(structure, &anchor))
}
