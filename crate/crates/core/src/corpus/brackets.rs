//! Penn-Treebank style bracketed trees, one per line.
//!
//! Internal nodes are written `(LABEL child ...)`, or `(LABEL|AUX child ...)`
//! when the tree carries auxiliary (e.g. sentiment) labels. Leaves are bare
//! words. A line of the form `# sub2 = ...` carries the provenance of the
//! tree on the following line; other `# ` lines are ignored.

use std::io::{BufRead, Write};

use crate::corpus::model::{ConstTree, Dataset, Example, Provenance, PROVENANCE_COMMENT};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(s: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' | ')' => {
                if let Some(st) = start.take() {
                    out.push((st, Lexeme::Atom(&s[st..i])));
                }
                out.push((i, if c == '(' { Lexeme::Open } else { Lexeme::Close }));
            }
            c if c.is_whitespace() => {
                if let Some(st) = start.take() {
                    out.push((st, Lexeme::Atom(&s[st..i])));
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if let Some(st) = start {
        out.push((st, Lexeme::Atom(&s[st..])));
    }
    out
}

struct Parser<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    pos: usize,
    len: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, offset: usize, msg: &str) -> Error {
        Error::parse(self.line, format!("column {}: {}", offset + 1, msg))
    }

    fn peek(&self) -> Option<(usize, Lexeme<'a>)> {
        self.lexemes.get(self.pos).copied()
    }

    fn tree(&mut self) -> Result<ConstTree> {
        match self.peek() {
            None => Err(self.err(self.len, "unexpected end of input")),
            Some((off, Lexeme::Close)) => Err(self.err(off, "unbalanced ')'")),
            Some((_, Lexeme::Atom(a))) => {
                self.pos += 1;
                Ok(ConstTree::Leaf(a.to_string()))
            }
            Some((open_off, Lexeme::Open)) => {
                self.pos += 1;
                let (label, aux) = match self.peek() {
                    Some((_, Lexeme::Atom(a))) => {
                        self.pos += 1;
                        match a.split_once('|') {
                            Some((l, x)) => (l.to_string(), Some(x.to_string())),
                            None => (a.to_string(), None),
                        }
                    }
                    _ => (String::new(), None),
                };
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        None => return Err(self.err(open_off, "unbalanced '(': missing ')'")),
                        Some((_, Lexeme::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => children.push(self.tree()?),
                    }
                }
                Ok(ConstTree::Node {
                    label,
                    aux,
                    children,
                })
            }
        }
    }
}

/// Parse a single bracketed tree without validating it. `line` is used in
/// error messages.
pub fn parse_tree_unchecked(s: &str, line: usize) -> Result<ConstTree> {
    let mut p = Parser {
        lexemes: lex(s),
        pos: 0,
        len: s.len(),
        line,
    };
    if p.lexemes.is_empty() {
        return Err(p.err(0, "empty tree"));
    }
    let mut tree = p.tree()?;
    if let Some((off, lx)) = p.peek() {
        return Err(match lx {
            Lexeme::Close => p.err(off, "unbalanced ')'"),
            _ => p.err(off, "trailing input after tree"),
        });
    }
    // PTB files often wrap each tree in an unlabeled outer bracket.
    if let ConstTree::Node {
        label,
        aux: None,
        children,
    } = &mut tree
    {
        if label.is_empty() && children.len() == 1 {
            tree = children.pop().unwrap();
        }
    }
    Ok(tree)
}

/// Parse and validate a single bracketed tree.
pub fn parse_tree(s: &str, line: usize) -> Result<ConstTree> {
    let tree = parse_tree_unchecked(s, line)?;
    if let Some((rule, message)) = tree.violations().into_iter().next() {
        return Err(Error::validation(
            format!("tree on line {}", line),
            format!("[{}] {}", rule.id(), message),
        ));
    }
    Ok(tree)
}

/// Canonical single-space bracketed rendering.
pub fn tree_to_string(tree: &ConstTree) -> String {
    let mut out = String::new();
    write_tree(tree, &mut out);
    out
}

fn write_tree(tree: &ConstTree, out: &mut String) {
    match tree {
        ConstTree::Leaf(form) => out.push_str(form),
        ConstTree::Node {
            label,
            aux,
            children,
        } => {
            out.push('(');
            out.push_str(label);
            if let Some(aux) = aux {
                out.push('|');
                out.push_str(aux);
            }
            for c in children {
                out.push(' ');
                write_tree(c, out);
            }
            out.push(')');
        }
    }
}

/// Read a bracket file without validating the trees. The returned line
/// numbers locate each tree in the input.
pub fn parse_brackets<R: BufRead>(reader: R) -> Result<(Dataset<ConstTree>, Vec<usize>)> {
    let mut examples = Vec::new();
    let mut provenance = Vec::new();
    let mut lines = Vec::new();
    let mut pending: Option<Provenance> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix("# ") {
            if let Some(body) = comment.strip_prefix(PROVENANCE_COMMENT) {
                pending = Some(
                    Provenance::parse_annotation(body)
                        .ok_or_else(|| Error::parse(lineno, format!("bad provenance comment '{}'", body)))?,
                );
            }
            continue;
        }
        examples.push(parse_tree_unchecked(trimmed, lineno)?);
        provenance.push(pending.take().unwrap_or_default());
        lines.push(lineno);
    }
    Ok((Dataset::with_provenance(examples, provenance)?, lines))
}

/// Read and validate a bracket file.
pub fn read_brackets<R: BufRead>(reader: R) -> Result<Dataset<ConstTree>> {
    let (dataset, lines) = parse_brackets(reader)?;
    for (tree, line) in dataset.examples().iter().zip(&lines) {
        if let Some((rule, message)) = tree.violations().into_iter().next() {
            return Err(Error::validation(
                format!("tree on line {}", line),
                format!("[{}] {}", rule.id(), message),
            ));
        }
    }
    Ok(dataset)
}

pub fn write_brackets<W: Write>(dataset: &Dataset<ConstTree>, mut out: W) -> Result<()> {
    for (tree, prov) in dataset.iter() {
        if let Some(body) = prov.annotation() {
            writeln!(out, "# {}{}", PROVENANCE_COMMENT, body)?;
        }
        writeln!(out, "{}", tree_to_string(tree))?;
    }
    out.flush()?;
    Ok(())
}
