//! Text classification corpora: TSV (`label<TAB>tokens`) and JSONL.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::brackets::{parse_tree_unchecked, tree_to_string};
use crate::corpus::model::{Example, Provenance, TextExample, Token};
use crate::corpus::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TextFormat {
    Tsv,
    Jsonl,
}

impl FromStr for TextFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(TextFormat::Tsv),
            "jsonl" => Ok(TextFormat::Jsonl),
            other => Err(Error::Config(format!("unknown text format '{}'", other))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    label: String,
    tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parse: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sub2: Option<String>,
}

/// Read text examples without structural validation. Returns the line
/// number of each example alongside the dataset.
pub fn parse_text<R: BufRead>(reader: R, format: TextFormat) -> Result<(Dataset<TextExample>, Vec<usize>)> {
    let mut examples = Vec::new();
    let mut provenance = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let (example, prov) = match format {
            TextFormat::Tsv => (tsv_row(line, lineno)?, Provenance::Original),
            TextFormat::Jsonl => jsonl_row(line, lineno)?,
        };
        examples.push(example);
        provenance.push(prov);
        lines.push(lineno);
    }
    Ok((Dataset::with_provenance(examples, provenance)?, lines))
}

fn tsv_row(line: &str, lineno: usize) -> Result<TextExample> {
    let (label, text) = line
        .split_once('\t')
        .ok_or_else(|| Error::parse(lineno, "expected 'label<TAB>text'"))?;
    let tokens = text
        .split_whitespace()
        .map(Token::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::parse(lineno, e.to_string()))?;
    Ok(TextExample::new(label, tokens))
}

fn jsonl_row(line: &str, lineno: usize) -> Result<(TextExample, Provenance)> {
    let row: Row = serde_json::from_str(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
    let tokens = row
        .tokens
        .into_iter()
        .map(Token::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::parse(lineno, e.to_string()))?;
    let parse = row.parse.map(|p| parse_tree_unchecked(&p, lineno)).transpose()?;
    let prov = match row.sub2 {
        None => Provenance::Original,
        Some(body) => Provenance::parse_annotation(&body)
            .ok_or_else(|| Error::parse(lineno, format!("bad provenance '{}'", body)))?,
    };
    Ok((
        TextExample {
            label: row.label,
            tokens,
            parse,
        },
        prov,
    ))
}

/// Read and validate text examples; a parse whose yield differs from the
/// tokens is an error naming the line.
pub fn read_text<R: BufRead>(reader: R, format: TextFormat) -> Result<Dataset<TextExample>> {
    let (dataset, lines) = parse_text(reader, format)?;
    for (e, line) in dataset.examples().iter().zip(&lines) {
        if let Some((rule, message)) = e.violations().into_iter().next() {
            return Err(Error::validation(
                format!("example on line {}", line),
                format!("[{}] {}", rule.id(), message),
            ));
        }
    }
    Ok(dataset)
}

/// Write text examples. TSV drops parses and provenance; JSONL keeps both.
pub fn write_text<W: Write>(dataset: &Dataset<TextExample>, format: TextFormat, mut out: W) -> Result<()> {
    for (e, prov) in dataset.iter() {
        match format {
            TextFormat::Tsv => writeln!(out, "{}\t{}", e.label, e.forms().join(" "))?,
            TextFormat::Jsonl => {
                let row = Row {
                    label: e.label.clone(),
                    tokens: e.tokens.iter().map(|t| t.as_str().to_string()).collect(),
                    parse: e.parse.as_ref().map(tree_to_string),
                    sub2: prov.annotation(),
                };
                serde_json::to_writer(&mut out, &row).map_err(|e| Error::Io(e.into()))?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
