//! CoNLL-U reading and writing.
//!
//! Only the columns a task needs are kept: FORM plus UPOS (or XPOS) for
//! tagging, FORM plus HEAD and DEPREL for dependency parsing. Everything else
//! is written back as `_`. Sentences containing multiword token ranges or
//! empty nodes are skipped and reported.

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::corpus::model::{
    DepSentence, Example, Provenance, TaggedSentence, Token, PROVENANCE_COMMENT,
};
use crate::corpus::Dataset;
use crate::error::{Error, Result};

/// Which CoNLL-U column provides POS tags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TagColumn {
    #[default]
    Upos,
    Xpos,
}

impl TagColumn {
    fn index(self) -> usize {
        match self {
            TagColumn::Upos => 3,
            TagColumn::Xpos => 4,
        }
    }
}

impl FromStr for TagColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upos" => Ok(TagColumn::Upos),
            "xpos" => Ok(TagColumn::Xpos),
            other => Err(Error::Config(format!("unknown tag column '{}'", other))),
        }
    }
}

/// A sentence left out of the returned dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skipped {
    /// 1-based ordinal of the sentence in the file.
    pub sentence: usize,
    /// Line on which the sentence starts.
    pub line: usize,
    pub reason: String,
}

/// Result of reading a CoNLL-U stream.
#[derive(Clone, Debug)]
pub struct ConlluRead<E> {
    pub dataset: Dataset<E>,
    pub skipped: Vec<Skipped>,
    /// Start line of each returned sentence.
    pub lines: Vec<usize>,
    /// `sent_id` of each returned sentence, when present.
    pub sent_ids: Vec<Option<String>>,
}

struct Block {
    ordinal: usize,
    start: usize,
    comments: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn blocks<R: BufRead>(reader: R) -> Result<Vec<Block>> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    let mut ordinal = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            if let Some(b) = cur.take() {
                out.push(b);
            }
            continue;
        }
        let block = cur.get_or_insert_with(|| {
            ordinal += 1;
            Block {
                ordinal,
                start: lineno,
                comments: Vec::new(),
                rows: Vec::new(),
            }
        });
        if let Some(comment) = line.strip_prefix('#') {
            if !block.rows.is_empty() {
                return Err(Error::parse(lineno, "comment line inside a sentence"));
            }
            block.comments.push(comment.to_string());
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 tab-separated columns, found {}", fields.len()),
            ));
        }
        block.rows.push((lineno, fields));
    }
    if let Some(b) = cur.take() {
        out.push(b);
    }
    Ok(out)
}

struct Sentence {
    start: usize,
    comments: Vec<String>,
    provenance: Provenance,
    rows: Vec<(usize, Vec<String>)>,
}

impl Sentence {
    fn tokens(&self) -> Result<Vec<Token>> {
        self.rows
            .iter()
            .map(|(line, f)| Token::new(f[1].as_str()).map_err(|e| Error::parse(*line, e.to_string())))
            .collect()
    }
}

fn sent_id(comments: &[String]) -> Option<String> {
    comments.iter().find_map(|c| {
        let (k, v) = c.trim().split_once('=')?;
        (k.trim() == "sent_id").then(|| v.trim().to_string())
    })
}

/// Split into sentences, drop the ones with multiword tokens or empty nodes,
/// and check ID sequencing.
fn sentences<R: BufRead>(reader: R) -> Result<(Vec<Sentence>, Vec<Skipped>)> {
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    'block: for b in blocks(reader)? {
        for (_, f) in &b.rows {
            let reason = if f[0].contains('-') {
                Some(format!("multiword token {}", f[0]))
            } else if f[0].contains('.') {
                Some(format!("empty node {}", f[0]))
            } else {
                None
            };
            if let Some(reason) = reason {
                skipped.push(Skipped {
                    sentence: b.ordinal,
                    line: b.start,
                    reason,
                });
                continue 'block;
            }
        }
        if b.rows.is_empty() {
            // Comment-only block; nothing to keep.
            continue;
        }
        for (pos, (line, f)) in b.rows.iter().enumerate() {
            match f[0].parse::<usize>() {
                Ok(id) if id == pos + 1 => {}
                _ => {
                    return Err(Error::parse(
                        *line,
                        format!("token ID '{}' where {} was expected", f[0], pos + 1),
                    ))
                }
            }
        }
        let mut provenance = Provenance::Original;
        let mut comments = Vec::new();
        for c in b.comments {
            match c.trim_start().strip_prefix(PROVENANCE_COMMENT) {
                Some(body) => {
                    provenance = Provenance::parse_annotation(body).ok_or_else(|| {
                        Error::parse(b.start, format!("bad provenance comment '{}'", body))
                    })?;
                }
                None => comments.push(c),
            }
        }
        kept.push(Sentence {
            start: b.start,
            comments,
            provenance,
            rows: b.rows,
        });
    }
    Ok((kept, skipped))
}

fn finish<E: Example>(
    items: Vec<(E, Provenance, usize, Option<String>)>,
    skipped: Vec<Skipped>,
) -> Result<ConlluRead<E>> {
    let mut examples = Vec::with_capacity(items.len());
    let mut provenance = Vec::with_capacity(items.len());
    let mut lines = Vec::with_capacity(items.len());
    let mut sent_ids = Vec::with_capacity(items.len());
    for (e, p, l, id) in items {
        examples.push(e);
        provenance.push(p);
        lines.push(l);
        sent_ids.push(id);
    }
    Ok(ConlluRead {
        dataset: Dataset::with_provenance(examples, provenance)?,
        skipped,
        lines,
        sent_ids,
    })
}

/// Read POS-tagged sentences without structural validation.
pub fn parse_conllu_pos<R: BufRead>(reader: R, column: TagColumn) -> Result<ConlluRead<TaggedSentence>> {
    let (sents, skipped) = sentences(reader)?;
    let mut items = Vec::with_capacity(sents.len());
    for s in sents {
        let tokens = s.tokens()?;
        let tags = s.rows.iter().map(|(_, f)| f[column.index()].clone()).collect();
        let id = sent_id(&s.comments);
        let sentence = TaggedSentence {
            tokens,
            tags,
            comments: s.comments,
        };
        items.push((sentence, s.provenance, s.start, id));
    }
    finish(items, skipped)
}

/// Read dependency trees without structural validation.
pub fn parse_conllu_dep<R: BufRead>(reader: R) -> Result<ConlluRead<DepSentence>> {
    let (sents, skipped) = sentences(reader)?;
    let mut items = Vec::with_capacity(sents.len());
    for s in sents {
        let tokens = s.tokens()?;
        let mut heads = Vec::with_capacity(s.rows.len());
        let mut deprels = Vec::with_capacity(s.rows.len());
        for (line, f) in &s.rows {
            let head = f[6]
                .parse::<usize>()
                .map_err(|_| Error::parse(*line, format!("non-integer head '{}'", f[6])))?;
            heads.push(head);
            deprels.push(f[7].clone());
        }
        let id = sent_id(&s.comments);
        let sentence = DepSentence {
            tokens,
            heads,
            deprels,
            comments: s.comments,
        };
        items.push((sentence, s.provenance, s.start, id));
    }
    finish(items, skipped)
}

fn validated<E: Example>(read: ConlluRead<E>) -> Result<ConlluRead<E>> {
    for (i, e) in read.dataset.examples().iter().enumerate() {
        if let Some((rule, message)) = e.violations().into_iter().next() {
            let name = match &read.sent_ids[i] {
                Some(id) => format!("sentence '{}' at line {}", id, read.lines[i]),
                None => format!("sentence at line {}", read.lines[i]),
            };
            return Err(Error::validation(name, format!("[{}] {}", rule.id(), message)));
        }
    }
    Ok(read)
}

/// Read and validate POS-tagged sentences.
pub fn read_conllu_pos<R: BufRead>(reader: R, column: TagColumn) -> Result<ConlluRead<TaggedSentence>> {
    validated(parse_conllu_pos(reader, column)?)
}

/// Read and validate dependency trees. Cyclic and multi-rooted sentences are
/// rejected with an error naming the sentence.
pub fn read_conllu_dep<R: BufRead>(reader: R) -> Result<ConlluRead<DepSentence>> {
    validated(parse_conllu_dep(reader)?)
}

fn write_header<W: Write>(out: &mut W, comments: &[String], prov: &Provenance) -> Result<()> {
    if let Some(body) = prov.annotation() {
        writeln!(out, "# {}{}", PROVENANCE_COMMENT, body)?;
    }
    // Comments of the source sentence (sent_id, text) no longer describe a
    // generated sentence.
    if !matches!(prov, Provenance::Generated(_)) {
        for c in comments {
            writeln!(out, "#{}", c)?;
        }
    }
    Ok(())
}

pub fn write_conllu_pos<W: Write>(
    dataset: &Dataset<TaggedSentence>,
    column: TagColumn,
    mut out: W,
) -> Result<()> {
    for (s, prov) in dataset.iter() {
        write_header(&mut out, &s.comments, prov)?;
        for (i, (t, tag)) in s.tokens.iter().zip(&s.tags).enumerate() {
            let (upos, xpos) = match column {
                TagColumn::Upos => (tag.as_str(), "_"),
                TagColumn::Xpos => ("_", tag.as_str()),
            };
            writeln!(out, "{}\t{}\t_\t{}\t{}\t_\t_\t_\t_\t_", i + 1, t, upos, xpos)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_conllu_dep<W: Write>(dataset: &Dataset<DepSentence>, mut out: W) -> Result<()> {
    for (s, prov) in dataset.iter() {
        write_header(&mut out, &s.comments, prov)?;
        for (i, t) in s.tokens.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t_\t_\t_\t_\t{}\t{}\t_\t_",
                i + 1,
                t,
                s.heads[i],
                s.deprels[i]
            )?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
