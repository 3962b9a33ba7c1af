//! Reading and writing corpora in the format a task calls for.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use sub2_core::corpus::conllu::{parse_conllu_dep, parse_conllu_pos, Skipped};
use sub2_core::corpus::{
    brackets::parse_brackets, read_brackets, read_conllu_dep, read_conllu_pos, read_text, text::parse_text,
    write_brackets, write_conllu_dep, write_conllu_pos, write_text, AnyDataset, TagColumn, Task, TextFormat,
};
use sub2_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Conllu,
    Brackets,
    Tsv,
    Jsonl,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Conllu => "conllu",
            Format::Brackets => "brackets",
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        })
    }
}

impl Format {
    /// The explicit format if given, otherwise the one the task uses. Text
    /// input ending in `.jsonl` is read as JSONL, anything else as TSV.
    pub fn resolve(task: Task, explicit: Option<&str>, path: &Path) -> Result<Format, Error> {
        let format = match explicit {
            Some("conllu") => Format::Conllu,
            Some("brackets") => Format::Brackets,
            Some("tsv") => Format::Tsv,
            Some("jsonl") => Format::Jsonl,
            Some(other) => return Err(Error::Config(format!("unknown format '{}'", other))),
            None => match task {
                Task::Pos | Task::Dep => Format::Conllu,
                Task::Const => Format::Brackets,
                Task::Text if path.extension().is_some_and(|e| e == "jsonl") => Format::Jsonl,
                Task::Text => Format::Tsv,
            },
        };
        let fits = match task {
            Task::Pos | Task::Dep => format == Format::Conllu,
            Task::Const => format == Format::Brackets,
            Task::Text => matches!(format, Format::Tsv | Format::Jsonl),
        };
        if !fits {
            return Err(Error::Config(format!("the {} task cannot use the {} format", task, format)));
        }
        Ok(format)
    }

    fn text(self) -> TextFormat {
        match self {
            Format::Jsonl => TextFormat::Jsonl,
            _ => TextFormat::Tsv,
        }
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    let mut buf = Vec::new();
    if path.as_os_str() == "-" {
        io::stdin().lock().read_to_end(&mut buf)?;
    } else {
        File::open(path)?.read_to_end(&mut buf)?;
    }
    Ok(buf)
}

/// Read and validate a whole corpus.
pub fn read(bytes: &[u8], task: Task, format: Format, column: TagColumn) -> Result<(AnyDataset, Vec<Skipped>), Error> {
    Ok(match task {
        Task::Pos => {
            let r = read_conllu_pos(bytes, column)?;
            (r.dataset.into(), r.skipped)
        }
        Task::Dep => {
            let r = read_conllu_dep(bytes)?;
            (r.dataset.into(), r.skipped)
        }
        Task::Const => (read_brackets(bytes)?.into(), Vec::new()),
        Task::Text => (read_text(bytes, format.text())?.into(), Vec::new()),
    })
}

/// A corpus read without structural validation, with where each example
/// starts and how to name it in messages.
pub struct Lenient {
    pub dataset: AnyDataset,
    pub lines: Vec<usize>,
    pub names: Vec<Option<String>>,
    pub skipped: Vec<Skipped>,
}

pub fn read_lenient(bytes: &[u8], task: Task, format: Format, column: TagColumn) -> Result<Lenient, Error> {
    Ok(match task {
        Task::Pos => {
            let r = parse_conllu_pos(bytes, column)?;
            Lenient {
                dataset: r.dataset.into(),
                lines: r.lines,
                names: r.sent_ids,
                skipped: r.skipped,
            }
        }
        Task::Dep => {
            let r = parse_conllu_dep(bytes)?;
            Lenient {
                dataset: r.dataset.into(),
                lines: r.lines,
                names: r.sent_ids,
                skipped: r.skipped,
            }
        }
        Task::Const => {
            let (d, lines) = parse_brackets(bytes)?;
            Lenient {
                names: vec![None; lines.len()],
                dataset: d.into(),
                lines,
                skipped: Vec::new(),
            }
        }
        Task::Text => {
            let (d, lines) = parse_text(bytes, format.text())?;
            Lenient {
                names: vec![None; lines.len()],
                dataset: d.into(),
                lines,
                skipped: Vec::new(),
            }
        }
    })
}

pub fn write_to<W: Write>(dataset: &AnyDataset, format: Format, column: TagColumn, out: W) -> Result<(), Error> {
    match dataset {
        AnyDataset::Pos(d) => write_conllu_pos(d, column, out),
        AnyDataset::Dep(d) => write_conllu_dep(d, out),
        AnyDataset::Const(d) => write_brackets(d, out),
        AnyDataset::Text(d) => write_text(d, format.text(), out),
    }
}

/// Serialize to memory, so the bytes can be hashed before they are written.
pub fn render(dataset: &AnyDataset, format: Format, column: TagColumn) -> Result<Vec<u8>, Error> {
    let mut buf = Vec::new();
    write_to(dataset, format, column, &mut buf)?;
    Ok(buf)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if path.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(bytes)?;
        out.flush()?;
    }
    Ok(())
}
