//! Python bindings: read, augment, validate and summarize corpora.

use std::fs;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIOError};
use pyo3::prelude::*;
use pyo3::types::{PyList, PyTuple};

use sub2_core::augment::{augment, AugmentConfig, Method, SizeSpec, SourcePool};
use sub2_core::corpus::{
    brackets::parse_tree, read_brackets, read_conllu_dep, read_conllu_pos, read_text, tokens, tree_to_string,
    write_brackets, write_conllu_dep, write_conllu_pos, write_text, AnyDataset, ConstTree, Dataset, DepSentence,
    Example, Provenance, TagColumn, TaggedSentence, Task, TextExample, TextFormat,
};
use sub2_core::substructure::{balanced_parse as build_balanced, ConstScheme, ConstraintSet, DepScheme, PosScheme, TextScheme};
use sub2_core::validate::{stats, validate_dataset, Violation, DEFAULT_TOP_KEYS};
use sub2_core::Error;

create_exception!(sub2, Sub2Error, PyException, "Base class for errors raised by sub2.");
create_exception!(sub2, ConfigError, Sub2Error, "Invalid settings or constraint combination.");
create_exception!(sub2, ParseError, Sub2Error, "Malformed or structurally invalid input.");
create_exception!(sub2, NoAugmentationError, Sub2Error, "No substitution is possible on the input.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Config(_) => ConfigError::new_err(msg),
        Error::Parse { .. } | Error::Validation { .. } => ParseError::new_err(msg),
        Error::NoAugmentation(_) | Error::ResampleExhausted { .. } => NoAugmentationError::new_err(msg),
        Error::Io(_) => PyIOError::new_err(msg),
        Error::Internal(_) => Sub2Error::new_err(msg),
    }
}

fn text_format(format: Option<&str>) -> PyResult<TextFormat> {
    format.unwrap_or("tsv").parse().map_err(to_py)
}

fn check_format(task: Task, format: Option<&str>) -> PyResult<()> {
    let ok = match (task, format) {
        (_, None) => true,
        (Task::Pos | Task::Dep, Some(f)) => f == "conllu",
        (Task::Const, Some(f)) => f == "brackets",
        (Task::Text, Some(f)) => f == "tsv" || f == "jsonl",
    };
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new_err(format!("the {} task cannot use the {} format", task, format.unwrap_or_default())))
    }
}

/// A corpus of one task: pos, dep, const or text.
#[pyclass(name = "Corpus", module = "sub2", frozen)]
struct Corpus {
    inner: AnyDataset,
}

fn violation_tuple(v: Violation) -> (usize, String, String) {
    (v.example_index, v.rule.id().to_string(), v.message)
}

fn provenance_of<E: Example>(d: &Dataset<E>) -> Vec<Option<String>> {
    d.provenance().iter().map(Provenance::annotation).collect()
}

#[pymethods]
impl Corpus {
    /// Parse a corpus from a string. `format` defaults to the task's own
    /// (CoNLL-U for pos/dep, brackets for const, TSV for text).
    #[staticmethod]
    #[pyo3(signature = (data, task, format=None, tag_column="upos"))]
    fn parse(data: &str, task: &str, format: Option<&str>, tag_column: &str) -> PyResult<Corpus> {
        let task: Task = task.parse().map_err(to_py)?;
        check_format(task, format)?;
        let column: TagColumn = tag_column.parse().map_err(to_py)?;
        let bytes = data.as_bytes();
        let inner = match task {
            Task::Pos => read_conllu_pos(bytes, column).map_err(to_py)?.dataset.into(),
            Task::Dep => read_conllu_dep(bytes).map_err(to_py)?.dataset.into(),
            Task::Const => read_brackets(bytes).map_err(to_py)?.into(),
            Task::Text => read_text(bytes, text_format(format)?).map_err(to_py)?.into(),
        };
        Ok(Corpus { inner })
    }

    /// Read a corpus file.
    #[staticmethod]
    #[pyo3(signature = (path, task, format=None, tag_column="upos"))]
    fn read(path: &str, task: &str, format: Option<&str>, tag_column: &str) -> PyResult<Corpus> {
        let format = match (format, task) {
            (None, "text") if path.ends_with(".jsonl") => Some("jsonl"),
            (f, _) => f,
        };
        let data = fs::read_to_string(path).map_err(|e| to_py(e.into()))?;
        Corpus::parse(&data, task, format, tag_column)
    }

    /// Build a pos corpus from `(tokens, tags)` pairs.
    #[staticmethod]
    fn pos(sentences: Vec<(Vec<String>, Vec<String>)>) -> PyResult<Corpus> {
        let examples = sentences
            .into_iter()
            .map(|(t, g)| Ok(TaggedSentence::new(tokens(&t)?, g)))
            .collect::<Result<Vec<_>, Error>>()
            .map_err(to_py)?;
        Ok(Corpus {
            inner: Dataset::new(examples).validated().map_err(to_py)?.into(),
        })
    }

    /// Build a dep corpus from `(tokens, heads, deprels)` triples; heads are
    /// 1-based with 0 for the root.
    #[staticmethod]
    fn dep(sentences: Vec<(Vec<String>, Vec<usize>, Vec<String>)>) -> PyResult<Corpus> {
        let examples = sentences
            .into_iter()
            .map(|(t, h, r)| Ok(DepSentence::new(tokens(&t)?, h, r)))
            .collect::<Result<Vec<_>, Error>>()
            .map_err(to_py)?;
        Ok(Corpus {
            inner: Dataset::new(examples).validated().map_err(to_py)?.into(),
        })
    }

    /// Build a const corpus from bracketed trees.
    #[staticmethod]
    fn trees(trees: Vec<String>) -> PyResult<Corpus> {
        let examples = trees
            .iter()
            .enumerate()
            .map(|(i, t)| parse_tree(t, i + 1))
            .collect::<Result<Vec<ConstTree>, Error>>()
            .map_err(to_py)?;
        Ok(Corpus {
            inner: Dataset::new(examples).into(),
        })
    }

    /// Build a text corpus from `(label, tokens)` pairs or
    /// `(label, tokens, parse)` triples with a bracketed parse.
    #[staticmethod]
    fn text(examples: Vec<Bound<'_, PyTuple>>) -> PyResult<Corpus> {
        let mut built = Vec::with_capacity(examples.len());
        for (i, row) in examples.iter().enumerate() {
            if !(2..=3).contains(&row.len()) {
                return Err(ParseError::new_err(format!("text example {} is not a pair or triple", i + 1)));
            }
            let label: String = row.get_item(0)?.extract()?;
            let toks: Vec<String> = row.get_item(1)?.extract()?;
            let parse: Option<String> = if row.len() == 3 { row.get_item(2)?.extract()? } else { None };
            let e = TextExample::new(label, tokens(&toks).map_err(to_py)?);
            built.push(match parse {
                Some(p) => e.with_parse(parse_tree(&p, i + 1).map_err(to_py)?).map_err(to_py)?,
                None => e,
            });
        }
        Ok(Corpus {
            inner: Dataset::new(built).validated().map_err(to_py)?.into(),
        })
    }

    #[getter]
    fn task(&self) -> String {
        self.inner.task().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Corpus(task={}, examples={})", self.inner.task(), self.inner.len())
    }

    /// Examples as plain Python values: `(tokens, tags)` for pos,
    /// `(tokens, heads, deprels)` for dep, a bracket string for const and
    /// `(label, tokens, parse)` for text.
    fn examples<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let strs = |t: &[sub2_core::corpus::Token]| t.iter().map(|x| x.as_str().to_string()).collect::<Vec<_>>();
        let items: Vec<Bound<'py, PyAny>> = match &self.inner {
            AnyDataset::Pos(d) => d
                .examples()
                .iter()
                .map(|e| (strs(&e.tokens), e.tags.clone()).into_pyobject(py).map(|o| o.into_any()))
                .collect::<PyResult<_>>()?,
            AnyDataset::Dep(d) => d
                .examples()
                .iter()
                .map(|e| {
                    (strs(&e.tokens), e.heads.clone(), e.deprels.clone())
                        .into_pyobject(py)
                        .map(|o| o.into_any())
                })
                .collect::<PyResult<_>>()?,
            AnyDataset::Const(d) => d
                .examples()
                .iter()
                .map(|e| Ok(tree_to_string(e).into_pyobject(py)?.into_any()))
                .collect::<PyResult<_>>()?,
            AnyDataset::Text(d) => d
                .examples()
                .iter()
                .map(|e| {
                    (e.label.clone(), strs(&e.tokens), e.parse.as_ref().map(tree_to_string))
                        .into_pyobject(py)
                        .map(|o| o.into_any())
                })
                .collect::<PyResult<_>>()?,
        };
        PyList::new(py, items)
    }

    /// Provenance annotation per example, `None` for originals.
    fn provenance(&self) -> Vec<Option<String>> {
        match &self.inner {
            AnyDataset::Pos(d) => provenance_of(d),
            AnyDataset::Dep(d) => provenance_of(d),
            AnyDataset::Const(d) => provenance_of(d),
            AnyDataset::Text(d) => provenance_of(d),
        }
    }

    /// Serialize in the task's format.
    #[pyo3(signature = (format=None, tag_column="upos"))]
    fn dumps(&self, format: Option<&str>, tag_column: &str) -> PyResult<String> {
        check_format(self.inner.task(), format)?;
        let column: TagColumn = tag_column.parse().map_err(to_py)?;
        let mut buf = Vec::new();
        match &self.inner {
            AnyDataset::Pos(d) => write_conllu_pos(d, column, &mut buf),
            AnyDataset::Dep(d) => write_conllu_dep(d, &mut buf),
            AnyDataset::Const(d) => write_brackets(d, &mut buf),
            AnyDataset::Text(d) => write_text(d, text_format(format)?, &mut buf),
        }
        .map_err(to_py)?;
        String::from_utf8(buf).map_err(|e| Sub2Error::new_err(e.to_string()))
    }

    #[pyo3(signature = (path, format=None, tag_column="upos"))]
    fn write(&self, path: &str, format: Option<&str>, tag_column: &str) -> PyResult<()> {
        let format = match (format, &self.inner) {
            (None, AnyDataset::Text(_)) if path.ends_with(".jsonl") => Some("jsonl"),
            (f, _) => f,
        };
        let text = self.dumps(format, tag_column)?;
        fs::write(path, text).map_err(|e| to_py(e.into()))
    }

    /// Structural violations as `(example_index, rule, message)` tuples.
    fn validate(&self) -> Vec<(usize, String, String)> {
        let v = match &self.inner {
            AnyDataset::Pos(d) => validate_dataset(d),
            AnyDataset::Dep(d) => validate_dataset(d),
            AnyDataset::Const(d) => validate_dataset(d),
            AnyDataset::Text(d) => validate_dataset(d),
        };
        v.into_iter().map(violation_tuple).collect()
    }

    /// Augment with substitution (`sub2`, `balanced`) or a baseline
    /// (`rand`, `randword`). Give either `multiplier` (default 20) or
    /// `target_size`; `replicate` defaults to the multiplier, or 1 with a
    /// target size.
    #[pyo3(signature = (
        seed,
        method="sub2",
        multiplier=None,
        target_size=None,
        replicate=None,
        constraints="",
        max_span_len=None,
        use_aux=false,
        source_pool="growing",
        max_resample_attempts=100
    ))]
    #[allow(clippy::too_many_arguments)]
    fn augment(
        &self,
        py: Python<'_>,
        seed: u64,
        method: &str,
        multiplier: Option<usize>,
        target_size: Option<usize>,
        replicate: Option<usize>,
        constraints: &str,
        max_span_len: Option<usize>,
        use_aux: bool,
        source_pool: &str,
        max_resample_attempts: usize,
    ) -> PyResult<Corpus> {
        let size = match (multiplier, target_size) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new_err("give multiplier or target_size, not both"));
            }
            (_, Some(n)) => SizeSpec::Target(n),
            (k, None) => SizeSpec::Multiplier(k.unwrap_or(sub2_core::augment::DEFAULT_MULTIPLIER)),
        };
        let constraints: ConstraintSet = constraints.parse().map_err(to_py)?;
        let mut config = AugmentConfig::new(seed)
            .method(method.parse::<Method>().map_err(to_py)?)
            .size(size)
            .constraints(constraints)
            .max_span_len(max_span_len)
            .use_aux(use_aux)
            .source_pool(source_pool.parse::<SourcePool>().map_err(to_py)?);
        config.max_resample_attempts = max_resample_attempts;
        if let Some(r) = replicate {
            config = config.replicate(r);
        }
        let inner = py
            .detach(|| -> Result<AnyDataset, Error> {
                Ok(match &self.inner {
                    AnyDataset::Pos(d) => augment(d, &config)?.into(),
                    AnyDataset::Dep(d) => augment(d, &config)?.into(),
                    AnyDataset::Const(d) => augment(d, &config)?.into(),
                    AnyDataset::Text(d) => augment(d, &config)?.into(),
                })
            })
            .map_err(to_py)?;
        Ok(Corpus { inner })
    }

    /// Summary statistics as a dict with the same fields as the CLI's JSON
    /// report.
    #[pyo3(signature = (constraints="", max_span_len=None, use_aux=false, top=DEFAULT_TOP_KEYS, balanced=false))]
    fn stats<'py>(
        &self,
        py: Python<'py>,
        constraints: &str,
        max_span_len: Option<usize>,
        use_aux: bool,
        top: usize,
        balanced: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = match &self.inner {
            AnyDataset::Pos(d) => stats(d, &PosScheme::new(max_span_len), top),
            AnyDataset::Dep(d) => stats(d, &DepScheme, top),
            AnyDataset::Const(d) => stats(d, &ConstScheme::new(use_aux), top),
            AnyDataset::Text(d) => {
                let c = constraints
                    .parse::<ConstraintSet>()
                    .map_err(to_py)?
                    .with_max_span_len(max_span_len);
                let scheme = if balanced {
                    TextScheme::balanced(c)
                } else {
                    TextScheme::new(c)
                }
                .map_err(to_py)?;
                stats(d, &scheme, top)
            }
        }
        .map_err(to_py)?;
        let json = serde_json::to_string(&report).map_err(|e| Sub2Error::new_err(e.to_string()))?;
        py.import("json")?.call_method1("loads", (json,))
    }
}

/// Nonterminal spans `(start, end)` of the balanced binary tree over `n`
/// tokens, in pre-order.
#[pyfunction]
fn balanced_parse(n: usize) -> PyResult<Vec<(usize, usize)>> {
    Ok(build_balanced(n).map_err(to_py)?.nonterminal_spans())
}

/// The balanced binary tree over `tokens` as a bracket string.
#[pyfunction]
fn balanced_tree(tokens_in: Vec<String>) -> PyResult<String> {
    let toks = tokens(&tokens_in).map_err(to_py)?;
    let tree = build_balanced(toks.len()).map_err(to_py)?.to_tree(&toks).map_err(to_py)?;
    Ok(tree_to_string(&tree))
}

#[pymodule]
fn sub2(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Corpus>()?;
    m.add_function(wrap_pyfunction!(balanced_parse, m)?)?;
    m.add_function(wrap_pyfunction!(balanced_tree, m)?)?;
    m.add("Sub2Error", py.get_type::<Sub2Error>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("NoAugmentationError", py.get_type::<NoAugmentationError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
