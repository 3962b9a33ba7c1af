//! Structural validation and dataset statistics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Example, Provenance, Task};
use crate::error::{Error, Result};
use crate::substructure::{Scheme, SubstructureIndex};

/// Validation rule catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    EmptySentence,
    TokenForm,
    LengthAlignment,
    SingleRoot,
    Acyclic,
    HeadRange,
    NonemptyChildren,
    YieldMatch,
    NodeLabel,
    AuxUniform,
    ParseYieldMatch,
    KnownLabel,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::EmptySentence,
        Rule::TokenForm,
        Rule::LengthAlignment,
        Rule::SingleRoot,
        Rule::Acyclic,
        Rule::HeadRange,
        Rule::NonemptyChildren,
        Rule::YieldMatch,
        Rule::NodeLabel,
        Rule::AuxUniform,
        Rule::ParseYieldMatch,
        Rule::KnownLabel,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::EmptySentence => "empty-sentence",
            Rule::TokenForm => "token-form",
            Rule::LengthAlignment => "length-alignment",
            Rule::SingleRoot => "single-root",
            Rule::Acyclic => "acyclic",
            Rule::HeadRange => "head-range",
            Rule::NonemptyChildren => "nonempty-children",
            Rule::YieldMatch => "yield-match",
            Rule::NodeLabel => "node-label",
            Rule::AuxUniform => "aux-uniform",
            Rule::ParseYieldMatch => "parse-yield-match",
            Rule::KnownLabel => "known-label",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub example_index: usize,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "example {}: [{}] {}", self.example_index, self.rule, self.message)
    }
}

/// Every carrier-invariant violation in the dataset, ordered by example.
///
/// Class labels of non-original examples must occur among the originals.
pub fn validate_dataset<E: Example>(dataset: &Dataset<E>) -> Vec<Violation> {
    let inventory: HashSet<&str> = dataset
        .iter()
        .filter(|(_, p)| p.is_original())
        .filter_map(|(e, _)| e.class_label())
        .collect();
    dataset
        .examples()
        .par_iter()
        .zip(dataset.provenance().par_iter())
        .enumerate()
        .flat_map_iter(|(i, (e, p))| {
            let mut out: Vec<Violation> = e
                .violations()
                .into_iter()
                .map(|(rule, message)| Violation {
                    example_index: i,
                    rule,
                    message,
                })
                .collect();
            if let Some(label) = e.class_label() {
                if !p.is_original() && !inventory.contains(label) {
                    out.push(Violation {
                        example_index: i,
                        rule: Rule::KnownLabel,
                        message: format!("class label '{}' does not occur among the originals", label),
                    });
                }
            }
            out
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyCount {
    pub key: String,
    pub count: usize,
}

/// Summary of a dataset and its substructure index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub task: Task,
    pub examples: usize,
    pub original: usize,
    pub generated: usize,
    pub replicated: usize,
    pub tokens: usize,
    pub mean_length: f64,
    pub max_length: usize,
    pub duplicates: usize,
    pub total_loci: usize,
    pub total_keys: usize,
    pub top_keys: Vec<KeyCount>,
    pub histogram: BTreeMap<String, usize>,
}

pub const DEFAULT_TOP_KEYS: usize = 10;

/// Validate `dataset`, index it with `scheme`, and summarize.
pub fn stats<S: Scheme>(dataset: &Dataset<S::Example>, scheme: &S, top_k: usize) -> Result<StatsReport> {
    if let Some(v) = validate_dataset(dataset).into_iter().next() {
        return Err(Error::validation(format!("example {}", v.example_index), format!("[{}] {}", v.rule, v.message)));
    }
    let index = SubstructureIndex::build(scheme, dataset)?;

    let (mut original, mut generated, mut replicated) = (0, 0, 0);
    for p in dataset.provenance() {
        match p {
            Provenance::Original => original += 1,
            Provenance::Generated(_) => generated += 1,
            Provenance::Replicated { .. } => replicated += 1,
        }
    }
    let lengths: Vec<usize> = dataset.examples().iter().map(Example::len).collect();
    let tokens: usize = lengths.iter().sum();
    let mut seen = BTreeSet::new();
    let duplicates = dataset
        .examples()
        .iter()
        .filter(|e| !seen.insert(e.canonical()))
        .count();

    Ok(StatsReport {
        task: dataset.task(),
        examples: dataset.len(),
        original,
        generated,
        replicated,
        tokens,
        mean_length: if lengths.is_empty() {
            0.0
        } else {
            tokens as f64 / lengths.len() as f64
        },
        max_length: lengths.iter().copied().max().unwrap_or(0),
        duplicates,
        total_loci: index.total(),
        total_keys: index.key_count(),
        top_keys: index
            .largest(top_k)
            .into_iter()
            .map(|(k, count)| KeyCount {
                key: k.to_string(),
                count,
            })
            .collect(),
        histogram: index.histogram(),
    })
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("task", self.task.to_string()),
            ("examples", self.examples.to_string()),
            ("original", self.original.to_string()),
            ("generated", self.generated.to_string()),
            ("replicated", self.replicated.to_string()),
            ("tokens", self.tokens.to_string()),
            ("mean length", format!("{:.2}", self.mean_length)),
            ("max length", self.max_length.to_string()),
            ("duplicates", self.duplicates.to_string()),
            ("substructures", self.total_loci.to_string()),
            ("label keys", self.total_keys.to_string()),
        ];
        for (name, value) in rows {
            writeln!(f, "{:<14} {:>10}", name, value)?;
        }
        if !self.top_keys.is_empty() {
            writeln!(f)?;
            let width = self.top_keys.iter().map(|k| k.key.chars().count()).max().unwrap_or(0).max(3);
            writeln!(f, "{:<width$}  {:>8}", "key", "count", width = width)?;
            for k in &self.top_keys {
                writeln!(f, "{:<width$}  {:>8}", k.key, k.count, width = width)?;
            }
        }
        Ok(())
    }
}
