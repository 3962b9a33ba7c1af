use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::augment::splice::splice_text;
use crate::corpus::{Dataset, TextExample};
use crate::error::{Error, Result};

use super::balanced::{balanced_parse, BALANCED_LABEL};
use super::{LabelKey, Scheme, Site, SubstructureIndex};

/// Text-classification substitution constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// Same number of words.
    N,
    /// Only phrases (yields of parse constituents).
    P,
    /// Same phrase label. Requires `P`.
    L,
    /// Same example class label.
    T,
    /// Same phrase auxiliary (sentiment) label. Requires `P`.
    Senti,
}

impl Constraint {
    pub fn as_str(self) -> &'static str {
        match self {
            Constraint::N => "n",
            Constraint::P => "p",
            Constraint::L => "l",
            Constraint::T => "t",
            Constraint::Senti => "senti",
        }
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" => Ok(Constraint::N),
            "p" => Ok(Constraint::P),
            "l" => Ok(Constraint::L),
            "t" => Ok(Constraint::T),
            "senti" => Ok(Constraint::Senti),
            other => Err(Error::Config(format!("unknown constraint '{}'", other))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    flags: BTreeSet<Constraint>,
    pub max_span_len: Option<usize>,
}

impl ConstraintSet {
    pub fn new(flags: impl IntoIterator<Item = Constraint>) -> Self {
        ConstraintSet {
            flags: flags.into_iter().collect(),
            max_span_len: None,
        }
    }

    pub fn with_max_span_len(mut self, cap: Option<usize>) -> Self {
        self.max_span_len = cap;
        self
    }

    pub fn contains(&self, c: Constraint) -> bool {
        self.flags.contains(&c)
    }

    pub fn insert(&mut self, c: Constraint) {
        self.flags.insert(c);
    }

    pub fn flags(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.flags.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// `L` and `SENTI` only make sense on phrases.
    pub fn validate(&self) -> Result<()> {
        for c in [Constraint::L, Constraint::Senti] {
            if self.contains(c) && !self.contains(Constraint::P) {
                return Err(Error::Config(format!("constraint {} requires p", c.as_str())));
            }
        }
        if self.max_span_len == Some(0) {
            return Err(Error::Config("max span length must be at least 1".into()));
        }
        Ok(())
    }
}

impl FromStr for ConstraintSet {
    type Err = Error;

    /// Comma-separated flags, e.g. `p,l,t`. The empty string is the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let flags = s
            .split(',')
            .filter(|f| !f.trim().is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(ConstraintSet {
            flags,
            max_span_len: None,
        })
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.flags.iter().map(|c| c.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phrases {
    /// Constituents of the example's own parse.
    Parse,
    /// Nonterminals of a balanced binary tree over the tokens.
    Balanced,
}

/// Token spans of text examples keyed by the active constraints.
#[derive(Clone, Debug)]
pub struct TextScheme {
    constraints: ConstraintSet,
    phrases: Phrases,
}

impl TextScheme {
    pub fn new(constraints: ConstraintSet) -> Result<Self> {
        constraints.validate()?;
        Ok(TextScheme {
            constraints,
            phrases: Phrases::Parse,
        })
    }

    /// Phrases come from balanced trees instead of parses; `P` is implied and
    /// `L`/`SENTI` are rejected since every balanced node has the same label.
    pub fn balanced(mut constraints: ConstraintSet) -> Result<Self> {
        for c in [Constraint::L, Constraint::Senti] {
            if constraints.contains(c) {
                return Err(Error::Config(format!(
                    "constraint {} is meaningless on balanced trees",
                    c.as_str()
                )));
            }
        }
        constraints.insert(Constraint::P);
        constraints.validate()?;
        Ok(TextScheme {
            constraints,
            phrases: Phrases::Balanced,
        })
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// Phrase spans with the label and aux of their topmost constituent.
    fn phrase_spans(&self, e: &TextExample) -> BTreeMap<(usize, usize), (String, Option<String>)> {
        let mut out = BTreeMap::new();
        match self.phrases {
            Phrases::Parse => {
                if let Some(parse) = &e.parse {
                    // Pre-order: an ancestor sharing the span is seen first.
                    parse.for_each_internal(|_, node, span| {
                        out.entry(span).or_insert_with(|| {
                            (
                                node.label().unwrap_or_default().to_string(),
                                node.aux().map(str::to_string),
                            )
                        });
                    });
                }
            }
            Phrases::Balanced => {
                if let Ok(tree) = balanced_parse(e.tokens.len()) {
                    for span in tree.nonterminal_spans() {
                        out.insert(span, (BALANCED_LABEL.to_string(), None));
                    }
                }
            }
        }
        out
    }

    fn key(&self, e: &TextExample, (i, j): (usize, usize), phrase: Option<&(String, Option<String>)>) -> LabelKey {
        let c = &self.constraints;
        let mut parts = Vec::new();
        if c.contains(Constraint::N) {
            parts.push((j - i).to_string());
        }
        if c.contains(Constraint::L) {
            parts.push(phrase.map(|p| p.0.clone()).unwrap_or_default());
        }
        if c.contains(Constraint::Senti) {
            parts.push(phrase.and_then(|p| p.1.clone()).unwrap_or_default());
        }
        if c.contains(Constraint::T) {
            parts.push(e.label.clone());
        }
        if parts.is_empty() {
            parts.push("*".to_string());
        }
        LabelKey::new(parts)
    }
}

fn span(site: &Site) -> Result<(usize, usize)> {
    match site {
        Site::Span(i, j) => Ok((*i, *j)),
        other => Err(Error::Internal(format!("expected a span, got {}", other))),
    }
}

impl Scheme for TextScheme {
    type Example = TextExample;

    fn substructures(&self, e: &TextExample) -> Vec<(Site, LabelKey)> {
        let n = e.tokens.len();
        let cap = self.constraints.max_span_len.unwrap_or(n);
        if self.constraints.contains(Constraint::P) {
            self.phrase_spans(e)
                .iter()
                .filter(|((i, j), _)| j - i <= cap)
                .map(|(&span, phrase)| (Site::Span(span.0, span.1), self.key(e, span, Some(phrase))))
                .collect()
        } else {
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..=(i + cap).min(n) {
                    out.push((Site::Span(i, j), self.key(e, (i, j), None)));
                }
            }
            out
        }
    }

    fn splice(&self, host: &TextExample, site: &Site, donor: &TextExample, donor_site: &Site) -> Result<TextExample> {
        splice_text(host, span(site)?, donor, span(donor_site)?)
    }

    fn landing_site(&self, _: &TextExample, site: &Site, _: &TextExample, donor_site: &Site) -> Site {
        match (site, donor_site) {
            (Site::Span(i, _), Site::Span(c, d)) => Site::Span(*i, i + (d - c)),
            _ => site.clone(),
        }
    }

    fn check(&self, dataset: &Dataset<TextExample>) -> Result<()> {
        self.constraints.validate()?;
        if self.phrases == Phrases::Balanced || !self.constraints.contains(Constraint::P) {
            return Ok(());
        }
        for (i, e) in dataset.examples().iter().enumerate() {
            let Some(parse) = &e.parse else {
                return Err(Error::Config(format!("constraint p needs parsed input; example {} has no parse", i)));
            };
            if self.constraints.contains(Constraint::Senti) {
                let mut missing = false;
                parse.for_each_internal(|_, n, _| missing |= n.aux().is_none());
                if missing {
                    return Err(Error::Config(format!(
                        "constraint senti needs phrase labels on every node; example {} lacks them",
                        i
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Index text spans under a constraint set.
pub fn index_text(dataset: &Dataset<TextExample>, constraints: &ConstraintSet) -> Result<SubstructureIndex> {
    SubstructureIndex::build(&TextScheme::new(constraints.clone())?, dataset)
}
