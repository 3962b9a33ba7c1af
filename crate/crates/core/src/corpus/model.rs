use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::validate::Rule;

/// The four supported annotation tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Pos,
    Dep,
    Const,
    Text,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Pos => "pos",
            Task::Dep => "dep",
            Task::Const => "const",
            Task::Text => "text",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" => Ok(Task::Pos),
            "dep" => Ok(Task::Dep),
            "const" => Ok(Task::Const),
            "text" => Ok(Task::Text),
            other => Err(Error::Config(format!("unknown task '{}'", other))),
        }
    }
}

/// A word form. Never empty and never contains whitespace.
///
/// The 1-based index of a token is its position in the owning sentence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(form: impl Into<String>) -> Result<Self> {
        let form = form.into();
        if !is_valid_form(&form) {
            return Err(Error::validation(
                "token",
                format!("'{}' is empty or contains whitespace", form.escape_debug()),
            ));
        }
        Ok(Token(form))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_valid_form(form: &str) -> bool {
    !form.is_empty() && !form.chars().any(char::is_whitespace)
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Build a token list from whitespace-free forms.
pub fn tokens<S: AsRef<str>>(forms: &[S]) -> Result<Vec<Token>> {
    forms.iter().map(|f| Token::new(f.as_ref())).collect()
}

/// A POS-tagged sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<Token>,
    pub tags: Vec<String>,
    /// CoNLL-U comment lines (without the leading `#`), kept for originals.
    pub comments: Vec<String>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<Token>, tags: Vec<String>) -> Self {
        TaggedSentence {
            tokens,
            tags,
            comments: Vec::new(),
        }
    }

    /// Convenience constructor from `&str` slices.
    pub fn from_strs(forms: &[&str], tags: &[&str]) -> Result<Self> {
        let s = TaggedSentence::new(tokens(forms)?, tags.iter().map(|t| t.to_string()).collect());
        s.ensure_valid()?;
        Ok(s)
    }
}

/// A dependency-parsed sentence. `heads[i]` is the 1-based head of token
/// `i + 1`, with 0 denoting the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepSentence {
    pub tokens: Vec<Token>,
    pub heads: Vec<usize>,
    pub deprels: Vec<String>,
    pub comments: Vec<String>,
}

impl DepSentence {
    pub fn new(tokens: Vec<Token>, heads: Vec<usize>, deprels: Vec<String>) -> Self {
        DepSentence {
            tokens,
            heads,
            deprels,
            comments: Vec::new(),
        }
    }

    pub fn from_strs(forms: &[&str], heads: &[usize], deprels: &[&str]) -> Result<Self> {
        let s = DepSentence::new(
            tokens(forms)?,
            heads.to_vec(),
            deprels.iter().map(|d| d.to_string()).collect(),
        );
        s.ensure_valid()?;
        Ok(s)
    }

    /// 1-based index of the root token, if there is exactly one.
    pub fn root(&self) -> Option<usize> {
        let mut roots = self.heads.iter().enumerate().filter(|(_, &h)| h == 0);
        match (roots.next(), roots.next()) {
            (Some((i, _)), None) => Some(i + 1),
            _ => None,
        }
    }

    /// 1-based dependents of every token; index 0 holds the root's children.
    pub(crate) fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len() + 1];
        for (i, &h) in self.heads.iter().enumerate() {
            if h <= self.tokens.len() {
                children[h].push(i + 1);
            }
        }
        children
    }
}

/// A constituency tree. Pre-terminals are ordinary internal nodes whose only
/// child is a leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstTree {
    Leaf(String),
    Node {
        label: String,
        aux: Option<String>,
        children: Vec<ConstTree>,
    },
}

impl ConstTree {
    pub fn leaf(form: impl Into<String>) -> Self {
        ConstTree::Leaf(form.into())
    }

    pub fn node(label: impl Into<String>, children: Vec<ConstTree>) -> Self {
        ConstTree::Node {
            label: label.into(),
            aux: None,
            children,
        }
    }

    pub fn node_with_aux(
        label: impl Into<String>,
        aux: impl Into<String>,
        children: Vec<ConstTree>,
    ) -> Self {
        ConstTree::Node {
            label: label.into(),
            aux: Some(aux.into()),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ConstTree::Leaf(_))
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            ConstTree::Leaf(_) => None,
            ConstTree::Node { label, .. } => Some(label),
        }
    }

    pub fn aux(&self) -> Option<&str> {
        match self {
            ConstTree::Leaf(_) => None,
            ConstTree::Node { aux, .. } => aux.as_deref(),
        }
    }

    pub fn children(&self) -> &[ConstTree] {
        match self {
            ConstTree::Leaf(_) => &[],
            ConstTree::Node { children, .. } => children,
        }
    }

    /// Left-to-right leaf forms.
    pub fn yield_forms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_yield(&mut out);
        out
    }

    fn collect_yield<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ConstTree::Leaf(form) => out.push(form),
            ConstTree::Node { children, .. } => {
                for c in children {
                    c.collect_yield(out);
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ConstTree::Leaf(_) => 1,
            ConstTree::Node { children, .. } => children.iter().map(ConstTree::leaf_count).sum(),
        }
    }

    /// Follow a path of child indices from this node.
    pub fn get(&self, path: &[usize]) -> Option<&ConstTree> {
        path.iter().try_fold(self, |node, &i| node.children().get(i))
    }

    pub fn get_mut(&mut self, path: &[usize]) -> Option<&mut ConstTree> {
        let mut node = self;
        for &i in path {
            node = match node {
                ConstTree::Leaf(_) => return None,
                ConstTree::Node { children, .. } => children.get_mut(i)?,
            };
        }
        Some(node)
    }

    /// Visit every internal node in pre-order with its path and the
    /// half-open leaf span it covers.
    pub fn for_each_internal<F>(&self, mut f: F)
    where
        F: FnMut(&[usize], &ConstTree, (usize, usize)),
    {
        let mut path = Vec::new();
        self.walk_internal(&mut path, 0, &mut f);
    }

    fn walk_internal<F>(&self, path: &mut Vec<usize>, start: usize, f: &mut F) -> usize
    where
        F: FnMut(&[usize], &ConstTree, (usize, usize)),
    {
        match self {
            ConstTree::Leaf(_) => start + 1,
            ConstTree::Node { children, .. } => {
                // Pre-order visit needs the end offset before recursing.
                let end = start + self.leaf_count();
                f(path, self, (start, end));
                let mut offset = start;
                for (i, c) in children.iter().enumerate() {
                    path.push(i);
                    offset = c.walk_internal(path, offset, f);
                    path.pop();
                }
                offset
            }
        }
    }

    pub fn internal_count(&self) -> usize {
        let mut n = 0;
        self.for_each_internal(|_, _, _| n += 1);
        n
    }

    /// Leaf forms in order, mutable.
    pub(crate) fn leaves_mut(&mut self) -> Vec<&mut String> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a mut ConstTree, out: &mut Vec<&'a mut String>) {
            match t {
                ConstTree::Leaf(form) => out.push(form),
                ConstTree::Node { children, .. } => {
                    for c in children {
                        go(c, out);
                    }
                }
            }
        }
        go(self, &mut out);
        out
    }
}

/// A class-labeled token sequence with an optional constituency parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextExample {
    pub label: String,
    pub tokens: Vec<Token>,
    pub parse: Option<ConstTree>,
}

impl TextExample {
    pub fn new(label: impl Into<String>, tokens: Vec<Token>) -> Self {
        TextExample {
            label: label.into(),
            tokens,
            parse: None,
        }
    }

    pub fn from_strs(label: &str, forms: &[&str]) -> Result<Self> {
        Ok(TextExample::new(label, tokens(forms)?))
    }

    pub fn with_parse(mut self, parse: ConstTree) -> Result<Self> {
        self.parse = Some(parse);
        self.ensure_valid()?;
        Ok(self)
    }
}

/// Behaviour shared by all carrier types.
pub trait Example: Clone + PartialEq + fmt::Debug + Send + Sync {
    const TASK: Task;

    /// Surface forms in order.
    fn forms(&self) -> Vec<&str>;

    /// Structural violations of this example's invariants.
    fn violations(&self) -> Vec<(Rule, String)>;

    /// Single-line canonical rendering, used for duplicate detection.
    fn canonical(&self) -> String;

    fn len(&self) -> usize {
        self.forms().len()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Class label, for carriers that have one.
    fn class_label(&self) -> Option<&str> {
        None
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((rule, message)) => Err(Error::validation(
                format!("{} example", Self::TASK),
                format!("[{}] {}", rule.id(), message),
            )),
        }
    }
}

fn form_violations(tokens: &[Token]) -> Vec<(Rule, String)> {
    let mut out = Vec::new();
    if tokens.is_empty() {
        out.push((Rule::EmptySentence, "sentence has no tokens".to_string()));
    }
    for (i, t) in tokens.iter().enumerate() {
        if !is_valid_form(t.as_str()) {
            out.push((
                Rule::TokenForm,
                format!("token {} '{}' is empty or contains whitespace", i + 1, t.as_str().escape_debug()),
            ));
        }
    }
    out
}

impl Example for TaggedSentence {
    const TASK: Task = Task::Pos;

    fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::as_str).collect()
    }

    fn violations(&self) -> Vec<(Rule, String)> {
        let mut out = form_violations(&self.tokens);
        if self.tokens.len() != self.tags.len() {
            out.push((
                Rule::LengthAlignment,
                format!("{} tokens but {} tags", self.tokens.len(), self.tags.len()),
            ));
        }
        out
    }

    fn canonical(&self) -> String {
        self.tokens
            .iter()
            .zip(&self.tags)
            .map(|(t, tag)| format!("{}/{}", t, tag))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Example for DepSentence {
    const TASK: Task = Task::Dep;

    fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::as_str).collect()
    }

    fn violations(&self) -> Vec<(Rule, String)> {
        let mut out = form_violations(&self.tokens);
        let n = self.tokens.len();
        if self.heads.len() != n || self.deprels.len() != n {
            out.push((
                Rule::LengthAlignment,
                format!(
                    "{} tokens, {} heads, {} deprels",
                    n,
                    self.heads.len(),
                    self.deprels.len()
                ),
            ));
            return out;
        }
        let mut in_range = true;
        for (i, &h) in self.heads.iter().enumerate() {
            if h > n || h == i + 1 {
                in_range = false;
                out.push((
                    Rule::HeadRange,
                    format!("token {} has head {} outside [0, {}] or itself", i + 1, h, n),
                ));
            }
        }
        let roots = self.heads.iter().filter(|&&h| h == 0).count();
        if roots != 1 && n > 0 {
            out.push((Rule::SingleRoot, format!("{} root tokens, expected exactly 1", roots)));
        }
        if in_range {
            // Walk up from each token; a walk longer than n means a cycle.
            for start in 1..=n {
                let mut cur = start;
                let mut steps = 0;
                while cur != 0 && steps <= n {
                    cur = self.heads[cur - 1];
                    steps += 1;
                }
                if cur != 0 {
                    out.push((Rule::Acyclic, format!("token {} lies on or above a cycle", start)));
                    break;
                }
            }
        }
        out
    }

    fn canonical(&self) -> String {
        self.tokens
            .iter()
            .zip(self.heads.iter().zip(&self.deprels))
            .map(|(t, (h, rel))| format!("{}/{}/{}", t, h, rel))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub(crate) fn tree_violations(tree: &ConstTree) -> Vec<(Rule, String)> {
    let mut out = Vec::new();
    if tree.is_leaf() {
        // A bare leaf is a tree with a one-word yield and no constituents.
        if let ConstTree::Leaf(form) = tree {
            if !is_valid_form(form) {
                out.push((Rule::TokenForm, format!("leaf '{}' is not a valid form", form.escape_debug())));
            }
        }
        return out;
    }
    let mut with_aux = 0;
    let mut internal = 0;
    fn go(t: &ConstTree, out: &mut Vec<(Rule, String)>, with_aux: &mut usize, internal: &mut usize) {
        match t {
            ConstTree::Leaf(form) => {
                if !is_valid_form(form) {
                    out.push((Rule::TokenForm, format!("leaf '{}' is not a valid form", form.escape_debug())));
                }
            }
            ConstTree::Node { label, aux, children } => {
                *internal += 1;
                if aux.is_some() {
                    *with_aux += 1;
                }
                if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                    out.push((Rule::NodeLabel, format!("bad node label '{}'", label.escape_debug())));
                }
                if aux.as_deref().is_some_and(|a| a.is_empty() || a.chars().any(|c| c.is_whitespace() || c == '(' || c == ')')) {
                    out.push((Rule::NodeLabel, format!("bad auxiliary label on node '{}'", label)));
                }
                if children.is_empty() {
                    out.push((Rule::NonemptyChildren, format!("node '{}' has no children", label)));
                }
                for c in children {
                    go(c, out, with_aux, internal);
                }
            }
        }
    }
    go(tree, &mut out, &mut with_aux, &mut internal);
    if tree.leaf_count() == 0 {
        out.push((Rule::YieldMatch, "tree has an empty yield".to_string()));
    }
    if with_aux != 0 && with_aux != internal {
        out.push((
            Rule::AuxUniform,
            format!("{} of {} internal nodes carry an auxiliary label", with_aux, internal),
        ));
    }
    out
}

impl Example for ConstTree {
    const TASK: Task = Task::Const;

    fn forms(&self) -> Vec<&str> {
        self.yield_forms()
    }

    fn violations(&self) -> Vec<(Rule, String)> {
        tree_violations(self)
    }

    fn canonical(&self) -> String {
        crate::corpus::brackets::tree_to_string(self)
    }
}

impl Example for TextExample {
    const TASK: Task = Task::Text;

    fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::as_str).collect()
    }

    fn violations(&self) -> Vec<(Rule, String)> {
        let mut out = form_violations(&self.tokens);
        if self.label.is_empty() || self.label.contains(['\t', '\n']) {
            out.push((Rule::KnownLabel, format!("unusable class label '{}'", self.label.escape_debug())));
        }
        if let Some(parse) = &self.parse {
            for (rule, msg) in tree_violations(parse) {
                out.push((rule, format!("parse: {}", msg)));
            }
            let yielded = parse.yield_forms();
            if yielded != self.forms() {
                out.push((
                    Rule::ParseYieldMatch,
                    format!("parse yield '{}' differs from tokens '{}'", yielded.join(" "), self.forms().join(" ")),
                ));
            }
        }
        out
    }

    fn canonical(&self) -> String {
        format!("{}\t{}", self.label, self.forms().join(" "))
    }

    fn class_label(&self) -> Option<&str> {
        Some(&self.label)
    }
}

/// How an example entered a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Provenance {
    #[default]
    Original,
    Generated(Generation),
    Replicated { of: usize },
}

/// Source and donor of a generated example. Sites are only known in memory;
/// serialized provenance carries example indices alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generation {
    pub source: usize,
    pub donor: Option<usize>,
    pub sites: Option<(crate::substructure::Site, crate::substructure::Site)>,
}

impl Provenance {
    pub fn generated(source: usize, donor: Option<usize>) -> Self {
        Provenance::Generated(Generation {
            source,
            donor,
            sites: None,
        })
    }

    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }

    /// Body of the provenance annotation, e.g. `source:3 donor:1`.
    /// `None` for originals.
    pub fn annotation(&self) -> Option<String> {
        match self {
            Provenance::Original => None,
            Provenance::Generated(g) => Some(match g.donor {
                Some(d) => format!("source:{} donor:{}", g.source, d),
                None => format!("source:{}", g.source),
            }),
            Provenance::Replicated { of } => Some(format!("replicated:{}", of)),
        }
    }

    pub fn parse_annotation(body: &str) -> Option<Provenance> {
        let mut source = None;
        let mut donor = None;
        let mut replicated = None;
        for field in body.split_whitespace() {
            let (k, v) = field.split_once(':')?;
            let v: usize = v.parse().ok()?;
            match k {
                "source" => source = Some(v),
                "donor" => donor = Some(v),
                "replicated" => replicated = Some(v),
                _ => return None,
            }
        }
        match (source, donor, replicated) {
            (Some(s), d, None) => Some(Provenance::generated(s, d)),
            (None, None, Some(of)) => Some(Provenance::Replicated { of }),
            _ => None,
        }
    }

    /// Provenance with in-memory sites stripped, as it survives serialization.
    pub fn without_sites(&self) -> Provenance {
        match self {
            Provenance::Generated(g) => Provenance::generated(g.source, g.donor),
            other => other.clone(),
        }
    }
}

/// Comment prefix marking provenance in CoNLL-U and bracket files.
pub const PROVENANCE_COMMENT: &str = "sub2 = ";

/// An ordered collection of examples of one carrier type, with one
/// provenance record per example.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<E> {
    examples: Vec<E>,
    provenance: Vec<Provenance>,
}

impl<E: Example> Dataset<E> {
    pub fn new(examples: Vec<E>) -> Self {
        let provenance = vec![Provenance::Original; examples.len()];
        Dataset {
            examples,
            provenance,
        }
    }

    pub fn with_provenance(examples: Vec<E>, provenance: Vec<Provenance>) -> Result<Self> {
        if examples.len() != provenance.len() {
            return Err(Error::validation(
                "dataset",
                format!("{} examples but {} provenance records", examples.len(), provenance.len()),
            ));
        }
        Ok(Dataset {
            examples,
            provenance,
        })
    }

    pub fn task(&self) -> Task {
        E::TASK
    }

    pub fn examples(&self) -> &[E] {
        &self.examples
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &Provenance)> {
        self.examples.iter().zip(&self.provenance)
    }

    pub fn push(&mut self, example: E, provenance: Provenance) {
        self.examples.push(example);
        self.provenance.push(provenance);
    }

    pub fn into_parts(self) -> (Vec<E>, Vec<Provenance>) {
        (self.examples, self.provenance)
    }

    /// Returns the dataset, or the first carrier violation as an error.
    pub fn validated(self) -> Result<Self> {
        for (i, e) in self.examples.iter().enumerate() {
            if let Some((rule, message)) = e.violations().into_iter().next() {
                return Err(Error::validation(
                    format!("example {}", i),
                    format!("[{}] {}", rule.id(), message),
                ));
            }
        }
        Ok(self)
    }
}

impl<E: Example> FromIterator<E> for Dataset<E> {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        Dataset::new(iter.into_iter().collect())
    }
}

/// A dataset of any task, for callers that dispatch at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyDataset {
    Pos(Dataset<TaggedSentence>),
    Dep(Dataset<DepSentence>),
    Const(Dataset<ConstTree>),
    Text(Dataset<TextExample>),
}

impl AnyDataset {
    pub fn task(&self) -> Task {
        match self {
            AnyDataset::Pos(_) => Task::Pos,
            AnyDataset::Dep(_) => Task::Dep,
            AnyDataset::Const(_) => Task::Const,
            AnyDataset::Text(_) => Task::Text,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyDataset::Pos(d) => d.len(),
            AnyDataset::Dep(d) => d.len(),
            AnyDataset::Const(d) => d.len(),
            AnyDataset::Text(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

macro_rules! any_from {
    ($variant:ident, $ty:ty) => {
        impl From<Dataset<$ty>> for AnyDataset {
            fn from(d: Dataset<$ty>) -> Self {
                AnyDataset::$variant(d)
            }
        }
    };
}

any_from!(Pos, TaggedSentence);
any_from!(Dep, DepSentence);
any_from!(Const, ConstTree);
any_from!(Text, TextExample);
