//! Substructure enumeration and the label-key index.
//!
//! A [`Scheme`] decides, for one task, which fragments of an example are
//! substructures, what their label keys are, and how a donor fragment is
//! spliced into a host example.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Example};
use crate::error::Result;

mod balanced;
mod constituency;
mod dep;
mod pos;
mod text;

pub use self::balanced::{balanced_parse, BalancedTree, BALANCED_LABEL};
pub use self::constituency::{index_const, ConstScheme};
pub use self::dep::{index_dep, subtree_block, DepScheme};
pub use self::pos::{index_pos, PosScheme};
pub use self::text::{index_text, Constraint, ConstraintSet, TextScheme};

/// Where a substructure sits inside its example.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    /// Half-open token interval `[start, end)`, 0-based.
    Span(usize, usize),
    /// 1-based index of the token heading a dependency subtree.
    Subtree(usize),
    /// Child indices from the root to a constituent.
    Path(Vec<usize>),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Span(i, j) => write!(f, "{}-{}", i, j),
            Site::Subtree(t) => write!(f, "@{}", t),
            Site::Path(p) if p.is_empty() => f.write_str("/"),
            Site::Path(p) => {
                for i in p {
                    write!(f, "/{}", i)?;
                }
                Ok(())
            }
        }
    }
}

/// One substructure occurrence in a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Locus {
    pub example: usize,
    pub site: Site,
}

impl Locus {
    pub fn new(example: usize, site: Site) -> Self {
        Locus { example, site }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.example, self.site)
    }
}

/// The equivalence key under which substructures are interchangeable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelKey(Vec<String>);

impl LabelKey {
    /// # Panics
    ///
    /// Panics if `parts` is empty.
    pub fn new(parts: Vec<String>) -> Self {
        assert!(!parts.is_empty(), "label keys are never empty");
        LabelKey(parts)
    }

    pub fn from_strs(parts: &[&str]) -> Self {
        LabelKey::new(parts.iter().map(|s| s.to_string()).collect())
    }

    pub fn parts(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Task-specific substructure definition.
pub trait Scheme: Sync {
    type Example: Example;

    /// Substructures of one example with their keys, in ascending site order.
    fn substructures(&self, example: &Self::Example) -> Vec<(Site, LabelKey)>;

    /// Replace the substructure at `site` in `host` with the one at
    /// `donor_site` in `donor`.
    fn splice(
        &self,
        host: &Self::Example,
        site: &Site,
        donor: &Self::Example,
        donor_site: &Site,
    ) -> Result<Self::Example>;

    /// Where the donor substructure ends up in the result of [`Scheme::splice`].
    fn landing_site(&self, host: &Self::Example, site: &Site, donor: &Self::Example, donor_site: &Site) -> Site;

    /// Dataset-wide preconditions (parses present, aux labels present).
    fn check(&self, _dataset: &Dataset<Self::Example>) -> Result<()> {
        Ok(())
    }

    /// Key of the substructure at `site`, if it is one.
    fn key_at(&self, example: &Self::Example, site: &Site) -> Option<LabelKey> {
        self.substructures(example)
            .into_iter()
            .find_map(|(s, k)| (&s == site).then_some(k))
    }
}

/// Wraps a scheme so that only substructures with the listed keys count.
#[derive(Clone, Debug)]
pub struct Restricted<S> {
    pub inner: S,
    pub keys: BTreeSet<LabelKey>,
}

impl<S> Restricted<S> {
    pub fn new(inner: S, keys: impl IntoIterator<Item = LabelKey>) -> Self {
        Restricted {
            inner,
            keys: keys.into_iter().collect(),
        }
    }
}

impl<S: Scheme> Scheme for Restricted<S> {
    type Example = S::Example;

    fn substructures(&self, example: &Self::Example) -> Vec<(Site, LabelKey)> {
        let mut subs = self.inner.substructures(example);
        subs.retain(|(_, k)| self.keys.contains(k));
        subs
    }

    fn splice(&self, host: &Self::Example, site: &Site, donor: &Self::Example, donor_site: &Site) -> Result<Self::Example> {
        self.inner.splice(host, site, donor, donor_site)
    }

    fn landing_site(&self, host: &Self::Example, site: &Site, donor: &Self::Example, donor_site: &Site) -> Site {
        self.inner.landing_site(host, site, donor, donor_site)
    }

    fn check(&self, dataset: &Dataset<Self::Example>) -> Result<()> {
        self.inner.check(dataset)
    }
}

/// Label key → occurrences over a dataset. Each entry list is sorted by
/// `(example, site)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubstructureIndex {
    entries: BTreeMap<LabelKey, Vec<Locus>>,
    total: usize,
}

impl SubstructureIndex {
    /// Index every substructure of every example. Examples are scanned in
    /// parallel; the result does not depend on the thread count.
    pub fn build<S: Scheme>(scheme: &S, dataset: &Dataset<S::Example>) -> Result<Self> {
        scheme.check(dataset)?;
        Ok(Self::build_unchecked(scheme, dataset.examples()))
    }

    pub(crate) fn build_unchecked<S: Scheme>(scheme: &S, examples: &[S::Example]) -> Self {
        let per_example: Vec<Vec<(Site, LabelKey)>> =
            examples.par_iter().map(|e| scheme.substructures(e)).collect();
        let mut index = SubstructureIndex::default();
        for (example, subs) in per_example.into_iter().enumerate() {
            for (site, key) in subs {
                index.entries.entry(key).or_default().push(Locus { example, site });
                index.total += 1;
            }
        }
        for list in index.entries.values_mut() {
            list.sort();
        }
        index
    }

    pub fn entries(&self) -> &BTreeMap<LabelKey, Vec<Locus>> {
        &self.entries
    }

    pub fn get(&self, key: &LabelKey) -> &[Locus] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn key_count(&self) -> usize {
        self.entries.len()
    }

    /// All loci in `(example, site)` order.
    pub fn loci(&self) -> BTreeSet<&Locus> {
        self.entries.values().flatten().collect()
    }

    pub fn key_of(&self, locus: &Locus) -> Option<&LabelKey> {
        self.entries
            .iter()
            .find_map(|(k, list)| list.binary_search(locus).is_ok().then_some(k))
    }

    /// Keys with their occurrence counts, rendered as space-joined strings.
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        self.entries.iter().map(|(k, v)| (k.to_string(), v.len())).collect()
    }

    /// The `n` largest entries, largest first; ties broken by key order.
    pub fn largest(&self, n: usize) -> Vec<(&LabelKey, usize)> {
        let mut sizes: Vec<_> = self.entries.iter().map(|(k, v)| (k, v.len())).collect();
        sizes.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        sizes.truncate(n);
        sizes
    }

    /// Whether any key has at least two occurrences, i.e. any substitution
    /// exists at all.
    pub fn has_substitution(&self) -> bool {
        self.entries.values().any(|v| v.len() >= 2)
    }
}
