use crate::augment::splice::splice_pos;
use crate::corpus::{Dataset, TaggedSentence};
use crate::error::{Error, Result};

use super::{LabelKey, Scheme, Site, SubstructureIndex};

/// Token spans keyed by their tag sequence.
#[derive(Clone, Copy, Debug, Default)]
pub struct PosScheme {
    pub max_span_len: Option<usize>,
}

impl PosScheme {
    pub fn new(max_span_len: Option<usize>) -> Self {
        PosScheme { max_span_len }
    }
}

fn span(site: &Site) -> Result<(usize, usize)> {
    match site {
        Site::Span(i, j) => Ok((*i, *j)),
        other => Err(Error::Internal(format!("expected a span, got {}", other))),
    }
}

impl Scheme for PosScheme {
    type Example = TaggedSentence;

    fn substructures(&self, s: &TaggedSentence) -> Vec<(Site, LabelKey)> {
        let n = s.tags.len();
        let cap = self.max_span_len.unwrap_or(n).min(n);
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..=(i + cap).min(n) {
                out.push((Site::Span(i, j), LabelKey::new(s.tags[i..j].to_vec())));
            }
        }
        out
    }

    fn splice(&self, host: &TaggedSentence, site: &Site, donor: &TaggedSentence, donor_site: &Site) -> Result<TaggedSentence> {
        splice_pos(host, span(site)?, donor, span(donor_site)?)
    }

    fn landing_site(&self, _: &TaggedSentence, site: &Site, _: &TaggedSentence, donor_site: &Site) -> Site {
        match (site, donor_site) {
            (Site::Span(i, _), Site::Span(c, d)) => Site::Span(*i, i + (d - c)),
            _ => site.clone(),
        }
    }

    fn key_at(&self, s: &TaggedSentence, site: &Site) -> Option<LabelKey> {
        let (i, j) = span(site).ok()?;
        let cap = self.max_span_len.unwrap_or(usize::MAX);
        (i < j && j <= s.tags.len() && j - i <= cap).then(|| LabelKey::new(s.tags[i..j].to_vec()))
    }
}

/// Index all tag-sequence spans of a POS dataset.
pub fn index_pos(dataset: &Dataset<TaggedSentence>, max_span_len: Option<usize>) -> SubstructureIndex {
    SubstructureIndex::build_unchecked(&PosScheme::new(max_span_len), dataset.examples())
}
