use crate::augment::splice::splice_dep;
use crate::corpus::{Dataset, DepSentence};
use crate::error::{Error, Result};

use super::{LabelKey, Scheme, Site, SubstructureIndex};

/// `(min, max, size)` of every token's subtree, 1-based, indexed by token
/// index (slot 0 unused). Assumes a well-formed tree.
fn extents(s: &DepSentence) -> Vec<(usize, usize, usize)> {
    let n = s.tokens.len();
    let children = s.children();
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = children[0].clone();
    while let Some(t) = stack.pop() {
        order.push(t);
        stack.extend(&children[t]);
    }
    let mut ext: Vec<(usize, usize, usize)> = (0..=n).map(|t| (t, t, 1)).collect();
    for &t in order.iter().rev() {
        let h = s.heads[t - 1];
        if h != 0 {
            let (lo, hi, size) = ext[t];
            let e = &mut ext[h];
            e.0 = e.0.min(lo);
            e.1 = e.1.max(hi);
            e.2 += size;
        }
    }
    ext
}

/// The token block `[first, last]` (1-based, inclusive) covered by the
/// subtree headed by `head`, if that block is contiguous.
pub fn subtree_block(s: &DepSentence, head: usize) -> Option<(usize, usize)> {
    if head == 0 || head > s.tokens.len() {
        return None;
    }
    let (lo, hi, size) = extents(s)[head];
    (hi - lo + 1 == size).then_some((lo, hi))
}

/// Contiguous-yield subtrees of non-root tokens, keyed by their incoming
/// arc label.
#[derive(Clone, Copy, Debug, Default)]
pub struct DepScheme;

fn head_of(site: &Site) -> Result<usize> {
    match site {
        Site::Subtree(t) => Ok(*t),
        other => Err(Error::Internal(format!("expected a subtree site, got {}", other))),
    }
}

impl Scheme for DepScheme {
    type Example = DepSentence;

    fn substructures(&self, s: &DepSentence) -> Vec<(Site, LabelKey)> {
        let ext = extents(s);
        (1..=s.tokens.len())
            .filter(|&t| s.heads[t - 1] != 0)
            .filter(|&t| {
                let (lo, hi, size) = ext[t];
                hi - lo + 1 == size
            })
            .map(|t| (Site::Subtree(t), LabelKey::new(vec![s.deprels[t - 1].clone()])))
            .collect()
    }

    fn splice(&self, host: &DepSentence, site: &Site, donor: &DepSentence, donor_site: &Site) -> Result<DepSentence> {
        splice_dep(host, head_of(site)?, donor, head_of(donor_site)?)
    }

    fn landing_site(&self, host: &DepSentence, site: &Site, donor: &DepSentence, donor_site: &Site) -> Site {
        let (Ok(t), Ok(dt)) = (head_of(site), head_of(donor_site)) else {
            return site.clone();
        };
        match (subtree_block(host, t), subtree_block(donor, dt)) {
            (Some((a, _)), Some((c, _))) => Site::Subtree(a + (dt - c)),
            _ => site.clone(),
        }
    }

    fn key_at(&self, s: &DepSentence, site: &Site) -> Option<LabelKey> {
        let t = head_of(site).ok()?;
        (t >= 1 && t <= s.tokens.len() && s.heads[t - 1] != 0 && subtree_block(s, t).is_some())
            .then(|| LabelKey::new(vec![s.deprels[t - 1].clone()]))
    }
}

/// Index contiguous-yield dependency subtrees by incoming arc label.
pub fn index_dep(dataset: &Dataset<DepSentence>) -> SubstructureIndex {
    SubstructureIndex::build_unchecked(&DepScheme, dataset.examples())
}
