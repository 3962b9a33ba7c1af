//! Substructure replacement for each carrier type.

use crate::corpus::{ConstTree, DepSentence, Example, TaggedSentence, TextExample};
use crate::error::{Error, Result};
use crate::substructure::subtree_block;

fn check_span(len: usize, (i, j): (usize, usize), what: &str) -> Result<()> {
    if i < j && j <= len {
        Ok(())
    } else {
        Err(Error::Internal(format!("{} span {}-{} out of bounds for length {}", what, i, j, len)))
    }
}

fn postcondition<E: Example>(e: E) -> Result<E> {
    match e.violations().into_iter().next() {
        None => Ok(e),
        Some((rule, msg)) => Err(Error::Internal(format!("splice produced an invalid example: [{}] {}", rule.id(), msg))),
    }
}

/// Replace `tokens[span]` with the donor's tokens. Both spans must carry
/// the same tag sequence, so the tags of the result are unchanged.
pub fn splice_pos(
    host: &TaggedSentence,
    span: (usize, usize),
    donor: &TaggedSentence,
    donor_span: (usize, usize),
) -> Result<TaggedSentence> {
    check_span(host.tokens.len(), span, "host")?;
    check_span(donor.tokens.len(), donor_span, "donor")?;
    let (i, j) = span;
    let (c, d) = donor_span;
    if host.tags[i..j] != donor.tags[c..d] {
        return Err(Error::Internal("tag sequences of the swapped spans differ".into()));
    }
    let mut tokens = Vec::with_capacity(host.tokens.len() - (j - i) + (d - c));
    tokens.extend_from_slice(&host.tokens[..i]);
    tokens.extend_from_slice(&donor.tokens[c..d]);
    tokens.extend_from_slice(&host.tokens[j..]);
    let mut tags = Vec::with_capacity(tokens.len());
    tags.extend_from_slice(&host.tags[..i]);
    tags.extend_from_slice(&donor.tags[c..d]);
    tags.extend_from_slice(&host.tags[j..]);
    postcondition(TaggedSentence::new(tokens, tags))
}

/// Replace the subtree headed by `head` with the donor subtree headed by
/// `donor_head`. Both subtrees must have contiguous yields and the same
/// incoming arc label. The donor block keeps its internal arcs, its head
/// attaches to the host subtree's former parent, and heads outside the
/// block shift by the change in length.
pub fn splice_dep(host: &DepSentence, head: usize, donor: &DepSentence, donor_head: usize) -> Result<DepSentence> {
    let (a, b) = subtree_block(host, head)
        .ok_or_else(|| Error::Internal(format!("host subtree at {} is not contiguous", head)))?;
    let (c, d) = subtree_block(donor, donor_head)
        .ok_or_else(|| Error::Internal(format!("donor subtree at {} is not contiguous", donor_head)))?;
    if host.deprels[head - 1] != donor.deprels[donor_head - 1] {
        return Err(Error::Internal("incoming arc labels of the swapped subtrees differ".into()));
    }
    let parent = host.heads[head - 1];
    if parent == 0 {
        return Err(Error::Internal("the root subtree is not a substructure".into()));
    }
    let old_len = b - a + 1;
    let new_len = d - c + 1;
    // Host positions after the block move by new_len - old_len.
    let remap = |h: usize| -> usize {
        if h == 0 || h < a {
            h
        } else {
            h + new_len - old_len
        }
    };

    let n = host.tokens.len() - old_len + new_len;
    let mut tokens = Vec::with_capacity(n);
    let mut heads = Vec::with_capacity(n);
    let mut deprels = Vec::with_capacity(n);
    for t in 1..a {
        tokens.push(host.tokens[t - 1].clone());
        heads.push(remap(host.heads[t - 1]));
        deprels.push(host.deprels[t - 1].clone());
    }
    for t in c..=d {
        tokens.push(donor.tokens[t - 1].clone());
        if t == donor_head {
            heads.push(remap(parent));
            deprels.push(host.deprels[head - 1].clone());
        } else {
            heads.push(a + donor.heads[t - 1] - c);
            deprels.push(donor.deprels[t - 1].clone());
        }
    }
    for t in b + 1..=host.tokens.len() {
        tokens.push(host.tokens[t - 1].clone());
        heads.push(remap(host.heads[t - 1]));
        deprels.push(host.deprels[t - 1].clone());
    }
    postcondition(DepSentence::new(tokens, heads, deprels))
}

/// Replace the constituent at `path` with a copy of the donor constituent
/// at `donor_path`. Both must be internal nodes with the same label.
pub fn splice_const(host: &ConstTree, path: &[usize], donor: &ConstTree, donor_path: &[usize]) -> Result<ConstTree> {
    let replacement = donor
        .get(donor_path)
        .filter(|n| !n.is_leaf())
        .ok_or_else(|| Error::Internal(format!("donor path {:?} does not name a constituent", donor_path)))?;
    let mut out = host.clone();
    let slot = out
        .get_mut(path)
        .filter(|n| !n.is_leaf())
        .ok_or_else(|| Error::Internal(format!("host path {:?} does not name a constituent", path)))?;
    if slot.label() != replacement.label() {
        return Err(Error::Internal("labels of the swapped constituents differ".into()));
    }
    *slot = replacement.clone();
    postcondition(out)
}

/// Replace `tokens[span]` with the donor's tokens. The class label is kept;
/// the parse is dropped.
pub fn splice_text(
    host: &TextExample,
    span: (usize, usize),
    donor: &TextExample,
    donor_span: (usize, usize),
) -> Result<TextExample> {
    check_span(host.tokens.len(), span, "host")?;
    check_span(donor.tokens.len(), donor_span, "donor")?;
    let (i, j) = span;
    let (c, d) = donor_span;
    let mut tokens = Vec::with_capacity(host.tokens.len() - (j - i) + (d - c));
    tokens.extend_from_slice(&host.tokens[..i]);
    tokens.extend_from_slice(&donor.tokens[c..d]);
    tokens.extend_from_slice(&host.tokens[j..]);
    postcondition(TextExample::new(host.label.clone(), tokens))
}
