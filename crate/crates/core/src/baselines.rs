//! Comparison augmenters: structure-preserving shuffle, random word
//! substitution and balanced-tree substitution for text.

use rand::Rng;
use rayon::prelude::*;

use crate::augment::{self, rng, AugmentConfig, Method};
use crate::corpus::{ConstTree, Dataset, DepSentence, Example, Provenance, TaggedSentence, TextExample, Token};
use crate::error::{Error, Result};

/// Token-level rewrites that keep an example's annotation intact.
pub trait Perturb: Example {
    /// Reorder tokens so that new position `i` holds old token `perm[i]`,
    /// carrying token-attached annotation along.
    fn permuted(&self, perm: &[usize]) -> Self;

    /// Replace the form at 0-based `position`.
    fn with_form(&self, position: usize, form: &Token) -> Self;
}

impl Perturb for TaggedSentence {
    fn permuted(&self, perm: &[usize]) -> Self {
        TaggedSentence::new(
            perm.iter().map(|&o| self.tokens[o].clone()).collect(),
            perm.iter().map(|&o| self.tags[o].clone()).collect(),
        )
    }

    fn with_form(&self, position: usize, form: &Token) -> Self {
        let mut tokens = self.tokens.clone();
        tokens[position] = form.clone();
        TaggedSentence::new(tokens, self.tags.clone())
    }
}

impl Perturb for DepSentence {
    /// Arcs follow the words: each token keeps its head token and label.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut new_pos = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_pos[old] = new;
        }
        let heads = perm
            .iter()
            .map(|&o| match self.heads[o] {
                0 => 0,
                h => new_pos[h - 1] + 1,
            })
            .collect();
        DepSentence::new(
            perm.iter().map(|&o| self.tokens[o].clone()).collect(),
            heads,
            perm.iter().map(|&o| self.deprels[o].clone()).collect(),
        )
    }

    fn with_form(&self, position: usize, form: &Token) -> Self {
        let mut tokens = self.tokens.clone();
        tokens[position] = form.clone();
        DepSentence::new(tokens, self.heads.clone(), self.deprels.clone())
    }
}

fn permute_leaves(tree: &ConstTree, perm: &[usize]) -> ConstTree {
    let forms: Vec<String> = tree.yield_forms().into_iter().map(str::to_string).collect();
    let mut out = tree.clone();
    for (slot, &o) in out.leaves_mut().into_iter().zip(perm) {
        *slot = forms[o].clone();
    }
    out
}

fn replace_leaf(tree: &ConstTree, position: usize, form: &Token) -> ConstTree {
    let mut out = tree.clone();
    if let Some(slot) = out.leaves_mut().into_iter().nth(position) {
        *slot = form.as_str().to_string();
    }
    out
}

impl Perturb for ConstTree {
    /// Leaf forms move; the skeleton, pre-terminals included, stays put.
    fn permuted(&self, perm: &[usize]) -> Self {
        permute_leaves(self, perm)
    }

    fn with_form(&self, position: usize, form: &Token) -> Self {
        replace_leaf(self, position, form)
    }
}

impl Perturb for TextExample {
    fn permuted(&self, perm: &[usize]) -> Self {
        TextExample {
            label: self.label.clone(),
            tokens: perm.iter().map(|&o| self.tokens[o].clone()).collect(),
            parse: self.parse.as_ref().map(|p| permute_leaves(p, perm)),
        }
    }

    fn with_form(&self, position: usize, form: &Token) -> Self {
        let mut tokens = self.tokens.clone();
        tokens[position] = form.clone();
        TextExample {
            label: self.label.clone(),
            tokens,
            parse: self.parse.as_ref().map(|p| replace_leaf(p, position, form)),
        }
    }
}

/// Shuffle the words of an example with a uniform permutation while keeping
/// its labels.
pub fn rand_shuffle<E: Perturb, R: Rng + ?Sized>(example: &E, rng: &mut R) -> E {
    let perm = rng::permutation(rng, example.len());
    example.permuted(&perm)
}

/// Distinct word forms of a dataset, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab(Vec<Token>);

impl Vocab {
    pub fn from_dataset<E: Example>(dataset: &Dataset<E>) -> Result<Self> {
        let mut forms: Vec<Token> = dataset
            .examples()
            .iter()
            .flat_map(|e| e.forms())
            .map(Token::new)
            .collect::<Result<_>>()?;
        forms.sort();
        forms.dedup();
        Ok(Vocab(forms))
    }

    pub fn from_forms<S: AsRef<str>>(forms: &[S]) -> Result<Self> {
        let mut forms = crate::corpus::tokens(forms)?;
        forms.sort();
        forms.dedup();
        Ok(Vocab(forms))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Replace one uniformly chosen word with a uniformly chosen different
/// vocabulary word.
pub fn rand_word<E: Perturb, R: Rng + ?Sized>(example: &E, vocab: &Vocab, rng: &mut R) -> Result<E> {
    if vocab.len() < 2 {
        return Err(Error::Config("degenerate vocabulary: fewer than two distinct forms".into()));
    }
    let position = rng::below(rng, example.len());
    let current = example.forms()[position];
    let own = vocab.0.binary_search_by(|t| t.as_str().cmp(current)).ok();
    let pick = rng::below_except(rng, vocab.len(), own);
    Ok(example.with_form(position, &vocab.0[pick]))
}

/// `count` perturbed copies of the originals, round-robin over sources.
/// Copy `g` draws from its own stream, so the result does not depend on
/// how the work is split across threads.
pub(crate) fn generate<E: Perturb>(
    dataset: &Dataset<E>,
    method: Method,
    count: usize,
    seed: u64,
) -> Result<Vec<(E, Provenance)>> {
    let vocab = match method {
        Method::RandWord => Some(Vocab::from_dataset(dataset)?),
        _ => None,
    };
    if let Some(v) = &vocab {
        if v.len() < 2 {
            return Err(Error::Config("degenerate vocabulary: fewer than two distinct forms".into()));
        }
    }
    let n = dataset.len();
    (0..count)
        .into_par_iter()
        .map(|g| {
            let source = g % n;
            let mut rng = rng::stream(seed, g as u64);
            let e = &dataset.examples()[source];
            let out = match &vocab {
                Some(v) => rand_word(e, v, &mut rng)?,
                None => rand_shuffle(e, &mut rng),
            };
            Ok((out, Provenance::generated(source, None)))
        })
        .collect()
}

/// Substitution over balanced binary trees: every nonterminal of the
/// balanced tree of each example is a phrase. `N` and `T` constraints may be
/// combined with it; `L` and `SENTI` are rejected.
pub fn balanced_sub2(dataset: &Dataset<TextExample>, config: &AugmentConfig) -> Result<Dataset<TextExample>> {
    let config = AugmentConfig {
        method: Method::BalancedSub2,
        ..config.clone()
    };
    augment::augment(dataset, &config)
}
