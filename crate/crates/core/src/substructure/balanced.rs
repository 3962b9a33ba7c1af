use crate::corpus::{ConstTree, Token};
use crate::error::{Error, Result};

/// Label carried by every internal node of a balanced tree.
pub const BALANCED_LABEL: &str = "BAL";

/// Binary tree over token positions built by recursive floor/ceil halving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalancedTree {
    /// 0-based token position.
    Leaf(usize),
    Node {
        span: (usize, usize),
        left: Box<BalancedTree>,
        right: Box<BalancedTree>,
    },
}

/// Balanced binary skeleton over `n` tokens: the left part of every span
/// holds `floor(len/2)` tokens, the right part `ceil(len/2)`.
pub fn balanced_parse(n: usize) -> Result<BalancedTree> {
    if n == 0 {
        return Err(Error::Config("balanced tree needs at least one token".into()));
    }
    Ok(build(0, n))
}

fn build(start: usize, end: usize) -> BalancedTree {
    let len = end - start;
    if len == 1 {
        return BalancedTree::Leaf(start);
    }
    let mid = start + len / 2;
    BalancedTree::Node {
        span: (start, end),
        left: Box::new(build(start, mid)),
        right: Box::new(build(mid, end)),
    }
}

impl BalancedTree {
    pub fn span(&self) -> (usize, usize) {
        match self {
            BalancedTree::Leaf(i) => (*i, i + 1),
            BalancedTree::Node { span, .. } => *span,
        }
    }

    pub fn leaf_count(&self) -> usize {
        let (i, j) = self.span();
        j - i
    }

    /// Spans of the internal (nonterminal) nodes in pre-order.
    pub fn nonterminal_spans(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let BalancedTree::Node { span, left, right } = t {
                out.push(*span);
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            BalancedTree::Leaf(_) => 0,
            BalancedTree::Node { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Materialize as a constituency tree over `tokens`, labelling every
    /// internal node [`BALANCED_LABEL`].
    pub fn to_tree(&self, tokens: &[Token]) -> Result<ConstTree> {
        if tokens.len() != self.leaf_count() {
            return Err(Error::Config(format!(
                "balanced tree spans {} tokens, got {}",
                self.leaf_count(),
                tokens.len()
            )));
        }
        Ok(self.materialize(tokens))
    }

    fn materialize(&self, tokens: &[Token]) -> ConstTree {
        match self {
            BalancedTree::Leaf(i) => ConstTree::Leaf(tokens[*i].as_str().to_string()),
            BalancedTree::Node { left, right, .. } => ConstTree::node(
                BALANCED_LABEL,
                vec![left.materialize(tokens), right.materialize(tokens)],
            ),
        }
    }
}
