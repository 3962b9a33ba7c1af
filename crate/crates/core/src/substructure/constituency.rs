use crate::augment::splice::splice_const;
use crate::corpus::{ConstTree, Dataset};
use crate::error::{Error, Result};

use super::{LabelKey, Scheme, Site, SubstructureIndex};

/// Every internal node, the root included, keyed by its label (and its
/// auxiliary label when `use_aux` is set).
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstScheme {
    pub use_aux: bool,
}

impl ConstScheme {
    pub fn new(use_aux: bool) -> Self {
        ConstScheme { use_aux }
    }

    fn key(&self, node: &ConstTree) -> LabelKey {
        let mut parts = vec![node.label().unwrap_or_default().to_string()];
        if self.use_aux {
            parts.push(node.aux().unwrap_or_default().to_string());
        }
        LabelKey::new(parts)
    }
}

fn path(site: &Site) -> Result<&[usize]> {
    match site {
        Site::Path(p) => Ok(p),
        other => Err(Error::Internal(format!("expected a node path, got {}", other))),
    }
}

impl Scheme for ConstScheme {
    type Example = ConstTree;

    fn substructures(&self, tree: &ConstTree) -> Vec<(Site, LabelKey)> {
        let mut out = Vec::new();
        tree.for_each_internal(|p, node, _| out.push((Site::Path(p.to_vec()), self.key(node))));
        out
    }

    fn splice(&self, host: &ConstTree, site: &Site, donor: &ConstTree, donor_site: &Site) -> Result<ConstTree> {
        let (p, dp) = (path(site)?, path(donor_site)?);
        if self.use_aux {
            let aux = host.get(p).and_then(ConstTree::aux);
            if aux.is_none() || aux != donor.get(dp).and_then(ConstTree::aux) {
                return Err(Error::Internal(format!("auxiliary labels differ at {} and {}", site, donor_site)));
            }
        }
        splice_const(host, p, donor, dp)
    }

    fn landing_site(&self, _: &ConstTree, site: &Site, _: &ConstTree, _: &Site) -> Site {
        site.clone()
    }

    fn check(&self, dataset: &Dataset<ConstTree>) -> Result<()> {
        if !self.use_aux {
            return Ok(());
        }
        for (i, tree) in dataset.examples().iter().enumerate() {
            let mut missing = false;
            tree.for_each_internal(|_, n, _| missing |= n.aux().is_none());
            if missing {
                return Err(Error::Config(format!(
                    "auxiliary labels requested but tree {} is not annotated",
                    i
                )));
            }
        }
        Ok(())
    }

    fn key_at(&self, tree: &ConstTree, site: &Site) -> Option<LabelKey> {
        let node = tree.get(path(site).ok()?)?;
        (!node.is_leaf()).then(|| self.key(node))
    }
}

/// Index constituents by label, or by `(label, aux)` with `use_aux`.
pub fn index_const(dataset: &Dataset<ConstTree>, use_aux: bool) -> Result<SubstructureIndex> {
    SubstructureIndex::build(&ConstScheme::new(use_aux), dataset)
}
