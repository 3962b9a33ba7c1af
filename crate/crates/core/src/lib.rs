//! Data augmentation by same-label substructure substitution.
//!
//! New training examples are made by swapping a fragment of one example
//! (a token span, a dependency subtree or a constituent) for a fragment of
//! another example that carries the same label key. The crate covers POS
//! tagging, dependency parsing, constituency parsing and text
//! classification, together with shuffle, random-word and balanced-tree
//! baselines.
//!
//! ```
//! use sub2_core::corpus::{Dataset, TaggedSentence};
//! use sub2_core::augment::{augment, AugmentConfig, SizeSpec};
//!
//! let data = Dataset::new(vec![
//!     TaggedSentence::from_strs(&["I", "have", "a", "book"], &["PRP", "VBP", "DT", "NN"]).unwrap(),
//!     TaggedSentence::from_strs(&["They", "ate", "an", "orange"], &["PRP", "VBD", "DT", "NN"]).unwrap(),
//! ]);
//! let config = AugmentConfig::new(7).size(SizeSpec::Multiplier(3));
//! let out = augment(&data, &config).unwrap();
//! assert_eq!(out.len(), 4 * 2 + 2 * 2);
//! ```

pub mod augment;
pub mod baselines;
pub mod corpus;
mod error;
pub mod substructure;
pub mod validate;

pub use crate::error::{Error, Result};
