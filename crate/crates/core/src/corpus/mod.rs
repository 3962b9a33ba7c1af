//! Carrier types and the corpus formats they are read from and written to.

pub mod brackets;
pub mod conllu;
mod model;
pub mod text;

pub use self::brackets::{parse_tree, read_brackets, tree_to_string, write_brackets};
pub use self::conllu::{
    read_conllu_dep, read_conllu_pos, write_conllu_dep, write_conllu_pos, ConlluRead, Skipped, TagColumn,
};
pub use self::model::{
    tokens, AnyDataset, ConstTree, Dataset, DepSentence, Example, Generation, Provenance, TaggedSentence,
    Task, TextExample, Token, PROVENANCE_COMMENT,
};
pub use self::text::{read_text, write_text, TextFormat};
