//! Hereditarily finite sets over rational atoms and the logic evaluated on
//! them.

pub mod encode;
pub mod eval;
pub mod formula;
pub mod set;
pub mod tree;

use thiserror::Error;

pub use encode::{decode, decode_seq, encode, encode_seq, read_pair, unzigzag, zigzag};
pub use eval::{eval_delta0, eval_sigma, Assignment, Certificate, SearchBudget, SigmaOutcome};
pub use formula::{BasePred, Formula, Term};
pub use set::{canonicalize, hf_equal, hf_member, HfSet};
pub use tree::{count_trees, tree_rank, tree_unrank, FiniteTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    #[error("atom {0} has no members")]
    AtomMembership(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("tree has {got} leaves, expected {expected}")]
    LeafCount { expected: usize, got: usize },
    #[error("tree rank exceeds the supported range")]
    TreeTooLarge,
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("formula is not {0}")]
    WrongClass(&'static str),
}
