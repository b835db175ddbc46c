//! Finite relations and their purely combinatorial invariants.

mod blocks;
mod essential;
mod pattern;
mod relation;

pub use blocks::{blocks, components, Block, BlockKind};
pub use essential::{
    dummy_variables, essential_fill, essential_tuple_indices, essential_witness,
    is_essential_relation, is_essential_tuple,
};
pub use pattern::{pattern, pattern_given_key_tuple, PatternClass, PatternReport};
pub use relation::{check_guards, BoxIter, BoxSet, Relation, Tuple};
