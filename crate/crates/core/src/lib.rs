//! Key relations on finite domains: essential tuples, patterns, blocks,
//! preservation by vector-functions and operations, cores, group structure
//! of strongly rich relations, and witnesses for the structure theorems.
//!
//! Coordinates are 0-based throughout the API.

pub mod corpus;
pub mod error;
pub mod preserve;
pub mod relcore;
pub mod relfile;
pub mod structure;

pub use error::{Error, Result};
pub use preserve::{OperationTable, Outcome, SearchBudget, Shape, UnaryVectorFunction};
pub use relcore::{Relation, Tuple};
