//! Preservation by unary vector-functions and by operations.

mod keys;
mod operation;
mod search;
mod vecfun;

pub use keys::{is_key_tuple, key_certificates, key_fill, key_report, Certificate, KeyReport};
pub use operation::{
    preserves_op, search_polymorphism, wnu_power, OperationTable, Shape, ShapeFlags, WnuPower,
};
pub use search::{Outcome, OutcomeKind, SearchBudget, DEFAULT_MAX_NODES};
pub use vecfun::{find_mapping_vf, UnaryVectorFunction};

#[allow(unused_imports)]
pub(crate) use search::{Slot, TableCsp};
pub(crate) use vecfun::{find_mapping_unchecked, VfProblem};
