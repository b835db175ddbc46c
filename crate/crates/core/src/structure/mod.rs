//! Structure of key relations: pairs, cores, groups on strongly rich
//! blocks, GF(2) decompositions and witnesses for the structure theorems.

mod cores;
mod gf2;
mod group;
mod pairs;
mod theorems;

pub use cores::{certify_minimal, compute_core, key_blocks, verify_core_properties, CoreProperties, CoreResult};
pub use gf2::{decompose_gf2, LinearDisjunctionGF2};
pub use group::{
    extract_group_structure, is_rich, is_rich_on, is_strongly_rich, is_strongly_rich_on, GroupExtraction,
    GroupStructure,
};
pub use pairs::{find_almost_perfect_pair, find_perfect_pair, PairKind, PerfectPair};
pub use theorems::{
    full_pattern_block_report, main_theorem_witness, verify_pattern_theorem, BlockVerdict, CoordMap,
    FullPatternReport, MainTheoremWitness, WitnessMethod, WitnessOutcome,
};
