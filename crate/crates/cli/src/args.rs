use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use keyrel_core::preserve::DEFAULT_MAX_NODES;

use crate::enumerate::EnumFilter;

#[derive(Debug, Parser)]
#[command(name = "keyrel", version, about = "Analyze key relations on finite domains")]
pub struct Cli {
    /// Node limit for each individual search.
    #[arg(long, global = true, env = "KEYREL_BUDGET", default_value_t = DEFAULT_MAX_NODES)]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Main,
    FullPattern,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report: essentiality, key tuples, pattern, blocks, polymorphisms, witnesses.
    Analyze {
        file: PathBuf,
        /// Print the JSON report instead of a text summary.
        #[arg(long)]
        json: bool,
        /// Largest WNU arity to search for (arities 2 up to this value).
        #[arg(long, default_value_t = 3)]
        wnu_arity: usize,
    },
    /// Search for a polymorphism of a given shape.
    Poly {
        file: PathBuf,
        /// One of idempotent, wnu, nu, semilattice, two-semilattice.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        arity: usize,
    },
    /// Decompose a Boolean relation into a disjunction of linear equations.
    Gf2 { file: PathBuf },
    /// Compute a core fixing a key tuple and check its properties.
    Core {
        file: PathBuf,
        /// Comma- or space-separated values; defaults to the first key tuple.
        #[arg(long)]
        key_tuple: Option<String>,
    },
    /// Blocks of the essential fill, with group structure where present.
    Blocks { file: PathBuf },
    /// Construct a structure-theorem witness.
    Witness {
        file: PathBuf,
        #[arg(long)]
        key_tuple: Option<String>,
        #[arg(long, value_enum, default_value_t = Theorem::Main)]
        theorem: Theorem,
        /// Largest WNU arity tried when looking for a guiding WNU.
        #[arg(long, default_value_t = 3)]
        wnu_arity: usize,
    },
    /// Show a built-in example relation with its re-verified facts.
    Corpus {
        name: String,
        /// Print the relation in `.rel` format.
        #[arg(long)]
        export: bool,
    },
    /// Enumerate all relations of a given domain size and arity.
    Enumerate {
        #[arg(long)]
        domain: usize,
        #[arg(long)]
        arity: usize,
        #[arg(long, value_enum)]
        filter: Option<EnumFilter>,
        /// Print only the number of matching relations.
        #[arg(long)]
        count: bool,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}
