//! Exhaustive enumeration of all relations over a small universe.

use clap::ValueEnum;
use keyrel_core::preserve::{key_report, SearchBudget};
use keyrel_core::relcore::{check_guards, is_essential_relation};
use keyrel_core::{Error, Relation};
use rayon::prelude::*;

/// Largest `k^n` accepted; there are `2^(k^n)` relations to visit.
pub const MAX_ENUM_UNIVERSE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumFilter {
    Key,
    Essential,
}

fn relation_of(k: usize, n: usize, mask: u64) -> Relation {
    let size = k.pow(n as u32);
    Relation::from_predicate(k, n, |t| {
        let idx = t.iter().fold(0usize, |acc, &x| acc * k + x as usize);
        mask >> (size - 1 - idx) & 1 == 1
    })
    .expect("guards checked")
}

/// Masks of the matching relations in ascending order. Bit `k^n - 1 - i`
/// of a mask marks the `i`-th tuple in lexicographic order. The result is
/// the same for every worker count.
pub fn enumerate(
    k: usize,
    n: usize,
    filter: Option<EnumFilter>,
    workers: usize,
    max_nodes: u64,
) -> Result<Vec<u64>, Error> {
    check_guards(k, n)?;
    let size = k.pow(n as u32);
    if size > MAX_ENUM_UNIVERSE {
        return Err(Error::Guard(format!(
            "enumeration over {size} tuples exceeds the limit of {MAX_ENUM_UNIVERSE}"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?;
    let keep = |mask: u64| -> Result<bool, Error> {
        let rel = relation_of(k, n, mask);
        Ok(match filter {
            None => true,
            Some(EnumFilter::Essential) => is_essential_relation(&rel),
            Some(EnumFilter::Key) => key_report(&rel, &SearchBudget::new(max_nodes))?.is_key,
        })
    };
    let mut masks: Vec<u64> = pool.install(|| {
        (0..1u64 << size)
            .into_par_iter()
            .filter_map(|mask| match keep(mask) {
                Ok(true) => Some(Ok(mask)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<Vec<u64>, Error>>()
    })?;
    masks.sort_unstable();
    Ok(masks)
}

/// The members of the relation encoded by `mask`.
pub fn members(k: usize, n: usize, mask: u64) -> Vec<Vec<u8>> {
    relation_of(k, n, mask).members().map(|t| t.0).collect()
}
