//! Key tuples, key relations and the key fill `Key(ρ)`.

use serde::Serialize;

use super::search::{Outcome, SearchBudget};
use super::vecfun::{find_mapping_unchecked, UnaryVectorFunction};
use crate::error::{Error, Result};
use crate::relcore::{dummy_variables, essential_tuple_indices, Relation, Tuple};

/// A vector-function preserving the relation and sending `source` to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub source: Tuple,
    pub target: Tuple,
    pub function: UnaryVectorFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyReport {
    pub is_key: bool,
    /// `Key(ρ) ∖ ρ` in canonical order.
    pub key_tuples: Vec<Tuple>,
    /// One certificate per non-member, all targeting the first key tuple.
    pub certificates: Option<Vec<Certificate>>,
}

fn check_non_member(rel: &Relation, t: &[u8]) -> Result<()> {
    rel.check_tuple(t)?;
    if rel.contains(t) {
        return Err(Error::input(format!(
            "{} is a member of the relation",
            Tuple::from(t)
        )));
    }
    Ok(())
}

/// True iff every `α ∉ ρ` maps onto `β` under some preserving `Ψ`.
pub fn is_key_tuple(rel: &Relation, beta: &[u8], budget: &SearchBudget) -> Result<bool> {
    check_non_member(rel, beta)?;
    Ok(key_certificates(rel, beta, budget)?.is_some())
}

/// Certificates for every non-member if `β` is key, `None` at the first
/// non-member that cannot reach `β`.
pub fn key_certificates(
    rel: &Relation,
    beta: &[u8],
    budget: &SearchBudget,
) -> Result<Option<Vec<Certificate>>> {
    check_non_member(rel, beta)?;
    let projections = rel.projections();
    let mut alpha = vec![0u8; rel.arity()];
    let mut out = Vec::new();
    for idx in rel.non_member_indices() {
        rel.decode_into(idx, &mut alpha);
        match find_mapping_unchecked(rel, &projections, &alpha, beta, budget) {
            Outcome::Found(function) => out.push(Certificate {
                source: Tuple::from(alpha.as_slice()),
                target: Tuple::from(beta),
                function,
            }),
            Outcome::ExhaustedNone => return Ok(None),
            Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
        }
    }
    Ok(Some(out))
}

/// Candidates for key tuples: essential tuples when no coordinate is dummy
/// (a key tuple is then essential), every non-member otherwise.
fn candidates(rel: &Relation) -> Vec<usize> {
    if dummy_variables(rel).is_empty() {
        essential_tuple_indices(rel)
    } else {
        rel.non_member_indices().collect()
    }
}

pub fn key_report(rel: &Relation, budget: &SearchBudget) -> Result<KeyReport> {
    let cands = candidates(rel);
    let projections = rel.projections();
    let mut first: Option<(usize, Vec<Certificate>)> = None;
    for (pos, &idx) in cands.iter().enumerate() {
        let beta = rel.tuple_at(idx);
        if let Some(certs) = key_certificates(rel, &beta, budget)? {
            first = Some((pos, certs));
            break;
        }
    }
    let Some((pos, certificates)) = first else {
        return Ok(KeyReport {
            is_key: false,
            key_tuples: Vec::new(),
            certificates: None,
        });
    };
    // Any image of one key tuple under a preserving map is again key, and
    // every key tuple is such an image.
    let beta0 = rel.tuple_at(cands[pos]);
    let mut key_tuples = vec![beta0.clone()];
    for &idx in &cands[pos + 1..] {
        let gamma = rel.tuple_at(idx);
        match find_mapping_unchecked(rel, &projections, &beta0, &gamma, budget) {
            Outcome::Found(_) => key_tuples.push(gamma),
            Outcome::ExhaustedNone => {}
            Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
        }
    }
    Ok(KeyReport {
        is_key: true,
        key_tuples,
        certificates: Some(certificates),
    })
}

pub fn key_fill(rel: &Relation, budget: &SearchBudget) -> Result<Relation> {
    let report = key_report(rel, budget)?;
    let mut out = rel.clone();
    for t in &report.key_tuples {
        out.insert_index(rel.index_of(t));
    }
    Ok(out)
}
