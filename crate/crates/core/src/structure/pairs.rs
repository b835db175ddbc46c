//! Perfect and almost perfect pairs: punctured boxes certifying key tuples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::{pattern, BoxSet, Relation, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairKind {
    Perfect,
    /// The box may also miss the tuple with `b` at both coordinates.
    AlmostPerfect { coords: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectPair {
    pub a: Tuple,
    pub b: Tuple,
    pub kind: PairKind,
}

impl PerfectPair {
    pub fn bounding_box(&self) -> BoxSet {
        BoxSet::new(self.a.iter().zip(self.b.iter()).map(|(&x, &y)| vec![x, y]).collect())
    }
}

fn check_non_member(rel: &Relation, a: &[u8]) -> Result<()> {
    rel.check_tuple(a)?;
    if rel.contains(a) {
        return Err(Error::input(format!("{} is a member of the relation", Tuple::from(a))));
    }
    Ok(())
}

/// Per coordinate, the values `b ≠ a_i` with `a[i := b] ∈ ρ`.
fn single_flips(rel: &Relation, a: &[u8]) -> Vec<Vec<u8>> {
    let k = rel.domain_size() as u8;
    let mut probe = a.to_vec();
    (0..a.len())
        .map(|i| {
            let vals = (0..k)
                .filter(|&b| {
                    probe[i] = b;
                    b != a[i] && rel.contains(&probe)
                })
                .collect();
            probe[i] = a[i];
            vals
        })
        .collect()
}

/// Lexicographically first `b` (drawn from the per-coordinate candidate
/// lists) whose `{a_i, b_i}` box, minus the tuples `skip` rejects, lies in `ρ`.
fn search(
    rel: &Relation,
    a: &[u8],
    cands: &[Vec<u8>],
    skip: impl Fn(&[u8], &[u8]) -> bool,
) -> Option<Tuple> {
    let sets: Vec<Vec<u8>> = cands.to_vec();
    BoxSet::new(sets).tuples().find(|b| {
        let bx = BoxSet::new(a.iter().zip(b.iter()).map(|(&x, &y)| vec![x, y]).collect());
        bx.tuples().all(|t| skip(&t, b) || rel.contains(&t))
    })
}

/// A perfect pair `a − b` for the given non-member `a`, if one exists.
pub fn find_perfect_pair(rel: &Relation, a: &[u8]) -> Result<Option<PerfectPair>> {
    check_non_member(rel, a)?;
    let cands = single_flips(rel, a);
    Ok(search(rel, a, &cands, |t, _| t == a).map(|b| PerfectPair {
        a: Tuple::from(a),
        b,
        kind: PairKind::Perfect,
    }))
}

/// An almost perfect pair for coordinates `i ∼ j`: the box may miss both `a`
/// and `a[i := b_i, j := b_j]`. Reports `Perfect` when the second tuple
/// happens to be in `ρ` as well.
pub fn find_almost_perfect_pair(
    rel: &Relation,
    a: &[u8],
    coords: (usize, usize),
) -> Result<Option<PerfectPair>> {
    check_non_member(rel, a)?;
    let (i, j) = coords;
    let n = rel.arity();
    if i >= n || j >= n || i == j {
        return Err(Error::input("paired coordinates must be two distinct coordinates"));
    }
    if !pattern(rel).related[i][j] {
        return Err(Error::precondition(format!(
            "coordinates {} and {} are not related by the pattern",
            i + 1,
            j + 1
        )));
    }
    let cands = single_flips(rel, a);
    let second = |t: &[u8], b: &[u8]| {
        t.iter()
            .enumerate()
            .all(|(l, &x)| x == if l == i || l == j { b[l] } else { a[l] })
    };
    Ok(search(rel, a, &cands, |t, b| t == a || second(t, b)).map(|b| {
        let mut both = a.to_vec();
        both[i] = b[i];
        both[j] = b[j];
        let kind = if rel.contains(&both) {
            PairKind::Perfect
        } else {
            PairKind::AlmostPerfect { coords }
        };
        PerfectPair { a: Tuple::from(a), b, kind }
    }))
}
