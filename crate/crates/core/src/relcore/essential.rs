//! Essential tuples, the essential fill `ρ̃` and dummy coordinates.

use super::relation::{Relation, Tuple};
use crate::error::{Error, Result};

/// If `alpha ∉ ρ` is essential, returns the witness `(b_1..b_n)` with each
/// `alpha[i := b_i] ∈ ρ`, choosing the smallest `b_i` per coordinate.
pub fn essential_witness(rel: &Relation, alpha: &[u8]) -> Result<Option<Tuple>> {
    rel.check_tuple(alpha)?;
    if rel.contains(alpha) {
        return Err(Error::input(format!(
            "{} is a member of the relation",
            Tuple::from(alpha)
        )));
    }
    Ok(witness_unchecked(rel, alpha))
}

fn witness_unchecked(rel: &Relation, alpha: &[u8]) -> Option<Tuple> {
    let k = rel.domain_size() as u8;
    let mut probe = alpha.to_vec();
    let mut witness = Vec::with_capacity(alpha.len());
    for i in 0..alpha.len() {
        let found = (0..k).find(|&b| {
            probe[i] = b;
            rel.contains(&probe)
        });
        probe[i] = alpha[i];
        witness.push(found?);
    }
    Some(Tuple(witness))
}

pub fn is_essential_tuple(rel: &Relation, alpha: &[u8]) -> Result<bool> {
    essential_witness(rel, alpha).map(|w| w.is_some())
}

/// Indices of every essential tuple, ascending.
pub fn essential_tuple_indices(rel: &Relation) -> Vec<usize> {
    let mut buf = vec![0u8; rel.arity()];
    rel.non_member_indices()
        .filter(|&idx| {
            rel.decode_into(idx, &mut buf);
            witness_unchecked(rel, &buf).is_some()
        })
        .collect()
}

/// `ρ̃`: the relation together with all of its essential tuples.
pub fn essential_fill(rel: &Relation) -> Relation {
    let mut out = rel.clone();
    for idx in essential_tuple_indices(rel) {
        out.insert_index(idx);
    }
    out
}

/// True iff some essential tuple exists.
pub fn is_essential_relation(rel: &Relation) -> bool {
    let mut buf = vec![0u8; rel.arity()];
    rel.non_member_indices().any(|idx| {
        rel.decode_into(idx, &mut buf);
        witness_unchecked(rel, &buf).is_some()
    })
}

/// Coordinates (0-based) on which membership does not depend.
pub fn dummy_variables(rel: &Relation) -> Vec<usize> {
    let k = rel.domain_size() as u8;
    let mut buf = vec![0u8; rel.arity()];
    (0..rel.arity())
        .filter(|&i| {
            rel.member_indices().all(|idx| {
                rel.decode_into(idx, &mut buf);
                let keep = buf[i];
                let ok = (0..k).all(|c| {
                    buf[i] = c;
                    rel.contains(&buf)
                });
                buf[i] = keep;
                ok
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn xor3() -> Relation {
        Relation::from_predicate(2, 3, |t| (t[0] ^ t[1] ^ t[2]) == 0).unwrap()
    }

    #[test]
    fn witness_examples() {
        let w = essential_witness(&corpus::e1(), &[0, 0, 0]).unwrap();
        assert_eq!(w, Some(Tuple::from([1, 1, 1])));

        let single = Relation::from_tuples(2, 2, [[1, 1]]).unwrap();
        assert_eq!(essential_witness(&single, &[0, 0]).unwrap(), None);

        assert_eq!(
            essential_witness(&xor3(), &[0, 0, 1]).unwrap(),
            Some(Tuple::from([1, 1, 0]))
        );
    }

    #[test]
    fn witness_rejects_members() {
        assert!(matches!(
            essential_witness(&corpus::e1(), &[0, 0, 1]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn fill_examples() {
        assert!(essential_fill(&xor3()).is_full());

        let e3 = corpus::e3();
        let expect = Relation::from_predicate(6, 3, |t| t[1] < 3 && t[2] < 3).unwrap();
        assert_eq!(essential_fill(&e3), expect);

        let empty = Relation::empty(3, 2).unwrap();
        assert!(essential_fill(&empty).is_empty());
    }

    #[test]
    fn essential_relation_examples() {
        assert!(is_essential_relation(&corpus::e1()));
        assert!(!is_essential_relation(&Relation::full(2, 3).unwrap()));
        let forced = Relation::from_tuples(2, 2, [[0, 0], [0, 1]]).unwrap();
        assert!(!is_essential_relation(&forced));
    }

    #[test]
    fn dummy_examples() {
        let or = Relation::from_tuples(2, 2, [[0, 1], [1, 0], [1, 1]]).unwrap();
        assert_eq!(dummy_variables(&or.cylindrify(1).unwrap()), vec![2]);
        assert!(dummy_variables(&corpus::e1()).is_empty());
        assert_eq!(dummy_variables(&Relation::empty(2, 3).unwrap()), vec![0, 1, 2]);
    }
}
