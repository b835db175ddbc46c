//! The pattern `∼ρ` of a relation: `i ≁ j` iff some tuple outside `ρ` has
//! its three `{i, j}`-substitutions inside `ρ`.

use serde::Serialize;

use super::relation::{Relation, Tuple};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternClass {
    Trivial,
    AlmostTrivial,
    Full,
    OtherEquivalence,
    NotEquivalence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternReport {
    pub arity: usize,
    /// `related[i][j]` iff `i ∼ j`; the diagonal is always true.
    pub related: Vec<Vec<bool>>,
    pub is_equivalence: bool,
    /// 0-based coordinate classes ordered by smallest member; present iff
    /// the pattern is an equivalence.
    pub classes: Option<Vec<Vec<usize>>>,
    pub classification: PatternClass,
}

impl PatternReport {
    fn from_matrix(related: Vec<Vec<bool>>) -> Self {
        let n = related.len();
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| !related[i][j] || (0..n).all(|l| !related[j][l] || related[i][l]))
        });
        let classes = transitive.then(|| {
            let mut seen = vec![false; n];
            let mut out = Vec::new();
            for i in 0..n {
                if seen[i] {
                    continue;
                }
                let class: Vec<usize> = (i..n).filter(|&j| related[i][j]).collect();
                for &j in &class {
                    seen[j] = true;
                }
                out.push(class);
            }
            out
        });
        let classification = match &classes {
            None => PatternClass::NotEquivalence,
            Some(cs) => {
                let big: Vec<usize> = cs.iter().map(Vec::len).filter(|&l| l > 1).collect();
                match big.as_slice() {
                    [] => PatternClass::Trivial,
                    [2] => PatternClass::AlmostTrivial,
                    [_] if cs.len() == 1 => PatternClass::Full,
                    _ => PatternClass::OtherEquivalence,
                }
            }
        };
        PatternReport {
            arity: n,
            related,
            is_equivalence: transitive,
            classes,
            classification,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.classes
            .as_ref()
            .is_some_and(|cs| cs.iter().all(|c| c.len() == 1))
    }

    /// Exactly one two-element class, every other class a singleton.
    pub fn is_almost_trivial(&self) -> bool {
        self.classes.as_ref().is_some_and(|cs| {
            cs.iter().filter(|c| c.len() == 2).count() == 1 && cs.iter().all(|c| c.len() <= 2)
        })
    }

    pub fn is_full(&self) -> bool {
        self.related.iter().all(|row| row.iter().all(|&b| b))
    }

    /// The pattern is an equivalence with at most one class of size > 1.
    pub fn has_single_nontrivial_class(&self) -> bool {
        self.classes
            .as_ref()
            .is_some_and(|cs| cs.iter().filter(|c| c.len() > 1).count() <= 1)
    }
}

/// Computes `∼ρ` by scanning every tuple outside `ρ`.
pub fn pattern(rel: &Relation) -> PatternReport {
    let n = rel.arity();
    let mut related = vec![vec![true; n]; n];
    let mut buf = vec![0u8; n];
    for idx in rel.non_member_indices() {
        rel.decode_into(idx, &mut buf);
        mark_witnessed(rel, &mut buf, &mut related);
        if (0..n).all(|i| (0..n).all(|j| i == j || !related[i][j])) {
            break;
        }
    }
    PatternReport::from_matrix(related)
}

/// Same matrix as [`pattern`], scanning only quadruples anchored at a key
/// tuple. The caller asserts that `key` is a key tuple.
pub fn pattern_given_key_tuple(rel: &Relation, key: &[u8]) -> Result<PatternReport> {
    rel.check_tuple(key)?;
    if rel.contains(key) {
        return Err(Error::input(format!(
            "{} is a member of the relation",
            Tuple::from(key)
        )));
    }
    let n = rel.arity();
    let mut related = vec![vec![true; n]; n];
    let mut buf = key.to_vec();
    mark_witnessed(rel, &mut buf, &mut related);
    Ok(PatternReport::from_matrix(related))
}

/// Marks `i ≁ j` for every pair witnessed at the non-member `a`.
fn mark_witnessed(rel: &Relation, a: &mut [u8], related: &mut [Vec<bool>]) {
    let n = a.len();
    let k = rel.domain_size() as u8;
    let repairs: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let keep = a[i];
            let vals = (0..k)
                .filter(|&b| {
                    a[i] = b;
                    b != keep && rel.contains(a)
                })
                .collect();
            a[i] = keep;
            vals
        })
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            if !related[i][j] || repairs[i].is_empty() || repairs[j].is_empty() {
                continue;
            }
            let (ai, aj) = (a[i], a[j]);
            let hit = repairs[i].iter().any(|&bi| {
                repairs[j].iter().any(|&bj| {
                    a[i] = bi;
                    a[j] = bj;
                    rel.contains(a)
                })
            });
            a[i] = ai;
            a[j] = aj;
            if hit {
                related[i][j] = false;
                related[j][i] = false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn e2_pattern_is_not_an_equivalence() {
        let p = pattern(&corpus::e2());
        assert!(p.related[0][2] && p.related[1][2]);
        assert!(!p.related[0][1]);
        assert!(!p.is_equivalence);
        assert!(p.classes.is_none());
        assert_eq!(p.classification, PatternClass::NotEquivalence);
    }

    #[test]
    fn full_and_xor_have_full_pattern() {
        let full = Relation::full(3, 3).unwrap();
        assert_eq!(pattern(&full).classification, PatternClass::Full);
        let xor = Relation::from_predicate(2, 3, |t| (t[0] ^ t[1] ^ t[2]) == 0).unwrap();
        let p = pattern(&xor);
        assert_eq!(p.classification, PatternClass::Full);
        assert_eq!(p.classes, Some(vec![vec![0, 1, 2]]));
    }

    #[test]
    fn anchored_examples() {
        let p = pattern_given_key_tuple(&corpus::e1(), &[0, 0, 0]).unwrap();
        assert_eq!(p.classification, PatternClass::Trivial);

        let xor = Relation::from_predicate(2, 3, |t| (t[0] ^ t[1] ^ t[2]) == 0).unwrap();
        let p = pattern_given_key_tuple(&xor, &[0, 0, 1]).unwrap();
        assert_eq!(p.classification, PatternClass::Full);

        // s_1 is the identity permutation, so (0,0,1) ∉ E3.
        let p = pattern_given_key_tuple(&corpus::e3(), &[0, 0, 1]).unwrap();
        assert_eq!(p.classification, PatternClass::Full);

        assert!(pattern_given_key_tuple(&xor, &[0, 0, 0]).is_err());
    }

    #[test]
    fn classification_labels() {
        let m = |rows: &[&[u8]]| {
            PatternReport::from_matrix(
                rows.iter()
                    .map(|r| r.iter().map(|&b| b == 1).collect())
                    .collect(),
            )
        };
        assert_eq!(
            m(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]).classification,
            PatternClass::AlmostTrivial
        );
        assert_eq!(
            m(&[&[1, 1, 1, 0], &[1, 1, 1, 0], &[1, 1, 1, 0], &[0, 0, 0, 1]]).classification,
            PatternClass::OtherEquivalence
        );
        assert_eq!(m(&[&[1]]).classification, PatternClass::Trivial);
    }
}
