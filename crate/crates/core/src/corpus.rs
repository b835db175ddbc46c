//! Built-in example relations with machine-checked facts, and seeded
//! generators for families of test relations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::preserve::{
    is_key_tuple, key_fill, key_report, search_polymorphism, Outcome, SearchBudget, Shape,
};
use crate::relcore::{pattern, BoxSet, PatternClass, Relation, Tuple};
use crate::structure::{find_perfect_pair, full_pattern_block_report};

/// The twelve-tuple ternary relation over `{0,1,2}` whose only key tuple is
/// `(0,0,0)`.
pub fn e1() -> Relation {
    Relation::from_tuples(
        3,
        3,
        [
            [0, 0, 1],
            [0, 1, 0],
            [0, 1, 1],
            [0, 2, 2],
            [1, 0, 0],
            [1, 1, 0],
            [1, 2, 0],
            [1, 2, 1],
            [2, 0, 0],
            [2, 0, 1],
            [2, 0, 2],
            [2, 1, 2],
        ],
    )
    .expect("fixed relation")
}

/// `{(x,y,z) : z ∈ {0,2}, x+y+z mod 4 ∈ {0,1}}` over `Z_4`.
pub fn e2() -> Relation {
    Relation::from_predicate(4, 3, |t| {
        (t[2] == 0 || t[2] == 2) && (t[0] + t[1] + t[2]) % 4 <= 1
    })
    .expect("fixed relation")
}

/// The permutations of `{0,1,2}` in lexicographic one-line order.
pub fn permutations3() -> [[u8; 3]; 6] {
    [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

/// `{(i, a, s_i(a))}` over a six-element domain, where `s_0..s_5` are the
/// permutations of `{0,1,2}`.
pub fn e3() -> Relation {
    let tuples = permutations3()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..3u8).map(move |a| [i as u8, a, s[a as usize]]))
        .collect::<Vec<_>>();
    Relation::from_tuples(6, 3, tuples).expect("fixed relation")
}

/// An order-5 Latin square that is not isotopic to a group.
pub const QUASIGROUP5: [[u8; 5]; 5] = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `Σ π_i(x_i) = 0 mod k`; each `π_i` is a seeded random bijection, or
    /// the identity when no seed is given.
    Linear { k: usize, n: usize, twist_seed: Option<u64> },
    /// `{0,1}^n` without the all-zero tuple.
    PuncturedCube { n: usize },
    /// `{0,1}^n` without the all-zero tuple and without `second`.
    PuncturedCubeMinus { n: usize, second: Tuple },
    /// Each tuple kept independently with probability `density`.
    Random { k: usize, n: usize, density: f64, seed: u64 },
    /// The graph `{(x, y, x∘y)}` of [`QUASIGROUP5`].
    Quasigroup5,
}

/// Seeded bijections `π_1..π_n` of `{0..k-1}`.
pub fn random_bijections(k: usize, n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut p: Vec<u8> = (0..k as u8).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect()
}

pub fn generate(spec: &GeneratorSpec) -> Result<Relation> {
    match spec {
        GeneratorSpec::Linear { k, n, twist_seed } => {
            let pis = match twist_seed {
                Some(seed) => random_bijections(*k, *n, *seed),
                None => vec![(0..*k as u8).collect(); *n],
            };
            Relation::from_predicate(*k, *n, |t| {
                t.iter().zip(&pis).map(|(&x, p)| p[x as usize] as usize).sum::<usize>() % k == 0
            })
        }
        GeneratorSpec::PuncturedCube { n } => Relation::from_predicate(2, *n, |t| t.iter().any(|&x| x != 0)),
        GeneratorSpec::PuncturedCubeMinus { n, second } => {
            let rel = Relation::empty(2, *n)?;
            rel.check_tuple(second)?;
            Relation::from_predicate(2, *n, |t| t.iter().any(|&x| x != 0) && t != &second[..])
        }
        GeneratorSpec::Random { k, n, density, seed } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::input("density must lie in [0, 1]"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let shape = Relation::empty(*k, *n)?;
            let keep: Vec<usize> = (0..shape.universe_size())
                .filter(|_| rng.gen_bool(*density))
                .collect();
            Ok(keep.into_iter().fold(shape, |mut r, i| {
                r.insert_index(i);
                r
            }))
        }
        GeneratorSpec::Quasigroup5 => {
            Relation::from_predicate(5, 3, |t| QUASIGROUP5[t[0] as usize][t[1] as usize] == t[2])
        }
    }
}

/// A fact about a corpus relation that can be re-checked by the library.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "fact", content = "value", rename_all = "kebab-case")]
pub enum KnownFact {
    IsKey(bool),
    /// The full key tuple set `Key(ρ) ∖ ρ`.
    KeyTuplesExactly(Vec<Tuple>),
    /// Every box tuple outside the relation is a key tuple.
    KeyTuplesCover(BoxSet),
    PatternClass(PatternClass),
    /// 0-based `(i, j, related)` entries of the pattern matrix.
    PatternEntries(Vec<(usize, usize, bool)>),
    /// Existence of a ternary WNU, decided by exhaustive search.
    Wnu3Exists(bool),
    PerfectPairAt { key_tuple: Tuple, exists: bool },
    KeyFillEquals(BoxSet),
    /// The block report finds the structure theorem's hypotheses unmet.
    FullPatternHypothesesUnmet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub relation: Relation,
    pub facts: Vec<KnownFact>,
}

pub const NAMES: [&str; 3] = ["E1", "E2", "E3"];

fn entry(name: &str) -> Option<CorpusEntry> {
    let b = |sets: Vec<Vec<u8>>| BoxSet::new(sets);
    Some(match name {
        "E1" => CorpusEntry {
            name: "E1",
            relation: e1(),
            facts: vec![
                KnownFact::IsKey(true),
                KnownFact::KeyTuplesExactly(vec![Tuple::from([0, 0, 0])]),
                KnownFact::PatternClass(PatternClass::Trivial),
                KnownFact::PerfectPairAt {
                    key_tuple: Tuple::from([0, 0, 0]),
                    exists: false,
                },
                KnownFact::Wnu3Exists(false),
            ],
        },
        "E2" => CorpusEntry {
            name: "E2",
            relation: e2(),
            facts: vec![
                KnownFact::IsKey(true),
                KnownFact::PatternEntries(vec![(0, 2, true), (1, 2, true), (0, 1, false)]),
                KnownFact::PatternClass(PatternClass::NotEquivalence),
                KnownFact::KeyTuplesCover(b(vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![0, 2]])),
            ],
        },
        "E3" => CorpusEntry {
            name: "E3",
            relation: e3(),
            facts: vec![
                KnownFact::IsKey(true),
                KnownFact::PatternClass(PatternClass::Full),
                KnownFact::KeyFillEquals(b(vec![(0..6).collect(), vec![0, 1, 2], vec![0, 1, 2]])),
                KnownFact::FullPatternHypothesesUnmet,
            ],
        },
        _ => return None,
    })
}

/// Looks up a corpus entry and re-verifies every known fact.
pub fn corpus_get(name: &str, budget: &SearchBudget) -> Result<CorpusEntry> {
    let e = entry(name).ok_or_else(|| {
        Error::input(format!("unknown corpus entry `{name}` (known: {})", NAMES.join(", ")))
    })?;
    for fact in &e.facts {
        if !check_fact(&e.relation, fact, budget)? {
            return Err(Error::precondition(format!(
                "corpus entry {name} failed re-verification of {fact:?}"
            )));
        }
    }
    Ok(e)
}

/// The entry without re-verification.
pub fn corpus_relation(name: &str) -> Result<Relation> {
    entry(name)
        .map(|e| e.relation)
        .ok_or_else(|| Error::input(format!("unknown corpus entry `{name}`")))
}

pub fn check_fact(rel: &Relation, fact: &KnownFact, budget: &SearchBudget) -> Result<bool> {
    Ok(match fact {
        KnownFact::IsKey(expect) => key_report(rel, budget)?.is_key == *expect,
        KnownFact::KeyTuplesExactly(expect) => key_report(rel, budget)?.key_tuples == *expect,
        KnownFact::KeyTuplesCover(bx) => {
            let mut ok = true;
            for t in bx.tuples().filter(|t| !rel.contains(t)) {
                ok &= is_key_tuple(rel, &t, budget)?;
            }
            ok
        }
        KnownFact::PatternClass(c) => pattern(rel).classification == *c,
        KnownFact::PatternEntries(entries) => {
            let p = pattern(rel);
            entries.iter().all(|&(i, j, r)| p.related[i][j] == r)
        }
        KnownFact::Wnu3Exists(expect) => match search_polymorphism(rel, Shape::Wnu, 3, budget)? {
            Outcome::Found(_) => *expect,
            Outcome::ExhaustedNone => !*expect,
            Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
        },
        KnownFact::PerfectPairAt { key_tuple, exists } => {
            find_perfect_pair(rel, key_tuple)?.is_some() == *exists
        }
        KnownFact::KeyFillEquals(bx) => {
            let expect = Relation::from_predicate(rel.domain_size(), rel.arity(), |t| bx.contains(t))?;
            key_fill(rel, budget)? == expect
        }
        KnownFact::FullPatternHypothesesUnmet => {
            full_pattern_block_report(rel, None, budget)?.hypotheses_unmet
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_sizes() {
        assert_eq!(e1().len(), 12);
        assert_eq!(e2().len(), 16);
        assert_eq!(e2().restrict(2, 0).unwrap().len(), 8);
        assert_eq!(e3().len(), 18);
    }

    #[test]
    fn generator_examples() {
        let lin = generate(&GeneratorSpec::Linear { k: 3, n: 3, twist_seed: None }).unwrap();
        assert_eq!(lin.len(), 9);
        let cube = generate(&GeneratorSpec::PuncturedCube { n: 3 }).unwrap();
        assert_eq!((cube.domain_size(), cube.len()), (2, 7));
        let q = generate(&GeneratorSpec::Quasigroup5).unwrap();
        assert_eq!(q.len(), 25);
        let twisted = GeneratorSpec::Linear { k: 4, n: 3, twist_seed: Some(7) };
        assert_eq!(generate(&twisted).unwrap(), generate(&twisted).unwrap());
        assert_eq!(generate(&twisted).unwrap().len(), 16);
        let r = GeneratorSpec::Random { k: 3, n: 3, density: 0.5, seed: 1 };
        assert_eq!(generate(&r).unwrap(), generate(&r).unwrap());
    }

    #[test]
    fn quasigroup_is_latin() {
        for i in 0..5 {
            let mut row: Vec<u8> = QUASIGROUP5[i].to_vec();
            let mut col: Vec<u8> = (0..5).map(|j| QUASIGROUP5[j][i]).collect();
            row.sort_unstable();
            col.sort_unstable();
            assert_eq!(row, vec![0, 1, 2, 3, 4]);
            assert_eq!(col, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn unknown_name_is_an_input_error() {
        assert!(matches!(
            corpus_get("E9", &SearchBudget::default()),
            Err(Error::Input(_))
        ));
    }
}
