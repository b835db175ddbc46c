//! Worked examples for each public operation. Expected values either come
//! from the source text (corpus relations) or are recomputed here by brute
//! force.

mod common;

use keyrel_core::corpus::{self, GeneratorSpec};
use keyrel_core::preserve::{
    find_mapping_vf, is_key_tuple, key_fill, key_report, preserves_op, search_polymorphism, wnu_power,
    OperationTable, Outcome, SearchBudget, Shape, UnaryVectorFunction,
};
use keyrel_core::relcore::{
    blocks, dummy_variables, essential_fill, essential_witness, is_essential_relation, pattern,
    pattern_given_key_tuple, PatternClass, Relation, Tuple,
};
use keyrel_core::Error;

use common::*;

fn xor3() -> Relation {
    Relation::from_predicate(2, 3, |t| (t[0] ^ t[1] ^ t[2]) == 0).unwrap()
}

fn or() -> Relation {
    Relation::from_tuples(2, 2, [[0, 1], [1, 0], [1, 1]]).unwrap()
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

#[test]
fn corpus_sizes() {
    assert_eq!(corpus::e1().len(), 12);
    assert_eq!(corpus::e2().len(), 16);
    assert_eq!(corpus::e3().len(), 18);
    for z in [0u8, 2] {
        let per_z = corpus::e2().members().filter(|t| t[2] == z).count();
        let oracle = tuples(4, 2).iter().filter(|p| (p[0] + p[1] + z) % 4 <= 1).count();
        assert_eq!(per_z, oracle);
    }
}

#[test]
fn projections() {
    assert_eq!(corpus::e2().projection(2).unwrap(), vec![0, 2]);
    assert!(Relation::empty(3, 2).unwrap().projection(0).unwrap().is_empty());
    assert_eq!(Relation::full(3, 2).unwrap().projection(0).unwrap(), vec![0, 1, 2]);
}

#[test]
fn essential_tuples() {
    let w = essential_witness(&corpus::e1(), &[0, 0, 0]).unwrap();
    assert_eq!(w, Some(Tuple::from([1, 1, 1])));
    let single = Relation::from_tuples(2, 2, [[1, 1]]).unwrap();
    assert_eq!(essential_witness(&single, &[0, 0]).unwrap(), None);
    assert_eq!(essential_witness(&xor3(), &[0, 0, 1]).unwrap(), Some(Tuple::from([1, 1, 0])));

    assert!(essential_fill(&xor3()).is_full());
    let e3_box = Relation::from_predicate(6, 3, |t| t[1] < 3 && t[2] < 3).unwrap();
    assert_eq!(essential_fill(&corpus::e3()), e3_box);
    assert!(essential_fill(&Relation::empty(2, 2).unwrap()).is_empty());

    assert!(is_essential_relation(&corpus::e1()));
    assert!(!is_essential_relation(&Relation::full(2, 2).unwrap()));
    let forced = Relation::from_tuples(2, 2, [[0, 0], [0, 1]]).unwrap();
    assert!(!is_essential_relation(&forced));
}

#[test]
fn dummies() {
    assert_eq!(dummy_variables(&or().cylindrify(1).unwrap()), vec![2]);
    assert!(dummy_variables(&corpus::e1()).is_empty());
    assert_eq!(dummy_variables(&Relation::empty(2, 3).unwrap()), vec![0, 1, 2]);
}

#[test]
fn patterns() {
    let p = pattern(&corpus::e2());
    assert!(p.related[0][2] && p.related[1][2] && !p.related[0][1]);
    assert_eq!(p.classification, PatternClass::NotEquivalence);
    assert!(pattern(&Relation::full(2, 3).unwrap()).is_full());
    assert!(pattern(&xor3()).is_full());

    assert!(pattern_given_key_tuple(&corpus::e1(), &[0, 0, 0]).unwrap().is_trivial());
    assert!(pattern_given_key_tuple(&xor3(), &[0, 0, 1]).unwrap().is_full());
    // The first permutation is the identity, so (0,0,1) is outside E3.
    assert!(!corpus::e3().contains(&[0, 0, 1]));
    assert!(pattern_given_key_tuple(&corpus::e3(), &[0, 0, 1]).unwrap().is_full());
}

#[test]
fn restrict_and_cylindrify() {
    let r = corpus::e1().restrict(0, 0).unwrap();
    assert_eq!(r, Relation::from_tuples(3, 2, [[0, 1], [1, 0], [1, 1], [2, 2]]).unwrap());
    assert!(Relation::full(3, 3).unwrap().restrict(1, 2).unwrap().is_full());
    let eq = Relation::from_tuples(2, 2, [[0, 0], [1, 1]]).unwrap();
    assert_eq!(xor3().restrict(2, 0).unwrap(), eq);

    assert_eq!(or().cylindrify(1).unwrap().len(), 6);
    let e = Relation::empty(2, 2).unwrap().cylindrify(2).unwrap();
    assert!(e.is_empty() && e.arity() == 4);
    let zero = Relation::from_tuples(2, 1, [[0]]).unwrap();
    assert_eq!(zero.cylindrify(1).unwrap(), Relation::from_tuples(2, 2, [[0, 0], [0, 1]]).unwrap());
}

#[test]
fn vector_functions() {
    let shift = UnaryVectorFunction::new(vec![vec![1, 2, 3, 0], vec![3, 0, 1, 2], vec![0, 1, 2, 3]]).unwrap();
    assert_eq!(shift.apply(&[1, 1, 0]).unwrap(), Tuple::from([2, 0, 0]));
    assert!(shift.preserves(&corpus::e2()).unwrap());
    let c = UnaryVectorFunction::constant(2, &[0, 0, 1]);
    assert_eq!(c.apply(&[1, 1, 1]).unwrap(), Tuple::from([0, 0, 1]));
    assert!(!c.preserves(&xor3()).unwrap());
    assert!(UnaryVectorFunction::identity(4, 3).preserves(&corpus::e2()).unwrap());

    let b = budget();
    assert!(matches!(find_mapping_vf(&corpus::e2(), &[1, 1, 0], &[2, 0, 0], &b).unwrap(), Outcome::Found(_)));
    let single = Relation::from_tuples(2, 2, [[1, 1]]).unwrap();
    let out = find_mapping_vf(&single, &[0, 1], &[0, 0], &b).unwrap();
    assert!(matches!(out, Outcome::ExhaustedNone));
    // Brute force agrees: no preserving vector-function sends (0,1) to (0,0).
    assert!(!preserving_vector_functions(&single).iter().any(|p| apply(p, &[0, 1]) == [0, 0]));
}

#[test]
fn key_tuples() {
    let b = budget();
    assert!(is_key_tuple(&corpus::e1(), &[0, 0, 0], &b).unwrap());
    assert!(!is_key_tuple(&corpus::e1(), &[0, 0, 2], &b).unwrap());
    assert!(is_key_tuple(&or(), &[0, 0], &b).unwrap());

    let e3 = corpus::e3();
    let report = key_report(&e3, &b).unwrap();
    let expected: Vec<Tuple> = (0..216)
        .map(|i| e3.tuple_at(i))
        .filter(|t| t[1] < 3 && t[2] < 3 && !e3.contains(t))
        .collect();
    assert!(report.is_key);
    assert_eq!(report.key_tuples, expected);

    assert!(!key_report(&Relation::full(2, 2).unwrap(), &b).unwrap().is_key);
    let empty = key_report(&Relation::empty(2, 2).unwrap(), &b).unwrap();
    assert!(empty.is_key && empty.key_tuples.len() == 4);

    let single = Relation::from_tuples(2, 2, [[1, 1]]).unwrap();
    assert_eq!(key_fill(&single, &b).unwrap(), single);
    assert!(key_fill(&Relation::empty(2, 3).unwrap(), &b).unwrap().is_full());
}

#[test]
fn operations() {
    let b = budget();
    assert!(preserves_op(&OperationTable::minority(), &xor3()).unwrap());
    assert!(preserves_op(&OperationTable::majority(3).unwrap(), &Relation::full(3, 3).unwrap()).unwrap());
    assert!(preserves_op(&OperationTable::max(2).unwrap(), &or()).unwrap());
    assert!(!preserves_op(&OperationTable::min(2).unwrap(), &or()).unwrap());

    let f = search_polymorphism(&xor3(), Shape::Wnu, 3, &b).unwrap().found().unwrap();
    assert!(f.flags().wnu && preserves_op(&f, &xor3()).unwrap());
    assert!(matches!(search_polymorphism(&corpus::e1(), Shape::Wnu, 3, &b).unwrap(), Outcome::ExhaustedNone));
    let s = search_polymorphism(&Relation::full(3, 2).unwrap(), Shape::Semilattice, 2, &b).unwrap();
    assert!(s.found().unwrap().flags().semilattice);

    let p = wnu_power(&OperationTable::minority(), &xor3()).unwrap();
    assert_eq!(p.exponent(), 1);
    let z3 = corpus::generate(&GeneratorSpec::Linear { k: 3, n: 3, twist_seed: None }).unwrap();
    let g = OperationTable::linear(3, &[2, 2]).unwrap();
    let p = wnu_power(&g, &z3).unwrap();
    assert_eq!(p.exponent(), 2);
    assert!(p.sections_idempotent());
}

#[test]
fn blocks_examples() {
    let bs = blocks(&xor3());
    assert_eq!(bs.len(), 1);
    assert!(bs[0].is_product);
    let sparse = Relation::from_tuples(2, 3, [[0, 0, 0], [1, 1, 1]]).unwrap();
    assert_eq!(blocks(&sparse).len(), 2);
}

#[test]
fn generators() {
    let lin = corpus::generate(&GeneratorSpec::Linear { k: 3, n: 3, twist_seed: None }).unwrap();
    assert_eq!(lin.len(), 9);
    assert_eq!(corpus::generate(&GeneratorSpec::PuncturedCube { n: 3 }).unwrap().len(), 7);
    let q = corpus::generate(&GeneratorSpec::Quasigroup5).unwrap();
    assert_eq!(q.len(), 25);
    assert!(keyrel_core::structure::is_strongly_rich(&q));
    let a = corpus::generate(&GeneratorSpec::Random { k: 3, n: 2, density: 0.5, seed: 9 }).unwrap();
    let b = corpus::generate(&GeneratorSpec::Random { k: 3, n: 2, density: 0.5, seed: 9 }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corpus_entries_reverify() {
    let b = budget();
    for name in corpus::NAMES {
        let entry = corpus::corpus_get(name, &b).unwrap();
        assert!(!entry.facts.is_empty());
    }
    assert!(matches!(corpus::corpus_get("E9", &b), Err(Error::Input(_))));
}

#[test]
fn guards() {
    assert!(matches!(Relation::empty(17, 2), Err(Error::Guard(_))));
    assert!(matches!(Relation::empty(16, 7), Err(Error::Guard(_))));
    assert!(matches!(Relation::empty(1, 2), Err(Error::Guard(_))));
}
