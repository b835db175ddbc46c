//! Invariants checked on randomly generated relations.

mod common;

use std::collections::BTreeSet;

use keyrel_core::corpus::{self, GeneratorSpec};
use keyrel_core::preserve::{
    find_mapping_vf, key_report, preserves_op, search_polymorphism, wnu_power, OperationTable, Outcome,
    SearchBudget, Shape,
};
use keyrel_core::relcore::{
    blocks, essential_fill, essential_tuple_indices, essential_witness, is_essential_relation, pattern,
    pattern_given_key_tuple, BlockKind, Relation,
};
use keyrel_core::relfile;
use keyrel_core::structure::{
    compute_core, decompose_gf2, extract_group_structure, verify_core_properties, GroupExtraction,
};
use proptest::prelude::*;

use common::*;

/// A relation with `k ≤ 3`, arity ≤ 3, given by a membership mask.
fn small_relation() -> impl Strategy<Value = Relation> {
    (2usize..=3, 1usize..=3)
        .prop_flat_map(|(k, n)| {
            let size = k.pow(n as u32);
            (Just(k), Just(n), proptest::collection::vec(any::<bool>(), size))
        })
        .prop_map(|(k, n, bits)| Relation::from_predicate(k, n, |t| bits[index(k, t)]).unwrap())
}

/// Boolean relations up to arity 4.
fn boolean_relation() -> impl Strategy<Value = Relation> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), 1 << n)))
        .prop_map(|(n, bits)| Relation::from_predicate(2, n, |t| bits[index(2, t)]).unwrap())
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_round_trip(rel in small_relation()) {
        for idx in 0..rel.universe_size() {
            let t = rel.tuple_at(idx);
            prop_assert_eq!(rel.index_of(&t), idx);
            prop_assert_eq!(idx, index(rel.domain_size(), &t));
        }
    }

    #[test]
    fn essential_fill_matches_formula(rel in small_relation()) {
        prop_assert_eq!(essential_fill(&rel), rho_tilde_oracle(&rel));
    }

    #[test]
    fn essential_relation_iff_some_witness(rel in small_relation()) {
        let any_witness = rel
            .non_members()
            .any(|t| essential_witness(&rel, &t).unwrap().is_some());
        prop_assert_eq!(is_essential_relation(&rel), any_witness);
        prop_assert_eq!(any_witness, !essential_tuple_indices(&rel).is_empty());
    }

    #[test]
    fn pattern_is_symmetric_and_matches_oracle(rel in small_relation()) {
        let p = pattern(&rel);
        let n = rel.arity();
        for i in 0..n {
            prop_assert!(p.related[i][i]);
            for j in 0..n {
                prop_assert_eq!(p.related[i][j], p.related[j][i]);
            }
        }
        prop_assert_eq!(&p.related, &pattern_oracle(&rel));
        prop_assert_eq!(p.classes.is_some(), p.is_equivalence);
    }

    #[test]
    fn blocks_partition_the_fill(rel in small_relation()) {
        let fill = essential_fill(&rel);
        let bs = blocks(&rel);
        let mut seen = BTreeSet::new();
        for b in &bs {
            for &m in &b.members {
                prop_assert!(fill.contains_index(m));
                prop_assert!(seen.insert(m));
            }
            let inside = b.members.iter().all(|&m| rel.contains_index(m));
            prop_assert_eq!(b.kind == BlockKind::Trivial, inside);
        }
        prop_assert_eq!(seen.len(), fill.len());
    }

    #[test]
    fn restrict_undoes_cylindrify(rel in small_relation(), c in 0u8..2) {
        let n = rel.arity();
        let cyl = rel.cylindrify(1).unwrap();
        prop_assert_eq!(cyl.restrict(n, c).unwrap(), rel);
    }

    #[test]
    fn key_tuples_match_brute_force(rel in small_relation()) {
        prop_assume!(rel.domain_size().pow(rel.arity() as u32) <= 27);
        let report = key_report(&rel, &budget()).unwrap();
        let lib: BTreeSet<Vec<u8>> = report.key_tuples.iter().map(|t| t.0.clone()).collect();
        prop_assert_eq!(&lib, &brute_key_tuples(&rel));
        prop_assert_eq!(report.is_key, !lib.is_empty());
    }

    #[test]
    fn pattern_from_key_tuple_agrees(rel in small_relation()) {
        let report = key_report(&rel, &budget()).unwrap();
        prop_assume!(report.is_key);
        for key in &report.key_tuples {
            prop_assert_eq!(pattern_given_key_tuple(&rel, key).unwrap().related, pattern(&rel).related);
        }
    }

    #[test]
    fn gf2_decomposition_characterizes_keys(rel in boolean_relation()) {
        let dec = decompose_gf2(&rel).unwrap();
        if let Some(d) = &dec {
            prop_assert!(d.describes(&rel));
        }
        prop_assert_eq!(brute_is_key(&rel), dec.is_some() && !rel.is_full());
    }

    #[test]
    fn found_mappings_are_valid(rel in small_relation(), a in 0usize..81, b in 0usize..81) {
        let u = rel.universe_size();
        let (alpha, beta) = (rel.tuple_at(a % u), rel.tuple_at(b % u));
        prop_assume!(!rel.contains(&alpha) && !rel.contains(&beta));
        match find_mapping_vf(&rel, &alpha, &beta, &budget()).unwrap() {
            Outcome::Found(psi) => {
                prop_assert!(psi.preserves(&rel).unwrap());
                prop_assert_eq!(psi.apply(&alpha).unwrap(), beta);
            }
            Outcome::ExhaustedNone => {
                prop_assume!(rel.universe_size() <= 27);
                let exists = preserving_vector_functions(&rel)
                    .iter()
                    .any(|p| apply(p, &alpha) == beta.0);
                prop_assert!(!exists);
            }
            Outcome::BudgetExceeded => prop_assert!(false, "budget exceeded on a tiny instance"),
        }
    }

    #[test]
    fn found_polymorphisms_have_their_shape(rel in small_relation(), shape_idx in 0usize..5) {
        let (shape, arity) = [
            (Shape::Wnu, 3),
            (Shape::Nu, 3),
            (Shape::Semilattice, 2),
            (Shape::TwoSemilattice, 2),
            (Shape::Idempotent, 2),
        ][shape_idx];
        let out = search_polymorphism(&rel, shape, arity, &budget()).unwrap();
        let again = search_polymorphism(&rel, shape, arity, &budget()).unwrap();
        prop_assert_eq!(out.kind(), again.kind());
        if let Outcome::Found(f) = out {
            prop_assert!(shape.holds(&f.flags()));
            prop_assert!(preserves_op(&f, &rel).unwrap());
            let g = OperationTable::new(f.domain_size(), f.arity(), f.table().to_vec()).unwrap();
            prop_assert_eq!(g.flags(), f.flags());
        }
    }

    #[test]
    fn wnu_powers_have_idempotent_sections(rel in small_relation()) {
        let out = search_polymorphism(&rel, Shape::Wnu, 3, &budget()).unwrap();
        if let Outcome::Found(f) = out {
            let p = wnu_power(&f, &rel).unwrap();
            prop_assert!(p.sections_idempotent());
            prop_assert!(p.exponent() >= 1);
        }
    }

    #[test]
    fn cores_satisfy_their_properties(rel in small_relation()) {
        let report = key_report(&rel, &budget()).unwrap();
        prop_assume!(report.is_key);
        let key = report.key_tuples[0].clone();
        let core = compute_core(&rel, &key, &budget()).unwrap();
        let props = verify_core_properties(&rel, &core, &budget()).unwrap();
        prop_assert!(props.all(), "{:?}", props);
        prop_assert!(core.core.is_subset(&rel));
    }

    #[test]
    fn relfile_round_trip(rel in small_relation()) {
        prop_assert_eq!(relfile::parse(&relfile::format(&rel)).unwrap(), rel);
    }

    #[test]
    fn twisted_linear_relations_are_groups(k in 2usize..=5, n in 2usize..=4, seed in any::<u64>()) {
        let rel = corpus::generate(&GeneratorSpec::Linear { k, n, twist_seed: Some(seed) }).unwrap();
        let bx = keyrel_core::relcore::BoxSet::new(vec![(0..k as u8).collect(); n]);
        let g = match extract_group_structure(&rel, &bx).unwrap() {
            GroupExtraction::Linear(g) => g,
            GroupExtraction::NotLinear { reason } => return Err(TestCaseError::fail(reason)),
        };
        prop_assert_eq!(g.order, k);
        prop_assert!(g.check_axioms().is_ok());
        for t in tuples(k, n) {
            prop_assert_eq!(g.sum(&t) == Some(g.zero), rel.contains(&t));
        }
    }
}

/// Lemma checks driven by the group structure of `Σx_i = 0 mod p`.
#[test]
fn prime_field_relations_are_key_with_full_fill() {
    for p in [2usize, 3, 5] {
        for n in 2..=5 {
            if p.pow(n as u32) > 243 {
                continue;
            }
            let rel = corpus::generate(&GeneratorSpec::Linear { k: p, n, twist_seed: None }).unwrap();
            let fill = keyrel_core::preserve::key_fill(&rel, &budget()).unwrap();
            assert!(fill.is_full(), "p={p} n={n}");
        }
    }
}

/// Every WNU found for `Σx_i = 0 mod p` acts linearly on one coordinate:
/// `f(0,..,0,x) = t·x`.
#[test]
fn wnus_on_linear_relations_are_linear() {
    for p in [2usize, 3] {
        let rel = corpus::generate(&GeneratorSpec::Linear { k: p, n: 3, twist_seed: None }).unwrap();
        let arity = if p == 2 { 3 } else { 4 };
        let f = search_polymorphism(&rel, Shape::Wnu, arity, &budget()).unwrap().found().unwrap();
        let mut args = vec![0u8; arity];
        args[arity - 1] = 1;
        let t = f.eval(&args) as usize;
        for x in 0..p as u8 {
            args[arity - 1] = x;
            assert_eq!(f.eval(&args) as usize, t * x as usize % p, "p={p}");
        }
    }
}

/// Element orders of the group on a key fill equal to the full box are
/// prime; orders shrink under preserving vector-functions.
#[test]
fn element_orders_on_group_relations() {
    for k in 2..=5usize {
        let rel = corpus::generate(&GeneratorSpec::Linear { k, n: 3, twist_seed: Some(k as u64) }).unwrap();
        let bx = keyrel_core::relcore::BoxSet::new(vec![(0..k as u8).collect(); 3]);
        let g = extract_group_structure(&rel, &bx).unwrap().linear().unwrap();
        let fill = keyrel_core::preserve::key_fill(&rel, &budget()).unwrap();
        if fill.is_full() {
            for e in 0..g.order {
                if e != g.zero {
                    let o = g.element_order(e);
                    assert!((2..o).all(|d| !o.is_multiple_of(d)), "k={k} order {o}");
                }
            }
        }
        let vfs = if k <= 3 { preserving_vector_functions(&rel) } else { Vec::new() };
        for psi in &vfs {
            for i in 0..3 {
                for a in 0..k as u8 {
                    for b in 0..k as u8 {
                        let before = g.add(g.phi(i, a).unwrap(), g.neg(g.phi(i, b).unwrap()));
                        let (pa, pb) = (psi[i][a as usize], psi[i][b as usize]);
                        let after = g.add(g.phi(i, pa).unwrap(), g.neg(g.phi(i, pb).unwrap()));
                        assert_eq!(g.element_order(before) % g.element_order(after), 0);
                    }
                }
            }
        }
    }
}
