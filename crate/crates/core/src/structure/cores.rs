//! Cores of key relations and the restricting vector-functions that
//! produce them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::preserve::{
    find_mapping_unchecked, is_key_tuple, key_report, Outcome, SearchBudget, UnaryVectorFunction,
    VfProblem,
};
use crate::relcore::{components, dummy_variables, pattern, Block, BoxSet, Relation, Tuple};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreResult {
    pub core: Relation,
    pub restrictor: UnaryVectorFunction,
    pub fixed_key_tuple: Tuple,
    /// `ψ_i(A)` for each coordinate.
    pub image_sets: Vec<Vec<u8>>,
    /// Number of exhaustive searches that certified minimality.
    pub minimality_searches: usize,
}

/// True iff every tuple of `bx` outside `ρ` maps onto `key` under some
/// vector-function preserving `ρ`.
fn is_key_on_box(rel: &Relation, key: &[u8], bx: &BoxSet, budget: &SearchBudget) -> Result<bool> {
    let projections = rel.projections();
    for alpha in bx.tuples() {
        if rel.contains(&alpha) || alpha[..] == *key {
            continue;
        }
        match find_mapping_unchecked(rel, &projections, &alpha, key, budget) {
            Outcome::Found(_) => {}
            Outcome::ExhaustedNone => return Ok(false),
            Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
        }
    }
    Ok(true)
}

/// The box spanned by the projections of `ρ` and the key tuple.
fn support_box(rel: &Relation, key: &[u8]) -> BoxSet {
    BoxSet::new(
        rel.projections()
            .into_iter()
            .zip(key)
            .map(|(mut p, &a)| {
                if let Err(pos) = p.binary_search(&a) {
                    p.insert(pos, a);
                }
                p
            })
            .collect(),
    )
}

/// A relation with dummy coordinates has cores that are key only inside
/// their image box, so the precondition is checked on the support box.
fn check_key(rel: &Relation, key: &[u8], budget: &SearchBudget) -> Result<()> {
    rel.check_tuple(key)?;
    if rel.contains(key) {
        return Err(Error::input(format!("{} is a member of the relation", Tuple::from(key))));
    }
    if !is_key_on_box(rel, key, &support_box(rel, key), budget)? {
        return Err(Error::precondition(format!("{} is not a key tuple", Tuple::from(key))));
    }
    Ok(())
}

/// Looks for `Ψ'` on the image box that preserves `σ = Ψ(ρ)`, fixes `key`
/// and avoids `v` at coordinate `i`.
fn shrink_step(
    core: &Relation,
    images: &[Vec<u8>],
    key: &[u8],
    i: usize,
    v: u8,
    budget: &SearchBudget,
) -> Outcome<UnaryVectorFunction> {
    let n = core.arity();
    let k = core.domain_size();
    let mut problem = VfProblem {
        variable: vec![vec![false; k]; n],
        domain: vec![vec![0; k]; n],
        fixed: vec![(0..k as u8).collect(); n],
    };
    for j in 0..n {
        let mut mask = images[j].iter().fold(0u32, |m, &c| m | 1 << c);
        if j == i {
            mask &= !(1 << v);
        }
        for &c in &images[j] {
            problem.variable[j][c as usize] = true;
            problem.domain[j][c as usize] = if c == key[j] { 1 << c } else { mask };
        }
    }
    problem.solve(core, core, budget)
}

/// Runs every shrink search; the first success is returned.
fn find_shrink(
    core: &Relation,
    images: &[Vec<u8>],
    key: &[u8],
    budget: &SearchBudget,
) -> Result<(Option<UnaryVectorFunction>, usize)> {
    let mut searches = 0;
    for (i, img) in images.iter().enumerate() {
        for &v in img.iter().filter(|&&v| v != key[i]) {
            searches += 1;
            match shrink_step(core, images, key, i, v, budget) {
                Outcome::Found(psi) => return Ok((Some(psi), searches)),
                Outcome::ExhaustedNone => {}
                Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
            }
        }
    }
    Ok((None, searches))
}

fn image_of(psi: &UnaryVectorFunction, rel: &Relation) -> Relation {
    let mut out = Relation::empty(rel.domain_size(), rel.arity()).expect("same shape");
    for t in rel.members() {
        out.insert_index(rel.index_of(&psi.apply_unchecked(&t)));
    }
    out
}

/// Computes a core of `ρ` whose restrictor fixes `key`. Image minimality is
/// certified by exhaustive search before returning.
pub fn compute_core(rel: &Relation, key: &[u8], budget: &SearchBudget) -> Result<CoreResult> {
    check_key(rel, key, budget)?;
    let k = rel.domain_size();
    // Start from the identity on the projections, collapsing unused values
    // onto the key tuple.
    let projections = rel.projections();
    let maps = projections
        .iter()
        .zip(key)
        .map(|(proj, &a)| {
            (0..k as u8)
                .map(|c| if c == a || proj.binary_search(&c).is_ok() { c } else { a })
                .collect()
        })
        .collect();
    let mut psi = UnaryVectorFunction::new(maps)?;
    loop {
        let images = psi.image_sets();
        let core = image_of(&psi, rel);
        let (step, searches) = find_shrink(&core, &images, key, budget)?;
        match step {
            Some(shrink) => psi = shrink.compose(&psi).idempotent_power(),
            None => {
                return Ok(CoreResult {
                    core,
                    restrictor: psi,
                    fixed_key_tuple: Tuple::from(key),
                    image_sets: images,
                    minimality_searches: searches,
                })
            }
        }
    }
}

/// True iff no restricting vector-function fixing `key` has a strictly
/// smaller image than `restrictor`.
pub fn certify_minimal(
    rel: &Relation,
    restrictor: &UnaryVectorFunction,
    key: &[u8],
    budget: &SearchBudget,
) -> Result<bool> {
    let core = image_of(restrictor, rel);
    let (step, _) = find_shrink(&core, &restrictor.image_sets(), key, budget)?;
    Ok(step.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreProperties {
    /// Preserves `ρ`, fixes the key tuple, is idempotent and maps `ρ` onto the core.
    pub restrictor_valid: bool,
    pub core_is_key: bool,
    pub same_pattern: bool,
    /// The core is its own core, with a restrictor that is the identity on
    /// its projections.
    pub core_of_itself: bool,
    /// Tuples of the image box are key for `ρ` exactly when key for the core.
    pub key_correspondence: bool,
    pub minimal: bool,
}

impl CoreProperties {
    pub fn all(&self) -> bool {
        self.restrictor_valid
            && self.core_is_key
            && self.same_pattern
            && self.core_of_itself
            && self.key_correspondence
            && self.minimal
    }
}

pub fn verify_core_properties(
    rel: &Relation,
    result: &CoreResult,
    budget: &SearchBudget,
) -> Result<CoreProperties> {
    let key = &result.fixed_key_tuple;
    let psi = &result.restrictor;
    let sigma = &result.core;
    let restrictor_valid = psi.preserves(rel)?
        && psi.apply(key)? == *key
        && psi.is_idempotent()
        && image_of(psi, rel) == *sigma;

    let image_box = BoxSet::new(psi.image_sets());
    let core_is_key = !sigma.contains(key)
        && is_key_on_box(sigma, key, &image_box, budget)?
        && (!dummy_variables(rel).is_empty() || is_key_tuple(sigma, key, budget)?);
    let same_pattern = pattern(sigma).related == pattern(rel).related;

    let core_of_itself = core_is_key && {
        let again = compute_core(sigma, key, budget)?;
        let projections = sigma.projections();
        again.core == *sigma
            && projections
                .iter()
                .enumerate()
                .all(|(i, p)| p.iter().all(|&c| again.restrictor.maps[i][c as usize] == c))
    };

    let key_correspondence = core_is_key && {
        let proj_rho = rel.projections();
        let proj_sigma = sigma.projections();
        let mut ok = true;
        for alpha in image_box.tuples() {
            if sigma.contains(&alpha) || alpha == *key {
                continue;
            }
            let for_rho = match find_mapping_unchecked(rel, &proj_rho, key, &alpha, budget) {
                Outcome::Found(_) => true,
                Outcome::ExhaustedNone => false,
                Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
            };
            let for_sigma = match find_mapping_unchecked(sigma, &proj_sigma, key, &alpha, budget) {
                Outcome::Found(_) => true,
                Outcome::ExhaustedNone => false,
                Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(budget.max_nodes())),
            };
            if for_rho != for_sigma {
                ok = false;
                break;
            }
        }
        ok
    };

    let minimal = certify_minimal(rel, psi, key, budget)?;
    Ok(CoreProperties {
        restrictor_valid,
        core_is_key,
        same_pattern,
        core_of_itself,
        key_correspondence,
        minimal,
    })
}

/// Components of `Key(σ)` that contain a key tuple.
pub fn key_blocks(core: &Relation, budget: &SearchBudget) -> Result<Vec<Block>> {
    let report = key_report(core, budget)?;
    if !report.is_key {
        return Ok(Vec::new());
    }
    let mut filled = core.clone();
    let keys: Vec<usize> = report.key_tuples.iter().map(|t| core.index_of(t)).collect();
    for &idx in &keys {
        filled.insert_index(idx);
    }
    Ok(components(&filled, core)
        .into_iter()
        .filter(|b| keys.iter().any(|&idx| b.contains_index(idx)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn xor3() -> Relation {
        Relation::from_predicate(2, 3, |t| (t[0] ^ t[1] ^ t[2]) == 0).unwrap()
    }

    fn or_x_a() -> Relation {
        Relation::from_tuples(2, 2, [[0, 1], [1, 0], [1, 1]]).unwrap().cylindrify(1).unwrap()
    }

    #[test]
    fn xor_is_its_own_core() {
        let budget = SearchBudget::default();
        let rel = xor3();
        let res = compute_core(&rel, &[0, 0, 1], &budget).unwrap();
        assert_eq!(res.core, rel);
        assert_eq!(res.restrictor, UnaryVectorFunction::identity(2, 3));
        assert!(verify_core_properties(&rel, &res, &budget).unwrap().all());
    }

    #[test]
    fn cylinder_collapses_the_free_coordinate() {
        let budget = SearchBudget::default();
        let rel = or_x_a();
        let res = compute_core(&rel, &[0, 0, 0], &budget).unwrap();
        let expect = Relation::from_tuples(2, 3, [[0, 1, 0], [1, 0, 0], [1, 1, 0]]).unwrap();
        assert_eq!(res.core, expect);
        assert_eq!(res.restrictor.maps[2], vec![0, 0]);
        let props = verify_core_properties(&rel, &res, &budget).unwrap();
        assert!(props.all(), "{props:?}");
    }

    #[test]
    fn e2_core_passes_verification() {
        let budget = SearchBudget::default();
        let rel = corpus::e2();
        let res = compute_core(&rel, &[1, 1, 0], &budget).unwrap();
        assert!(verify_core_properties(&rel, &res, &budget).unwrap().all());
    }

    #[test]
    fn identity_on_a_collapsible_relation_is_not_minimal() {
        let budget = SearchBudget::default();
        let rel = or_x_a();
        let fake = CoreResult {
            core: rel.clone(),
            restrictor: UnaryVectorFunction::identity(2, 3),
            fixed_key_tuple: Tuple::from([0, 0, 0]),
            image_sets: vec![vec![0, 1]; 3],
            minimality_searches: 0,
        };
        let props = verify_core_properties(&rel, &fake, &budget).unwrap();
        assert!(!props.minimal);
        assert!(!props.all());
    }

    #[test]
    fn key_block_examples() {
        let budget = SearchBudget::default();
        let bs = key_blocks(&xor3(), &budget).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].coord_sets, vec![vec![0, 1]; 3]);

        let z3 = Relation::from_predicate(3, 3, |t| (t[0] + t[1] + t[2]) % 3 == 0).unwrap();
        let bs = key_blocks(&z3, &budget).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].coord_sets, vec![vec![0, 1, 2]; 3]);
        assert!(bs[0].is_product);

        let single = Relation::from_tuples(2, 2, [[1, 1]]).unwrap();
        assert!(key_blocks(&single, &budget).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_key_tuples() {
        let budget = SearchBudget::default();
        assert!(matches!(
            compute_core(&corpus::e1(), &[0, 0, 2], &budget),
            Err(Error::Precondition(_))
        ));
    }
}
