//! Witness finders and verifiers for the structure theorems on key
//! relations preserved by weak near-unanimity operations.

use serde::Serialize;

use super::cores::{compute_core, key_blocks};
use super::group::{extract_group_structure, is_prime, is_strongly_rich_on, GroupExtraction, GroupStructure};
use super::pairs::{find_almost_perfect_pair, find_perfect_pair};
use crate::error::{Error, Result};
use crate::preserve::{
    find_mapping_unchecked, is_key_tuple, key_report, preserves_op, wnu_power, OperationTable, Outcome,
    SearchBudget,
};
use crate::relcore::{blocks, dummy_variables, pattern, Block, BlockKind, BoxSet, Relation, Tuple};

/// Largest number of candidate boxes or pair-element choices tried by the
/// witness search before giving up.
const MAX_CANDIDATES: usize = 20_000;

/// The structure theorems are stated for essential key relations, i.e. key
/// relations without dummy coordinates.
fn check_essential(rel: &Relation) -> Result<()> {
    let dummies = dummy_variables(rel);
    if dummies.is_empty() {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "relation has dummy coordinates {:?}",
            dummies.iter().map(|d| d + 1).collect::<Vec<_>>()
        )))
    }
}

fn check_wnu(rel: &Relation, wnu: &OperationTable) -> Result<()> {
    if wnu.domain_size() != rel.domain_size() {
        return Err(Error::input("operation and relation differ in domain"));
    }
    if !wnu.flags().wnu {
        return Err(Error::precondition("the supplied operation is not a WNU"));
    }
    if !preserves_op(wnu, rel)? {
        return Err(Error::precondition("the supplied WNU does not preserve the relation"));
    }
    Ok(())
}

/// For a key relation preserved by a WNU, the pattern must be an
/// equivalence with at most one class of size above one. A `false` result
/// is a counterexample to that statement.
pub fn verify_pattern_theorem(rel: &Relation, wnu: &OperationTable, budget: &SearchBudget) -> Result<bool> {
    check_wnu(rel, wnu)?;
    check_essential(rel)?;
    if !key_report(rel, budget)?.is_key {
        return Err(Error::precondition("relation is not a key relation"));
    }
    let holds = pattern(rel).has_single_nontrivial_class();
    if !holds {
        eprintln!(
            "COUNTEREXAMPLE: key relation {rel:?} preserved by a WNU has pattern {:?}",
            pattern(rel).related
        );
    }
    Ok(holds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    pub block: Block,
    pub group: Option<GroupStructure>,
    /// Why the linear description could not be established.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullPatternReport {
    pub wnu_supplied: bool,
    pub blocks: Vec<BlockVerdict>,
    /// Failures that contradict the theorem (only possible with a WNU).
    pub violations: Vec<String>,
    /// No WNU was supplied and some block lacks the predicted structure.
    pub hypotheses_unmet: bool,
}

/// Representatives of the "same rows" classes of each coordinate of the
/// box: `x ≡ x'` when swapping them never changes membership.
fn row_classes(rel: &Relation, bx: &BoxSet) -> Vec<Vec<(u8, u8)>> {
    (0..bx.arity())
        .map(|i| {
            let mut others = bx.sets.clone();
            others[i] = vec![bx.sets[i][0]];
            let rows: Vec<Vec<u8>> = BoxSet::new(others).tuples().map(|t| t.0).collect();
            let signature = |x: u8| -> Vec<bool> {
                rows.iter()
                    .map(|r| {
                        let mut t = r.clone();
                        t[i] = x;
                        rel.contains(&t)
                    })
                    .collect()
            };
            let mut reps: Vec<(Vec<bool>, u8)> = Vec::new();
            bx.sets[i]
                .iter()
                .map(|&x| {
                    let sig = signature(x);
                    let rep = match reps.iter().find(|(s, _)| *s == sig) {
                        Some(&(_, r)) => r,
                        None => {
                            reps.push((sig, x));
                            x
                        }
                    };
                    (x, rep)
                })
                .collect()
        })
        .collect()
}

/// Group structure of `ρ ∩ B` with surjective coordinate maps, via the
/// quotient of each `B_i` by the "same rows" equivalence.
fn block_group(rel: &Relation, bx: &BoxSet) -> std::result::Result<GroupStructure, String> {
    if rel.arity() < 2 {
        return Err("arity 1 blocks carry no group structure".into());
    }
    let classes = row_classes(rel, bx);
    let reps = BoxSet::new(
        classes
            .iter()
            .map(|c| c.iter().map(|&(_, r)| r).collect())
            .collect(),
    );
    if !is_strongly_rich_on(rel, &reps) {
        return Err("relation is not strongly rich on the quotient of the block".into());
    }
    let mut g = match extract_group_structure(rel, &reps).map_err(|e| e.to_string())? {
        GroupExtraction::Linear(g) => g,
        GroupExtraction::NotLinear { reason } => return Err(reason),
    };
    for (i, class) in classes.iter().enumerate() {
        for &(x, r) in class {
            g.maps[i][x as usize] = g.maps[i][r as usize];
        }
    }
    for t in bx.tuples() {
        if (g.sum(&t) == Some(g.zero)) != rel.contains(&t) {
            return Err(format!("equation disagrees with the relation at {t}"));
        }
    }
    Ok(g)
}

/// Checks the block description for a key relation with full pattern.
/// Without a WNU the report is descriptive and failures are flagged as
/// unmet hypotheses; with one, failures are recorded as violations.
pub fn full_pattern_block_report(
    rel: &Relation,
    wnu: Option<&OperationTable>,
    budget: &SearchBudget,
) -> Result<FullPatternReport> {
    if let Some(f) = wnu {
        check_wnu(rel, f)?;
    }
    check_essential(rel)?;
    if !pattern(rel).is_full() {
        return Err(Error::precondition("pattern is not full"));
    }
    if !key_report(rel, budget)?.is_key {
        return Err(Error::precondition("relation is not a key relation"));
    }
    let mut verdicts = Vec::new();
    let mut violations = Vec::new();
    for block in blocks(rel) {
        let mut failure = None;
        let mut group = None;
        if !block.is_product {
            failure = Some("block is not a product of its projections".to_string());
        } else if block.kind == BlockKind::Nontrivial {
            match block_group(rel, &block.bounding_box()) {
                Ok(g) => {
                    if !g.prime_power {
                        failure = Some(format!("group order {} is not a prime power", g.order));
                    }
                    group = Some(g);
                }
                Err(reason) => failure = Some(reason),
            }
        }
        if let (Some(reason), Some(_)) = (&failure, wnu) {
            violations.push(format!("block with coordinate sets {:?}: {reason}", block.coord_sets));
        }
        verdicts.push(BlockVerdict { block, group, failure });
    }
    let any_failure = verdicts.iter().any(|v| v.failure.is_some());
    Ok(FullPatternReport {
        wnu_supplied: wnu.is_some(),
        blocks: verdicts,
        violations,
        hypotheses_unmet: wnu.is_none() && any_failure,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    PerfectPair,
    AlmostPerfectPair,
    CoreGroup,
    BoxSearch,
}

/// `φ_i` on one coordinate of the linear class, as `(value, residue)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordMap {
    pub coord: usize,
    pub values: Vec<(u8, u32)>,
}

/// `ρ ∩ B = (Σ φ_i(x_i) = 0 mod p) ∨ ⋁_s (x_s = b_s)` with the sum over
/// `class_coords` and the disjunction over the remaining coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremWitness {
    pub key_tuple: Tuple,
    #[serde(rename = "box")]
    pub box_sets: BoxSet,
    pub prime: usize,
    pub class_coords: Vec<usize>,
    pub coord_maps: Vec<CoordMap>,
    /// `(coordinate, b)` for each coordinate outside the class.
    pub pair_elements: Vec<(usize, u8)>,
    pub method: WitnessMethod,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found(MainTheoremWitness),
    NotFound { stage: String, detail: String },
}

impl WitnessOutcome {
    pub fn found(self) -> Option<MainTheoremWitness> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            WitnessOutcome::NotFound { .. } => None,
        }
    }
}

/// The class part of a candidate: sets and residues per class coordinate.
#[derive(Clone, Debug)]
struct ClassPart {
    prime: usize,
    maps: Vec<Vec<(u8, u32)>>,
}

struct Ctx<'a> {
    rel: &'a Relation,
    key: &'a [u8],
    class: Vec<usize>,
    singles: Vec<usize>,
    projections: Vec<Vec<u8>>,
    budget: &'a SearchBudget,
}

impl Ctx<'_> {
    fn witness(&self, part: &ClassPart, b: &[u8], method: WitnessMethod) -> MainTheoremWitness {
        let n = self.rel.arity();
        let mut sets = vec![Vec::new(); n];
        for (&c, m) in self.class.iter().zip(&part.maps) {
            sets[c] = m.iter().map(|&(x, _)| x).collect();
        }
        for (&s, &bs) in self.singles.iter().zip(b) {
            sets[s] = vec![self.key[s], bs];
        }
        MainTheoremWitness {
            key_tuple: Tuple::from(self.key),
            box_sets: BoxSet::new(sets),
            prime: part.prime,
            class_coords: self.class.clone(),
            coord_maps: self
                .class
                .iter()
                .zip(&part.maps)
                .map(|(&coord, m)| {
                    let mut values = m.clone();
                    values.sort_unstable();
                    CoordMap { coord, values }
                })
                .collect(),
            pair_elements: self.singles.iter().copied().zip(b.iter().copied()).collect(),
            method,
            verified: false,
        }
    }

    /// Checks the disjunction form over the box, then that every box tuple
    /// outside `ρ` is a key tuple.
    fn verify(&self, w: &MainTheoremWitness) -> Result<bool> {
        let p = w.prime as u32;
        if !w.box_sets.contains(self.key) {
            return Ok(false);
        }
        for (&c, m) in w.class_coords.iter().zip(&w.coord_maps) {
            let mut residues: Vec<u32> = m.values.iter().map(|&(_, r)| r).collect();
            residues.sort_unstable();
            if w.box_sets.sets[c].len() != w.prime || residues != (0..p).collect::<Vec<_>>() {
                return Ok(false);
            }
        }
        if w.pair_elements.iter().any(|&(s, b)| b == self.key[s]) {
            return Ok(false);
        }
        let residue = |c: usize, x: u8| {
            let m = &w.coord_maps[w.class_coords.iter().position(|&d| d == c).expect("class coord")];
            m.values.iter().find(|&&(v, _)| v == x).map(|&(_, r)| r).expect("value in box")
        };
        for t in w.box_sets.tuples() {
            let sum: u32 = w.class_coords.iter().map(|&c| residue(c, t[c])).sum::<u32>() % p;
            let in_form = sum == 0 || w.pair_elements.iter().any(|&(s, b)| t[s] == b);
            if in_form != self.rel.contains(&t) {
                return Ok(false);
            }
        }
        for t in w.box_sets.tuples() {
            if self.rel.contains(&t) || t[..] == *self.key {
                continue;
            }
            match find_mapping_unchecked(self.rel, &self.projections, self.key, &t, self.budget) {
                Outcome::Found(_) => {}
                Outcome::ExhaustedNone => return Ok(false),
                Outcome::BudgetExceeded => return Err(Error::BudgetExceeded(self.budget.max_nodes())),
            }
        }
        Ok(true)
    }

    /// Tries `preferred` pair elements first, then every choice in
    /// lexicographic order.
    fn complete_with_singles(
        &self,
        part: &ClassPart,
        preferred: Option<Vec<u8>>,
        method: WitnessMethod,
    ) -> Result<Option<MainTheoremWitness>> {
        if let Some(b) = preferred {
            let w = self.witness(part, &b, method);
            if self.verify(&w)? {
                return Ok(Some(MainTheoremWitness { verified: true, ..w }));
            }
        }
        let k = self.rel.domain_size() as u8;
        let choices = BoxSet::new(
            self.singles
                .iter()
                .map(|&s| (0..k).filter(|&v| v != self.key[s]).collect())
                .collect(),
        );
        for b in choices.tuples().take(MAX_CANDIDATES) {
            let w = self.witness(part, &b, method);
            if self.verify(&w)? {
                return Ok(Some(MainTheoremWitness { verified: true, ..w }));
            }
        }
        Ok(None)
    }

    /// `ρ` with the non-class coordinates pinned to the key tuple.
    fn class_slice(&self) -> Result<Relation> {
        if self.singles.is_empty() {
            return Ok(self.rel.clone());
        }
        let pins: Vec<(usize, u8)> = self.singles.iter().map(|&s| (s, self.key[s])).collect();
        self.rel.restrict_many(&pins)
    }

    fn class_key(&self) -> Vec<u8> {
        self.class.iter().map(|&c| self.key[c]).collect()
    }

    /// Pair elements `b_s = h_{c_s}^t(a_s)` from a perfect pair of the slice
    /// through the last class coordinate and the singletons.
    fn preferred_singles(&self, wnu: Option<&OperationTable>) -> Option<Vec<u8>> {
        let f = wnu?;
        if self.singles.is_empty() {
            return Some(Vec::new());
        }
        let last = *self.class.last()?;
        let pins: Vec<(usize, u8)> = self.class[..self.class.len() - 1]
            .iter()
            .map(|&c| (c, self.key[c]))
            .collect();
        let (slice, kept) = if pins.is_empty() {
            (self.rel.clone(), (0..self.rel.arity()).collect::<Vec<_>>())
        } else {
            let kept: Vec<usize> = (0..self.rel.arity()).filter(|i| !pins.iter().any(|&(c, _)| c == *i)).collect();
            (self.rel.restrict_many(&pins).ok()?, kept)
        };
        let a2: Vec<u8> = kept.iter().map(|&i| self.key[i]).collect();
        let pair = find_perfect_pair(&slice, &a2).ok()??;
        let power = wnu_power(f, self.rel).ok()?;
        let b = self
            .singles
            .iter()
            .map(|&s| {
                let pos = kept.iter().position(|&i| i == s).expect("singleton kept");
                power.section(pair.b[pos])[self.key[s] as usize]
            })
            .collect();
        let _ = last;
        Some(b)
    }

    fn from_pairs(&self, wnu: Option<&OperationTable>) -> Result<Option<MainTheoremWitness>> {
        let r = self.class.len();
        if r == 1 {
            let Some(pair) = find_perfect_pair(self.rel, self.key)? else {
                return Ok(None);
            };
            let c = self.class[0];
            let part = ClassPart {
                prime: 2,
                maps: vec![vec![(pair.b[c], 0), (self.key[c], 1)]],
            };
            let b: Vec<u8> = self.singles.iter().map(|&s| pair.b[s]).collect();
            return self.complete_with_singles(&part, Some(b), WitnessMethod::PerfectPair);
        }
        if r == 2 {
            let (i, j) = (self.class[0], self.class[1]);
            let Some(pair) = find_almost_perfect_pair(self.rel, self.key, (i, j))? else {
                return Ok(None);
            };
            let part = ClassPart {
                prime: 2,
                maps: vec![
                    vec![(self.key[i], 1), (pair.b[i], 0)],
                    vec![(self.key[j], 0), (pair.b[j], 1)],
                ],
            };
            let b: Vec<u8> = self.singles.iter().map(|&s| pair.b[s]).collect();
            let _ = wnu;
            return self.complete_with_singles(&part, Some(b), WitnessMethod::AlmostPerfectPair);
        }
        Ok(None)
    }

    /// The constructive route: core of the class slice, its key block, the
    /// group on that block and the `Z_p` line through the key tuple.
    fn from_core_group(&self, wnu: Option<&OperationTable>) -> Result<std::result::Result<MainTheoremWitness, (String, String)>> {
        let fail = |stage: &str, detail: String| Ok(Err((stage.to_string(), detail)));
        let slice = self.class_slice()?;
        let a1 = self.class_key();
        let core = match compute_core(&slice, &a1, self.budget) {
            Ok(c) => c,
            Err(Error::BudgetExceeded(n)) => return Err(Error::BudgetExceeded(n)),
            Err(e) => return fail("core", e.to_string()),
        };
        let sigma = &core.core;
        let a_idx = sigma.index_of(&a1);
        let Some(block) = key_blocks(sigma, self.budget)?
            .into_iter()
            .find(|b| b.contains_index(a_idx))
        else {
            return fail("key-block", "no key block contains the key tuple".into());
        };
        let g = match extract_group_structure(sigma, &block.bounding_box()) {
            Ok(GroupExtraction::Linear(g)) => g,
            Ok(GroupExtraction::NotLinear { reason }) => return fail("group", reason),
            Err(e) => return fail("group", e.to_string()),
        };
        let Some(e) = g.sum(&a1) else {
            return fail("group", "key tuple outside the key block".into());
        };
        let p = g.element_order(e);
        if e == g.zero || !is_prime(p) {
            return fail("prime", format!("the key tuple's sum has order {p}"));
        }
        let maps: Vec<Vec<(u8, u32)>> = (0..a1.len())
            .map(|i| {
                let base = g.phi(i, a1[i]).expect("key tuple in block");
                (0..p as u32)
                    .map(|x| {
                        let target = g.add(base, g.times(x as usize, e));
                        let value = g.phi_inv(i, target).expect("bijective map");
                        let shift = if i == 0 { 1 } else { 0 };
                        (value, (x + shift) % p as u32)
                    })
                    .collect()
            })
            .collect();
        let part = ClassPart { prime: p, maps };
        match self.complete_with_singles(&part, self.preferred_singles(wnu), WitnessMethod::CoreGroup)? {
            Some(w) => Ok(Ok(w)),
            None => fail("pair-elements", "no choice of pair elements verifies".into()),
        }
    }

    /// Bounded search over boxes with `|B_i| = p ≤ 5` on the class.
    fn from_box_search(&self) -> Result<Option<MainTheoremWitness>> {
        let k = self.rel.domain_size();
        let slice = self.class_slice()?;
        let a1 = self.class_key();
        let r = a1.len();
        for p in [2usize, 3, 5].into_iter().filter(|&p| p <= k) {
            let per_coord: Vec<Vec<Vec<u8>>> = a1
                .iter()
                .map(|&a| {
                    let others: Vec<u8> = (0..k as u8).filter(|&v| v != a).collect();
                    combinations(&others, p - 1)
                        .into_iter()
                        .map(|mut c| {
                            c.push(a);
                            c.sort_unstable();
                            c
                        })
                        .collect()
                })
                .collect();
            let total = per_coord.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
            if total.is_none_or(|t| t > MAX_CANDIDATES) {
                continue;
            }
            let index_box = BoxSet::new(per_coord.iter().map(|v| (0..v.len() as u8).collect()).collect());
            for pick in index_box.tuples() {
                let sets: Vec<Vec<u8>> = pick.iter().enumerate().map(|(i, &j)| per_coord[i][j as usize].clone()).collect();
                let bx = BoxSet::new(sets);
                let Some(part) = linear_on_box(&slice, &bx, &a1, p) else {
                    continue;
                };
                if let Some(w) = self.complete_with_singles(&part, None, WitnessMethod::BoxSearch)? {
                    return Ok(Some(w));
                }
            }
            let _ = r;
        }
        Ok(None)
    }
}

fn combinations(items: &[u8], size: usize) -> Vec<Vec<u8>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// `Z_p` residues for the class coordinates when `ρ ∩ B` is one linear
/// equation over `Z_p` missing the key tuple.
fn linear_on_box(slice: &Relation, bx: &BoxSet, a1: &[u8], p: usize) -> Option<ClassPart> {
    if slice.arity() == 1 {
        let members: Vec<u8> = bx.sets[0].iter().copied().filter(|&x| slice.contains(&[x])).collect();
        let [c] = members[..] else { return None };
        let mut next = 1u32;
        let map = bx.sets[0]
            .iter()
            .map(|&x| {
                if x == c {
                    (x, 0)
                } else {
                    next += 1;
                    (x, next - 1)
                }
            })
            .collect();
        return (!slice.contains(a1)).then_some(ClassPart { prime: p, maps: vec![map] });
    }
    if !is_strongly_rich_on(slice, bx) {
        return None;
    }
    let g = extract_group_structure(slice, bx).ok()?.linear()?;
    if g.order != p {
        return None;
    }
    let generator = (0..g.order).find(|&x| x != g.zero)?;
    let coords = g.prime_cyclic_coordinates(generator)?;
    let maps = bx
        .sets
        .iter()
        .enumerate()
        .map(|(i, set)| set.iter().map(|&x| (x, coords[g.phi(i, x).expect("in box")])).collect())
        .collect();
    Some(ClassPart { prime: p, maps })
}

/// Finds the box, prime and maps promised for a key relation whose pattern
/// is an equivalence with at most one non-singleton class. `wnu`, when
/// given, must be a WNU preserving `ρ`; it guides the choice of pair
/// elements. Every returned witness has been verified by enumeration.
pub fn main_theorem_witness(
    rel: &Relation,
    key: &[u8],
    wnu: Option<&OperationTable>,
    budget: &SearchBudget,
) -> Result<WitnessOutcome> {
    rel.check_tuple(key)?;
    if rel.contains(key) {
        return Err(Error::input(format!("{} is a member of the relation", Tuple::from(key))));
    }
    if let Some(f) = wnu {
        check_wnu(rel, f)?;
    }
    let pat = pattern(rel);
    if !pat.has_single_nontrivial_class() {
        return Err(Error::precondition(
            "pattern is not an equivalence with at most one non-singleton class",
        ));
    }
    if !is_key_tuple(rel, key, budget)? {
        return Err(Error::precondition(format!("{} is not a key tuple", Tuple::from(key))));
    }
    let classes = pat.classes.expect("equivalence pattern");
    let class = classes
        .iter()
        .find(|c| c.len() > 1)
        .cloned()
        .unwrap_or_else(|| vec![0]);
    let singles: Vec<usize> = (0..rel.arity()).filter(|i| !class.contains(i)).collect();
    let ctx = Ctx {
        rel,
        key,
        class,
        singles,
        projections: rel.projections(),
        budget,
    };

    let mut last_failure = ("pairs".to_string(), "no perfect or almost perfect pair".to_string());
    if let Some(w) = ctx.from_pairs(wnu)? {
        return Ok(WitnessOutcome::Found(w));
    }
    if ctx.class.len() >= 2 {
        match ctx.from_core_group(wnu)? {
            Ok(w) => return Ok(WitnessOutcome::Found(w)),
            Err(failure) => last_failure = failure,
        }
    }
    if let Some(w) = ctx.from_box_search()? {
        return Ok(WitnessOutcome::Found(w));
    }
    Ok(WitnessOutcome::NotFound {
        stage: last_failure.0,
        detail: format!("{}; bounded box search found nothing", last_failure.1),
    })
}
