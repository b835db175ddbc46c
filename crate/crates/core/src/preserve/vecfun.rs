//! Unary vector-functions `Ψ = (ψ_1..ψ_n)` and the search for one that
//! preserves a relation while sending a given tuple to another.

use serde::Serialize;

use super::search::{Outcome, SearchBudget, Slot, TableCsp};
use crate::error::{Error, Result};
use crate::relcore::{Relation, Tuple};

/// `maps[i][a] = ψ_i(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnaryVectorFunction {
    pub maps: Vec<Vec<u8>>,
}

impl UnaryVectorFunction {
    pub fn new(maps: Vec<Vec<u8>>) -> Result<Self> {
        let k = maps.first().map_or(0, Vec::len);
        if maps.is_empty() {
            return Err(Error::input("a vector-function needs at least one coordinate"));
        }
        for m in &maps {
            if m.len() != k || m.iter().any(|&x| x as usize >= k) {
                return Err(Error::input("vector-function maps must be total self-maps of one domain"));
            }
        }
        Ok(UnaryVectorFunction { maps })
    }

    pub fn identity(k: usize, n: usize) -> Self {
        UnaryVectorFunction {
            maps: vec![(0..k as u8).collect(); n],
        }
    }

    /// Sends every tuple to `target`.
    pub fn constant(k: usize, target: &[u8]) -> Self {
        UnaryVectorFunction {
            maps: target.iter().map(|&c| vec![c; k]).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.maps.len()
    }

    pub fn domain_size(&self) -> usize {
        self.maps[0].len()
    }

    pub fn apply(&self, alpha: &[u8]) -> Result<Tuple> {
        if alpha.len() != self.arity() {
            return Err(Error::input(format!(
                "tuple of arity {} given to a vector-function of arity {}",
                alpha.len(),
                self.arity()
            )));
        }
        if alpha.iter().any(|&x| x as usize >= self.domain_size()) {
            return Err(Error::input("tuple entry outside the domain"));
        }
        Ok(Tuple(self.apply_unchecked(alpha)))
    }

    pub(crate) fn apply_unchecked(&self, alpha: &[u8]) -> Vec<u8> {
        alpha.iter().zip(&self.maps).map(|(&x, m)| m[x as usize]).collect()
    }

    pub fn preserves(&self, rel: &Relation) -> Result<bool> {
        self.check_shape(rel)?;
        let n = rel.arity();
        let mut buf = vec![0u8; n];
        Ok(rel.member_indices().all(|idx| {
            rel.decode_into(idx, &mut buf);
            for (x, m) in buf.iter_mut().zip(&self.maps) {
                *x = m[*x as usize];
            }
            rel.contains(&buf)
        }))
    }

    fn check_shape(&self, rel: &Relation) -> Result<()> {
        if self.arity() != rel.arity() || self.domain_size() != rel.domain_size() {
            return Err(Error::input("vector-function and relation differ in arity or domain"));
        }
        Ok(())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &UnaryVectorFunction) -> UnaryVectorFunction {
        UnaryVectorFunction {
            maps: self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(f, g)| g.iter().map(|&x| f[x as usize]).collect())
                .collect(),
        }
    }

    /// Per-coordinate image sets `ψ_i(A)`, ascending.
    pub fn image_sets(&self) -> Vec<Vec<u8>> {
        self.maps
            .iter()
            .map(|m| {
                let mut img = m.clone();
                img.sort_unstable();
                img.dedup();
                img
            })
            .collect()
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }

    /// The first power `Ψ^t` (t ≥ 1) with `Ψ^t ∘ Ψ^t = Ψ^t`.
    pub fn idempotent_power(&self) -> UnaryVectorFunction {
        let t = idempotent_exponent(&self.maps);
        UnaryVectorFunction {
            maps: self.maps.iter().map(|m| map_power(m, t)).collect(),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `t ≥ 1` such that `f^t` is idempotent for every map `f` given:
/// a multiple of every cycle length that is at least every tail length.
pub(crate) fn idempotent_exponent(maps: &[Vec<u8>]) -> u64 {
    let mut period = 1u64;
    let mut tail = 1u64;
    for m in maps {
        for start in 0..m.len() {
            let mut seen = vec![usize::MAX; m.len()];
            let mut x = start;
            let mut step = 0usize;
            while seen[x] == usize::MAX {
                seen[x] = step;
                x = m[x] as usize;
                step += 1;
            }
            let cycle = (step - seen[x]) as u64;
            tail = tail.max(seen[x] as u64);
            period = period / gcd(period, cycle) * cycle;
        }
    }
    tail.div_ceil(period) * period
}

pub(crate) fn map_power(m: &[u8], mut t: u64) -> Vec<u8> {
    let mut result: Vec<u8> = (0..m.len() as u8).collect();
    let mut base = m.to_vec();
    while t > 0 {
        if t & 1 == 1 {
            result = result.iter().map(|&x| base[x as usize]).collect();
        }
        base = base.iter().map(|&x| base[x as usize]).collect();
        t >>= 1;
    }
    result
}

/// A vector-function search: cells `(i, c)` marked variable get a domain
/// mask; the others keep `fixed[i][c]`. Every member of `source` must land
/// in `target`.
pub(crate) struct VfProblem {
    pub variable: Vec<Vec<bool>>,
    pub domain: Vec<Vec<u32>>,
    pub fixed: Vec<Vec<u8>>,
}

impl VfProblem {
    pub fn solve(
        &self,
        source: &Relation,
        target: &Relation,
        budget: &SearchBudget,
    ) -> Outcome<UnaryVectorFunction> {
        let n = source.arity();
        let k = source.domain_size();
        let mut ids = vec![vec![u32::MAX; k]; n];
        let mut cells = Vec::new();
        let mut domains = Vec::new();
        for i in 0..n {
            for c in 0..k {
                if self.variable[i][c] {
                    ids[i][c] = cells.len() as u32;
                    cells.push((i, c));
                    domains.push(self.domain[i][c]);
                }
            }
        }
        let mut csp = TableCsp::new(target, domains);
        let mut buf = vec![0u8; n];
        for idx in source.member_indices() {
            source.decode_into(idx, &mut buf);
            let slots = buf
                .iter()
                .enumerate()
                .map(|(i, &c)| match ids[i][c as usize] {
                    u32::MAX => Slot::Const(self.fixed[i][c as usize]),
                    v => Slot::Var(v),
                })
                .collect();
            csp.add_constraint(slots);
        }
        let pinned = |v: usize| {
            let (i, c) = cells[v];
            self.domain[i][c].count_ones() == 1
        };
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&v| (!pinned(v), std::cmp::Reverse(csp.degree(v)), v));
        csp.solve(&order, budget, None).map(|vals| {
            let mut maps = self.fixed.clone();
            for (v, &(i, c)) in cells.iter().enumerate() {
                maps[i][c] = vals[v];
            }
            UnaryVectorFunction { maps }
        })
    }
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

/// Searches for `Ψ` preserving `ρ` with `Ψ(α) = β`. Cells outside the
/// projections (other than `α_i`) are left as the identity.
pub fn find_mapping_vf(
    rel: &Relation,
    alpha: &[u8],
    beta: &[u8],
    budget: &SearchBudget,
) -> Result<Outcome<UnaryVectorFunction>> {
    check_non_member(rel, alpha)?;
    check_non_member(rel, beta)?;
    Ok(find_mapping_unchecked(rel, &rel.projections(), alpha, beta, budget))
}

pub(crate) fn find_mapping_unchecked(
    rel: &Relation,
    projections: &[Vec<u8>],
    alpha: &[u8],
    beta: &[u8],
    budget: &SearchBudget,
) -> Outcome<UnaryVectorFunction> {
    let n = rel.arity();
    let k = rel.domain_size();
    let mut problem = VfProblem {
        variable: vec![vec![false; k]; n],
        domain: vec![vec![0; k]; n],
        fixed: vec![(0..k as u8).collect(); n],
    };
    for i in 0..n {
        let proj_mask = projections[i].iter().fold(0u32, |m, &c| m | 1 << c);
        for &c in &projections[i] {
            problem.variable[i][c as usize] = true;
            problem.domain[i][c as usize] = proj_mask;
        }
        let a = alpha[i] as usize;
        let pin = 1u32 << beta[i];
        if problem.variable[i][a] {
            problem.domain[i][a] &= pin;
            if problem.domain[i][a] == 0 {
                return Outcome::ExhaustedNone;
            }
        } else {
            problem.variable[i][a] = true;
            problem.domain[i][a] = pin;
        }
    }
    problem.solve(rel, rel, budget)
}
