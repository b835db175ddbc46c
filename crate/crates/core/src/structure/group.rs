//! Strongly rich relations and the abelian group hidden inside them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::{BoxSet, Relation};

/// Counts, for every coordinate `j` and every choice of the other
/// coordinates from `bx`, the values of `B_j` completing into `ρ`.
/// `exact` asks for exactly one completion, otherwise at least one.
fn completions_ok(rel: &Relation, bx: &BoxSet, exact: bool) -> bool {
    let n = rel.arity();
    if bx.arity() != n || bx.sets.iter().any(Vec::is_empty) {
        return false;
    }
    for j in 0..n {
        let mut others = bx.sets.clone();
        others[j] = vec![bx.sets[j][0]];
        for mut t in BoxSet::new(others).tuples().map(|t| t.0) {
            let count = bx.sets[j]
                .iter()
                .filter(|&&c| {
                    t[j] = c;
                    rel.contains(&t)
                })
                .count();
            if count == 0 || (exact && count > 1) {
                return false;
            }
        }
    }
    true
}

pub fn is_rich_on(rel: &Relation, bx: &BoxSet) -> bool {
    completions_ok(rel, bx, false)
}

pub fn is_strongly_rich_on(rel: &Relation, bx: &BoxSet) -> bool {
    completions_ok(rel, bx, true)
}

/// Richness over the box spanned by the projections of `ρ`.
pub fn is_rich(rel: &Relation) -> bool {
    is_rich_on(rel, &BoxSet::new(rel.projections()))
}

/// Strong richness over the box spanned by the projections of `ρ`.
pub fn is_strongly_rich(rel: &Relation) -> bool {
    is_strongly_rich_on(rel, &BoxSet::new(rel.projections()))
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub(crate) fn is_prime_power(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n >= 2 has a divisor");
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// A finite abelian group on `0..order` together with coordinate maps
/// `φ_i : B_i → G` such that a box tuple lies in the relation iff
/// `Σ φ_i(x_i) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupStructure {
    pub order: usize,
    pub zero: usize,
    /// Element `g` is labelled by the domain value `elements[g]` of `B_1`.
    pub elements: Vec<u8>,
    pub table: Vec<Vec<usize>>,
    /// `maps[i][x]` is `φ_i(x)`, absent outside `B_i`.
    pub maps: Vec<Vec<Option<usize>>>,
    pub prime_power: bool,
    /// The group is cyclic of prime order.
    pub is_prime_cyclic: bool,
}

impl GroupStructure {
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&b| self.table[a][b] == self.zero)
            .expect("verified group has inverses")
    }

    /// `x · g`.
    pub fn times(&self, x: usize, g: usize) -> usize {
        (0..x).fold(self.zero, |acc, _| self.add(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut k = 1;
        while acc != self.zero {
            acc = self.add(acc, g);
            k += 1;
        }
        k
    }

    pub fn phi(&self, i: usize, x: u8) -> Option<usize> {
        self.maps[i].get(x as usize).copied().flatten()
    }

    /// Smallest preimage of `g` under `φ_i`.
    pub fn phi_inv(&self, i: usize, g: usize) -> Option<u8> {
        self.maps[i]
            .iter()
            .position(|&v| v == Some(g))
            .map(|x| x as u8)
    }

    /// `Σ φ_i(t_i)`, or `None` when some entry lies outside its `B_i`.
    pub fn sum(&self, t: &[u8]) -> Option<usize> {
        t.iter()
            .enumerate()
            .try_fold(self.zero, |acc, (i, &x)| Some(self.add(acc, self.phi(i, x)?)))
    }

    /// Exhaustive check of the abelian group axioms; the first failure is
    /// described in the error.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let n = self.order;
        for a in 0..n {
            if self.table[a][self.zero] != a || self.table[self.zero][a] != a {
                return Err(format!("{} is not neutral for {}", self.zero, a));
            }
            if !(0..n).any(|b| self.table[a][b] == self.zero) {
                return Err(format!("{a} has no inverse"));
            }
            for b in 0..n {
                if self.table[a][b] != self.table[b][a] {
                    return Err(format!("{a} and {b} do not commute"));
                }
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return Err(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Isomorphism to `Z_p` when the group is cyclic of prime order:
    /// `out[g]` is the residue of `g`, with `generator ↦ 1`.
    pub fn prime_cyclic_coordinates(&self, generator: usize) -> Option<Vec<u32>> {
        if !self.is_prime_cyclic || generator == self.zero {
            return None;
        }
        let mut out = vec![0u32; self.order];
        let mut acc = self.zero;
        for x in 0..self.order as u32 {
            out[acc] = x;
            acc = self.add(acc, generator);
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum GroupExtraction {
    Linear(GroupStructure),
    NotLinear { reason: String },
}

impl GroupExtraction {
    pub fn linear(self) -> Option<GroupStructure> {
        match self {
            GroupExtraction::Linear(g) => Some(g),
            GroupExtraction::NotLinear { .. } => None,
        }
    }
}

/// The unique value of `B_j` completing `t` into `ρ`.
fn complete(rel: &Relation, bx: &BoxSet, t: &mut [u8], j: usize) -> u8 {
    let keep = t[j];
    let c = bx.sets[j]
        .iter()
        .copied()
        .find(|&c| {
            t[j] = c;
            rel.contains(t)
        })
        .expect("strongly rich on the box");
    t[j] = keep;
    c
}

/// Extracts `(G, φ_1..φ_n)` from `ρ ∩ B`, which must be strongly rich on the
/// box `B`. Every group axiom and the defining equation are checked by
/// enumeration; a failed check yields `NotLinear`.
pub fn extract_group_structure(rel: &Relation, bx: &BoxSet) -> Result<GroupExtraction> {
    let n = rel.arity();
    if n < 2 {
        return Err(Error::precondition("group extraction needs arity at least 2"));
    }
    if bx.arity() != n {
        return Err(Error::input("box arity differs from relation arity"));
    }
    if bx.sets.iter().flatten().any(|&x| x as usize >= rel.domain_size()) {
        return Err(Error::input("box value outside the domain"));
    }
    if !is_strongly_rich_on(rel, bx) {
        return Err(Error::precondition("relation is not strongly rich on the box"));
    }
    let b1 = &bx.sets[0];
    let order = b1.len();
    let pos = |x: u8| b1.binary_search(&x).expect("value of B_1");
    let k = rel.domain_size();
    let mut maps = vec![vec![None; k]; n];
    let group_of = |table: Vec<Vec<usize>>, zero: usize, maps: Vec<Vec<Option<usize>>>| GroupStructure {
        order,
        zero,
        elements: b1.clone(),
        table,
        maps,
        prime_power: is_prime_power(order),
        is_prime_cyclic: is_prime(order),
    };

    if n == 2 {
        let table = (0..order)
            .map(|a| (0..order).map(|b| (a + b) % order).collect())
            .collect();
        for (j, &x) in b1.iter().enumerate() {
            maps[0][x as usize] = Some(j);
        }
        for &x in &bx.sets[1] {
            let mut t = vec![b1[0], x];
            let y = complete(rel, bx, &mut t, 0);
            maps[1][x as usize] = Some((order - pos(y)) % order);
        }
        let g = group_of(table, 0, maps);
        return Ok(finish(rel, bx, g));
    }

    // Constants a_3..a_n and the zero come from the first member in the box.
    let base = bx
        .tuples()
        .find(|t| rel.contains(t))
        .expect("a strongly rich relation meets its box");
    let d = base[0];
    let zero = pos(d);
    let mut table = vec![vec![0usize; order]; order];
    let mut t = base.0.clone();
    for (ia, &a) in b1.iter().enumerate() {
        for (ib, &b) in b1.iter().enumerate() {
            // y from ρ(a, y, a_3..), z' from ρ(d, y, z', a_4..),
            // y' from ρ(b, y', z', a_4..), c from ρ(c, y', a_3, a_4..).
            t.copy_from_slice(&base);
            t[0] = a;
            let y = complete(rel, bx, &mut t, 1);
            t.copy_from_slice(&base);
            t[0] = d;
            t[1] = y;
            let z = complete(rel, bx, &mut t, 2);
            t.copy_from_slice(&base);
            t[0] = b;
            t[2] = z;
            let y2 = complete(rel, bx, &mut t, 1);
            t.copy_from_slice(&base);
            t[1] = y2;
            let c = complete(rel, bx, &mut t, 0);
            table[ia][ib] = pos(c);
        }
    }
    let mut g = group_of(table, zero, maps);
    if let Err(reason) = g.check_axioms() {
        return Ok(GroupExtraction::NotLinear { reason });
    }

    for (j, &x) in b1.iter().enumerate() {
        g.maps[0][x as usize] = Some(j);
    }
    // φ_i(x) = -y where (y, φ_2⁻¹(0), .., φ_{i-1}⁻¹(0), x, a_{i+1}, ..) ∈ ρ.
    let mut prefix = base.0.clone();
    for i in 1..n {
        for &x in &bx.sets[i] {
            let mut t = prefix.clone();
            t[i] = x;
            let y = complete(rel, bx, &mut t, 0);
            g.maps[i][x as usize] = Some(g.neg(pos(y)));
        }
        match g.phi_inv(i, g.zero) {
            Some(z) => prefix[i] = z,
            None => {
                return Ok(GroupExtraction::NotLinear {
                    reason: format!("no value of coordinate {} maps to zero", i + 1),
                })
            }
        }
    }
    Ok(finish(rel, bx, g))
}

/// Checks that every `φ_i` is a bijection onto `G` and that the equation
/// reproduces `ρ ∩ B`.
fn finish(rel: &Relation, bx: &BoxSet, g: GroupStructure) -> GroupExtraction {
    for (i, set) in bx.sets.iter().enumerate() {
        let mut seen = vec![false; g.order];
        for &x in set {
            match g.phi(i, x) {
                Some(v) if !seen[v] => seen[v] = true,
                _ => {
                    return GroupExtraction::NotLinear {
                        reason: format!("coordinate map {} is not injective", i + 1),
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return GroupExtraction::NotLinear {
                reason: format!("coordinate map {} is not onto the group", i + 1),
            };
        }
    }
    for t in bx.tuples() {
        if (g.sum(&t) == Some(g.zero)) != rel.contains(&t) {
            return GroupExtraction::NotLinear {
                reason: format!("equation disagrees with the relation at {t}"),
            };
        }
    }
    GroupExtraction::Linear(g)
}
