//! Boolean relations as disjunctions of linear equations over GF(2).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::Relation;

/// `ρ = ⋁_i (a_i · x = c_i)` over GF(2). An all-zero coefficient vector is
/// allowed and yields the constant equation `0 = c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearDisjunctionGF2 {
    pub arity: usize,
    /// `(coefficients, constant)` pairs.
    pub equations: Vec<(Vec<u8>, u8)>,
}

impl LinearDisjunctionGF2 {
    pub fn contains(&self, t: &[u8]) -> bool {
        self.equations.iter().any(|(a, c)| dot(a, t) == *c)
    }

    /// True iff the disjunction describes exactly `ρ`.
    pub fn describes(&self, rel: &Relation) -> bool {
        rel.domain_size() == 2
            && rel.arity() == self.arity
            && (0..rel.universe_size()).all(|idx| {
                let t = rel.tuple_at(idx);
                self.contains(&t) == rel.contains_index(idx)
            })
    }
}

fn dot(a: &[u8], x: &[u8]) -> u8 {
    a.iter().zip(x).fold(0, |acc, (&p, &q)| acc ^ (p & q))
}

/// Row-reduces `rows` in place, returning the pivot column of each
/// surviving row.
fn reduce(rows: &mut Vec<Vec<u8>>, n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col] == 1 {
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Decomposes a Boolean relation into a disjunction of linear equations,
/// or returns `None` when its complement is not an affine subspace.
pub fn decompose_gf2(rel: &Relation) -> Result<Option<LinearDisjunctionGF2>> {
    if rel.domain_size() != 2 {
        return Err(Error::input("GF(2) decomposition needs a domain of size 2"));
    }
    let n = rel.arity();
    if rel.is_full() {
        let mut unit = vec![0u8; n];
        unit[0] = 1;
        return Ok(Some(LinearDisjunctionGF2 {
            arity: n,
            equations: vec![(unit.clone(), 0), (unit, 1)],
        }));
    }
    if rel.is_empty() {
        return Ok(Some(LinearDisjunctionGF2 {
            arity: n,
            equations: vec![(vec![0; n], 1)],
        }));
    }
    let complement: Vec<Vec<u8>> = rel.non_members().map(|t| t.0).collect();
    let v0 = complement[0].clone();
    let mut rows: Vec<Vec<u8>> = complement
        .iter()
        .map(|v| v.iter().zip(&v0).map(|(a, b)| a ^ b).collect())
        .collect();
    let pivots = reduce(&mut rows, n);
    if 1usize << pivots.len() != complement.len() {
        return Ok(None);
    }
    // Null space of the reduced rows: one vector per free column.
    let equations = (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut a = vec![0u8; n];
            a[free] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                a[p] = row[free];
            }
            let c = dot(&a, &v0) ^ 1;
            (a, c)
        })
        .collect();
    Ok(Some(LinearDisjunctionGF2 { arity: n, equations }))
}
