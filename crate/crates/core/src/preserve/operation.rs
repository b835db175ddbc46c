//! Operation tables, preservation of relations by operations, and the
//! search for polymorphisms of a prescribed shape.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::search::{Outcome, SearchBudget, Slot, TableCsp};
use super::vecfun::{idempotent_exponent, map_power};
use crate::error::{Error, Result};
use crate::relcore::{check_guards, Relation};

/// Largest number of member selections a polymorphism search will expand.
const MAX_SELECTIONS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct ShapeFlags {
    pub idempotent: bool,
    pub wnu: bool,
    pub nu: bool,
    pub semilattice: bool,
    pub two_semilattice: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Idempotent,
    Wnu,
    Nu,
    Semilattice,
    TwoSemilattice,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Idempotent => "idempotent",
            Shape::Wnu => "wnu",
            Shape::Nu => "nu",
            Shape::Semilattice => "semilattice",
            Shape::TwoSemilattice => "two-semilattice",
        }
    }

    pub fn holds(self, flags: &ShapeFlags) -> bool {
        match self {
            Shape::Idempotent => flags.idempotent,
            Shape::Wnu => flags.wnu,
            Shape::Nu => flags.nu,
            Shape::Semilattice => flags.semilattice,
            Shape::TwoSemilattice => flags.two_semilattice,
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shape> {
        match s {
            "idempotent" => Ok(Shape::Idempotent),
            "wnu" => Ok(Shape::Wnu),
            "nu" => Ok(Shape::Nu),
            "semilattice" => Ok(Shape::Semilattice),
            "two-semilattice" | "2-semilattice" => Ok(Shape::TwoSemilattice),
            other => Err(Error::input(format!("unknown operation shape `{other}`"))),
        }
    }
}

/// An `m`-ary operation on `{0..k-1}`; `table` is indexed like relation
/// tuples (first argument most significant). `flags` are always recomputed
/// from the table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperationTable {
    k: usize,
    arity: usize,
    table: Vec<u8>,
    flags: ShapeFlags,
}

impl OperationTable {
    pub fn new(k: usize, arity: usize, table: Vec<u8>) -> Result<Self> {
        check_guards(k, arity)?;
        let size = k.pow(arity as u32);
        if table.len() != size {
            return Err(Error::input(format!(
                "operation table has {} cells, expected {size}",
                table.len()
            )));
        }
        if table.iter().any(|&x| x as usize >= k) {
            return Err(Error::input("operation value outside the domain"));
        }
        let mut op = OperationTable {
            k,
            arity,
            table,
            flags: ShapeFlags::default(),
        };
        op.flags = op.compute_flags();
        Ok(op)
    }

    pub fn from_fn(k: usize, arity: usize, f: impl Fn(&[u8]) -> u8) -> Result<Self> {
        check_guards(k, arity)?;
        let shape = Relation::empty(k, arity)?;
        let mut buf = vec![0u8; arity];
        let table = (0..shape.universe_size())
            .map(|idx| {
                shape.decode_into(idx, &mut buf);
                f(&buf)
            })
            .collect();
        Self::new(k, arity, table)
    }

    /// `x ⊕ y ⊕ z` over `{0,1}`.
    pub fn minority() -> Self {
        Self::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2]).expect("fixed shape")
    }

    /// Ternary majority on `k` elements; returns the first argument when all
    /// three differ.
    pub fn majority(k: usize) -> Result<Self> {
        Self::from_fn(k, 3, |a| if a[1] == a[2] { a[1] } else { a[0] })
    }

    pub fn min(k: usize) -> Result<Self> {
        Self::from_fn(k, 2, |a| a[0].min(a[1]))
    }

    pub fn max(k: usize) -> Result<Self> {
        Self::from_fn(k, 2, |a| a[0].max(a[1]))
    }

    /// `Σ c_j x_j mod k`.
    pub fn linear(k: usize, coeffs: &[u64]) -> Result<Self> {
        Self::from_fn(k, coeffs.len(), |a| {
            (a.iter().zip(coeffs).map(|(&x, &c)| x as u64 * c).sum::<u64>() % k as u64) as u8
        })
    }

    pub fn domain_size(&self) -> usize {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn flags(&self) -> ShapeFlags {
        self.flags
    }

    fn index(&self, args: &[u8]) -> usize {
        args.iter().fold(0, |acc, &x| acc * self.k + x as usize)
    }

    pub fn eval(&self, args: &[u8]) -> u8 {
        self.table[self.index(args)]
    }

    /// `f(a, .., a, x)` for every `x`.
    pub fn section(&self, a: u8) -> Vec<u8> {
        let mut args = vec![a; self.arity];
        (0..self.k as u8)
            .map(|x| {
                args[self.arity - 1] = x;
                self.eval(&args)
            })
            .collect()
    }

    /// Value of `f(y,..,y,x,y,..,y)` with `x` at `pos`.
    fn one_off(&self, y: u8, x: u8, pos: usize) -> u8 {
        let mut args = vec![y; self.arity];
        args[pos] = x;
        self.eval(&args)
    }

    fn compute_flags(&self) -> ShapeFlags {
        let k = self.k as u8;
        let m = self.arity;
        let idempotent = (0..k).all(|a| self.eval(&vec![a; m]) == a);
        let wnu = idempotent
            && m >= 2
            && (0..k).all(|y| {
                (0..k).all(|x| {
                    let v = self.one_off(y, x, 0);
                    (1..m).all(|p| self.one_off(y, x, p) == v)
                })
            });
        let nu = wnu && m >= 3 && (0..k).all(|y| (0..k).all(|x| self.one_off(y, x, 0) == y));
        let binary = m == 2;
        let comm = binary && (0..k).all(|x| (0..k).all(|y| self.eval(&[x, y]) == self.eval(&[y, x])));
        let assoc = binary
            && (0..k).all(|x| {
                (0..k).all(|y| {
                    (0..k).all(|z| {
                        let l = self.eval(&[self.eval(&[x, y]), z]);
                        let r = self.eval(&[x, self.eval(&[y, z])]);
                        l == r
                    })
                })
            });
        let absorbs = binary
            && (0..k).all(|x| {
                (0..k).all(|y| {
                    let v = self.eval(&[x, y]);
                    self.eval(&[x, v]) == v
                })
            });
        ShapeFlags {
            idempotent,
            wnu,
            nu,
            semilattice: idempotent && comm && assoc,
            two_semilattice: idempotent && comm && absorbs,
        }
    }
}

/// True iff `f` applied columnwise to every selection of `m` members
/// (with repetition) lands in `ρ`.
pub fn preserves_op(f: &OperationTable, rel: &Relation) -> Result<bool> {
    if f.domain_size() != rel.domain_size() {
        return Err(Error::input("operation and relation differ in domain"));
    }
    let n = rel.arity();
    let m = f.arity();
    let rows = rel.member_matrix();
    let count = rel.len();
    if count == 0 {
        return Ok(true);
    }
    let mut pick = vec![0usize; m];
    let mut args = vec![0u8; m];
    let mut out = vec![0u8; n];
    loop {
        for (i, slot) in out.iter_mut().enumerate() {
            for (a, &r) in args.iter_mut().zip(&pick) {
                *a = rows[r * n + i];
            }
            *slot = f.eval(&args);
        }
        if !rel.contains(&out) {
            return Ok(false);
        }
        let mut p = m;
        loop {
            if p == 0 {
                return Ok(true);
            }
            p -= 1;
            pick[p] += 1;
            if pick[p] < count {
                break;
            }
            pick[p] = 0;
        }
    }
}

fn check_shape_arity(shape: Shape, m: usize) -> Result<()> {
    let ok = match shape {
        Shape::Semilattice | Shape::TwoSemilattice => m == 2,
        Shape::Nu => m >= 3,
        Shape::Wnu => m >= 2,
        Shape::Idempotent => m >= 1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::input(format!(
            "arity {m} is not valid for a {} operation",
            shape.name()
        )))
    }
}

/// Backtracking search for an `m`-ary operation of the given shape that
/// preserves `ρ`. `ExhaustedNone` proves that none exists at this arity.
pub fn search_polymorphism(
    rel: &Relation,
    shape: Shape,
    m: usize,
    budget: &SearchBudget,
) -> Result<Outcome<OperationTable>> {
    check_shape_arity(shape, m)?;
    let k = rel.domain_size();
    check_guards(k, m)?;
    let selections = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(rel.len()));
    if selections.is_none_or(|s| s > MAX_SELECTIONS) {
        return Err(Error::Guard(format!(
            "{} members at arity {m} exceed {MAX_SELECTIONS} selections",
            rel.len()
        )));
    }
    let cells_rel = Relation::empty(k, m)?;
    let cells = cells_rel.universe_size();

    // Merge cells that the shape forces to be equal; `forced` pins values.
    let mut uf = UnionFind::<usize>::new(cells);
    let mut forced: HashMap<usize, u8> = HashMap::new();
    for a in 0..k as u8 {
        forced.insert(cells_rel.index_of(&vec![a; m]), a);
    }
    let mut args = vec![0u8; m];
    match shape {
        Shape::Wnu | Shape::Nu => {
            for y in 0..k as u8 {
                for x in (0..k as u8).filter(|&x| x != y) {
                    let mut first = None;
                    for p in 0..m {
                        args.fill(y);
                        args[p] = x;
                        let c = cells_rel.index_of(&args);
                        if shape == Shape::Nu {
                            forced.insert(c, y);
                        }
                        match first {
                            None => first = Some(c),
                            Some(f) => {
                                uf.union(f, c);
                            }
                        }
                    }
                }
            }
        }
        Shape::Semilattice | Shape::TwoSemilattice => {
            for x in 0..k as u8 {
                for y in x + 1..k as u8 {
                    uf.union(cells_rel.index_of(&[x, y]), cells_rel.index_of(&[y, x]));
                }
            }
        }
        Shape::Idempotent => {}
    }
    let labels = uf.into_labeling();
    let mut var_of_root: HashMap<usize, u32> = HashMap::new();
    let mut var_of_cell = vec![0u32; cells];
    let mut domains: Vec<u32> = Vec::new();
    let full_mask = (1u32 << k) - 1;
    for c in 0..cells {
        let next = var_of_root.len() as u32;
        let v = *var_of_root.entry(labels[c]).or_insert_with(|| {
            domains.push(full_mask);
            next
        });
        var_of_cell[c] = v;
    }
    for (&c, &val) in &forced {
        let v = var_of_cell[c] as usize;
        domains[v] &= 1 << val;
        if domains[v] == 0 {
            return Ok(Outcome::ExhaustedNone);
        }
    }

    let n = rel.arity();
    let rows = rel.member_matrix();
    let count = rel.len();
    let mut constraints: Vec<Vec<Slot>> = Vec::with_capacity(selections.unwrap_or(0));
    if count > 0 {
        let mut pick = vec![0usize; m];
        'outer: loop {
            let slots: Vec<Slot> = (0..n)
                .map(|i| {
                    for (a, &r) in args.iter_mut().zip(&pick) {
                        *a = rows[r * n + i];
                    }
                    Slot::Var(var_of_cell[cells_rel.index_of(&args)])
                })
                .collect();
            constraints.push(slots);
            let mut p = m;
            loop {
                if p == 0 {
                    break 'outer;
                }
                p -= 1;
                pick[p] += 1;
                if pick[p] < count {
                    break;
                }
                pick[p] = 0;
            }
        }
    }
    constraints.sort_unstable();
    constraints.dedup();
    let mut csp = TableCsp::new(rel, domains.clone());
    for c in constraints {
        csp.add_constraint(c);
    }
    let mut order: Vec<usize> = (0..domains.len()).collect();
    order.sort_by_key(|&v| (domains[v].count_ones() != 1, std::cmp::Reverse(csp.degree(v)), v));

    let kb = k as u8;
    let cell = |x: u8, y: u8| var_of_cell[x as usize * k + y as usize] as usize;
    let associative = |vals: &[Option<u8>]| {
        (0..kb).all(|x| {
            (0..kb).all(|y| {
                let Some(xy) = vals[cell(x, y)] else { return true };
                (0..kb).all(|z| {
                    let (Some(l), Some(yz)) = (vals[cell(xy, z)], vals[cell(y, z)]) else {
                        return true;
                    };
                    vals[cell(x, yz)].is_none_or(|r| r == l)
                })
            })
        })
    };
    let absorbing = |vals: &[Option<u8>]| {
        (0..kb).all(|x| {
            (0..kb).all(|y| match vals[cell(x, y)] {
                Some(v) => vals[cell(x, v)].is_none_or(|w| w == v),
                None => true,
            })
        })
    };
    let extra: Option<&dyn Fn(&[Option<u8>]) -> bool> = match shape {
        Shape::Semilattice => Some(&associative),
        Shape::TwoSemilattice => Some(&absorbing),
        _ => None,
    };
    let outcome = csp.solve(&order, budget, extra);
    Ok(match outcome {
        Outcome::Found(vals) => {
            let table = var_of_cell.iter().map(|&v| vals[v as usize]).collect();
            let op = OperationTable::new(k, m, table)?;
            debug_assert!(shape.holds(&op.flags()));
            Outcome::Found(op)
        }
        Outcome::ExhaustedNone => Outcome::ExhaustedNone,
        Outcome::BudgetExceeded => Outcome::BudgetExceeded,
    })
}

/// The power `f_t` of a WNU `f`, where `f_1 = f` and
/// `f_{i+1} = f(f_i(..), .., f_i(..))` on consecutive argument blocks.
/// Its sections satisfy `h_t = h_1^t`; nothing of size `m^t` is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WnuPower {
    base: OperationTable,
    exponent: u64,
}

impl WnuPower {
    pub fn base(&self) -> &OperationTable {
        &self.base
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// `m^t`, if it fits in a `u64`.
    pub fn arity(&self) -> Option<u64> {
        u32::try_from(self.exponent)
            .ok()
            .and_then(|t| (self.base.arity() as u64).checked_pow(t))
    }

    /// The section `x ↦ f_t(a, .., a, x)`.
    pub fn section(&self, a: u8) -> Vec<u8> {
        map_power(&self.base.section(a), self.exponent)
    }

    /// Evaluates `f_t` on a full argument list by recursive composition.
    pub fn eval(&self, args: &[u8]) -> Result<u8> {
        if self.arity() != Some(args.len() as u64) {
            return Err(Error::input("argument count does not match the power's arity"));
        }
        Ok(self.eval_level(self.exponent, args))
    }

    fn eval_level(&self, level: u64, args: &[u8]) -> u8 {
        if level == 1 {
            return self.base.eval(args);
        }
        let m = self.base.arity();
        let chunk = args.len() / m;
        let inner: Vec<u8> = args
            .chunks(chunk)
            .map(|c| self.eval_level(level - 1, c))
            .collect();
        self.base.eval(&inner)
    }

    pub fn sections_idempotent(&self) -> bool {
        (0..self.base.domain_size() as u8).all(|a| {
            let h = self.section(a);
            h.iter().all(|&y| h[y as usize] == y)
        })
    }
}

/// Chooses the smallest `t` for which every section of `f_t` is idempotent.
pub fn wnu_power(f: &OperationTable, rel: &Relation) -> Result<WnuPower> {
    if !f.flags().wnu {
        return Err(Error::precondition("operation is not a WNU"));
    }
    if !preserves_op(f, rel)? {
        return Err(Error::precondition("operation does not preserve the relation"));
    }
    let sections: Vec<Vec<u8>> = (0..f.domain_size() as u8).map(|a| f.section(a)).collect();
    let power = WnuPower {
        base: f.clone(),
        exponent: idempotent_exponent(&sections),
    };
    if !power.sections_idempotent() {
        return Err(Error::precondition("sections of the power are not idempotent"));
    }
    Ok(power)
}
