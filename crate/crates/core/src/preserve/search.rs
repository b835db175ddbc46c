//! A small backtracking solver with forward checking.
//!
//! Every constraint asks that a row of slots, read as a tuple, lies in one
//! fixed target relation. Vector-function search and polymorphism search
//! both reduce to this shape.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::Relation;

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

/// Node limit applied to each individual search, plus a running total of
/// nodes spent across all searches that shared this budget.
#[derive(Debug)]
pub struct SearchBudget {
    max_nodes: u64,
    spent: AtomicU64,
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            spent: AtomicU64::new(0),
        }
    }

    pub fn max_nodes(&self) -> u64 {
        self.max_nodes
    }

    pub fn nodes_spent(&self) -> u64 {
        self.spent.load(Ordering::Relaxed)
    }

    fn record(&self, nodes: u64) {
        self.spent.fetch_add(nodes, Ordering::Relaxed);
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(DEFAULT_MAX_NODES)
    }
}

impl Clone for SearchBudget {
    fn clone(&self) -> Self {
        SearchBudget {
            max_nodes: self.max_nodes,
            spent: AtomicU64::new(self.nodes_spent()),
        }
    }
}

/// Result of a complete search. `ExhaustedNone` is only produced when the
/// whole space was explored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    ExhaustedNone,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutcomeKind {
    Found,
    ExhaustedNone,
    BudgetExceeded,
}

impl<T> Outcome<T> {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Found(_) => OutcomeKind::Found,
            Outcome::ExhaustedNone => OutcomeKind::ExhaustedNone,
            Outcome::BudgetExceeded => OutcomeKind::BudgetExceeded,
        }
    }

    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::ExhaustedNone => Outcome::ExhaustedNone,
            Outcome::BudgetExceeded => Outcome::BudgetExceeded,
        }
    }

    /// `Ok(Some)` / `Ok(None)` for the complete outcomes, an error otherwise.
    pub fn into_result(self, budget: &SearchBudget) -> Result<Option<T>> {
        match self {
            Outcome::Found(t) => Ok(Some(t)),
            Outcome::ExhaustedNone => Ok(None),
            Outcome::BudgetExceeded => Err(Error::BudgetExceeded(budget.max_nodes())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Slot {
    Var(u32),
    Const(u8),
}

pub(crate) type ExtraCheck<'a> = &'a dyn Fn(&[Option<u8>]) -> bool;

pub(crate) struct TableCsp<'r> {
    target: &'r Relation,
    domains: Vec<u32>,
    constraints: Vec<Vec<Slot>>,
    watch: Vec<Vec<u32>>,
}

impl<'r> TableCsp<'r> {
    pub fn new(target: &'r Relation, domains: Vec<u32>) -> Self {
        let watch = vec![Vec::new(); domains.len()];
        TableCsp {
            target,
            domains,
            constraints: Vec::new(),
            watch,
        }
    }

    pub fn add_constraint(&mut self, slots: Vec<Slot>) {
        let id = self.constraints.len() as u32;
        let mut vars: Vec<u32> = slots
            .iter()
            .filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                Slot::Const(_) => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            self.watch[v as usize].push(id);
        }
        self.constraints.push(slots);
    }

    pub fn degree(&self, var: usize) -> usize {
        self.watch[var].len()
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    /// Depth-first search over `order` (every variable must appear once),
    /// values ascending. Returns the first full assignment found.
    pub fn solve(
        &self,
        order: &[usize],
        budget: &SearchBudget,
        extra: Option<ExtraCheck<'_>>,
    ) -> Outcome<Vec<u8>> {
        debug_assert_eq!(order.len(), self.num_vars());
        let mut state = State {
            csp: self,
            order,
            assigned: vec![None; self.num_vars()],
            nodes: 0,
            max_nodes: budget.max_nodes(),
            extra,
        };
        let outcome = match self.root_domains() {
            None => Outcome::ExhaustedNone,
            Some(domains) => match state.dfs(0, domains) {
                Step::Found => Outcome::Found(
                    state
                        .assigned
                        .iter()
                        .map(|v| v.expect("complete assignment"))
                        .collect(),
                ),
                Step::Fail => Outcome::ExhaustedNone,
                Step::Budget => Outcome::BudgetExceeded,
            },
        };
        budget.record(state.nodes);
        outcome
    }

    /// Node consistency: checks ground constraints and prunes unary ones.
    fn root_domains(&self) -> Option<Vec<u32>> {
        let mut domains = self.domains.clone();
        let none = vec![None; self.num_vars()];
        for slots in &self.constraints {
            let mut vars = slots.iter().filter_map(|s| match s {
                Slot::Var(v) => Some(*v),
                Slot::Const(_) => None,
            });
            match vars.next() {
                None => {
                    if !self.member(slots, &none, None) {
                        return None;
                    }
                }
                Some(v) if vars.all(|w| w == v) => {
                    let v = v as usize;
                    domains[v] = filter(domains[v], |val| self.member(slots, &none, Some((v, val))));
                    if domains[v] == 0 {
                        return None;
                    }
                }
                Some(_) => {}
            }
        }
        Some(domains)
    }

    fn member(&self, slots: &[Slot], assigned: &[Option<u8>], probe: Option<(usize, u8)>) -> bool {
        let k = self.target.domain_size();
        let mut idx = 0usize;
        for s in slots {
            let val = match *s {
                Slot::Const(c) => c,
                Slot::Var(v) => match probe {
                    Some((pv, pval)) if pv == v as usize => pval,
                    _ => assigned[v as usize].expect("slot assigned"),
                },
            };
            idx = idx * k + val as usize;
        }
        self.target.contains_index(idx)
    }
}

fn filter(mask: u32, mut keep: impl FnMut(u8) -> bool) -> u32 {
    let mut out = 0;
    let mut rest = mask;
    while rest != 0 {
        let val = rest.trailing_zeros() as u8;
        rest &= rest - 1;
        if keep(val) {
            out |= 1 << val;
        }
    }
    out
}

enum Step {
    Found,
    Fail,
    Budget,
}

struct State<'a, 'r> {
    csp: &'a TableCsp<'r>,
    order: &'a [usize],
    assigned: Vec<Option<u8>>,
    nodes: u64,
    max_nodes: u64,
    extra: Option<ExtraCheck<'a>>,
}

impl State<'_, '_> {
    fn dfs(&mut self, depth: usize, domains: Vec<u32>) -> Step {
        if depth == self.order.len() {
            return Step::Found;
        }
        let var = self.order[depth];
        let mut rest = domains[var];
        while rest != 0 {
            let val = rest.trailing_zeros() as u8;
            rest &= rest - 1;
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Step::Budget;
            }
            self.assigned[var] = Some(val);
            let mut next = domains.clone();
            next[var] = 1 << val;
            if self.forward_check(var, &mut next) && self.extra.is_none_or(|f| f(&self.assigned)) {
                match self.dfs(depth + 1, next) {
                    Step::Fail => {}
                    other => return other,
                }
            }
            self.assigned[var] = None;
        }
        Step::Fail
    }

    fn forward_check(&self, var: usize, domains: &mut [u32]) -> bool {
        let csp = self.csp;
        for &c in &csp.watch[var] {
            let slots = &csp.constraints[c as usize];
            let mut open: Option<usize> = None;
            let mut several = false;
            for s in slots {
                if let Slot::Var(v) = *s {
                    let v = v as usize;
                    if self.assigned[v].is_none() {
                        match open {
                            None => open = Some(v),
                            Some(o) if o == v => {}
                            Some(_) => {
                                several = true;
                                break;
                            }
                        }
                    }
                }
            }
            if several {
                continue;
            }
            match open {
                None => {
                    if !csp.member(slots, &self.assigned, None) {
                        return false;
                    }
                }
                Some(u) => {
                    domains[u] = filter(domains[u], |val| csp.member(slots, &self.assigned, Some((u, val))));
                    if domains[u] == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}
