//! The `analyze` report and its JSON schema (version 1).
//!
//! Tuples are arrays of integers and coordinates inside arrays are 0-based.
//! Sections that could not be computed are `null`; `notes` says why.

use keyrel_core::preserve::{key_report, search_polymorphism, OutcomeKind, SearchBudget, Shape};
use keyrel_core::relcore::{
    blocks, dummy_variables, is_essential_relation, pattern, Block, BlockKind, PatternClass,
    PatternReport,
};
use keyrel_core::structure::{
    decompose_gf2, extract_group_structure, full_pattern_block_report, is_strongly_rich_on,
    main_theorem_witness, verify_pattern_theorem, FullPatternReport, GroupExtraction,
    GroupStructure, WitnessOutcome,
};
use keyrel_core::{Error, OperationTable, Outcome, Relation, Tuple};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputInfo,
    pub essential: bool,
    pub dummy_vars: Vec<usize>,
    pub key: Option<KeySection>,
    pub pattern: PatternSection,
    pub blocks: Vec<BlockSection>,
    pub gf2: Option<Gf2Section>,
    pub polymorphisms: Vec<PolySection>,
    pub theorems: TheoremSection,
    pub witness: Option<WitnessOutcome>,
    pub budget: BudgetSection,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub domain: usize,
    pub arity: usize,
    pub size: usize,
}

#[derive(Debug, Serialize)]
pub struct KeySection {
    pub is_key: bool,
    pub key_tuples: Vec<Tuple>,
}

#[derive(Debug, Serialize)]
pub struct PatternSection {
    pub matrix: Vec<Vec<bool>>,
    pub classification: PatternClass,
    pub classes: Option<Vec<Vec<usize>>>,
}

impl From<PatternReport> for PatternSection {
    fn from(p: PatternReport) -> Self {
        PatternSection {
            matrix: p.related,
            classification: p.classification,
            classes: p.classes,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BlockSection {
    pub coord_sets: Vec<Vec<u8>>,
    pub is_product: bool,
    pub kind: BlockKind,
    pub size: usize,
    pub group: Option<GroupSection>,
}

#[derive(Debug, Serialize)]
pub struct GroupSection {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    /// `maps[i][a]`: group element of value `a` on coordinate `i`.
    pub maps: Vec<Vec<Option<usize>>>,
    pub prime_power: bool,
}

impl From<GroupStructure> for GroupSection {
    fn from(g: GroupStructure) -> Self {
        GroupSection {
            order: g.order,
            table: g.table,
            maps: g.maps,
            prime_power: g.prime_power,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Gf2Section {
    /// `(coefficients, right-hand side)`; `null` when the relation is not
    /// a disjunction of linear equations.
    pub equations: Option<Vec<(Vec<u8>, u8)>>,
}

#[derive(Debug, Serialize)]
pub struct PolySection {
    pub shape: Shape,
    pub arity: usize,
    pub outcome: Option<OutcomeKind>,
    pub table: Option<Vec<u8>>,
}

#[derive(Debug, Serialize)]
pub struct TheoremSection {
    /// Pattern of a key relation with a WNU; present once a WNU is found.
    pub pattern_theorem: Option<bool>,
    pub full_pattern: Option<FullPatternReport>,
}

#[derive(Debug, Serialize)]
pub struct BudgetSection {
    pub outcome: BudgetOutcome,
    pub max_nodes: u64,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BudgetOutcome {
    Complete,
    BudgetExceeded,
}

/// Tracks sections lost to the budget or to size guards.
struct Soft {
    exceeded: bool,
    notes: Vec<String>,
}

impl Soft {
    fn take<T>(&mut self, section: &str, r: Result<T, Error>) -> Result<Option<T>, Error> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::BudgetExceeded(n)) => {
                self.exceeded = true;
                self.notes.push(format!("{section}: search budget of {n} nodes exceeded"));
                Ok(None)
            }
            Err(Error::Guard(msg)) => {
                self.notes.push(format!("{section}: skipped, {msg}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn group_of(rel: &Relation, block: &Block) -> Result<Option<GroupSection>, Error> {
    if block.kind == BlockKind::Trivial || rel.arity() < 2 {
        return Ok(None);
    }
    let bx = block.bounding_box();
    if !is_strongly_rich_on(rel, &bx) {
        return Ok(None);
    }
    Ok(match extract_group_structure(rel, &bx)? {
        GroupExtraction::Linear(g) => Some(g.into()),
        GroupExtraction::NotLinear { .. } => None,
    })
}

pub fn block_sections(rel: &Relation) -> Result<Vec<BlockSection>, Error> {
    blocks(rel)
        .into_iter()
        .map(|b| {
            Ok(BlockSection {
                group: group_of(rel, &b)?,
                coord_sets: b.coord_sets,
                is_product: b.is_product,
                kind: b.kind,
                size: b.members.len(),
            })
        })
        .collect()
}

/// Runs every analysis. Theorem checks only run once their hypotheses
/// (key, no dummy coordinates, WNU or pattern shape) are established.
pub fn analyze(source: &str, rel: &Relation, wnu_arity: usize, budget: &SearchBudget) -> Result<AnalysisReport, Error> {
    let mut soft = Soft {
        exceeded: false,
        notes: Vec::new(),
    };
    let essential = is_essential_relation(rel);
    let dummy_vars = dummy_variables(rel);
    let key = soft.take("key", key_report(rel, budget))?.map(|r| KeySection {
        is_key: r.is_key,
        key_tuples: r.key_tuples,
    });
    let pat = pattern(rel);
    let gf2 = if rel.domain_size() == 2 {
        Some(Gf2Section {
            equations: decompose_gf2(rel)?.map(|d| d.equations),
        })
    } else {
        None
    };

    let mut polymorphisms = Vec::new();
    let mut wnu: Option<OperationTable> = None;
    for m in 2..=wnu_arity {
        let out = soft.take(&format!("wnu arity {m}"), search_polymorphism(rel, Shape::Wnu, m, budget))?;
        if matches!(out, Some(Outcome::BudgetExceeded)) {
            soft.exceeded = true;
            soft.notes.push(format!("wnu arity {m}: search budget exceeded"));
        }
        let table = match &out {
            Some(Outcome::Found(f)) => Some(f.table().to_vec()),
            _ => None,
        };
        polymorphisms.push(PolySection {
            shape: Shape::Wnu,
            arity: m,
            outcome: out.as_ref().map(|o| o.kind()),
            table,
        });
        if let Some(Outcome::Found(f)) = out {
            wnu.get_or_insert(f);
        }
    }

    let is_key = key.as_ref().is_some_and(|k| k.is_key);
    let hypotheses = is_key && dummy_vars.is_empty();
    let pattern_theorem = match (&wnu, hypotheses) {
        (Some(f), true) => soft.take("pattern theorem", verify_pattern_theorem(rel, f, budget))?,
        _ => None,
    };
    let full_pattern = if hypotheses && pat.is_full() {
        soft.take("full pattern", full_pattern_block_report(rel, wnu.as_ref(), budget))?
    } else {
        None
    };
    let single_class = pat
        .classes
        .as_ref()
        .is_some_and(|cs| cs.iter().filter(|c| c.len() > 1).count() <= 1);
    let witness = match (&key, &wnu) {
        (Some(k), Some(f)) if hypotheses && single_class => soft.take(
            "witness",
            main_theorem_witness(rel, &k.key_tuples[0], Some(f), budget),
        )?,
        _ => None,
    };

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input: InputInfo {
            source: source.to_string(),
            domain: rel.domain_size(),
            arity: rel.arity(),
            size: rel.len(),
        },
        essential,
        dummy_vars,
        key,
        pattern: pat.into(),
        blocks: block_sections(rel)?,
        gf2,
        polymorphisms,
        theorems: TheoremSection {
            pattern_theorem,
            full_pattern,
        },
        witness,
        budget: BudgetSection {
            outcome: if soft.exceeded {
                BudgetOutcome::BudgetExceeded
            } else {
                BudgetOutcome::Complete
            },
            max_nodes: budget.max_nodes(),
            nodes: budget.nodes_spent(),
        },
        notes: soft.notes,
    })
}

fn tuple_text(t: &[u8]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn outcome_text(o: Option<OutcomeKind>) -> &'static str {
    match o {
        Some(OutcomeKind::Found) => "found",
        Some(OutcomeKind::ExhaustedNone) => "none exists (exhaustive)",
        Some(OutcomeKind::BudgetExceeded) => "budget exceeded",
        None => "not run",
    }
}

/// Human-readable summary. Coordinates are 1-based here.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = Vec::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    out.push(format!(
        "input: {} (domain {}, arity {}, {} tuples)",
        r.input.source, r.input.domain, r.input.arity, r.input.size
    ));
    out.push(format!("essential: {}", yes(r.essential)));
    if r.dummy_vars.is_empty() {
        out.push("dummy coordinates: none".to_string());
    } else {
        let d: Vec<String> = r.dummy_vars.iter().map(|i| (i + 1).to_string()).collect();
        out.push(format!("dummy coordinates: {}", d.join(", ")));
    }
    match &r.key {
        Some(k) if k.is_key => {
            let shown: Vec<String> = k.key_tuples.iter().take(8).map(|t| tuple_text(t)).collect();
            let more = if k.key_tuples.len() > 8 { " ..." } else { "" };
            out.push(format!(
                "key relation: yes, {} key tuple(s): {}{more}",
                k.key_tuples.len(),
                shown.join(" ")
            ));
        }
        Some(_) => out.push("key relation: no".to_string()),
        None => out.push("key relation: undecided".to_string()),
    }
    let classes = match &r.pattern.classes {
        Some(cs) => cs
            .iter()
            .map(|c| {
                let m: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", m.join(","))
            })
            .collect::<Vec<_>>()
            .join(" "),
        None => "not an equivalence".to_string(),
    };
    let class_name = serde_json::to_value(r.pattern.classification)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    out.push(format!("pattern: {class_name}; {classes}"));
    for (i, b) in r.blocks.iter().enumerate() {
        let group = match &b.group {
            Some(g) => format!(", group of order {}", g.order),
            None => String::new(),
        };
        let kind = if b.kind == BlockKind::Trivial { "trivial" } else { "nontrivial" };
        out.push(format!(
            "block {}: {} tuples, {kind}, product {}{group}",
            i + 1,
            b.size,
            yes(b.is_product)
        ));
    }
    if let Some(g) = &r.gf2 {
        match &g.equations {
            Some(eqs) => {
                let parts: Vec<String> = eqs
                    .iter()
                    .map(|(c, rhs)| {
                        let lhs: Vec<String> = c
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x == 1)
                            .map(|(i, _)| format!("x{}", i + 1))
                            .collect();
                        let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join("+") };
                        format!("{lhs}={rhs}")
                    })
                    .collect();
                out.push(format!("gf2: {}", parts.join(" or ")));
            }
            None => out.push("gf2: not a disjunction of linear equations".to_string()),
        }
    }
    for p in &r.polymorphisms {
        out.push(format!("{} arity {}: {}", p.shape.name(), p.arity, outcome_text(p.outcome)));
    }
    if let Some(h) = r.theorems.pattern_theorem {
        out.push(format!("pattern theorem holds: {}", yes(h)));
    }
    if let Some(f) = &r.theorems.full_pattern {
        out.push(format!(
            "full pattern: {} block(s), hypotheses unmet: {}, violations: {}",
            f.blocks.len(),
            yes(f.hypotheses_unmet),
            f.violations.len()
        ));
    }
    match &r.witness {
        Some(WitnessOutcome::Found(w)) => out.push(format!(
            "witness: prime {}, class {:?}, verified {}",
            w.prime,
            w.class_coords.iter().map(|i| i + 1).collect::<Vec<_>>(),
            yes(w.verified)
        )),
        Some(WitnessOutcome::NotFound { stage, detail }) => {
            out.push(format!("witness: not found at {stage}: {detail}"))
        }
        None => {}
    }
    for n in &r.notes {
        out.push(format!("note: {n}"));
    }
    out.push(format!(
        "budget: {:?}, {} nodes",
        r.budget.outcome, r.budget.nodes
    ));
    out.join("\n") + "\n"
}
