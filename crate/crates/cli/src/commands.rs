use std::path::Path;

use keyrel_core::corpus;
use keyrel_core::preserve::{key_report, search_polymorphism, SearchBudget, Shape};
use keyrel_core::structure::{
    compute_core, decompose_gf2, full_pattern_block_report, main_theorem_witness, verify_core_properties,
};
use keyrel_core::{relfile, Error, OperationTable, Outcome, Relation, Tuple};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command, Theorem};
use crate::enumerate::{enumerate, members};
use crate::report::{analyze, block_sections, render_text, BudgetOutcome};
use crate::{CliError, Response, EXIT_BUDGET};

fn load(path: &Path) -> Result<Relation, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(relfile::parse(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

fn parse_tuple(text: &str, rel: &Relation) -> Result<Tuple, CliError> {
    let values: Result<Vec<u8>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<u8>())
        .collect();
    let values = values.map_err(|_| CliError::Usage(format!("`{text}` is not a tuple of integers")))?;
    rel.check_tuple(&values)?;
    Ok(Tuple::from(values))
}

/// The requested key tuple, or the first key tuple of the relation.
fn key_tuple(rel: &Relation, given: Option<&str>, budget: &SearchBudget) -> Result<Tuple, CliError> {
    match given {
        Some(text) => parse_tuple(text, rel),
        None => key_report(rel, budget)?
            .key_tuples
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Core(Error::Precondition("relation is not a key relation".into()))),
    }
}

/// First WNU of arity `2..=max_arity` preserving the relation, if any.
fn find_wnu(rel: &Relation, max_arity: usize, budget: &SearchBudget) -> Result<Option<OperationTable>, CliError> {
    for m in 2..=max_arity {
        match search_polymorphism(rel, Shape::Wnu, m, budget) {
            Ok(Outcome::Found(f)) => return Ok(Some(f)),
            Ok(_) | Err(Error::Guard(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(None)
}

pub fn dispatch(cli: &Cli) -> Result<Response, CliError> {
    let budget = SearchBudget::new(cli.budget);
    match &cli.command {
        Command::Analyze { file, json, wnu_arity } => {
            let rel = load(file)?;
            let report = analyze(&file.display().to_string(), &rel, *wnu_arity, &budget)?;
            let stdout = if *json { to_json(&report) } else { render_text(&report) };
            let code = match report.budget.outcome {
                BudgetOutcome::Complete => crate::EXIT_OK,
                BudgetOutcome::BudgetExceeded => EXIT_BUDGET,
            };
            Ok(Response { stdout, code })
        }
        Command::Poly { file, kind, arity } => {
            let rel = load(file)?;
            let shape: Shape = kind.parse()?;
            let out = search_polymorphism(&rel, shape, *arity, &budget)?;
            let kind_of = out.kind();
            let (table, flags) = match out {
                Outcome::Found(f) => (Some(f.table().to_vec()), Some(f.flags())),
                _ => (None, None),
            };
            let body = json!({
                "shape": shape,
                "arity": arity,
                "outcome": kind_of,
                "table": table,
                "flags": flags,
                "nodes": budget.nodes_spent(),
            });
            let code = if table.is_none() && matches!(kind_of, keyrel_core::preserve::OutcomeKind::BudgetExceeded) {
                EXIT_BUDGET
            } else {
                crate::EXIT_OK
            };
            Ok(Response { stdout: to_json(&body), code })
        }
        Command::Gf2 { file } => {
            let rel = load(file)?;
            let equations = decompose_gf2(&rel)?.map(|d| d.equations);
            Ok(Response::ok(to_json(&json!({ "equations": equations }))))
        }
        Command::Core { file, key_tuple: given } => {
            let rel = load(file)?;
            let key = key_tuple(&rel, given.as_deref(), &budget)?;
            let core = compute_core(&rel, &key, &budget)?;
            let props = verify_core_properties(&rel, &core, &budget)?;
            let body = json!({
                "key_tuple": key,
                "core": core.core.members().collect::<Vec<_>>(),
                "restrictor": core.restrictor.maps,
                "image_sets": core.image_sets,
                "properties": props,
            });
            Ok(Response::ok(to_json(&body)))
        }
        Command::Blocks { file } => {
            let rel = load(file)?;
            Ok(Response::ok(to_json(&block_sections(&rel)?)))
        }
        Command::Witness {
            file,
            key_tuple: given,
            theorem,
            wnu_arity,
        } => {
            let rel = load(file)?;
            let wnu = find_wnu(&rel, *wnu_arity, &budget)?;
            let stdout = match theorem {
                Theorem::Main => {
                    let key = key_tuple(&rel, given.as_deref(), &budget)?;
                    to_json(&main_theorem_witness(&rel, &key, wnu.as_ref(), &budget)?)
                }
                Theorem::FullPattern => to_json(&full_pattern_block_report(&rel, wnu.as_ref(), &budget)?),
            };
            Ok(Response::ok(stdout))
        }
        Command::Corpus { name, export } => {
            let entry = corpus::corpus_get(name, &budget)?;
            let stdout = if *export {
                format!("# corpus entry {}\n{}", entry.name, relfile::format(&entry.relation))
            } else {
                to_json(&json!({
                    "name": entry.name,
                    "relation": entry.relation,
                    "facts": entry.facts,
                    "verified": true,
                }))
            };
            Ok(Response::ok(stdout))
        }
        Command::Enumerate {
            domain,
            arity,
            filter,
            count,
            workers,
        } => {
            let masks = enumerate(*domain, *arity, *filter, *workers, cli.budget)?;
            let stdout = if *count {
                format!("{}\n", masks.len())
            } else {
                masks
                    .iter()
                    .map(|&m| serde_json::to_string(&members(*domain, *arity, m)).expect("plain arrays") + "\n")
                    .collect()
            };
            Ok(Response::ok(stdout))
        }
    }
}
