//! The `.rel` text format:
//!
//! ```text
//! # comment
//! domain 3
//! arity 2
//! 0 1
//! 1 0
//! ```
//!
//! Both headers come before the first tuple. Duplicate tuples are allowed.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::relcore::{check_guards, Relation};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<Relation> {
    let mut domain: Option<usize> = None;
    let mut arity: Option<usize> = None;
    let mut rel: Option<Relation> = None;
    let mut tuples: Vec<Vec<u8>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().unwrap_or("");
        if first == "domain" || first == "arity" {
            if rel.is_some() {
                return Err(parse_error(line_no, format!("`{first}` header after the first tuple")));
            }
            let value: usize = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| parse_error(line_no, format!("`{first}` needs a positive integer")))?;
            if words.next().is_some() {
                return Err(parse_error(line_no, format!("trailing text after `{first}` header")));
            }
            let slot = if first == "domain" { &mut domain } else { &mut arity };
            if slot.replace(value).is_some() {
                return Err(parse_error(line_no, format!("duplicate `{first}` header")));
            }
            continue;
        }
        if rel.is_none() {
            let (Some(k), Some(n)) = (domain, arity) else {
                return Err(parse_error(line_no, "tuple before the `domain` and `arity` headers"));
            };
            check_guards(k, n)?;
            rel = Some(Relation::empty(k, n)?);
        }
        let r = rel.as_ref().expect("initialised above");
        let mut tuple = Vec::with_capacity(r.arity());
        for w in line.split_whitespace() {
            let v: usize = w
                .parse()
                .map_err(|_| parse_error(line_no, format!("`{w}` is not a non-negative integer")))?;
            if v >= r.domain_size() {
                return Err(parse_error(
                    line_no,
                    format!("entry {v} outside domain of size {}", r.domain_size()),
                ));
            }
            tuple.push(v as u8);
        }
        if tuple.len() != r.arity() {
            return Err(parse_error(
                line_no,
                format!("tuple has {} entries, expected {}", tuple.len(), r.arity()),
            ));
        }
        tuples.push(tuple);
    }
    let (Some(k), Some(n)) = (domain, arity) else {
        return Err(parse_error(text.lines().count().max(1), "missing `domain` or `arity` header"));
    };
    Relation::from_tuples(k, n, tuples)
}

/// Canonical text: headers, then members in canonical order.
pub fn format(rel: &Relation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", rel.domain_size());
    let _ = writeln!(out, "arity {}", rel.arity());
    for t in rel.members() {
        let words: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", words.join(" "));
    }
    out
}
