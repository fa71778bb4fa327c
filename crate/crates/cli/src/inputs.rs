//! Resolving command arguments to catalog objects.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use dualwork::catalog::{load_catalog, Catalog, EntryKind};
use dualwork::speclang::{
    elaborate, parse, serialize_algebra, serialize_ego, serialize_relation, Diagnostic,
    ElaborateOptions, Elaborated,
};
use dualwork::{AlterEgo, FiniteAlgebra, Relation};
use sha2::{Digest, Sha256};

use crate::report::Input;

/// Reads and elaborates a speclang file. Diagnostics go to stderr, prefixed
/// with the path, and turn into a single error.
pub fn load_file(path: &Path, opts: &ElaborateOptions) -> Result<Elaborated> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report = |diags: Vec<Diagnostic>| {
        for d in &diags {
            eprintln!("{}:{d}", path.display());
        }
        anyhow!("{}: {} error(s)", path.display(), diags.len())
    };
    let doc = parse(&text).map_err(report)?;
    elaborate(&doc, opts).map_err(report)
}

/// The catalog commands run against: a file's objects, or the built-in one.
pub fn catalog(file: Option<&Path>) -> Result<Catalog> {
    match file {
        Some(p) => Ok(load_file(p, &ElaborateOptions::default())?.catalog),
        None => load_catalog().map_err(|e| anyhow!("built-in catalog: {e}")),
    }
}

fn sha(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn entry_text(c: &Catalog, id: &str) -> Result<String> {
    let e = c.entry(id).ok_or_else(|| anyhow!("unknown catalog id `{id}`"))?;
    Ok(match &e.kind {
        EntryKind::Algebra(a) => serialize_algebra(a),
        EntryKind::Ego(g) => serialize_ego(g),
        EntryKind::Relation { on, relation } => serialize_relation(id, on, relation),
    })
}

pub fn input(c: &Catalog, id: &str) -> Result<Input> {
    Ok(Input { id: id.to_string(), digest: sha(&entry_text(c, id)?) })
}

pub fn algebra(c: &Catalog, id: &str) -> Result<Arc<FiniteAlgebra>> {
    c.algebra(id).map_err(|e| anyhow!("{e}"))
}

pub fn ego(c: &Catalog, id: &str) -> Result<Arc<AlterEgo>> {
    c.ego(id).map_err(|e| anyhow!("{e}"))
}

/// A relation argument: a catalog id, or a literal such as `{(0,0) (0,1)}`.
#[derive(Debug, Clone)]
pub struct RelArg {
    pub input: Input,
    /// Algebra the relation is declared on; literals have none.
    pub on: Option<String>,
    pub relation: Arc<Relation>,
}

pub const LITERAL_PREFIX: &str = "literal:";

pub fn relation_arg(c: &Catalog, arg: &str) -> Result<RelArg> {
    let arg = arg.strip_prefix(LITERAL_PREFIX).unwrap_or(arg);
    if arg.trim_start().starts_with('{') {
        let r = parse_literal(arg)?;
        let canon = literal_text(&r);
        return Ok(RelArg {
            input: Input {
                id: format!("{LITERAL_PREFIX}{canon}"),
                digest: sha(&serialize_relation("literal", "_", &r)),
            },
            on: None,
            relation: Arc::new(r),
        });
    }
    let (on, r) = c.relation(arg).map_err(|e| anyhow!("{e}"))?;
    Ok(RelArg { input: input(c, arg)?, on: Some(on), relation: r })
}

pub fn literal_text(r: &Relation) -> String {
    let parts: Vec<String> = r
        .iter()
        .map(|t| {
            let xs: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            format!("({})", xs.join(","))
        })
        .collect();
    format!("{{{}}}", parts.join(" "))
}

/// `{(0,1) (1,1)}`; commas between tuples are optional.
pub fn parse_literal(text: &str) -> Result<Relation> {
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| anyhow!("relation literal must be wrapped in braces: `{text}`"))?;
    let mut tuples = Vec::new();
    let mut rest = body;
    loop {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        if rest.is_empty() {
            break;
        }
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| anyhow!("expected `(` in relation literal at `{rest}`"))?;
        let end = inner.find(')').ok_or_else(|| anyhow!("unclosed tuple in relation literal"))?;
        let tuple = inner[..end]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().with_context(|| format!("bad element `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        tuples.push(tuple);
        rest = &inner[end + 1..];
    }
    let Some(first) = tuples.first() else {
        bail!("empty relation literal");
    };
    let arity = first.len();
    if let Some(t) = tuples.iter().find(|t| t.len() != arity) {
        bail!("tuple {t:?} has arity {}, expected {arity}", t.len());
    }
    Relation::new(arity, tuples).map_err(|e| anyhow!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let r = parse_literal("{(0,1), (1,1) (0,0)}").unwrap();
        assert_eq!(r.arity(), 2);
        assert_eq!(literal_text(&r), "{(0,0) (0,1) (1,1)}");
        assert!(parse_literal("{(0,1) (1)}").is_err());
        assert!(parse_literal("(0,1)").is_err());
        assert!(parse_literal("{}").is_err());
    }

    #[test]
    fn literal_ids_round_trip() {
        let c = load_catalog().unwrap();
        let a = relation_arg(&c, "{(1,1) (0,1)}").unwrap();
        let b = relation_arg(&c, &a.input.id).unwrap();
        assert_eq!(a.input, b.input);
    }
}
