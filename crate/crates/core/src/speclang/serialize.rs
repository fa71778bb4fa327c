use std::fmt::Write;

use crate::algebra::FiniteAlgebra;
use crate::catalog::{Catalog, EntryKind};
use crate::relation::Relation;
use crate::structures::AlterEgo;

fn row(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

fn tuples<'a>(ts: impl Iterator<Item = &'a Vec<usize>>) -> String {
    let parts: Vec<String> = ts
        .map(|t| {
            let xs: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            format!("({})", xs.join(","))
        })
        .collect();
    format!("{{{}}}", parts.join(" "))
}

pub fn serialize_algebra(a: &FiniteAlgebra) -> String {
    let mut s = format!("algebra {} {{\n  size {}\n", a.name(), a.size());
    let default = a.labels().iter().enumerate().all(|(i, l)| *l == i.to_string());
    if !default {
        writeln!(s, "  labels {}", a.labels().join(" ")).unwrap();
    }
    for op in a.ops() {
        writeln!(s, "  op {}/{} = {}", op.name, op.table.arity(), row(op.table.values())).unwrap();
    }
    s.push_str("}\n");
    s
}

/// Symbols are written by kind (total, partial, relations), which is the
/// order the ego keeps them in.
pub fn serialize_ego(g: &AlterEgo) -> String {
    let mut s = format!("ego {} over {} {{\n", g.name(), g.over().name());
    for (name, t) in g.total() {
        writeln!(s, "  op {name}/{} = {}", t.arity(), row(t.values())).unwrap();
    }
    for (name, h) in g.partial() {
        let domain = h.domain();
        writeln!(
            s,
            "  partial {name}/{} dom {} = {}",
            h.arity(),
            tuples(domain.iter()),
            row(&h.values())
        )
        .unwrap();
    }
    for (name, r) in g.relations() {
        writeln!(s, "  rel {name}/{} = {}", r.arity(), tuples(r.iter())).unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn serialize_relation(name: &str, on: &str, r: &Relation) -> String {
    format!("rel {name}/{} on {on} = {}\n", r.arity(), tuples(r.iter()))
}

/// Algebras first, then egos and relations, each in catalog order.
pub fn serialize_catalog(c: &Catalog) -> String {
    let mut parts = Vec::new();
    for e in &c.entries {
        if let EntryKind::Algebra(a) = &e.kind {
            parts.push(serialize_algebra(a));
        }
    }
    for e in &c.entries {
        match &e.kind {
            EntryKind::Ego(g) => parts.push(serialize_ego(g)),
            EntryKind::Relation { on, relation } => parts.push(serialize_relation(&e.id, on, relation)),
            EntryKind::Algebra(_) => {}
        }
    }
    parts.join("\n")
}
