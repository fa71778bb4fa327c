//! The report record every command emits, and its two renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use dualwork::Limits;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Input {
    pub id: String,
    /// sha256 of the object's speclang text.
    pub digest: String,
}

/// Every bound a verdict may depend on. All of them are echoed, whether or
/// not the command consulted them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub power_bound: usize,
    pub size_bound: usize,
    pub op_limit: usize,
    pub max_carrier: usize,
    pub max_ambient: usize,
    pub max_width: usize,
    pub max_cells: usize,
    pub max_dual: usize,
}

impl Bounds {
    pub fn new(power_bound: usize, size_bound: usize, op_limit: usize) -> Self {
        let l = Limits::default();
        Bounds {
            power_bound,
            size_bound,
            op_limit,
            max_carrier: l.max_carrier,
            max_ambient: l.max_ambient,
            max_width: l.max_width,
            max_cells: l.max_cells,
            max_dual: l.max_dual,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_carrier: self.max_carrier,
            max_results: self.op_limit,
            max_ambient: self.max_ambient,
            max_width: self.max_width,
            max_cells: self.max_cells,
            max_dual: self.max_dual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRow {
    pub id: String,
    pub group: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub bounds: Bounds,
    pub elapsed_ms: Option<u64>,
    pub scope: String,
    pub passed: bool,
    /// Command arguments that are not catalog objects (`k`, carrier, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    /// Counts and side results of the computation.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<ClaimRow>,
}

pub const SCOPE: &str = "finite-level";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<Input>, bounds: Bounds) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            verdict: String::new(),
            witness: None,
            bounds,
            elapsed_ms: None,
            scope: SCOPE.to_string(),
            passed: false,
            params: BTreeMap::new(),
            stats: BTreeMap::new(),
            claims: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("# dw {}\n\n", self.command);
        s.push_str("| field | value |\n|---|---|\n");
        writeln!(s, "| verdict | `{}` |", self.verdict).unwrap();
        writeln!(s, "| passed | {} |", self.passed).unwrap();
        writeln!(s, "| scope | {} |", self.scope).unwrap();
        let elapsed = self.elapsed_ms.map_or("null".to_string(), |m| m.to_string());
        writeln!(s, "| elapsed_ms | {elapsed} |").unwrap();

        s.push_str("\n## Inputs\n\n| id | digest |\n|---|---|\n");
        for i in &self.inputs {
            writeln!(s, "| `{}` | `{}` |", i.id, i.digest).unwrap();
        }

        s.push_str("\n## Bounds\n\n| bound | value |\n|---|---|\n");
        if let Value::Object(m) = serde_json::to_value(self.bounds).expect("bounds serialize") {
            for (k, v) in m {
                writeln!(s, "| {k} | {v} |").unwrap();
            }
        }

        for (title, map) in [("Parameters", &self.params), ("Statistics", &self.stats)] {
            if map.is_empty() {
                continue;
            }
            writeln!(s, "\n## {title}\n\n| name | value |\n|---|---|").unwrap();
            for (k, v) in map {
                writeln!(s, "| {k} | `{v}` |").unwrap();
            }
        }

        if !self.claims.is_empty() {
            s.push_str("\n## Claims\n\n| id | expected | actual | result |\n|---|---|---|---|\n");
            for c in &self.claims {
                let actual = match (&c.actual, &c.error) {
                    (Some(a), _) => format!("`{a}`"),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "-".into(),
                };
                writeln!(
                    s,
                    "| `{}` | {} | {} | {} |",
                    c.id,
                    c.expected.as_deref().map_or("-".into(), |e| format!("`{e}`")),
                    actual,
                    if c.passed { "pass" } else { "FAIL" }
                )
                .unwrap();
            }
        }

        if let Some(w) = &self.witness {
            let body = serde_json::to_string_pretty(w).expect("witness serializes");
            writeln!(s, "\n## Witness\n\n```json\n{body}\n```").unwrap();
        }
        s
    }
}
