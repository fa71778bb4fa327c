use std::collections::HashMap;
use std::sync::Arc;

use super::parser::{AlgebraDecl, Arg, CommandDecl, Decl, EgoDecl, EgoItem, Name, Nat, RelDef, SpecDocument};
use super::{sort_diagnostics, Diagnostic, Span};
use crate::algebra::{FiniteAlgebra, Operation, OperationTable};
use crate::catalog::{Catalog, CatalogEntry, Claim, ClaimManifest, ClaimOp, EntryKind, Provenance};
use crate::relation::Relation;
use crate::structures::{AlterEgo, PartialOperationTable};

/// Command keywords of check blocks.
pub const COMMANDS: &[&str] = &[
    "algebraic",
    "clone-entails",
    "core",
    "dense",
    "duality",
    "duality-sub",
    "endodualisable",
    "endoprimal",
    "entails",
    "free",
    "fullness",
    "graph",
    "injectivity",
    "retract",
    "value",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElaborateOptions {
    /// Reject egos whose symbols are not algebraic over their algebra.
    pub check_algebraic: bool,
}

impl Default for ElaborateOptions {
    fn default() -> Self {
        ElaborateOptions { check_algebraic: true }
    }
}

/// A named check block; its commands are manifest claims grouped under the
/// block name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckPlan {
    pub name: String,
    pub span: Span,
    pub claims: Vec<Claim>,
}

impl CheckPlan {
    pub fn manifest(&self) -> ClaimManifest {
        ClaimManifest {
            claims: self.claims.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Elaborated {
    pub catalog: Catalog,
    pub checks: Vec<CheckPlan>,
}

impl Elaborated {
    pub fn check(&self, name: &str) -> Option<&CheckPlan> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Resolves names and builds the objects. Declarations may refer to names
/// declared later in the file.
pub fn elaborate(doc: &SpecDocument, opts: &ElaborateOptions) -> Result<Elaborated, Vec<Diagnostic>> {
    let mut e = Elaborator {
        diags: Vec::new(),
        algebras: HashMap::new(),
    };
    let mut entries = Vec::new();
    for d in &doc.decls {
        if let Decl::Algebra(a) = d {
            if let Some(alg) = e.algebra(a) {
                let alg = Arc::new(alg);
                e.algebras.insert(a.name.text.clone(), Arc::clone(&alg));
                entries.push(entry(&a.name, EntryKind::Algebra(alg)));
            }
        }
    }
    for d in &doc.decls {
        match d {
            Decl::Ego(g) => {
                if let Some(ego) = e.ego(g, opts) {
                    entries.push(entry(&g.name, EntryKind::Ego(Arc::new(ego))));
                }
            }
            Decl::Relation(r) => {
                let Some(m) = e.resolve(&r.on) else { continue };
                if let Some(rel) = e.relation(&r.rel, m.size()) {
                    entries.push(entry(
                        &r.rel.name,
                        EntryKind::Relation {
                            on: r.on.text.clone(),
                            relation: Arc::new(rel),
                        },
                    ));
                }
            }
            _ => {}
        }
    }
    let catalog = Catalog { entries };
    let mut checks = Vec::new();
    for d in &doc.decls {
        if let Decl::Check(c) = d {
            let claims = c
                .commands
                .iter()
                .enumerate()
                .filter_map(|(i, cmd)| e.command(&catalog, &c.name.text, i, cmd))
                .collect();
            checks.push(CheckPlan {
                name: c.name.text.clone(),
                span: c.name.span,
                claims,
            });
        }
    }
    if e.diags.is_empty() {
        Ok(Elaborated { catalog, checks })
    } else {
        sort_diagnostics(&mut e.diags);
        Err(e.diags)
    }
}

fn entry(name: &Name, kind: EntryKind) -> CatalogEntry {
    CatalogEntry {
        id: name.text.clone(),
        kind,
        provenance: Provenance::Stated,
        notes: "",
    }
}

struct Elaborator {
    diags: Vec<Diagnostic>,
    algebras: HashMap<String, Arc<FiniteAlgebra>>,
}

impl Elaborator {
    fn err(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(span, msg));
    }

    fn resolve(&mut self, name: &Name) -> Option<Arc<FiniteAlgebra>> {
        let found = self.algebras.get(&name.text).cloned();
        if found.is_none() {
            self.err(name.span, format!("unknown algebra `{}`", name.text));
        }
        found
    }

    fn values(&mut self, values: &[Nat], carrier: usize) -> Option<Vec<usize>> {
        let mut ok = true;
        for v in values {
            if v.value >= carrier {
                self.err(v.span, format!("value {} exceeds carrier {carrier}", v.value));
                ok = false;
            }
        }
        ok.then(|| values.iter().map(|v| v.value).collect())
    }

    fn table(&mut self, name: &Name, arity: usize, values: &[Nat], carrier: usize) -> Option<OperationTable> {
        let values = self.values(values, carrier)?;
        match OperationTable::new(arity, carrier, values) {
            Ok(t) => Some(t),
            Err(err) => {
                self.err(name.span, format!("operation `{}`: {err}", name.text));
                None
            }
        }
    }

    fn algebra(&mut self, a: &AlgebraDecl) -> Option<FiniteAlgebra> {
        let ops: Vec<Operation> = a
            .ops
            .iter()
            .filter_map(|o| {
                Some(Operation {
                    name: o.name.text.clone(),
                    table: self.table(&o.name, o.arity, &o.values, a.size)?,
                })
            })
            .collect();
        if ops.len() != a.ops.len() {
            return None;
        }
        let mut alg = match FiniteAlgebra::new(a.name.text.clone(), a.size, ops) {
            Ok(alg) => alg,
            Err(err) => {
                self.err(a.name.span, err.to_string());
                return None;
            }
        };
        if let Some(labels) = &a.labels {
            let span = labels.first().map_or(a.name.span, |l| l.span);
            alg = match alg.with_labels(labels.iter().map(|l| l.text.clone()).collect()) {
                Ok(alg) => alg,
                Err(err) => {
                    self.err(span, err.to_string());
                    return None;
                }
            };
        }
        Some(alg)
    }

    fn tuples(&mut self, tuples: &[Vec<Nat>], carrier: usize) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        for t in tuples {
            out.push(self.values(t, carrier)?);
        }
        Some(out)
    }

    fn relation(&mut self, r: &RelDef, carrier: usize) -> Option<Relation> {
        let tuples = self.tuples(&r.tuples, carrier)?;
        match Relation::new(r.arity, tuples) {
            Ok(rel) => Some(rel),
            Err(err) => {
                self.err(r.name.span, format!("relation `{}`: {err}", r.name.text));
                None
            }
        }
    }

    fn ego(&mut self, g: &EgoDecl, opts: &ElaborateOptions) -> Option<AlterEgo> {
        let m = self.resolve(&g.over)?;
        let n = m.size();
        let mut ego = AlterEgo::new(g.name.text.clone(), m);
        let mut spans = HashMap::new();
        let mut ok = true;
        for item in &g.items {
            let name = item.name();
            spans.insert(name.text.clone(), name.span);
            let built = match item {
                EgoItem::Op(o) => self
                    .table(&o.name, o.arity, &o.values, n)
                    .map(|t| ego.clone().with_total(o.name.text.clone(), t)),
                EgoItem::Partial(p) => (|| {
                    let domain = Relation::new(p.arity, self.tuples(&p.domain, n)?).ok()?;
                    let values = self.values(&p.values, n)?;
                    let h = match PartialOperationTable::from_domain(p.arity, n, &domain, &values) {
                        Ok(h) => h,
                        Err(err) => {
                            self.err(p.name.span, format!("partial operation `{}`: {err}", p.name.text));
                            return None;
                        }
                    };
                    Some(ego.clone().with_partial(p.name.text.clone(), h))
                })(),
                EgoItem::Rel(r) => self
                    .relation(r, n)
                    .map(|rel| ego.clone().with_relation(r.name.text.clone(), rel)),
            };
            match built {
                Some(Ok(next)) => ego = next,
                Some(Err(err)) => {
                    self.err(name.span, err.to_string());
                    ok = false;
                }
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        if opts.check_algebraic {
            let report = ego.is_algebraic_over();
            if let Some(bad) = report.first_failure() {
                let span = spans.get(&bad.name).copied().unwrap_or(g.name.span);
                self.err(
                    span,
                    format!("`{}` is not algebraic over `{}`", bad.name, g.over.text),
                );
                return None;
            }
        }
        Some(ego)
    }

    fn command(&mut self, catalog: &Catalog, check: &str, index: usize, cmd: &CommandDecl) -> Option<Claim> {
        let kw = cmd.keyword.text.as_str();
        let names: Vec<&Name> = cmd
            .args
            .iter()
            .filter_map(|a| match a {
                Arg::Name(n) => Some(n),
                Arg::Key(..) => None,
            })
            .collect();
        let keys: Vec<(&Name, usize)> = cmd
            .args
            .iter()
            .filter_map(|a| match a {
                Arg::Key(k, v) => Some((k, v.value)),
                Arg::Name(_) => None,
            })
            .collect();
        let before = self.diags.len();
        let mut c = Cmd {
            e: self,
            catalog,
            cmd,
            names,
            keys,
            next: 0,
        };
        let s = |x: &Name| x.text.clone();
        let (op, default) = match kw {
            "algebraic" => (ClaimOp::Algebraic { ego: s(c.ego()?) }, Some("algebraic")),
            "duality" => {
                let (algebra, ego) = (s(c.algebra()?), s(c.ego()?));
                (ClaimOp::Duality { algebra, ego }, Some("iso"))
            }
            "duality-sub" => {
                let (algebra, ego) = (s(c.algebra()?), s(c.ego()?));
                let power = c.key("power")?;
                (ClaimOp::DualityOnSubalgebras { algebra, power, ego }, Some("iso"))
            }
            "fullness" => {
                let ego = s(c.ego()?);
                (ClaimOp::FullnessOnPower { ego, power: c.key("power")? }, Some("iso"))
            }
            "injectivity" => {
                let ego = s(c.ego()?);
                let (power, size) = (c.key("power")?, c.key("size")?);
                (ClaimOp::InjectivitySweep { ego, power, size }, Some("noWitnessWithinBounds"))
            }
            "endoprimal" => {
                let algebra = s(c.algebra()?);
                (ClaimOp::Endoprimal { algebra, k: c.key("k")? }, Some("holds"))
            }
            "endodualisable" => {
                let (algebra, test) = (s(c.algebra()?), s(c.algebra()?));
                (ClaimOp::Endodualisable { algebra, test }, Some("iso"))
            }
            "free" => {
                let algebra = s(c.algebra()?);
                (ClaimOp::FreeSize { algebra, k: c.key("k")? }, None)
            }
            "retract" => {
                let (retract, algebra) = (s(c.algebra()?), s(c.algebra()?));
                (ClaimOp::FreeRetract { retract, algebra, k: c.key("k")? }, Some("present"))
            }
            "core" => (ClaimOp::Core { algebra: s(c.algebra()?) }, None),
            "dense" => {
                let ego = s(c.ego()?);
                (ClaimOp::DenseUpTo { ego, arity: c.key("arity")? }, Some("holds"))
            }
            "entails" => {
                let (ego, relation) = (s(c.ego()?), s(c.relation()?));
                (ClaimOp::Entails { ego, relation }, Some("holds"))
            }
            "clone-entails" => {
                let relation = s(c.relation()?);
                let mut from = Vec::new();
                while c.next < c.names.len() {
                    from.push(s(c.relation()?));
                }
                (ClaimOp::CloneEntails { relation, from }, Some("holds"))
            }
            "value" => {
                let alg = c.algebra()?;
                let m = catalog.algebra(&alg.text).ok()?;
                let op = c.name("operation")?;
                let Some(table) = m.op(&op.text) else {
                    c.e.err(op.span, format!("unknown operation `{}` in algebra `{}`", op.text, alg.text));
                    return None;
                };
                let mut args = Vec::new();
                while c.next < c.names.len() {
                    let l = c.name("element")?;
                    if m.element(&l.text).is_none() {
                        c.e.err(l.span, format!("unknown element `{}` of `{}`", l.text, alg.text));
                        return None;
                    }
                    args.push(s(l));
                }
                if args.len() != table.arity() {
                    c.e.err(
                        op.span,
                        format!("`{}` takes {} arguments, got {}", op.text, table.arity(), args.len()),
                    );
                    return None;
                }
                (ClaimOp::OpValue { algebra: s(alg), op: s(op), args }, None)
            }
            "graph" => {
                let ego = c.ego()?;
                let g = catalog.ego(&ego.text).ok()?;
                let sym = c.name("symbol")?;
                if !g.constraints().iter().any(|x| x.name == sym.text) {
                    c.e.err(sym.span, format!("unknown symbol `{}` in ego `{}`", sym.text, ego.text));
                    return None;
                }
                (ClaimOp::SymbolGraph { ego: s(ego), symbol: s(sym) }, None)
            }
            _ => {
                c.e.err(cmd.keyword.span, format!("unknown command `{kw}`"));
                return None;
            }
        };
        c.finish()?;
        if self.diags.len() > before {
            return None;
        }
        let expected = cmd.expect.as_ref().map(|x| x.text.clone()).or(default.map(String::from));
        Some(Claim {
            id: format!("{check}.{}-{kw}", index + 1),
            group: check.to_string(),
            op,
            expected,
            provenance: Provenance::Stated,
            source: format!("line {}", cmd.keyword.span.line),
        })
    }
}

/// Argument cursor for one command.
struct Cmd<'a, 'b> {
    e: &'a mut Elaborator,
    catalog: &'b Catalog,
    cmd: &'b CommandDecl,
    names: Vec<&'b Name>,
    keys: Vec<(&'b Name, usize)>,
    next: usize,
}

impl<'b> Cmd<'_, 'b> {
    fn name(&mut self, what: &str) -> Option<&'b Name> {
        let Some(&n) = self.names.get(self.next) else {
            self.e.err(
                self.cmd.keyword.span,
                format!("`{}` is missing its {what} argument", self.cmd.keyword.text),
            );
            return None;
        };
        self.next += 1;
        Some(n)
    }

    fn lookup(&mut self, what: &str) -> Option<&'b Name> {
        let n = self.name(what)?;
        if !found_in(self.catalog, what, &n.text) {
            self.e.err(n.span, format!("unknown {what} `{}`", n.text));
            return None;
        }
        Some(n)
    }

    fn algebra(&mut self) -> Option<&'b Name> {
        self.lookup("algebra")
    }

    fn ego(&mut self) -> Option<&'b Name> {
        self.lookup("ego")
    }

    fn relation(&mut self) -> Option<&'b Name> {
        self.lookup("relation")
    }

    fn key(&mut self, key: &str) -> Option<usize> {
        let found = self.keys.iter().find(|(k, _)| k.text == key).map(|&(_, v)| v);
        if found.is_none() {
            self.e.err(
                self.cmd.keyword.span,
                format!("`{}` needs `{key}=N`", self.cmd.keyword.text),
            );
        }
        found
    }

    /// Rejects leftover positional arguments and unknown keys.
    fn finish(&mut self) -> Option<()> {
        if let Some(extra) = self.names.get(self.next) {
            self.e.err(extra.span, format!("unexpected argument `{}`", extra.text));
            return None;
        }
        let allowed: &[&str] = match self.cmd.keyword.text.as_str() {
            "duality-sub" | "fullness" => &["power"],
            "injectivity" => &["power", "size"],
            "endoprimal" | "free" | "retract" => &["k"],
            "dense" => &["arity"],
            _ => &[],
        };
        for (k, _) in &self.keys {
            if !allowed.contains(&k.text.as_str()) {
                self.e.err(k.span, format!("unknown key `{}`", k.text));
                return None;
            }
        }
        Some(())
    }
}

fn found_in(catalog: &Catalog, what: &str, id: &str) -> bool {
    match what {
        "algebra" => catalog.algebra(id).is_ok(),
        "ego" => catalog.ego(id).is_ok(),
        "relation" => catalog.relation(id).is_ok(),
        _ => false,
    }
}
