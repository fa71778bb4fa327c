//! Re-checking a report's witness from the report and its inputs.
//!
//! The inputs are resolved by id and their digests must match the ones
//! recorded, so a witness is never checked against different objects.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use dualwork::algebra::HomSearch;
use dualwork::catalog::Catalog;
use dualwork::duality::{check_fullness_on, dual_of_algebra, InjectivityWitness};
use dualwork::endo::EndoprimalityVerdict;
use dualwork::entailment::{evaluate_pp, labelled_dual, Atom, PPFormula};
use dualwork::tuples::Tuples;
use dualwork::{AlterEgo, FiniteAlgebra, FiniteStructure, OperationTable, StructMorphism};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::commands::verdict_witness;
use crate::inputs;
use crate::report::Report;

fn field<T: DeserializeOwned>(w: &Value, name: &str) -> Result<T> {
    let v = w.get(name).ok_or_else(|| anyhow!("witness has no `{name}` field"))?;
    serde_json::from_value(v.clone()).with_context(|| format!("witness field `{name}`"))
}

fn kind(w: &Value) -> Result<String> {
    field(w, "kind")
}

fn resolve_inputs(report: &Report, cat: &Catalog) -> Result<()> {
    for i in &report.inputs {
        let now = if i.id.starts_with(inputs::LITERAL_PREFIX) {
            inputs::relation_arg(cat, &i.id)?.input
        } else {
            inputs::input(cat, &i.id)?
        };
        if now.digest != i.digest {
            bail!("input `{}` has changed since the report was written (digest mismatch)", i.id);
        }
    }
    Ok(())
}

fn input_id(report: &Report, i: usize) -> Result<&str> {
    report
        .inputs
        .get(i)
        .map(|x| x.id.as_str())
        .ok_or_else(|| anyhow!("report has no input {i}"))
}

/// `Ok(None)`: nothing to verify. `Ok(Some(msg))`: verified.
/// `Err`: rejected or unreadable.
pub fn verify(report: &Report, cat: &Catalog) -> Result<Option<String>> {
    let Some(w) = &report.witness else {
        return Ok(None);
    };
    resolve_inputs(report, cat)?;
    let limits = report.bounds.limits();
    let msg = match report.command.as_str() {
        "duality" => {
            let a = inputs::algebra(cat, input_id(report, 0)?)?;
            let g = inputs::ego(cat, input_id(report, 1)?)?;
            duality_witness(&a, &g, w, &limits)?
        }
        "fullness" => {
            let g = inputs::ego(cat, input_id(report, 0)?)?;
            let width: usize = field(w, "width")?;
            let points: Vec<Vec<usize>> = field(w, "points")?;
            let x = FiniteStructure::new(g, width, points).map_err(|e| anyhow!("{e}"))?;
            if let Some((sym, t)) = x.closure_violation() {
                bail!("substructure is not closed under `{sym}` at {t:?}");
            }
            // no standalone check for the E(X) side: re-derive and compare
            let v = check_fullness_on(&x, &limits).map_err(|e| anyhow!("{e}"))?;
            if verdict_witness(&v).as_ref() != w.get("failure") {
                bail!("recomputed fullness failure differs from the recorded one");
            }
            format!("fullness fails on a {}-point substructure of power {width}", x.len())
        }
        "injectivity-sweep" => {
            let g = inputs::ego(cat, input_id(report, 0)?)?;
            let k: usize = field(w, "k")?;
            let structure = |name| -> Result<FiniteStructure> {
                FiniteStructure::new(Arc::clone(&g), k, field(w, name)?).map_err(|e| anyhow!("{e}"))
            };
            let iw = InjectivityWitness { k, y: structure("y")?, x: structure("x")?, phi: field(w, "phi")? };
            if !iw.verify().map_err(|e| anyhow!("{e}"))? {
                bail!("the morphism extends, or the structures are not nested closed substructures");
            }
            format!("a morphism on {} points has no extension to {} points", iw.x.len(), iw.y.len())
        }
        "entails" => {
            let g = inputs::ego(cat, input_id(report, 0)?)?;
            let s = inputs::relation_arg(cat, input_id(report, 1)?)?.relation;
            match kind(w)?.as_str() {
                "pp" => {
                    let phi = pp_formula(w)?;
                    let defined = evaluate_pp(&phi, &g).map_err(|e| anyhow!("{e}"))?;
                    if defined != *s {
                        bail!("the formula defines a different relation");
                    }
                    format!("`{phi}` defines the relation")
                }
                "morphism" => {
                    let values: Vec<usize> = field(w, "values")?;
                    let escaping: Vec<usize> = field(w, "escaping")?;
                    let ld = labelled_dual(&g, &s, &limits).map_err(|e| anyhow!("{e}"))?;
                    let target = FiniteStructure::ego_itself(Arc::clone(&g));
                    let u = StructMorphism(values);
                    if u.0.len() != ld.dual.structure.len() || !u.is_morphism(&ld.dual.structure, &target) {
                        bail!("the recorded map is not a morphism D(s) -> ego");
                    }
                    let image: Vec<usize> = ld.rho.iter().map(|&p| u.apply(p)).collect();
                    if image != escaping || s.contains(&escaping) {
                        bail!("the projections are not sent outside the relation");
                    }
                    format!("a morphism sends the projections to {escaping:?}, outside the relation")
                }
                k => bail!("unknown witness kind `{k}` for entails"),
            }
        }
        "clone-entails" => {
            let carrier: usize = serde_json::from_value(
                report.params.get("carrier").cloned().ok_or_else(|| anyhow!("report has no carrier"))?,
            )?;
            let s = inputs::relation_arg(cat, input_id(report, 0)?)?.relation;
            let arity: usize = field(w, "arity")?;
            let table = OperationTable::new(arity, carrier, field(w, "table")?).map_err(|e| anyhow!("{e}"))?;
            let escaping: Vec<usize> = field(w, "escaping")?;
            if arity != s.len() {
                bail!("the polymorphism has arity {arity}, expected {}", s.len());
            }
            for i in 1..report.inputs.len() {
                let r = inputs::relation_arg(cat, input_id(report, i)?)?.relation;
                if !preserves(&table, &r) {
                    bail!("the operation does not preserve `{}`", report.inputs[i].id);
                }
            }
            let rows: Vec<&Vec<usize>> = s.iter().collect();
            let image: Vec<usize> = (0..s.arity())
                .map(|c| table.apply(&rows.iter().map(|t| t[c]).collect::<Vec<_>>()))
                .collect();
            if image != escaping || s.contains(&escaping) {
                bail!("the operation does not move the relation's columns outside it");
            }
            format!("a {arity}-ary polymorphism sends the relation to {escaping:?}")
        }
        "endoprimal" => {
            let m = inputs::algebra(cat, input_id(report, 0)?)?;
            let k: usize = serde_json::from_value(
                report.params.get("k").cloned().ok_or_else(|| anyhow!("report has no k"))?,
            )?;
            let table = OperationTable::new(k, m.size(), field(w, "table")?).map_err(|e| anyhow!("{e}"))?;
            let v = EndoprimalityVerdict { k, holds: false, witness: Some(table), clone_size: 0 };
            if !v.verify(&m, &limits).map_err(|e| anyhow!("{e}"))? {
                bail!("the operation is a term operation or does not commute with every endomorphism");
            }
            format!("a {k}-ary operation commutes with End but is not a term operation")
        }
        c => bail!("`{c}` reports carry no verifiable witness"),
    };
    Ok(Some(msg))
}

fn duality_witness(
    a: &FiniteAlgebra,
    g: &Arc<AlterEgo>,
    w: &Value,
    limits: &dualwork::Limits,
) -> Result<String> {
    match kind(w)?.as_str() {
        "notInjective" => {
            let [x, y]: [usize; 2] = field(w, "elements")?;
            if x == y || x >= a.size() || y >= a.size() {
                bail!("elements must be distinct elements of {}", a.name());
            }
            let homs = HomSearch::new(a, g.over()).map_err(|e| anyhow!("{e}"))?.all().map_err(|e| anyhow!("{e}"))?;
            if homs.iter().any(|h| h.apply(x) != h.apply(y)) {
                bail!("some homomorphism separates {x} and {y}");
            }
            Ok(format!("no homomorphism separates {x} and {y}"))
        }
        "morphism" => {
            let values: Vec<usize> = field(w, "values")?;
            let d = dual_of_algebra(a, g, limits).map_err(|e| anyhow!("{e}"))?;
            let target = FiniteStructure::ego_itself(Arc::clone(g));
            let u = StructMorphism(values);
            if u.0.len() != d.structure.len() || !u.is_morphism(&d.structure, &target) {
                bail!("the recorded map is not a morphism D(A) -> ego");
            }
            if (0..a.size()).any(|x| d.evaluation(x) == u) {
                bail!("the recorded morphism is an evaluation");
            }
            Ok("a morphism D(A) -> ego is not an evaluation".into())
        }
        k => bail!("unknown witness kind `{k}` for duality"),
    }
}

fn pp_formula(w: &Value) -> Result<PPFormula> {
    let atoms: Vec<Value> = field(w, "atoms")?;
    let atoms = atoms
        .iter()
        .map(|a| {
            if let Some(eq) = a.get("eq") {
                let [x, y]: [usize; 2] = serde_json::from_value(eq.clone())?;
                Ok(Atom::Eq(x, y))
            } else {
                Ok(Atom::Rel { symbol: field(a, "rel")?, args: field(a, "args")? })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PPFormula { free: field(w, "free")?, bound: field(w, "bound")?, atoms })
}

/// Columnwise application to every `arity`-tuple of rows of `r`.
fn preserves(f: &OperationTable, r: &dualwork::Relation) -> bool {
    let rows: Vec<&Vec<usize>> = r.iter().collect();
    Tuples::new(rows.len(), f.arity()).all(|pick| {
        let image: Vec<usize> = (0..r.arity())
            .map(|c| f.apply(&pick.iter().map(|&i| rows[i][c]).collect::<Vec<_>>()))
            .collect();
        r.contains(&image)
    })
}
