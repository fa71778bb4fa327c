//! Acceptance runner: one PASS/FAIL line per criterion, with the time taken
//! against its budget. Tolerances are exact: every verdict, size and witness
//! is compared for equality, and only runtimes carry a budget.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::sweeps::{clone_sweep, entailment_sweep};
use dualwork::catalog::{builtin_manifest, load_catalog, run_manifest, Catalog, ClaimManifest, ManifestReport};
use dualwork::duality::search_injectivity_failure;
use dualwork::endo::is_k_endoprimal;
use dualwork::catalog::algebras;
use dualwork::Limits;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(report: &ManifestReport, extra: &str) -> Outcome {
    let failed: Vec<String> = report
        .failed()
        .map(|o| {
            format!(
                "{}: expected {:?}, got {:?}{}",
                o.id,
                o.expected,
                o.actual,
                o.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
            )
        })
        .collect();
    let detail = if failed.is_empty() {
        format!("{} claims as expected{extra}", report.outcomes.len())
    } else {
        failed.join("; ")
    };
    Outcome {
        passed: failed.is_empty() && !report.outcomes.is_empty(),
        detail,
    }
}

/// Runs the claims whose id starts with one of `prefixes`.
fn claims(catalog: &Catalog, manifest: &ClaimManifest, prefixes: &[&str]) -> ManifestReport {
    let subset = ClaimManifest {
        claims: manifest
            .claims
            .iter()
            .filter(|c| prefixes.iter().any(|p| c.id.starts_with(p)))
            .cloned()
            .collect(),
    };
    run_manifest(catalog, &subset, None, &Limits::default())
}

fn main() -> ExitCode {
    let limits = Limits::default();
    let start = Instant::now();
    let catalog = match load_catalog() {
        Ok(c) => c,
        Err(e) => {
            println!("criterion  1 FAIL  catalog does not load: {e}");
            return ExitCode::FAILURE;
        }
    };
    let load_time = start.elapsed();
    let manifest = builtin_manifest(&catalog);
    let c = &catalog;
    let m = &manifest;

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(usize, &str, u64, Check)> = vec![
        (1, "catalog self-validation and listed tables", 1, Box::new(|| {
            let mut o = from_report(&claims(c, m, &["algebraic-", "graph-", "ds4-"]), "");
            o.detail = format!("{}; load and validate {:.3} s", o.detail, load_time.as_secs_f64());
            o
        })),
        (2, "duality verdicts and double-Stone test algebras", 30, Box::new(|| {
            from_report(&claims(c, m, &["duality-threeT-", "double-stone-case-"]), "")
        })),
        (3, "fullness on squares, strong-duality sweeps", 600, Box::new(|| {
            let mut o = from_report(
                &claims(c, m, &["fullness-threeT_sigma-", "fullness-threeT_h-", "strong-threeT_h", "strong-threeT_sigma"]),
                "",
            );
            let ego = c.ego("threeT_h").unwrap();
            match search_injectivity_failure(&ego, 3, 27, &limits).map(|s| s.witness) {
                Ok(Some(w)) if w.verify().unwrap_or(false) => {
                    o.detail.push_str(&format!("; threeT_h witness at k={} re-verified", w.k));
                }
                other => {
                    o.passed = false;
                    o.detail.push_str(&format!("; threeT_h witness not re-verified: {other:?}"));
                }
            }
            o
        })),
        (4, "entailment decider against brute force, pp certificates", 300, Box::new(|| {
            let (a, b) = (entailment_sweep(algebras::bounded_chain(2)), entailment_sweep(algebras::bounded_chain(3)));
            let mismatches: Vec<&String> = a.mismatches.iter().chain(&b.mismatches).collect();
            Outcome {
                passed: mismatches.is_empty() && a.certificates == a.holds && b.certificates == b.holds,
                detail: if mismatches.is_empty() {
                    format!(
                        "{} cases, {} entailed, {} pp certificates define s exactly",
                        a.cases + b.cases,
                        a.holds + b.holds,
                        a.certificates + b.certificates
                    )
                } else {
                    format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
                },
            }
        })),
        (5, "clone entailment against polymorphism enumeration on {0,1}", 300, Box::new(|| {
            let t = clone_sweep();
            Outcome {
                passed: t.mismatches.is_empty() && t.cases == 211 * 18,
                detail: if t.mismatches.is_empty() {
                    format!("{} R-sets, {} cases, {} entailed, all agree", t.rsets, t.cases, t.holds)
                } else {
                    format!("{} mismatches, first: {}", t.mismatches.len(), t.mismatches[0])
                },
            }
        })),
        (6, "retraction decomposition on every entailed case", 300, Box::new(|| {
            let (a, b) = (entailment_sweep(algebras::bounded_chain(2)), entailment_sweep(algebras::bounded_chain(3)));
            let bad = a.mismatches.iter().chain(&b.mismatches).find(|x| x.contains("retraction") || x.contains("bijective"));
            Outcome {
                passed: bad.is_none() && a.bijective == a.on_duality && b.bijective == b.on_duality,
                detail: match bad {
                    None => format!(
                        "{} certificates verified, {} of them on a duality and bijective",
                        a.holds + b.holds,
                        a.bijective + b.bijective
                    ),
                    Some(x) => x.clone(),
                },
            }
        })),
        (7, "endoprimality", 120, Box::new(|| {
            let mut o = from_report(&claims(c, m, &["endoprimal-"]), "");
            let lat2 = c.algebra("lat2").unwrap();
            match is_k_endoprimal(&lat2, 3, &limits) {
                Ok(v) if !v.holds && v.verify(&lat2, &limits).unwrap_or(false) => {
                    o.detail.push_str(&format!("; non-term witness {:?} verified", v.witness.unwrap()));
                }
                other => {
                    o.passed = false;
                    o.detail.push_str(&format!("; lat2 witness not verified: {other:?}"));
                }
            }
            o
        })),
        (8, "free algebras and retracts", 120, Box::new(|| from_report(&claims(c, m, &["free-"]), ""))),
        (9, "semilattice and cyclic-group strong duality corroboration", 600, Box::new(|| {
            let ids: Vec<String> = ["slT", "sl0T", "sl1T", "sl01T", "z2T", "z3T"]
                .iter()
                .flat_map(|e| [format!("strong-{e}"), format!("fullness-{e}-")])
                .collect();
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            from_report(&claims(c, m, &ids), "")
        })),
        (10, "discriminator example: duality and fullness", 900, Box::new(|| {
            let mut o = from_report(&claims(c, m, &["discriminator-duality-", "discriminator-fullness-"]), "");
            // the not-strong half is reported, never gating
            let ego = c.ego("rdiscT").unwrap();
            match search_injectivity_failure(&ego, 2, 16, &limits) {
                Ok(s) => o.detail.push_str(&format!(
                    "; sweep (power <= 2, size <= 16): {}",
                    match &s.witness {
                        Some(w) if w.verify().unwrap_or(false) => format!("not strong, witness at k={} re-verified", w.k),
                        Some(_) => "witness failed re-verification".into(),
                        None => s.summary(),
                    }
                )),
                Err(e) => o.detail.push_str(&format!("; sweep aborted: {e}")),
            }
            o
        })),
        (11, "determinism across worker counts", 600, Box::new(|| {
            let run = |threads: usize| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| format!("{:?}", run_manifest(c, m, None, &limits)))
            };
            let (one, many) = (run(1), run(4));
            Outcome {
                passed: one == many,
                detail: format!(
                    "full manifest report ({} bytes) under 1 and 4 workers: {}",
                    one.len(),
                    if one == many { "identical" } else { "DIFFERENT" }
                ),
            }
        })),
    ];

    let mut failures = 0;
    for (n, title, budget, check) in &criteria {
        let t = Instant::now();
        let mut o = check();
        let elapsed = t.elapsed();
        if elapsed > Duration::from_secs(*budget) {
            o.passed = false;
            o.detail.push_str("; over budget");
        }
        failures += !o.passed as usize;
        println!(
            "criterion {n:>2} {}  {title}  [{:.2} s / {budget} s]  {}",
            if o.passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass in {:.1} s (tolerance: exact verdicts; budgets are wall-clock)",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
