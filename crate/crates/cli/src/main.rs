//! `dw`: command-line front end for the dualwork engines.
//!
//! Exit codes: 0 when every verdict is as expected, 1 when a check failed,
//! 2 for usage, parse and engine errors (diagnostics on stderr).

mod cache;
mod commands;
mod inputs;
mod report;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dualwork::catalog::{builtin_manifest, Catalog};
use dualwork::speclang::{elaborate, parse, serialize_catalog, ElaborateOptions, COMMANDS};
use serde_json::json;

use crate::cache::Cache;
use crate::commands::Ctx;
use crate::report::{Bounds, Format, Report};

#[derive(Parser)]
#[command(name = "dw", version, about = "Finite-level natural duality workbench")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format of the report.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (default: all cores). Reports do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record elapsed_ms in the report; timed runs bypass the cache.
    #[arg(long, global = true)]
    timing: bool,
    /// Largest power `k` of the ego searched by fullness and injectivity sweeps.
    #[arg(long, global = true, default_value_t = 2)]
    power_bound: usize,
    /// Largest substructure `|Y|` tried by the injectivity sweep.
    #[arg(long, global = true, default_value_t = 16)]
    size_bound: usize,
    /// Largest number of maps any single search may enumerate.
    #[arg(long, global = true, default_value_t = 100_000)]
    op_limit: usize,
    /// Resolve ids against this speclang file instead of the built-in catalog.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and elaborate a speclang file.
    Parse {
        path: PathBuf,
        /// Accept ego symbols that are not algebraic over their algebra.
        #[arg(long)]
        no_algebraic_check: bool,
    },
    /// Run check plans: from a file, the built-in manifest, or one command.
    ///
    /// `dw check FILE [NAME]` runs the plans of a file; `dw check manifest`
    /// runs the built-in claims; `dw check KEYWORD [--algebra A] [--ego E]
    /// [--relation R] [ARGS]` runs one speclang command against the catalog.
    Check {
        target: String,
        args: Vec<String>,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long)]
        ego: Option<String>,
        #[arg(long)]
        relation: Option<String>,
        #[arg(long)]
        expect: Option<String>,
        /// Only claims whose id or group contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run the built-in claim manifest.
    Manifest {
        #[arg(long)]
        filter: Option<String>,
    },
    /// Does the ego entail a relation (catalog id or `{(0,1) (1,1)}`)?
    Entails {
        ego: String,
        relation: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Is RELATION preserved by every polymorphism of FROM?
    CloneEntails {
        relation: String,
        from: Vec<String>,
        /// Carrier size; needed when RELATION is a literal.
        #[arg(long)]
        carrier: Option<usize>,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Is evaluation an isomorphism A -> ED(A)?
    Duality {
        algebra: String,
        ego: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Fullness on every closed substructure of ego^power-bound.
    Fullness {
        ego: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Bounded search for a morphism that does not extend.
    InjectivitySweep {
        ego: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// k-endoprimality of an algebra.
    Endoprimal {
        algebra: String,
        #[arg(short, long)]
        k: usize,
        #[arg(long)]
        expect: Option<String>,
    },
    /// The k-generated free algebra in the quasivariety of an algebra.
    FreeAlgebra {
        algebra: String,
        #[arg(short, long)]
        k: usize,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Re-check the witness recorded in a JSON report.
    VerifyWitness { report: PathBuf },
    /// Re-render a JSON report.
    Report { report: PathBuf },
}

fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a dw report", path.display()))
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Builds a one-command check plan against `cat` by writing it as speclang.
fn single_command(cat: &Catalog, keyword: &str, words: &[String], expect: Option<&str>) -> Result<Vec<dualwork::catalog::Claim>> {
    let mut line = format!("  {keyword}");
    for w in words {
        line.push(' ');
        line.push_str(w);
    }
    if let Some(e) = expect {
        line.push_str(" expect ");
        line.push_str(e);
    }
    let text = format!("{}\ncheck cli {{\n{line};\n}}\n", serialize_catalog(cat));
    let doc = parse(&text).map_err(|d| anyhow!("{}", d[0]))?;
    let el = elaborate(&doc, &ElaborateOptions::default()).map_err(|d| anyhow!("{}", d[0]))?;
    Ok(el.checks.into_iter().flat_map(|c| c.claims).collect())
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let ctx = Ctx {
        bounds: Bounds::new(g.power_bound, g.size_bound, g.op_limit),
        timing: g.timing,
        cache: Cache::from_env(),
    };
    let catalog = || inputs::catalog(g.file.as_deref());
    let report = match &cli.command {
        Command::Parse { path, no_algebraic_check } => {
            let opts = ElaborateOptions { check_algebraic: !no_algebraic_check };
            let el = inputs::load_file(path, &opts)?;
            let ids: Vec<_> = el.catalog.entries.iter().map(|e| e.id.clone()).collect();
            let ins = ids.iter().map(|id| inputs::input(&el.catalog, id)).collect::<Result<Vec<_>>>()?;
            let mut r = Report::new("parse", ins, ctx.bounds);
            r.verdict = "ok".into();
            r.passed = true;
            r.stats.insert("objects".into(), json!(ids.len()));
            let checks: Vec<_> = el.checks.iter().map(|c| c.name.clone()).collect();
            r.stats.insert("checks".into(), json!(checks));
            r
        }
        Command::Check { target, args, algebra, ego, relation, expect, filter } => {
            if target == "manifest" {
                let cat = catalog()?;
                let claims = builtin_manifest(&cat).filtered(filter.as_deref()).into_iter().cloned().collect();
                commands::claims(&ctx, "check", &cat, claims, &format!("manifest:{}", filter.as_deref().unwrap_or("*")))?
            } else if COMMANDS.contains(&target.as_str()) {
                let cat = catalog()?;
                let mut words: Vec<String> = [algebra, ego, relation].into_iter().flatten().cloned().collect();
                words.extend(args.iter().cloned());
                let claims = single_command(&cat, target, &words, expect.as_deref())?;
                commands::claims(&ctx, "check", &cat, claims, target)?
            } else {
                let path = Path::new(target);
                if !path.exists() {
                    bail!("`{target}` is neither a file, `manifest`, nor one of: {}", COMMANDS.join(", "));
                }
                let el = inputs::load_file(path, &ElaborateOptions::default())?;
                let plans: Vec<_> = match args.first() {
                    Some(name) => vec![el.check(name).ok_or_else(|| anyhow!("no check `{name}` in {target}"))?],
                    None => el.checks.iter().collect(),
                };
                let mut claims: Vec<_> = plans.iter().flat_map(|p| p.claims.iter().cloned()).collect();
                if let Some(f) = filter {
                    claims.retain(|c| c.id.contains(f.as_str()) || c.group.contains(f.as_str()));
                }
                let names: Vec<&str> = plans.iter().map(|p| p.name.as_str()).collect();
                commands::claims(&ctx, "check", &el.catalog, claims, &names.join(","))?
            }
        }
        Command::Manifest { filter } => {
            let cat = catalog()?;
            let claims = builtin_manifest(&cat).filtered(filter.as_deref()).into_iter().cloned().collect();
            commands::claims(&ctx, "manifest", &cat, claims, filter.as_deref().unwrap_or("*"))?
        }
        Command::Entails { ego, relation, expect } => {
            commands::entails_cmd(&ctx, &catalog()?, ego, relation, expect.as_deref())?
        }
        Command::CloneEntails { relation, from, carrier, expect } => {
            commands::clone_entails_cmd(&ctx, &catalog()?, relation, from, *carrier, expect.as_deref())?
        }
        Command::Duality { algebra, ego, expect } => {
            commands::duality(&ctx, &catalog()?, algebra, ego, expect.as_deref())?
        }
        Command::Fullness { ego, expect } => commands::fullness(&ctx, &catalog()?, ego, expect.as_deref())?,
        Command::InjectivitySweep { ego, expect } => {
            commands::injectivity(&ctx, &catalog()?, ego, expect.as_deref())?
        }
        Command::Endoprimal { algebra, k, expect } => {
            commands::endoprimal(&ctx, &catalog()?, algebra, *k, expect.as_deref())?
        }
        Command::FreeAlgebra { algebra, k, expect } => {
            commands::free_algebra(&ctx, &catalog()?, algebra, *k, expect.as_deref())?
        }
        Command::VerifyWitness { report } => {
            let r = read_report(report)?;
            return match verify::verify(&r, &catalog()?) {
                Ok(Some(msg)) => {
                    emit(&format!("verified: {msg}\n"))?;
                    Ok(true)
                }
                Ok(None) => {
                    emit("no witness in report; nothing to verify\n")?;
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("witness rejected: {e:#}");
                    Ok(false)
                }
            };
        }
        Command::Report { report } => read_report(report)?,
    };
    emit(&report.render(g.format))?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
