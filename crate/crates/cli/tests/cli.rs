use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CHAIN: &str = "\
algebra chain2 {
  size 2
  op join/2 = [0 1 1 1]
  op meet/2 = [0 0 0 1]
  op bot/0 = [0]
  op top/0 = [1]
}
algebra chain3 {
  size 3
  op join/2 = [0 1 2 1 1 2 2 2 2]
  op meet/2 = [0 0 0 0 1 1 0 1 2]
  op bot/0 = [0]
  op top/0 = [2]
}
ego bare over chain2 {
}
ego twoT over chain2 {
  rel le/2 = {(0,0) (0,1) (1,1)}
}
rel le/2 on chain2 = {(0,0) (0,1) (1,1)}
check good {
  duality chain3 twoT expect iso;
  entails twoT le;
}
check bad {
  duality chain3 bare expect iso;
}
";

fn dw(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dw"));
    cmd.args(args).env_remove("DW_CACHE_DIR");
    if let Some(c) = cache {
        cmd.env("DW_CACHE_DIR", c);
    }
    cmd.output().expect("dw runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn spec_file(dir: &TempDir) -> String {
    let p = dir.path().join("chain.dw");
    fs::write(&p, CHAIN).unwrap();
    p.to_str().unwrap().to_string()
}

fn save(dir: &TempDir, name: &str, o: &Output) -> String {
    let p = dir.path().join(name);
    fs::write(&p, &o.stdout).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn malformed_file_exits_2_with_positioned_diagnostics() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.dw");
    fs::write(&p, "algebra a {\n  size 2\n  op f/1 = [0 5]\n}\nego g over nowhere {\n}\n").unwrap();
    for args in [vec!["parse", p.to_str().unwrap()], vec!["check", p.to_str().unwrap()]] {
        let o = dw(&args, None);
        assert_eq!(code(&o), 2);
        assert!(o.stdout.is_empty());
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains("bad.dw:3:"), "{err}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&dw(&["duality", "chain3"], None)), 2);
    assert_eq!(code(&dw(&["duality", "nosuch", "threeT"], None)), 2);
    assert_eq!(code(&dw(&["check", "no-such-target"], None)), 2);
}

#[test]
fn catalog_check_passes() {
    let o = dw(&["check", "duality", "--algebra", "chain3", "--ego", "threeT"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["claims"][0]["actual"], "iso");
    assert_eq!(r["scope"], "finite-level");
    assert_eq!(r["elapsed_ms"], Value::Null);
}

#[test]
fn manifest_filter_selects_a_subset() {
    let o = dw(&["check", "manifest", "--filter", "double-stone"], None);
    assert_eq!(code(&o), 0);
    let claims = json(&o)["claims"].as_array().unwrap().clone();
    assert!(!claims.is_empty());
    assert!(claims
        .iter()
        .all(|c| c["id"].as_str().unwrap().contains("double-stone") || c["group"].as_str().unwrap().contains("double-stone")));
}

#[test]
fn file_checks_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let f = spec_file(&dir);
    let good = dw(&["check", &f, "good"], None);
    assert_eq!(code(&good), 0, "{}", String::from_utf8_lossy(&good.stdout));
    let bad = dw(&["check", &f, "bad"], None);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["claims"][0]["actual"], "notSurjective");
    assert_eq!(code(&dw(&["check", &f], None)), 1);
}

#[test]
fn cache_serves_identical_bytes() {
    let cache = TempDir::new().unwrap();
    let args = ["fullness", "threeT_sigma", "--power-bound", "2"];
    let a = dw(&args, Some(cache.path()));
    let b = dw(&args, Some(cache.path()));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let entries: Vec<_> = fs::read_dir(cache.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);

    // a valid entry is trusted: editing it shows up in the next run
    let path = entries[0].as_ref().unwrap().path();
    let mut r: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    r["stats"]["substructures"] = Value::from(-1);
    fs::write(&path, serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(json(&dw(&args, Some(cache.path())))["stats"]["substructures"], -1);

    // other bounds are another key
    dw(&["fullness", "threeT_sigma", "--power-bound", "1"], Some(cache.path()));
    assert_eq!(fs::read_dir(cache.path()).unwrap().count(), 2);
}

#[test]
fn corrupted_cache_recomputes_with_warning() {
    let cache = TempDir::new().unwrap();
    let args = ["duality", "chain3", "threeT"];
    let a = dw(&args, Some(cache.path()));
    for e in fs::read_dir(cache.path()).unwrap() {
        fs::write(e.unwrap().path(), "{ not json").unwrap();
    }
    let b = dw(&args, Some(cache.path()));
    assert_eq!(code(&b), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&b.stderr).contains("corrupted"));
    // and the entry was rewritten
    let c = dw(&args, Some(cache.path()));
    assert!(c.stderr.is_empty());
}

#[test]
fn editing_an_input_invalidates_the_cache() {
    let cache = TempDir::new().unwrap();
    let dir = TempDir::new().unwrap();
    let f = spec_file(&dir);
    let a = json(&dw(&["--file", &f, "duality", "chain3", "twoT"], Some(cache.path())));
    fs::write(&f, CHAIN.replace("ego twoT over chain2 {\n  rel le/2 = {(0,0) (0,1) (1,1)}\n}", "ego twoT over chain2 {\n}")).unwrap();
    let b = json(&dw(&["--file", &f, "duality", "chain3", "twoT"], Some(cache.path())));
    assert_eq!(a["verdict"], "iso");
    assert_eq!(b["verdict"], "notSurjective");
    assert_ne!(a["inputs"][1]["digest"], b["inputs"][1]["digest"]);
    assert_eq!(a["inputs"][0]["digest"], b["inputs"][0]["digest"]);
}

#[test]
fn json_and_markdown_agree() {
    let args = ["entails", "twoT", "{(0,0) (1,1)}", "--power-bound", "3"];
    let j = json(&dw(&args, None));
    let mut md_args = args.to_vec();
    md_args.extend(["--format", "markdown"]);
    let md = String::from_utf8(dw(&md_args, None).stdout).unwrap();
    assert!(md.contains(&format!("| verdict | `{}` |", j["verdict"].as_str().unwrap())));
    for i in j["inputs"].as_array().unwrap() {
        assert!(md.contains(&format!("| `{}` | `{}` |", i["id"].as_str().unwrap(), i["digest"].as_str().unwrap())));
    }
    for (k, v) in j["bounds"].as_object().unwrap() {
        assert!(md.contains(&format!("| {k} | {v} |")), "{k}");
    }
    assert_eq!(j["bounds"]["power_bound"], 3);
    assert!(md.contains(j["witness"]["formula"].as_str().unwrap()));

    // and `report` re-renders a saved report byte for byte
    let dir = TempDir::new().unwrap();
    let saved = save(&dir, "r.json", &dw(&args, None));
    assert_eq!(dw(&["report", &saved], None).stdout, fs::read(&saved).unwrap());
    assert_eq!(String::from_utf8(dw(&["report", &saved, "--format", "markdown"], None).stdout).unwrap(), md);
}

#[test]
fn witnesses_verify_from_the_report() {
    let dir = TempDir::new().unwrap();
    let f = spec_file(&dir);
    let cases: Vec<Vec<&str>> = vec![
        vec!["entails", "twoT", "{(0,0) (1,1)}"],
        vec!["--file", &f, "entails", "bare", "le"],
        vec!["--file", &f, "duality", "chain3", "bare"],
        vec!["clone-entails", "{(0,1) (1,0)}", "{(0,0) (0,1) (1,1)}", "--carrier", "2"],
        vec!["endoprimal", "lat2", "-k", "3"],
        vec!["injectivity-sweep", "rdiscT", "--power-bound", "1"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let o = dw(args, None);
        assert!(code(&o) < 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(json(&o).get("witness").is_some(), "{args:?}");
        let saved = save(&dir, &format!("w{i}.json"), &o);
        let mut v = vec!["verify-witness", saved.as_str()];
        if args[0] == "--file" {
            v.extend(["--file", &f]);
        }
        let out = dw(&v, None);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("verified"));
    }
}

#[test]
fn tampered_witnesses_and_inputs_are_rejected() {
    let dir = TempDir::new().unwrap();
    let f = spec_file(&dir);
    let o = dw(&["--file", &f, "duality", "chain3", "bare"], None);
    let mut r = json(&o);

    let mut w = r.clone();
    w["witness"]["values"] = serde_json::json!([0, 0]);
    let p = dir.path().join("t1.json");
    fs::write(&p, serde_json::to_string(&w).unwrap()).unwrap();
    let out = dw(&["verify-witness", p.to_str().unwrap(), "--file", &f], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("evaluation"));

    r["inputs"][0]["digest"] = Value::from("00");
    let p = dir.path().join("t2.json");
    fs::write(&p, serde_json::to_string(&r).unwrap()).unwrap();
    let out = dw(&["verify-witness", p.to_str().unwrap(), "--file", &f], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest mismatch"));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for args in [
        vec!["manifest", "--filter", "threeT"],
        vec!["fullness", "threeT_sigma"],
        vec!["injectivity-sweep", "rdiscT", "--power-bound", "1"],
    ] {
        let mut one = vec!["--jobs", "1"];
        one.extend(&args);
        let mut four = vec!["--jobs", "4"];
        four.extend(&args);
        let a = dw(&one, None);
        let b = dw(&four, None);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn timing_is_opt_in() {
    let o = dw(&["free-algebra", "chain2", "-k", "2", "--timing"], None);
    assert!(json(&o)["elapsed_ms"].is_u64());
    assert_eq!(json(&o)["verdict"], "size=6");
}
