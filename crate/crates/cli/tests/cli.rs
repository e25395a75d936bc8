use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_warpgeom");
const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn validate(doc: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(4), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate(&doc);
    doc
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect())
        .collect()
}

#[test]
fn classify_steady_state() {
    let doc = json(&["classify", "--preset", "steady-state"]);
    assert_eq!(doc["command"], "classify");
    assert_eq!(doc["results"]["verdict"], "non-existence");
}

#[test]
fn classify_expression() {
    let doc = json(&[
        "classify",
        "--f",
        "exp(-t^2)",
        "--interval",
        "(-inf,inf)",
        "--n",
        "3",
        "--region",
        "[-10,10]",
    ]);
    assert_eq!(doc["results"]["verdict"], "unique-slices");
    let slices = doc["results"]["slices"].as_array().unwrap();
    assert_eq!(slices.len(), 1);
    assert!(num(&slices[0]).abs() < 1e-12);
}

#[test]
fn parse_error_reports_position() {
    let o = run(&["classify", "--f", "exp(t", "--interval", "(-inf,inf)", "--region", "[-1,1]"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("index 5"), "{e}");
    assert!(e.contains("     ^"), "{e}");
    assert!(o.stdout.is_empty());
}

#[test]
fn classify_text_format() {
    let o = run(&["classify", "--preset", "minkowski", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert!(t.contains("verdict: inconclusive") && t.contains("failure mode: simultaneous-vanishing"), "{t}");
}

#[test]
fn analyze_dust_row() {
    let o = run(&["analyze", "--preset", "einstein-de-sitter", "--region", "[1,1]", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = stdout(&o);
    assert!(t.starts_with("t,f,df,d2f,hubble,log_f_second,criterion,rho,p,criterion_fluid_form\n"));
    let rows = csv_rows(&t);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1.0);
    assert!(rows[0][8].abs() <= 1e-12);
    assert!((rows[0][6] - 22.0 / 9.0).abs() <= 1e-12);
}

#[test]
fn analyze_minkowski_is_flat() {
    let o = run(&["analyze", "--preset", "minkowski", "--region", "[-3,3]", "--samples", "7"]);
    for row in csv_rows(&stdout(&o)) {
        assert_eq!(row[1], 1.0);
        assert!(row[2..].iter().all(|v| *v == 0.0), "{row:?}");
    }
}

#[test]
fn analyze_gaussian_criterion() {
    let doc = json(&[
        "analyze", "--preset", "gaussian", "--region", "[0,2]", "--samples", "5", "--format", "json",
    ]);
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let t = num(&r["t"]);
        let want = 2.0 * 3.0 + 4.0 * t * t;
        assert!((num(&r["criterion"]) - want).abs() <= 1e-9 * want, "{r}");
    }
}

#[test]
fn check_maximal_slice() {
    let doc = json(&[
        "check", "--preset", "gaussian", "--graph", "0", "--domain", "[-1,1]x[-1,1]", "--res", "65",
    ]);
    let checks = doc["results"]["checks"].as_array().unwrap();
    let get = |name: &str| checks.iter().find(|c| c["check"] == name).unwrap().clone();
    assert!(num(&get("mean-curvature")["values"]["residual"]) <= 1e-6);
    assert!(num(&get("mean-curvature")["values"]["max_abs_h"]) <= 1e-6);
    assert_eq!(get("lemma1")["status"], "pass");
    assert_eq!(num(&get("lemma1")["values"]["min_slack"]), 0.0);
    assert_eq!(doc["results"]["all_passed"], true);
    assert_eq!(doc["results"]["spacetime"]["n"], 2);
}

#[test]
fn check_tilted_plane() {
    let doc = json(&["check", "--preset", "minkowski", "--graph", "0.5*x_1", "--domain", "[-1,1]x[-1,1]"]);
    let checks = doc["results"]["checks"].as_array().unwrap();
    let get = |name: &str| checks.iter().find(|c| c["check"] == name).unwrap().clone();
    assert!(num(&get("mean-curvature")["values"]["max_abs_h"]) < 1e-12);
    assert!(num(&get("lemma1")["values"]["min_slack"]).abs() < 1e-12);
}

#[test]
fn check_hyperboloid_skips_lemma1() {
    let args = [
        "check",
        "--preset",
        "minkowski",
        "--graph",
        "sqrt(1+x_1^2+x_2^2)",
        "--domain",
        "[-1,1]x[-1,1]",
        "--res",
        "65",
        "--checks",
        "mean-curvature,lemma1",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = json(&args);
    let checks = doc["results"]["checks"].as_array().unwrap();
    let h = num(&checks[0]["values"]["max_abs_h"]);
    assert!((h - 1.0).abs() < 1e-2, "{h}");
    assert_eq!(checks[1]["status"], "skipped");
    assert!(checks[1]["reason"].as_str().unwrap().contains("not maximal"));
    assert!(doc["diagnostics"][0].as_str().unwrap().starts_with("lemma1"));

    let mut strict = args.to_vec();
    strict.push("--require-maximal");
    assert_eq!(code(&strict), 4);
}

#[test]
fn check_from_node_array() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    let res = 17;
    let mut vals = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let (x, y) = (-1.0 + 2.0 * i as f64 / 16.0, -1.0 + 2.0 * j as f64 / 16.0);
            vals.push(0.3 * x - 0.2 * y + 0.1);
        }
    }
    std::fs::write(&path, warpgeom::hypersurface::write_node_array(&[res, res], &vals)).unwrap();
    let p = path.to_str().unwrap();
    let doc = json(&["check", "--preset", "minkowski", "--nodes", p, "--domain", "[-1,1]x[-1,1]"]);
    assert_eq!(doc["results"]["graph"]["res"], serde_json::json!([17, 17]));
    assert_eq!(doc["results"]["all_passed"], true);
    assert_eq!(
        code(&["check", "--preset", "minkowski", "--nodes", p, "--domain", "[-1,1]x[-1,1]", "--res", "9"]),
        2
    );
    assert_eq!(code(&["check", "--preset", "minkowski", "--nodes", p, "--domain", "[-1,1]x[-1,1]x[-1,1]"]), 2);
}

#[test]
fn presets_listing() {
    let o = run(&["presets"]);
    let t = stdout(&o);
    let names: Vec<&str> = t.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        names,
        ["einstein-de-sitter", "friedmann-like", "gaussian", "minkowski", "radiation", "steady-state"]
    );
    let doc = json(&["presets", "--json"]);
    let list = doc["results"].as_array().unwrap();
    assert_eq!(list.len(), 6);
    assert!(list.iter().any(|p| p["name"] == "steady-state" && p["expression"] == "exp(t)"));
    let doc = json(&["presets", "--show", "gaussian", "--json"]);
    let e = &doc["results"]["expected"];
    assert_eq!(e["verdict"]["value"], "unique-slices");
    assert_eq!(e["slices"]["value"], serde_json::json!([0.0]));
    assert!(e["verdict"]["provenance"]["note"].as_str().unwrap().len() > 3);
    let t = stdout(&run(&["presets", "--show", "gaussian"]));
    assert!(t.contains("provenance.verdict = "), "{t}");
}

#[test]
fn preset_file_is_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("fr.conf");
    let text = stdout(&run(&["presets", "--show", "friedmann-like"]));
    std::fs::write(&conf, text).unwrap();
    let c = conf.to_str().unwrap();
    let doc = json(&["classify", "--config", c]);
    assert_eq!(doc["results"]["verdict"], "unique-slices");
    assert_eq!(doc["results"]["region"], "[-0.9,0.9]");
    // flags win over the file
    let doc = json(&["classify", "--config", c, "--param", "a=2"]);
    assert_eq!(doc["results"]["region"], "[-1.8,1.8]");
    assert_eq!(doc["config_echo"]["param.a"], "2");
    let doc = json(&["classify", "--config", c, "--region", "[0.1,0.5]"]);
    assert_eq!(doc["results"]["verdict"], "non-existence");
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = run(&["classify", "--preset", "gaussian", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    validate(&doc);
    assert_eq!(code(&["classify", "--preset", "gaussian", "--output", "/nonexistent/dir/x.json"]), 2);
}

#[test]
fn all_json_outputs_validate() {
    let runs: [&[&str]; 10] = [
        &["classify", "--preset", "steady-state"],
        &["classify", "--preset", "einstein-de-sitter"],
        &["classify", "--preset", "radiation", "--region", "[0.1,inf)", "--truncation", "1e4"],
        &["classify", "--preset", "minkowski"],
        &["analyze", "--preset", "friedmann-like", "--format", "json", "--samples", "9"],
        &["analyze", "--f", "cosh(t)", "--region", "[-1,1]", "--format", "json", "--samples", "3"],
        &["check", "--preset", "gaussian", "--graph", "0.2*sin(x_1)", "--domain", "[-1,1]x[-1,1]"],
        &["check", "--f", "1", "--graph", "0.1*x_1+0.2*x_2-0.3*x_3", "--domain", "[0,1]x[0,1]x[0,1]", "--res", "9"],
        &["presets", "--json"],
        &["presets", "--json", "--show", "radiation"],
    ];
    for args in runs {
        json(args);
    }
}

/// Malformed-input matrix: every documented error path and its exit code.
#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let bad_conf = dir.path().join("bad.conf");
    std::fs::write(&bad_conf, "f = exp(t)\nthis line is wrong\n").unwrap();
    let unknown_key = dir.path().join("unknown.conf");
    std::fs::write(&unknown_key, "f = exp(t)\nspeed = 3\n").unwrap();
    let bad_nodes = dir.path().join("nodes.txt");
    std::fs::write(&bad_nodes, "dims 5 5\n1 2 3\n").unwrap();
    let (bc, uk, bn) = (
        bad_conf.to_str().unwrap(),
        unknown_key.to_str().unwrap(),
        bad_nodes.to_str().unwrap(),
    );
    let dom = "[-1,1]x[-1,1]";
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--help"], 0),
        (vec!["--version"], 0),
        (vec!["presets"], 0),
        (vec!["classify", "--preset", "gaussian"], 0),
        (vec![], 2),
        (vec!["frobnicate"], 2),
        (vec!["classify", "--bogus"], 2),
        (vec!["classify"], 2),
        (vec!["classify", "--preset", "gaussian", "--f", "exp(t)"], 2),
        (vec!["classify", "--preset", "de-sitter"], 2),
        (vec!["classify", "--f", "exp(t", "--region", "[0,1]"], 2),
        (vec!["classify", "--f", "exp(t)*x", "--region", "[0,1]"], 2),
        (vec!["classify", "--f", "exp(b*t)", "--region", "[0,1]"], 2),
        (vec!["classify", "--f", "exp(t)", "--region", "[0,1"], 2),
        (vec!["classify", "--f", "exp(t)", "--interval", "(0,1)", "--region", "[0,2]"], 2),
        (vec!["classify", "--f", "exp(t)"], 2),
        (vec!["classify", "--preset", "gaussian", "--n", "1"], 2),
        (vec!["classify", "--preset", "gaussian", "--n", "two"], 2),
        (vec!["classify", "--preset", "gaussian", "--param", "a"], 2),
        (vec!["classify", "--preset", "gaussian", "--format", "xml"], 2),
        (vec!["classify", "--preset", "gaussian", "--tol", "-1"], 2),
        (vec!["classify", "--config", bc], 2),
        (vec!["classify", "--config", uk], 2),
        (vec!["classify", "--config", "/nonexistent.conf"], 2),
        (vec!["analyze", "--preset", "gaussian", "--samples", "0"], 2),
        (vec!["analyze", "--preset", "gaussian", "--region", "[0,inf)"], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "0"], 2),
        (vec!["check", "--preset", "gaussian", "--domain", dom], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "x_3", "--domain", dom], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "0", "--domain", "[-1,1]x"], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "0", "--domain", dom, "--res", "3"], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "0", "--domain", dom, "--n", "3"], 2),
        (vec!["check", "--preset", "gaussian", "--graph", "0", "--domain", dom, "--checks", "all"], 2),
        (vec!["check", "--preset", "gaussian", "--nodes", bn, "--domain", dom], 2),
        (vec!["presets", "--show", "nope"], 2),
        // well-formed input that cannot be evaluated
        (vec!["classify", "--f", "t", "--interval", "(-inf,inf)", "--region", "[-1,1]"], 3),
        (vec!["classify", "--f", "log(t)", "--interval", "(0,inf)", "--region", "[0.5,2]"], 3),
        (vec!["analyze", "--f", "sqrt(1-t)", "--interval", "(-inf,inf)", "--region", "[0,2]"], 3),
        (vec!["check", "--preset", "gaussian", "--graph", "3*x_1", "--domain", dom], 3),
        (vec!["check", "--preset", "friedmann-like", "--graph", "2+x_1", "--domain", dom], 3),
        (vec!["check", "--f", "1", "--graph", "log(x_1)", "--domain", dom], 3),
        // a requested check fails
        (vec!["check", "--preset", "minkowski", "--graph", "sqrt(1+x_1^2+x_2^2)", "--domain", dom, "--tol", "1e-9"], 4),
        (vec!["check", "--preset", "gaussian", "--graph", "0.2*x_1", "--domain", dom, "--require-maximal"], 4),
    ];
    let mut bad = Vec::new();
    for (args, want) in &cases {
        let o = run(args);
        let got = o.status.code().unwrap();
        if got != *want {
            bad.push(format!("{args:?}: want {want}, got {got}: {}", stderr(&o)));
        }
        if *want == 2 || *want == 3 {
            if !args.is_empty() && !stderr(&o).contains("error") {
                bad.push(format!("{args:?}: no message on stderr"));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
    for code in [0, 2, 3, 4] {
        assert!(cases.iter().any(|(_, c)| *c == code));
    }
}

#[test]
fn json_is_byte_identical_across_runs() {
    let runs: [&[&str]; 4] = [
        &["classify", "--preset", "friedmann-like"],
        &["analyze", "--preset", "radiation", "--format", "json"],
        &["check", "--preset", "gaussian", "--graph", "0.3+0.1*x_1*x_2", "--domain", "[-1,1]x[-1,1]"],
        &["presets", "--json", "--show", "minkowski"],
    ];
    for args in runs {
        let (a, b) = (run(args), run(args));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn library_entry_point_matches_binary() {
    let args = ["warpgeom", "classify", "--preset", "gaussian"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let c = warpgeom_cli::run(args, &mut out, &mut err);
    assert_eq!(c, 0);
    assert_eq!(out, run(&args[1..]).stdout);
    assert!(Path::new(BIN).exists());
}
