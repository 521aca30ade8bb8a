use std::process::{Command, Output};

use serde_json::Value;

fn treewilf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treewilf")).args(args).env_remove("WILF_WORKERS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_prints_summary_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("n4.json");
    let csv = dir.path().join("runs.csv");
    let args = ["classify", "-n", "4", "-K", "40", "--mode", "av", "-o"];
    let o = treewilf(&[&args[..], &[report.to_str().unwrap(), "--csv", csv.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "n=4 mode=av K=40 classes=2");

    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["class_count"], 2);
    assert_eq!(json["bound"]["kind"], "lower");
    let members: usize =
        json["classes"].as_array().unwrap().iter().map(|c| c["members"].as_array().unwrap().len()).sum();
    assert_eq!(members, 5);

    let rows = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "n,K,mode,class_count,wall_seconds");
    assert!(lines[1].starts_with("4,40,av,2,"), "{}", lines[1]);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let one = treewilf(&["classify", "-n", "5", "-K", "30", "--mode", "en", "--workers", "1"]);
    let three = treewilf(&["classify", "-n", "5", "-K", "30", "--mode", "en", "--workers", "3", "--no-mirror"]);
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);
    assert!(stderr(&one).contains("n=5 mode=en K=30 classes=3"));
}

#[test]
fn classify_validates_before_computing() {
    let o = treewilf(&["classify", "-n", "4", "-K", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("-K must be at least"));
    let o = treewilf(&["classify", "-n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--allow-long"));
    let o = treewilf(&["classify", "-n", "4", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn series_kinds() {
    let o = treewilf(&["series", "--pattern", "mxx", "--kind", "av", "-K", "5"]);
    assert_eq!(stdout(&o).trim(), "x");

    let o = treewilf(&["series", "--pattern", "mmxxx", "--kind", "operad", "-K", "10"]);
    let expected: Vec<String> = (1..=10).map(|k| if k == 1 { "z".into() } else { format!("z^{k}") }).collect();
    assert_eq!(stdout(&o).trim(), expected.join(" + "));

    let o = treewilf(&["series", "--pattern", "mmxxx", "--kind", "en", "-K", "7", "--json"]);
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["vars"], serde_json::json!(["x", "y"]));
    // Trees with 7 vertices: 1 avoider, 3 with one occurrence, 1 (the left comb) with two.
    let terms = json["terms"].as_array().unwrap();
    assert!(terms.contains(&serde_json::json!([[7, 0], "1"])));
    assert!(terms.contains(&serde_json::json!([[7, 1], "3"])));
    assert!(terms.contains(&serde_json::json!([[7, 2], "1"])));
}

#[test]
fn parse_errors_point_at_the_symbol() {
    let o = treewilf(&["series", "--pattern", "mmqxx"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("unknown symbol 'q' at position 2"), "{err}");
    assert!(err.contains("\n      ^"), "{err}");

    let o = treewilf(&["series", "--pattern", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("degenerate"));
}

#[test]
fn grammar_and_system_exports() {
    let o = treewilf(&["grammar", "--patterns", "mmxxx"]);
    assert!(o.status.success());
    let bnf = stdout(&o);
    assert!(bnf.contains("T[mxmxx] -> m T[x] T[mxmxx]"));
    assert_eq!(bnf.lines().filter(|l| l.starts_with("S ->")).count(), 3);
    assert!(stderr(&o).contains("4 nonterminals including S"));

    let o = treewilf(&["grammar", "--patterns", "mmxxx", "--format", "json"]);
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["nonterminals"].as_array().unwrap().len(), 4);

    let o = treewilf(&["system", "--patterns", "mmxxx", "--method", "cs"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("H[")).count(), 3);
    assert!(text.contains("H[mxx] = x*H[x]^2"));

    let o = treewilf(&["system", "--patterns", "mmxxx", "--method", "stamp"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("vars: z"));
}

#[test]
fn patterns_from_file_with_comments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("patterns.txt");
    std::fs::write(&path, "# associativity\nmmxxx\n\ntxxx   # ternary\n").unwrap();
    let o = treewilf(&["series", "--patterns-file", path.to_str().unwrap(), "--alphabet", "x:0,m:2,t:3", "-K", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // x, mxx, then mxmxx only at 5 vertices.
    assert_eq!(stdout(&o).trim(), "x + x^3 + x^5");
}

#[test]
fn eliminate_catalan_and_bounds() {
    let o = treewilf(&["eliminate", "--patterns", ""]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "x*G^2 - G + x");

    let o = treewilf(&["eliminate", "--patterns", "mmxxmxx", "--max-unknowns", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn verify_suites() {
    let o = treewilf(&["verify", "--suite", "eq12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("divisibility: PASS"));

    let o = treewilf(&["verify", "--suite", "grammar", "--pattern", "mmxxx", "--max-len", "15"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("grammar: PASS (1 pattern sets checked)"));

    let o = treewilf(&["verify", "--suite", "oracle", "--max-leaves", "4", "--max-nodes", "7"]);
    assert!(o.status.success(), "{}", stdout(&o));
}
