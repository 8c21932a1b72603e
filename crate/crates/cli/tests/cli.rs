use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> String {
    root().join("scenarios").join(format!("{name}.norm")).display().to_string()
}

fn golden(name: &str) -> String {
    let path = root().join("crates/core/tests/golden").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn deontic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deontic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn turn_with_contrapositive_on_both_engines() {
    let o = deontic(&["turn", &scenario("wst_naive_7"), "c(l,K)", "--contrapose", "--engine", "both"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("query: turn □c(l,K) [engine=both]\nanswer: yes"));
}

#[test]
fn turn_without_contrapositive_is_no() {
    let o = deontic(&["turn", &scenario("wst_naive_7"), "c(l,K)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("answer: no"));
}

#[test]
fn chisholm_check_reports_inconsistency() {
    let o = deontic(&["check", &scenario("chisholm")]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("inconsistent"));
    assert!(out.contains("refutation: 2 closed branch(es)"));
}

#[test]
fn translate_prints_twelve_rows_then_clauses() {
    let o = deontic(&["translate", &scenario("wst_contrapose_7")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let (listing, clauses) = out.split_once("\n\n").unwrap();
    let rows: Vec<&str> = listing.lines().collect();
    assert_eq!(rows.len(), 12);
    assert!(rows[0].ends_with("|  c(n,7)"));
    assert!(rows[5].ends_with("|  ∀r.(c(l,A) ⊔ c(l,K))"));
    assert!(rows[11].ends_with("|  ⊤ ⊑ ∃r.⊤"));
    assert!(clauses.contains("-> exists r.top"));
}

#[test]
fn outputs_match_golden_files() {
    let cases: [(&[&str], &str); 4] = [
        (&["translate"], "translate.txt"),
        (&["tableau"], "tableau.txt"),
        (&["queries"], "queries.txt"),
        (&["queries", "--format", "json"], "queries.json"),
    ];
    for name in ["wst_naive_A", "wst_contrapose_7", "social_contract", "suppression", "multi_modal"] {
        for (args, suffix) in cases {
            let mut full: Vec<&str> = vec![args[0]];
            let file = scenario(name);
            full.push(&file);
            full.extend(&args[1..]);
            let o = deontic(&full);
            assert_eq!(stdout(&o), golden(&format!("{name}.{suffix}")), "{name} {args:?}");
        }
    }
    let file = scenario("chisholm");
    let o = deontic(&["queries", &file]);
    assert_eq!(stdout(&o), golden("chisholm.queries.txt"));
}

#[test]
fn queries_exit_code_is_the_worst_answer() {
    assert_eq!(code(&deontic(&["queries", &scenario("wst_contrapose_7")])), 0);
    assert_eq!(code(&deontic(&["queries", &scenario("wst_naive_7")])), 1);
}

#[test]
fn parse_error_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.norm");
    fs::write(&path, "atom p\nnorm p => O (p\n").unwrap();
    let o = deontic(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.norm:3:1: syntax error: expected `)`"), "{}", stderr(&o));
}

#[test]
fn nested_obligation_on_tableau_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested.norm");
    fs::write(&path, "atom p\nnorm O O p\n").unwrap();
    let o = deontic(&["obligations", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = deontic(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn undeclared_argument_atom_exits_2() {
    let o = deontic(&["turn", &scenario("wst_naive_A"), "c(l,Q)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("undeclared atom"));
}

#[test]
fn missing_file_and_bad_usage_exit_2() {
    assert_eq!(code(&deontic(&["check", "/nonexistent.norm"])), 2);
    assert_eq!(code(&deontic(&["frobnicate"])), 2);
}

#[test]
fn branch_limit_exits_3() {
    let o = deontic(&["check", &scenario("wst_contrapose_7"), "--max-branches", "1"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("resource limit"));
}

#[test]
fn json_model_has_stable_fields() {
    let o = deontic(&["model", &scenario("suppression"), "study_late", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["unverifiable"][0], "□library_open");
    assert!(v["minimal_sets"].is_array());
    assert!(v["model"]["worlds"].is_array());
}

#[test]
fn oracle_agrees_on_chisholm() {
    let o = deontic(&["oracle", &scenario("chisholm")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("unsat within 3 world(s)"));
    let o = deontic(&["oracle", &scenario("suppression")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn tableau_dot_output() {
    let o = deontic(&["tableau", &scenario("wst_naive_A"), "--dot"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn entails_answers() {
    let o = deontic(&["entails", &scenario("suppression"), "study_late"]);
    assert_eq!(code(&o), 0);
    let o = deontic(&["entails", &scenario("chisholm"), "p"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("answer: inconsistent"));
}
