use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn kdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_running_example() {
    let out = kdep(&["check", &data("expenses.json"), &data("expenses.inds")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_reports_the_violated_ind() {
    let out = kdep(&[
        "--json",
        "check",
        &data("warehouse.json"),
        &data("warehouse.inds"),
    ]);
    assert_eq!(code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["satisfied"], false);
    let rows = v["inds"].as_array().unwrap();
    let flags: Vec<bool> = rows
        .iter()
        .map(|r| r["satisfied"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, true, false]);
    assert_eq!(rows[2]["violations"][0]["key"][0], "yam");
    assert_eq!(rows[2]["violations"][0]["lhs"], "a");
    assert_eq!(rows[2]["violations"][0]["rhs"], "0");
}

#[test]
fn malformed_input_is_exit_2() {
    let out = kdep(&["check", &data("malformed.json"), &data("expenses.inds")]);
    assert_eq!(code(&out), 2);
    let out = kdep(&["check", &data("missing.json"), &data("expenses.inds")]);
    assert_eq!(code(&out), 2);
    let out = kdep(&[
        "entail",
        &data("grant_budget.inds"),
        "Grant[proj <= Budget[proj]",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn entail_over_naturals_uses_weak_symmetry() {
    let out = kdep(&[
        "--json",
        "entail",
        &data("grant_budget.inds"),
        "Grant[proj] <= Budget[proj]",
        "--monoid",
        "naturals",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["entailed"], true);
    assert_eq!(v["proof"]["rule"], "weak-symmetry");
}

#[test]
fn entail_over_booleans_gives_a_countermodel() {
    let out = kdep(&[
        "--json",
        "entail",
        &data("grant_budget.inds"),
        "Grant[proj] <= Budget[proj]",
        "--monoid",
        "boolean",
    ]);
    assert_eq!(code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["entailed"], false);
    let db = &v["countermodel"]["database"];
    assert_eq!(db["monoid"], "boolean");
    // the countermodel has a granted project without a budget
    let grants = db["relations"]["Grant"].as_array().unwrap();
    let budgets = db["relations"]["Budget"].as_array().unwrap();
    assert!(grants.len() > budgets.len());
}

#[test]
fn balanced_flag_adds_the_balance_axiom() {
    let sigma = data("budget_within_grant.inds");
    let goal = "Grant[proj] <= Budget[proj]";
    let plain = kdep(&["entail", &sigma, goal, "--monoid", "naturals"]);
    assert_eq!(code(&plain), 1);
    let balanced = kdep(&[
        "--json",
        "entail",
        &sigma,
        goal,
        "--monoid",
        "naturals",
        "--balanced",
    ]);
    assert_eq!(code(&balanced), 0);
    assert_eq!(json_of(&balanced)["method"], "balanced_augmentation");
}

#[test]
fn unknown_monoid_is_exit_2() {
    let out = kdep(&[
        "entail",
        &data("grant_budget.inds"),
        "Grant[proj] <= Budget[proj]",
        "--monoid",
        "integers",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("integers"));
}

#[test]
fn plus_chase_of_the_shift_hits_the_step_limit() {
    let trace = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("shift_trace.json");
    let out = kdep(&[
        "chase",
        &data("shift.inds"),
        "--canonical",
        "R[A,B] <= R[B,C]",
        "--schema",
        &data("shift_schema.json"),
        "--plus",
        "--step-limit",
        "500",
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(v["outcome"], "step_limit_exceeded");
    assert_eq!(v["steps"].as_array().unwrap().len(), 500);
}

#[test]
fn plus_chase_of_the_symmetric_pair_terminates() {
    let out = kdep(&[
        "--json",
        "chase",
        &data("symmetric.inds"),
        "--canonical",
        "R[A,B] <= R[B,C]",
        "--schema",
        &data("shift_schema.json"),
        "--plus",
    ]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["outcome"], "terminated");
    assert_eq!(v["result"]["relations"]["R"].as_array().unwrap().len(), 4);
}

#[test]
fn classical_chase_terminates() {
    let out = kdep(&[
        "chase",
        &data("shift.inds"),
        "--canonical",
        "R[A,B] <= R[B,C]",
        "--schema",
        &data("shift_schema.json"),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn chase_from_a_database() {
    let out = kdep(&[
        "--json",
        "chase",
        &data("grant_budget.inds"),
        "--start",
        &data("expenses.json"),
        "--plus",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn classify_builtins() {
    let out = kdep(&["classify", "boolean"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["properties"]["self_absorptive"], true);

    let out = kdep(&["classify", "monogenic:2,3"]);
    let v = json_of(&out);
    assert_eq!(v["properties"]["weakly_absorptive"], true);
    assert_eq!(v["properties"]["self_absorptive"], true);
    assert_eq!(v["properties"]["provenance"], "computed");
}

#[test]
fn classify_rejects_a_non_associative_table() {
    let out = kdep(&["classify", &data("bad_table.json")]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("associativity fails for (x, x, y)"), "{err}");
}

#[test]
fn derive_under_each_system() {
    let goal = "Grant[proj] <= Budget[proj]";
    let sigma = data("grant_budget.inds");
    assert_eq!(code(&kdep(&["derive", &sigma, goal, "--system", "ws"])), 0);
    assert_eq!(
        code(&kdep(&["derive", &sigma, goal, "--system", "standard"])),
        1
    );
    assert_eq!(
        code(&kdep(&["derive", &sigma, goal, "--system", "balance"])),
        0
    );
}

#[test]
fn oracle_finds_the_boolean_counterexample() {
    let sigma = data("grant_budget.inds");
    let goal = "Grant[proj] <= Budget[proj]";
    let out = kdep(&["--json", "oracle", &sigma, goal, "--max-tuples", "3"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["found"], true);
    let out = kdep(&[
        "oracle",
        &sigma,
        goal,
        "--monoid",
        "naturals",
        "--weights",
        "1,2",
    ]);
    assert_eq!(code(&out), 0);
    let out = kdep(&["oracle", &sigma, goal, "--max-tuples", "9", "--cap", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--json",
        "entail",
        &data("symmetric.inds"),
        "R[A] <= R[C]",
        "--monoid",
        "absorbed_naturals",
    ];
    let first = kdep(&args);
    let second = kdep(&args);
    assert_eq!(code(&first), code(&second));
    assert_eq!(first.stdout, second.stdout);
}
