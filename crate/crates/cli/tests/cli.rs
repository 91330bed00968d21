//! End-to-end runs of the `pva` binary on the sample jobs.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::reference;
use pva_core::liealg::LieType;
use pva_core::walg::IndexTable;
use pva_core::{Formal, Scalar};
use pva_tools::output::{matrix_from_json, matrix_json};
use pva_tools::table_file::{load_table, table_file_name};
use serde_json::Value;

fn job(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("jobs")
        .join(name)
}

fn pva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pva"))
        .args(args)
        .env_remove("PVA_TABLE_DIR")
        .output()
        .unwrap()
}

fn run_job(cmd: &[&str], name: &str, extra: &[&str]) -> Output {
    let path = job(name);
    let mut args: Vec<&str> = cmd.to_vec();
    args.extend(["--config", path.to_str().unwrap()]);
    args.extend(extra);
    pva(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gfz_virasoro_passes() {
    let o = run_job(&["check"], "gfz_virasoro.toml", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["result"]["skew"]["conditions"], serde_json::json!([]));
    assert_eq!(v["result"]["jacobi"]["conditions"], serde_json::json!([]));
}

#[test]
fn hydrodynamic_lists_conditions() {
    let o = run_job(&["check"], "hydrodynamic.toml", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    let conds = v["result"]["skew"]["conditions"].as_array().unwrap();
    assert_eq!(conds.len(), 10);
    let sym = conds
        .iter()
        .find(|c| c["indices"] == serde_json::json!([1, 2]) && c["lambda"] == "lambda")
        .unwrap();
    assert_eq!(sym["coefficient"], "-g12 + g21");
    assert!(conds
        .iter()
        .any(|c| c["coefficient"] == "b1_12 + b1_21 - D[g12,u1]"));
}

#[test]
fn mokhov_passes() {
    assert_eq!(
        run_job(&["check"], "mokhov.toml", &[]).status.code(),
        Some(0)
    );
}

#[test]
fn malformed_expression_is_reported() {
    let o = run_job(&["check"], "malformed.toml", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("matrix row 1, column 1"), "{err}");
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(
        run_job(&["walg", "init"], "gfz_virasoro.toml", &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pva(&["check", "--config", "/nonexistent/job.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pva(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "mode = \"pva-check\"\nmatrix = [[\"lambda\", \"0\"]]\n[algebra]\ngenerators = [\"u\"]\n",
    )
    .unwrap();
    let o = pva(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let dir_err = String::from_utf8(o.stderr).unwrap();
    assert!(dir_err.contains("matrix"), "{dir_err}");
}

#[test]
fn bracket_by_master_formula() {
    let o = run_job(&["bracket"], "virasoro_bracket.toml", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_of(&o)["result"]["bracket"],
        "u*u'' + u'^2 + 5*u*u'*lambda + 2*u^2*lambda^2 + c*u'*lambda^3 + c*u*lambda^4"
    );
}

#[test]
fn kdv_flows_coincide() {
    let o = run_job(&["flow"], "kdv_flow.toml", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["pass"], true);
    let text = stdout(&run_job(&["flow"], "kdv_flow.toml", &[]));
    assert_eq!(text.matches("du/dt = 3*u*u' + c*u'''").count(), 2, "{text}");
    assert!(text.contains("flows coincide"));
}

#[test]
fn so7_principal_weights() {
    let o = run_job(&["walg", "init"], "so7_principal.toml", &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    let gens = v["result"]["generators"].as_array().unwrap();
    let weights: Vec<&str> = gens.iter().map(|g| g["weight"].as_str().unwrap()).collect();
    assert_eq!(weights, ["2", "4", "6"]);
}

#[test]
fn sp4_minimal_has_six_generators() {
    let o = run_job(&["walg", "init"], "sp4_minimal.toml", &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_of(&o)["result"]["generators"]
            .as_array()
            .unwrap()
            .len(),
        6
    );
}

#[test]
fn sl3_brackets_match_closed_form() {
    let o = run_job(
        &["walg", "brackets", "--check"],
        "sl3_principal.toml",
        &["--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["result"]["skew"]["zero"], true);
    assert_eq!(v["result"]["jacobi"]["zero"], true);

    let w = reference::principal(LieType::A, &[(0, 2)], Scalar::one());
    let a = w.algebra();
    let formal = Formal::standard(1);
    let h = matrix_from_json(a, &formal, &v["result"]["H"]).unwrap();
    assert_eq!(
        reference::differences(a, &h, &reference::a2(a, true)),
        Vec::<String>::new()
    );
    // emit → parse → emit
    assert_eq!(matrix_json(a, &formal, &h), v["result"]["H"]);
}

#[test]
fn walg_is_deterministic() {
    for name in ["sl3_principal.toml", "sp4_minimal.toml"] {
        for fmt in ["text", "json"] {
            let a = run_job(&["walg", "brackets", "--check"], name, &["--format", fmt]);
            let b = run_job(
                &["walg", "brackets", "--check"],
                name,
                &["--format", fmt, "--threads", "1"],
            );
            assert_eq!(a.status.code(), Some(0));
            assert_eq!(a.stdout, b.stdout, "{name} {fmt}");
        }
    }
}

#[test]
fn virasoro_element() {
    let o = run_job(&["walg", "virasoro"], "sl3_principal.toml", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("L = w1"));
}

#[test]
fn table_gen_info_and_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pva(&["walg", "table", "gen", "--depth", "2", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join(table_file_name(2));
    assert_eq!(load_table(&path).unwrap(), IndexTable::generate(2));

    let o = pva(&[
        "walg",
        "table",
        "info",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["result"]["depth"], 2);
    assert_eq!(v["result"]["rows"], IndexTable::generate(2).len());

    // found through the environment
    let cfg = job("sl3_principal.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_pva"))
        .args(["walg", "brackets", "--config", cfg.to_str().unwrap()])
        .env("PVA_TABLE_DIR", d)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(&format!("index table: {}", path.display())));
}

#[test]
fn shallow_table_names_needed_depth() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.txt");
    assert_eq!(
        pva(&[
            "walg",
            "table",
            "gen",
            "--depth",
            "1",
            "--out",
            path.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    let o = run_job(
        &["walg", "brackets"],
        "sl3_principal.toml",
        &["--table", path.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains('2') && err.contains("depth"), "{err}");
}

#[test]
fn corrupt_table_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    let info = |body: &str| {
        std::fs::write(&path, body).unwrap();
        let o = pva(&["walg", "table", "info", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        String::from_utf8(o.stderr).unwrap()
    };
    let err = info("depth 1\n0 1 x : 1\n");
    assert!(err.contains(":2") && err.contains("`x`"), "{err}");
    let err = info("depth 1\n0 1 1 : 7\n");
    assert!(err.contains("chain condition"), "{err}");
}
