//! Runs the `qk` binary and compares stdout and exit codes against files in
//! `tests/golden`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_qk"))
        .args(args)
        .current_dir(dir("data"))
        .output()
        .expect("qk runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().expect("exit code"),
    )
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (stdout, stderr, got) = run(args);
    assert_eq!(got, code, "{name}: exit code\nstderr: {stderr}");
    let path = dir("golden").join(format!("{name}.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &stdout).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stdout, expected, "{name}: stdout differs from {}", path.display());
}

#[test]
fn descendent_commands() {
    golden("descendent_trivial", &["descendent", "0,0,0"], 0);
    golden("descendent_four_points", &["descendent", "2,3,0,1"], 0);
    golden("descendent_not_reducible", &["descendent", "2,2,2,2"], 2);
    golden("descendent_batch", &["descendent", "--input", "descendent_batch.json"], 2);
}

#[test]
fn potential_commands() {
    golden("potential_point_t5", &["potential", "--target", "point", "--t-order", "5"], 0);
    golden("potential_p1_t3", &["potential", "--target", "projective:1", "--t-order", "3"], 0);

    let coeff = |args: &[&str], exp: serde_json::Value| -> String {
        let doc: serde_json::Value = serde_json::from_str(&run(args).0).unwrap();
        let terms = doc["terms"].as_array().unwrap();
        let term = terms.iter().find(|t| t["exp"] == exp).expect("term present");
        term["value"].as_str().unwrap().to_string()
    };
    let point = ["potential", "--target", "point", "--t-order", "5"];
    assert_eq!(coeff(&point, serde_json::json!([3])), "1/6");
    assert_eq!(coeff(&point, serde_json::json!([4])), "1/24");
    assert_eq!(coeff(&point, serde_json::json!([5])), "1/120");
    let p1 = ["potential", "--target", "projective:1", "--t-order", "3"];
    assert_eq!(coeff(&p1, serde_json::json!([3, 0, 0])), "1/6");
}

#[test]
fn frobenius_commands() {
    golden("frobenius_point_t8", &["frobenius-check", "--target", "point", "--t-order", "8"], 0);
    golden(
        "frobenius_p1_quantum",
        &["frobenius-check", "--input", "p1_quantum.json", "--t-order", "6", "--q-order", "3"],
        0,
    );
    golden("frobenius_p1_quartic", &["frobenius-check", "--input", "p1_quartic.json", "--t-order", "6"], 3);

    let doc: serde_json::Value =
        serde_json::from_str(&run(&["frobenius-check", "--input", "p1_quartic.json", "--t-order", "6"]).0).unwrap();
    assert_eq!(doc["wdvv"]["witness"]["monomial"], serde_json::json!([0, 2, 0]));
    assert_eq!(doc["wdvv"]["witness"]["value"], "12");
}

#[test]
fn table_commands() {
    golden("table_p2_generated", &["table-check", "--target", "projective:2", "--t-order", "5"], 0);
    golden("table_p1_perturbed", &["table-check", "--input", "p1_perturbed_table.json"], 3);

    let doc: serde_json::Value =
        serde_json::from_str(&run(&["table-check", "--input", "p1_perturbed_table.json"]).0).unwrap();
    assert_eq!(doc["violations"].as_array().unwrap().len(), 1);
}

#[test]
fn qde_commands() {
    golden("qde_point", &["qde-check", "--target", "point", "--t-order", "8", "--desc-order", "8"], 0);
    golden(
        "qde_point_perturbed",
        &["qde-check", "--input", "point_desc_perturbed.json", "--t-order", "8", "--desc-order", "8"],
        3,
    );
    golden("kring_p2", &["kring", "info", "--target", "projective:2"], 0);
}

#[test]
fn input_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["frobenius-check", "--input", "no_such_file.json"],
        &["potential", "--t-order", "2"],
        &["descendent", "1,x,0"],
        &["descendent", "0,0"],
        &["kring", "info", "--target", "torus"],
        &["table-check", "--input", "descendent_batch.json"],
    ];
    for args in cases {
        let (stdout, stderr, code) = run(args);
        assert_eq!(code, 1, "{args:?}: {stderr}");
        assert!(stdout.is_empty(), "{args:?}");
        assert!(stderr.starts_with("error: "), "{args:?}: {stderr}");
    }
}

#[test]
fn output_flag_and_determinism() {
    let target = Path::new(env!("CARGO_TARGET_TMPDIR")).join("frobenius_p1.json");
    let path = target.to_str().unwrap();
    let args = ["frobenius-check", "--target", "projective:1", "--t-order", "5", "--seed", "7"];
    let (first, _, _) = run(&args);
    let (second, _, _) = run(&args);
    assert_eq!(first, second);
    let mut with_output = args.to_vec();
    with_output.extend(["--output", path]);
    let (stdout, _, code) = run(&with_output);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(fs::read_to_string(&target).unwrap(), first);
    assert!(first.contains("\"seed\": 7"));
}
