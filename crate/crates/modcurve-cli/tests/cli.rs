//! End-to-end tests of the `modcurve` binary: golden text outputs (the
//! byte-exact contract), JSON well-formedness, exit codes, and determinism.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_modcurve"))
        .args(args)
        .output()
        .expect("binary should spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout must be UTF-8"),
        String::from_utf8(out.stderr).expect("stderr must be UTF-8"),
    )
}

#[test]
fn invariants_level_11_golden() {
    let (code, stdout, _) = run(&["invariants", "-N", "11"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "N psi nu2 nu3 nu_inf genus dim_S4 dim_M12 min_deg_w4\n\
         11 12 0 0 2 1 2 12 -\n"
    );
}

#[test]
fn invariants_range_includes_genus_zero_and_formula_rows() {
    let (code, stdout, _) = run(&["invariants", "--range", "2..14"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 14); // header + 13 levels
    // N=2: genus 0; N=14: min degree 4 in the last column
    assert_eq!(lines[1], "2 3 1 0 2 0 0 4 -");
    assert_eq!(lines[13], "14 24 0 0 4 1 4 24 4");
}

#[test]
fn invariants_requires_exactly_one_selector() {
    let (code, _, stderr) = run(&["invariants"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("exactly one of --level or --range"));
    let (code, _, _) = run(&["invariants", "-N", "5", "--range", "2..4"]);
    assert_eq!(code, 2);
}

#[test]
fn cusps_level_4_golden() {
    let (code, stdout, _) = run(&["cusps", "-N", "4"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "p/q k width\n\
         0/1 1 4\n\
         1/2 2 1\n\
         1/4 4 1\n\
         count=3 nu_inf=3 width_sum=6 psi=6\n"
    );
}

#[test]
fn cusps_json_is_well_formed() {
    let (code, stdout, _) = run(&["cusps", "-N", "6", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["N"], 6);
    assert_eq!(doc["nu_inf"], 4);
    assert_eq!(doc["psi"], 12);
    assert_eq!(doc["cusps"].as_array().unwrap().len(), 4);
}

#[test]
fn series_delta_golden() {
    let (code, stdout, _) = run(&["series", "--name", "delta", "--prec", "6"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "Delta = q - 24*q^2 + 252*q^3 - 1472*q^4 + 4830*q^5 + O(q^6)\n"
    );
}

#[test]
fn series_dilation_and_json() {
    let (code, stdout, _) = run(&["series", "--name", "delta", "-N", "2", "--prec", "5"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "Delta(2z) = q^2 - 24*q^4 + O(q^5)\n");
    let (code, stdout, _) = run(&["series", "--name", "j", "--prec", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["name"], "j");
}

#[test]
fn series_rejects_bad_precision() {
    let (code, _, stderr) = run(&["series", "--name", "delta", "--prec", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("prec must be >= 1"));
}

#[test]
fn modpoly_level_2_text_golden() {
    let (code, stdout, _) = run(&["modpoly", "-N", "2"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "# modular polynomial N=2\n\
         psi=3 deg_x=3 deg_y=3 total_degree=4 diag_degree=4\n\
         symmetric=true monic=true degree_formula_match=true kronecker_mod_N=true\n\
         3 0 1\n\
         2 2 -1\n\
         2 1 1488\n\
         2 0 -162000\n\
         1 2 1488\n\
         1 1 40773375\n\
         1 0 8748000000\n\
         0 3 1\n\
         0 2 -162000\n\
         0 1 8748000000\n\
         0 0 -157464000000000\n"
    );
}

#[test]
fn modpoly_json_has_stable_shape() {
    let (code, stdout, _) = run(&["modpoly", "-N", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["N"], 3);
    assert_eq!(doc["psi"], 4);
    assert_eq!(doc["total_degree"], 6);
    assert_eq!(doc["diag_degree"], 6);
    assert_eq!(doc["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn modpoly_rejects_out_of_policy_levels() {
    let (code, _, stderr) = run(&["modpoly", "-N", "1"]);
    assert_eq!(code, 2, "N=1 is a usage error: {stderr}");
    let (code, _, _) = run(&["modpoly", "-N", "9"]);
    assert_eq!(code, 2);
}

#[test]
fn modpoly_out_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("phi2");
    let (code, stdout, _) = run(&["modpoly", "-N", "2", "--out", base.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("wrote"));
    let text = std::fs::read_to_string(base.with_extension("txt")).unwrap();
    let (_, direct, _) = run(&["modpoly", "-N", "2"]);
    assert_eq!(text, direct, "file text must equal stdout text");
    let json = std::fs::read_to_string(base.with_extension("json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["N"], 2);
}

#[test]
fn model_pair_search_level_2() {
    let (code, stdout, _) = run(&["model", "-N", "2", "--bound", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("# model search N=2 weight=12 bound=1\n"));
    assert!(stdout.contains("pairs_found=8"));
    assert!(stdout.contains("degree=3"));
    assert!(!stdout.contains("pairs_found=0"));
}

#[test]
fn model_weight_24_level_2() {
    let (code, stdout, _) = run(&["model", "-N", "2", "--weight", "24"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("degree=4 predicted=4 kernel_dim=1"));
    assert!(stdout.contains("labels Delta(2z)*Delta E4^3*Delta(2z) E4^3(2z)*Delta"));
}

#[test]
fn model_usage_errors() {
    let (code, _, stderr) = run(&["model", "-N", "2", "--bound", "0"]);
    assert_eq!(code, 2, "bound 0: {stderr}");
    let (code, _, _) = run(&["model", "-N", "1"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = run(&["model", "-N", "2", "--weight", "13"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("weight must be 12"));
    let (code, _, stderr) = run(&["model", "-N", "2", "--weight", "24", "--prec", "5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("below the policy minimum"));
}

#[test]
fn model_json_reports_parse() {
    let (code, stdout, _) = run(&[
        "model", "-N", "2", "--bound", "1", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["pairs_found"], 8);
    let first = &doc["reports"][0];
    assert_eq!(first["report"]["found_degree"], 3);
    assert_eq!(first["report"]["kernel_dim"], 1);
    assert_eq!(first["report"]["equation"]["degree"], 3);
}

#[test]
fn verify_range_passes_and_exits_zero() {
    let (code, stdout, _) = run(&["verify", "--range", "2..500"]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with("result PASS\n"));
    assert!(stdout.contains("total_degree_equals_diag_degree 499/499"));
    assert!(stdout.contains("min_sum_degree_identity 499/499"));
}

#[test]
fn verify_empty_range_trivially_passes() {
    let (code, stdout, _) = run(&["verify", "--range", "7..5"]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with("result PASS\n"));
}

#[test]
fn verify_usage_errors() {
    let (code, _, stderr) = run(&["verify", "--range", "1..50"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("start at >= 2"));
    let (code, _, _) = run(&["verify", "--range", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["model", "-N", "2", "--bound", "2"],
        vec!["model", "-N", "2", "--bound", "2", "--format", "json"],
        vec!["modpoly", "-N", "4"],
        vec!["invariants", "--range", "2..60", "--format", "json"],
    ] {
        let (c1, first, _) = run(&args);
        let (c2, second, _) = run(&args);
        assert_eq!(c1, 0);
        assert_eq!(c1, c2);
        assert_eq!(first, second, "non-deterministic output for {args:?}");
    }
}
