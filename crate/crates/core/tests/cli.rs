//! End-to-end tests of the `toricq` binary: exit codes, report text,
//! canonical JSON payloads, and determinism.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn toricq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricq"))
        .args(args)
        .env_remove("TORICQ_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn temp_file(test: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("toricq-cli-{}-{}.json", test, std::process::id()));
    std::fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn validate_builtin_f2() {
    let out = toricq(&["validate", "--fan", "f2", "--format", "text"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("smooth, complete, l=4, r=2"), "{}", stdout(&out));

    let out = toricq(&["validate", "--fan", "f2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["status"], "valid");
    assert_eq!(doc["l"], 4);
    assert_eq!(doc["r"], 2);
}

#[test]
fn validate_incomplete_fan_exits_2() {
    let path = temp_file(
        "quadrant",
        r#"{ "dim": 2, "rays": [[1,0],[0,1]], "max_cones": [[1,2]] }"#,
    );
    let out = toricq(&["validate", "--fan", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("NotComplete"), "{}", stderr(&out));
    std::fs::remove_file(path).ok();
}

#[test]
fn validate_malformed_json_exits_1() {
    let path = temp_file("malformed", "{ not json");
    let out = toricq(&["validate", "--fan", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("parse"), "{}", stderr(&out));
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_fan_name_exits_1() {
    let out = toricq(&["info", "--fan", "p17"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("built-in"), "{}", stderr(&out));
}

#[test]
fn info_f2_report() {
    let out = toricq(&["info", "--fan", "f2", "--format", "text"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("A = [[1,1,2,0],[0,0,1,1]]"), "{text}");
    assert!(text.contains("basis_cone = sigma_0 = {rho_2, rho_3}"), "{text}");
    assert!(text.contains("Fano: false"), "{text}");
    assert!(text.contains("Betti (1,2,1)"), "{text}");
    assert!(text.contains("D_4: pic=[0,1] nef=false ample=false"), "{text}");
    assert!(text.contains("f=[1,-2] ray-degrees=[1,1,0,-2] c1-degree=0"), "{text}");
    assert!(text.contains("primitive collections: {rho_1, rho_2}, {rho_3, rho_4}"), "{text}");
}

#[test]
fn info_p2_and_p1xp1_reports() {
    let out = toricq(&["info", "--fan", "p2", "--format", "text"]);
    let text = stdout(&out);
    assert!(text.contains("A = [1,1,1]"), "{text}");
    assert!(text.contains("Fano: true"), "{text}");

    let out = toricq(&["info", "--fan", "p1xp1", "--format", "text"]);
    let text = stdout(&out);
    assert!(text.contains("Betti (1,2,1)"), "{text}");
    assert!(text.contains("Fano: true"), "{text}");
}

#[test]
fn info_json_shape() {
    let out = toricq(&["info", "--fan", "f2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["weight_matrix"], serde_json::json!([[1, 1, 2, 0], [0, 0, 1, 1]]));
    assert_eq!(doc["basis_rays"], serde_json::json!([0, 3]));
    assert_eq!(doc["fano"], Value::Bool(false));
    assert_eq!(doc["betti"], serde_json::json!([1, 2, 1]));
    assert_eq!(doc["anticanonical"], serde_json::json!([4, 2]));
    let nef: Vec<bool> = doc["ray_divisors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["nef"].as_bool().unwrap())
        .collect();
    assert_eq!(nef, vec![true, true, true, false]);
}

#[test]
fn ifun_p1_degree_one_terms() {
    // pic:1 is the hyperplane class; the default (anticanonical) gives
    // the line class degree 2, outside bound 1.
    let out = toricq(&[
        "ifun", "--fan", "p1", "--polarization", "pic:1", "--degree-bound", "1", "--t-trunc", "0",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["part"], "small_I");
    assert_eq!(doc["fan"], "p1");
    let series = doc["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series[1]["beta"], serde_json::json!([1]));
    let terms = series[1]["terms"].as_array().unwrap();
    // Degree-1 coefficient 1/((H+z)^2) = z^-2 - 2H z^-3.
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["z"], -2);
    assert_eq!(terms[0]["class"]["0"], serde_json::json!(["1"]));
    assert_eq!(terms[1]["z"], -3);
    assert_eq!(terms[1]["class"]["1"], serde_json::json!(["-2"]));
}

#[test]
fn ifun_text_format_renders_classes() {
    let out = toricq(&[
        "ifun", "--fan", "p1", "--polarization", "pic:1", "--degree-bound", "1", "--t-trunc", "0",
        "--format", "text",
    ]);
    let text = stdout(&out);
    assert!(text.contains("part: small_I"), "{text}");
    assert!(text.contains("Q^[1]:"), "{text}");
    assert!(text.contains("z^-3 * t^[0,0]: -2*x2"), "{text}");
}

#[test]
fn ifun_default_polarization_on_f2_exits_3() {
    let out = toricq(&["ifun", "--fan", "f2"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("not ample"), "{}", stderr(&out));
}

#[test]
fn ifun_f2_with_explicit_polarization() {
    let out = toricq(&[
        "ifun", "--fan", "f2", "--polarization", "pic:3,1", "--degree-bound", "1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["polarization"], serde_json::json!([3, 1]));
    // Degree <= 1 effective classes for pic:3,1: the fiber [0,1] and the
    // -2 section [1,-2], both of degree 1.
    let betas: Vec<Value> = doc["series"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["beta"].clone())
        .collect();
    assert_eq!(
        betas,
        vec![
            serde_json::json!([0, 0]),
            serde_json::json!([0, 1]),
            serde_json::json!([1, -2])
        ]
    );
}

#[test]
fn ifun_big_i_k0_part() {
    let out = toricq(&[
        "ifun", "--fan", "p2", "--part", "big_I_k0", "--degree-bound", "1", "--t-trunc", "1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["part"], "big_I_k0");
    // The k=0 big-I part carries no exponential factor: the beta=0
    // summand is exactly 1 + t/z.
    let series = doc["series"].as_array().unwrap();
    assert_eq!(series[0]["beta"], serde_json::json!([0]));
    let terms = series[0]["terms"].as_array().unwrap();
    let zs: Vec<i64> = terms.iter().map(|t| t["z"].as_i64().unwrap()).collect();
    assert_eq!(zs, vec![0, -1, -1]);
}

#[test]
fn ray_and_pic_polarizations_give_identical_output() {
    let a = toricq(&["ifun", "--fan", "p2", "--polarization", "pic:3"]);
    let b = toricq(&["ifun", "--fan", "p2", "--polarization", "ray:1,1,1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn mirror_p2_is_trivial() {
    let out = toricq(&["mirror", "--fan", "p2", "--degree-bound", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["part"], "mirror_map");
    assert_eq!(doc["round_trip"], "ok");
    // tau_1 = t_1 exactly: one Novikov entry at beta 0, one t-monomial.
    let tau1 = doc["tau"]["tau_1"].as_array().unwrap();
    assert_eq!(tau1.len(), 1);
    assert_eq!(tau1[0]["beta"], serde_json::json!([0]));
    let coeffs = tau1[0]["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 1);
    assert_eq!(coeffs[0]["t_exp"], serde_json::json!([0, 1]));
    assert_eq!(coeffs[0]["coeff"], "1");
}

#[test]
fn mirror_f2_round_trip() {
    let out = toricq(&[
        "mirror", "--fan", "f2", "--polarization", "pic:3,1", "--degree-bound", "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["round_trip"], "ok");
    // The degree-(1,-2) correction enters tau_2 with coefficient -1.
    let tau2 = doc["tau"]["tau_2"].as_array().unwrap();
    let correction = tau2
        .iter()
        .find(|e| e["beta"] == serde_json::json!([1, -2]))
        .expect("beta (1,-2) present");
    assert_eq!(correction["coeffs"][0]["t_exp"], serde_json::json!([0, 0, 0]));
    assert_eq!(correction["coeffs"][0]["coeff"], "-1");
    assert!(doc["j_from_i"].as_array().is_some());

    let text = toricq(&[
        "mirror", "--fan", "f2", "--polarization", "pic:3,1", "--degree-bound", "2",
        "--format", "text",
    ]);
    let text = stdout(&text);
    assert!(text.contains("round_trip: ok"), "{text}");
    // The beta (1,-2) correction is -e^{t_1 - 2 t_2}, truncated.
    assert!(text.contains("tau_2 = t_2 + Q^[1,-2]*(-1"), "{text}");
}

#[test]
fn compare_pn_p2_identical() {
    let out = toricq(&[
        "compare-pn", "--fan", "p2", "--degree-bound", "3", "--format", "text",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("identical: 100%"), "{}", stdout(&out));

    let out = toricq(&["compare-pn", "--fan", "p2", "--degree-bound", "3"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["identical"], Value::Bool(true));
    assert_eq!(doc["mismatches"], serde_json::json!([]));
    assert!(doc["checked_coefficients"].as_u64().unwrap() > 0);
}

#[test]
fn compare_pn_rejects_non_projective_fan() {
    let out = toricq(&["compare-pn", "--fan", "f2"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("projective-space"), "{}", stderr(&out));
}

#[test]
fn compare_pn_rejects_polarization_flag() {
    let out = toricq(&["compare-pn", "--fan", "p2", "--polarization", "pic:1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("pic:1"), "{}", stderr(&out));
}

#[test]
fn negative_degree_bound_exits_1() {
    let out = toricq(&["ifun", "--fan", "p1", "--degree-bound", "-1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("nonnegative"), "{}", stderr(&out));
}

#[test]
fn out_flag_writes_payload_to_file() {
    let path = std::env::temp_dir().join(format!("toricq-out-{}.json", std::process::id()));
    let direct = toricq(&["ifun", "--fan", "p1", "--degree-bound", "1"]);
    let out = toricq(&[
        "ifun", "--fan", "p1", "--degree-bound", "1", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).expect("payload file");
    assert_eq!(written, stdout(&direct));
    std::fs::remove_file(path).ok();
}

#[test]
fn byte_identical_reruns_and_thread_independence() {
    let a = toricq(&["ifun", "--fan", "p2"]);
    let b = toricq(&["ifun", "--fan", "p2"]);
    assert_eq!(stdout(&a), stdout(&b));
    let threaded = Command::new(env!("CARGO_BIN_EXE_toricq"))
        .args(["ifun", "--fan", "p2"])
        .env("TORICQ_THREADS", "4")
        .output()
        .expect("binary runs");
    assert_eq!(stdout(&a), stdout(&threaded));
}

#[test]
fn z_floor_flag_trims_presentation() {
    let out = toricq(&["ifun", "--fan", "p1", "--degree-bound", "1", "--z-floor", "-2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["z_floor"], -2);
    for entry in doc["series"].as_array().unwrap() {
        for term in entry["terms"].as_array().unwrap() {
            assert!(term["z"].as_i64().unwrap() >= -2, "{doc}");
        }
    }
}

#[test]
fn basis_cone_flag_changes_presentation() {
    let out = toricq(&["info", "--fan", "f2", "--basis-cone", "2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("json payload");
    assert_eq!(doc["basis_cone"], 2);
    assert_eq!(doc["weight_matrix"], serde_json::json!([[1, 1, 0, -2], [0, 0, 1, 1]]));
    // Verdicts are basis-independent.
    assert_eq!(doc["fano"], Value::Bool(false));
}
