//! End-to-end tests of the `og6` binary: subcommand output, JSON wire
//! formats, exit codes, and determinism of the claim battery.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_og6"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn lattice_info_reports_discriminant_data() {
    let out = run(&["lattice", "info", "--lattice", "og6", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rank"], 8);
    assert_eq!(v["det"], -4);
    assert_eq!(v["signature"], serde_json::json!([3, 5]));
    assert_eq!(v["discriminant_orders"], serde_json::json!([2, 2]));
    assert_eq!(v["lattice"]["tag"], "U,U,U,-2,-2");
}

#[test]
fn divisor_classify_zeta_plus_eps_is_stably_prime_exceptional() {
    let out = run(&["divisor", "classify", "--vector", "0,0,0,0,0,0,1,1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "stably-prime-exceptional");
    assert_eq!(v["norm"], -4);
    assert_eq!(v["div"], 2);
}

#[test]
fn lagrangian_check_on_isotropic_basis_vector() {
    let out = run(&["lagrangian", "check", "--vector", "1,0,0,0,0,0,0,0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["base"], "P3");
    assert_eq!(v["fiber_polarization"], serde_json::json!([1, 2, 2]));
    assert_eq!(v["divisibility"], 1);
    assert_eq!(v["fibration_exists"], true);
}

#[test]
fn lagrangian_check_rejects_non_isotropic_with_exit_2() {
    let out = run(&["lagrangian", "check", "--vector", "1,1,0,0,0,0,0,0", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "precondition");
}

#[test]
fn isometry_check_identity_has_all_membership_flags() {
    let m: Vec<Vec<i64>> = (0..8)
        .map(|i| (0..8).map(|j| i64::from(i == j)).collect())
        .collect();
    let arg = serde_json::json!({"lattice": "og6", "matrix": m}).to_string();
    let out = run(&["isometry", "check", "--isometry", &arg, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    for flag in ["in_o_plus", "in_so", "in_so_plus", "in_otilde", "in_sotilde_plus"] {
        assert_eq!(v[flag], true, "{flag}");
    }
}

#[test]
fn vector_invariants_of_divisibility_2_class() {
    let out = run(&["vector", "invariants", "--vector", "0,0,0,0,0,0,1,1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["norm"], -4);
    assert_eq!(v["divisibility"], 2);
    assert_eq!(v["primitive"], true);
}

#[test]
fn malformed_vector_gives_exit_2() {
    let out = run(&["vector", "invariants", "--vector", "1,2,three", "--json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_rank_vector_gives_exit_2() {
    let out = run(&["vector", "invariants", "--vector", "1,2,3", "--json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cone_query_reports_the_separating_wall() {
    let pic = serde_json::json!({
        "lattice": "og6",
        "basis": [
            [1, 0, 0, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 1],
        ]
    })
    .to_string();
    let out = run(&[
        "cone", "query", "--pic", &pic, "--x", "2,2,1", "--k", "2,2,-1", "--mode", "kahler",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["in_chamber"], false);
    assert_eq!(
        v["separating_walls"],
        serde_json::json!([[0, 0, 0, 0, 0, 0, 0, 1]])
    );
}

#[test]
fn orbit_transport_word_maps_v_to_w() {
    let out = run(&[
        "orbit",
        "transport",
        "--v",
        "1,0,0,0,0,0,0,0",
        "--w",
        "0,1,0,0,0,0,0,0",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["maps_v_to_w"], true);
}

#[test]
fn verify_claims_smoke_passes_and_is_deterministic() {
    let a = run(&["verify-claims", "--scale", "smoke", "--seed", "5", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify-claims", "--scale", "smoke", "--seed", "5", "--json"]);
    let strip = |o: &Output| {
        let mut v = stdout_json(o);
        for c in v["claims"].as_array_mut().unwrap() {
            c.as_object_mut().unwrap().remove("runtime_ms");
        }
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let v = stdout_json(&a);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["claims"].as_array().unwrap().len(), 12);
}

#[test]
fn verify_claims_tamper_control_fails_with_exit_1() {
    let out = run(&["verify-claims", "--scale", "smoke", "--seed", "5", "--tamper", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], false);
    let failed: Vec<&str> = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"discriminant-form"), "failed set: {failed:?}");
}
