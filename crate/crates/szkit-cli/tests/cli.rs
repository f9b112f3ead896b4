//! End-to-end tests of the szkit binary: subcommand behaviour, exit codes
//! and report determinism.

use std::process::Command;

fn szkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_szkit"))
}

#[test]
fn cz_exp_inline_matrix() {
    // the Hessian substitution at a minimum: index n = 1
    let out = szkit()
        .args(["cz-exp", "--matrix", "[[-1,0],[0,-1]]"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["index"], 1);
}


#[test]
fn cz_subcommand_on_a_path_file() {
    // exp(J0 diag(-1,-1) t): clockwise rotation, index 1
    let n_samples = 64usize;
    let samples: Vec<serde_json::Value> = (0..=n_samples)
        .map(|i| {
            let t = i as f64 / n_samples as f64;
            let (c, s) = ((-t).cos(), (-t).sin());
            serde_json::json!({"t": t, "m": [[c, -s], [s, c]]})
        })
        .collect();
    let dto = serde_json::json!({"n": 1, "samples": samples});
    let path = std::env::temp_dir().join("szkit_cz_path.json");
    std::fs::write(&path, dto.to_string()).unwrap();
    let out = szkit()
        .args(["cz", "--path", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["index"], 1);
    assert_eq!(v["method"], "CrossingForm");
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = szkit().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_usage_error() {
    let out = szkit()
        .args(["cz-exp", "--matrix", "[[1, oops]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"), "diagnostic missing: {err}");
}

#[test]
fn transition_verification_passes() {
    let out = szkit()
        .args(["verify", "transition-s2", "--samples", "64"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[pass] transition-s2"));
}

#[test]
fn coarse_transition_sampling_is_an_input_error() {
    let out = szkit()
        .args(["verify", "transition-s2", "--samples", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wind_of_a_complex_loop() {
    // diag(e^{2 pi i 2 t}) over 64 samples: winding 2
    let samples: Vec<serde_json::Value> = (0..=64)
        .map(|i| {
            let t = i as f64 / 64.0;
            let phi = 2.0 * std::f64::consts::PI * 2.0 * t;
            serde_json::json!({"t": t, "u": [[[phi.cos(), phi.sin()]]]})
        })
        .collect();
    let dto = serde_json::json!({"n": 1, "samples": samples});
    let out = szkit()
        .args(["wind", "--loop", &dto.to_string()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["winding"], 2);
}

fn torus_double_cosine() -> String {
    serde_json::json!({
        "model": {"flat_torus2n": {"n": 1}},
        "terms": [
            {"spatial": {"kind": "trig", "k": [1, 0], "cos_amp": 0.01, "sin_amp": 0.0},
             "profile": {"Plain": {"a0": 1.0}}},
            {"spatial": {"kind": "trig", "k": [0, 1], "cos_amp": 0.01, "sin_amp": 0.0},
             "profile": {"Plain": {"a0": 1.0}}}
        ],
        "normalized": true
    })
    .to_string()
}

#[test]
fn orbit_search_on_a_slow_morse_hamiltonian() {
    let out = szkit()
        .args([
            "orbits",
            "--ham",
            &torus_double_cosine(),
            "--period",
            "0.95:1.05",
            "--grid",
            "6",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let orbits = v["orbits"].as_array().unwrap();
    assert!(!orbits.is_empty());
    for o in orbits {
        assert!(o["diameter"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn hofer_norms_of_the_double_cosine() {
    let out = szkit()
        .args(["hofer", "--ham", &torus_double_cosine()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // osc = 0.04 for the separable double cosine
    let norm = v["norm"].as_f64().unwrap();
    assert!((norm - 0.04).abs() < 1e-9, "norm {norm}");
}

#[test]
fn twist_subcommand_on_the_oscillator() {
    let ham = serde_json::json!({
        "model": {"euclidean_r2n": {"n": 1}},
        "terms": [
            {"spatial": {"kind": "quadratic", "s": [[3.14159265, 0.0], [0.0, 3.14159265]]},
             "profile": {"Plain": {"a0": 1.0}}}
        ],
        "normalized": false
    })
    .to_string();
    let out = szkit()
        .args(["twist", "--ham", &ham, "--point", "0,0", "--period", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "GenericallyUnderTwisted");
}

#[test]
fn reports_are_byte_stable_for_a_fixed_seed() {
    let dir = std::env::temp_dir();
    let p1 = dir.join("szkit_report_a.json");
    let p2 = dir.join("szkit_report_b.json");
    for p in [&p1, &p2] {
        let out = szkit()
            .args([
                "verify",
                "cz-oracle",
                "--count",
                "6",
                "--seed",
                "99",
                "--out",
                p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "reports differ between identical runs");
}

#[test]
fn failing_verification_exits_one() {
    // a continuation window too short to converge produces a failing check
    let out = szkit()
        .args([
            "verify",
            "energy-identity",
            "--cases",
            "2",
            "--window",
            "5.05",
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL]"));
}

#[test]
fn unverifiable_precondition_is_an_input_error() {
    // an absurd period window defeats the no-short-orbit certificate; the
    // experiment refuses instead of running
    let out = szkit()
        .args(["verify", "prop64", "--deltas", "1e-3", "--delta2", "20.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
