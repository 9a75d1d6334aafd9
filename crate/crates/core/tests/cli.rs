use std::process::{Command, Output};

fn csslb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csslb"))
        .env("CSSLB_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_reports_each_requirement() {
    let out = csslb(&["validate", "--d", "8", "--s", "4", "--g", "2", "--budget", "2", "--rho", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["r1"], false);
    assert_eq!(v["r2"], true);
    assert_eq!(v["r3"], true);
    assert_eq!(v["feasible"], false);
}

#[test]
fn enumerate_supports_and_members() {
    let base = ["enumerate", "--model", "wgm", "--d", "6", "--s", "4", "--g", "2", "--budget", "2", "--rho", "2"];
    let v = json(&csslb(&base));
    assert_eq!(v["supports"].as_array().unwrap().len(), 9);
    assert_eq!(v["supports"][0], serde_json::json!([1, 2, 4, 5]));

    let mut with_rule = base.to_vec();
    with_rule.extend(["--rule", "allow-isolated"]);
    assert_eq!(json(&csslb(&with_rule))["supports"].as_array().unwrap().len(), 15);

    let mut members = base.to_vec();
    members.extend(["--family", "f3"]);
    assert_eq!(json(&csslb(&members))["members"].as_array().unwrap().len(), 54);

    let tree = json(&csslb(&["enumerate", "--model", "tree", "--d", "7", "--s", "3"]));
    assert_eq!(tree["supports"].as_array().unwrap().len(), 5);
}

#[test]
fn bounds_for_five_triangle_instance() {
    let out = csslb(&[
        "bounds", "--setting", "onebit", "--d", "15", "--s", "10", "--g", "5", "--budget", "5", "--rho", "2", "--n", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["log_card"].as_f64().unwrap() - 7776f64.ln()).abs() < 1e-12);
    assert!((v["threshold_n"].as_f64().unwrap() - 2.731_203_125_901_445).abs() < 1e-12);
    assert_eq!(v["vacuous"], false);
    assert_eq!(v["setting"], "onebit");

    let v = json(&csslb(&[
        "bounds", "--setting", "std-noiseless", "--d", "15", "--s", "10", "--g", "5", "--budget", "5", "--rho", "2",
        "--n", "1",
    ]));
    assert_eq!(v["vacuous"], true);
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(csslb(&["validate", "--d", "six"]).status.code(), Some(2));
    assert_eq!(csslb(&["frobnicate"]).status.code(), Some(2));
    // infeasible construction is rejected by the model builder
    let out = csslb(&["enumerate", "--d", "8", "--s", "4", "--g", "2", "--budget", "2", "--rho", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("R1"));
    let out = csslb(&["simulate", "--config", "/nonexistent/exp.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "setting = \"std_noiseless\"\nmodel = \"regular\"\nd = 4\ns = 2\nsigma = 0.0\nseed = 3\nn_grid = [4, 1]\ntrials = 200\n",
    )
    .unwrap();
    let out = csslb(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,trials,failures,err_rate,wilson_lo,wilson_hi,mi_bound,fano_bound,threshold_n");
    assert!(lines[1].starts_with("1,200,"));
    assert!(lines[2].starts_with("4,200,"));

    std::fs::write(&cfg, "setting = \"std_noiseless\"\nmodel = \"regular\"\nd = 4\ns = 2\nsigma = 0.5\nseed = 3\nn_grid = [1]\n").unwrap();
    assert_eq!(csslb(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_default_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bundle.toml");
    std::fs::write(&cfg, "concentration_draws = 5000\nrip_trials = 500\n").unwrap();
    let out = csslb(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["items"].as_array().unwrap().len() >= 10);
}

#[test]
fn mi_oracles_report_values_under_bounds() {
    let v = json(&csslb(&["mi", "--oracle", "noiseless", "--model", "regular", "--d", "4", "--s", "3", "--n", "2"]));
    assert_eq!(v["exact"], true);
    assert!(v["value"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());

    let v = json(&csslb(&[
        "mi", "--oracle", "onebit", "--model", "regular", "--d", "4", "--s", "2", "--n", "2", "--sigma", "0.5",
        "--x-samples", "10",
    ]));
    let value = v["value"].as_f64().unwrap();
    assert!(value > 0.0 && value <= 4.0 * std::f64::consts::LN_2);
}
