use std::process::{Command, Output};

fn conehull(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conehull"))
        .args(args)
        .env_remove("CONEHULL_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn estimate_exit_code_and_csv() {
    let out = conehull(&["estimate", "--kind", "poisson-f", "--d", "2", "--gamma", "2", "--replicates", "500", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("target_id,params,mean,stderr,oracle,z_score"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(conehull(&["estimate", "--kind", "nonsense"]).status.code(), Some(2));
    assert_eq!(conehull(&["estimate", "--kind", "poisson-T", "--d", "2"]).status.code(), Some(2));
    assert_eq!(conehull(&["verify", "--preset", "huge"]).status.code(), Some(2));
    assert_eq!(conehull(&["sample-hull", "--d", "2", "--gamma", "-1"]).status.code(), Some(2));
}

#[test]
fn corrupted_oracle_exits_with_one() {
    let ok = conehull(&["verify", "--preset", "smoke", "--workers", "2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = conehull(&[
        "verify",
        "--preset",
        "smoke",
        "--override-oracle",
        "facets_poisson_d2/f_1=7.5",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("facets_poisson_d2"));
}

#[test]
fn manifest_flags_and_seed_environment() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("exp.toml");
    std::fs::write(
        &manifest,
        "kind = \"poisson-volume\"\nreplicates = 200\nseed = 5\n[params]\nd = 2\ngamma = 3.0\nc = 2.0\n",
    )
    .unwrap();
    let m = manifest.to_str().unwrap();
    let from_file = conehull(&["estimate", "--config", m]).stdout;
    let flag = conehull(&["estimate", "--config", m, "--seed", "5"]).stdout;
    assert_eq!(from_file, flag);
    let other = conehull(&["estimate", "--config", m, "--seed", "6"]).stdout;
    assert_ne!(from_file, other);
    let env = Command::new(env!("CARGO_BIN_EXE_conehull"))
        .args(["estimate", "--config", m])
        .env("CONEHULL_SEED", "6")
        .output()
        .unwrap();
    assert_eq!(env.stdout, other);
}

#[test]
fn gnuplot_script_accompanies_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("table.csv");
    let out = conehull(&["table", "--d", "3", "--gamma", "2", "--out", csv.to_str().unwrap(), "--gnuplot"]);
    assert_eq!(out.status.code(), Some(0));
    let script = std::fs::read_to_string(dir.path().join("table.gp")).unwrap();
    assert!(script.contains("table.csv"));
    assert!(std::fs::read_to_string(&csv).unwrap().contains("limit_f_2"));
}

#[test]
fn sampled_hull_is_a_loadable_document() {
    let out = conehull(&["sample-hull", "--d", "3", "--gamma", "2", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let hull = conehull_core::Hull::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(hull.dim(), 3);
    assert!(hull.contains_origin());
    let json = conehull(&["conic", "--d", "2", "--n", "6", "--replicates", "500", "--format", "json"]);
    assert_eq!(json.status.code(), Some(0));
    let profile: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(profile["v"].as_array().unwrap().len(), 4);
}
