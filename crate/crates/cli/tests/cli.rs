use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn moe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moe"))
        .args(args)
        .env_remove("MOE_WORKERS")
        .output()
        .expect("binary runs")
}

fn records(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn summary(o: &Output) -> Value {
    records(o)
        .into_iter()
        .rev()
        .find(|r| r["summary"] == true)
        .expect("summary record")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("moe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "game",
        "moe-coset-identical",
        "--n",
        "2",
        "--strategy",
        "measure-split",
        "--trials",
        "3000",
        "--seed",
        "17",
    ];
    let a = moe(&args);
    let b = moe(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = moe(&[
        "game",
        "moe-coset-identical",
        "--n",
        "2",
        "--strategy",
        "measure-split",
        "--trials",
        "3000",
        "--seed",
        "18",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn worker_count_does_not_change_results() {
    let args = [
        "game",
        "moe-bb84-identical",
        "--strategy",
        "trivial",
        "--trials",
        "4000",
        "--seed",
        "3",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_moe"))
        .args(args)
        .env("MOE_WORKERS", "1")
        .output()
        .unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_moe"))
        .args(args)
        .env("MOE_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn record_fields() {
    let o = moe(&[
        "game",
        "moe-bb84-identical",
        "--strategy",
        "trivial",
        "--trials",
        "2000",
        "--seed",
        "1",
        "--exact",
    ]);
    assert!(o.status.success());
    let r = &records(&o)[0];
    assert_eq!(r["schema"], 1);
    assert_eq!(r["game"], "moe-bb84-identical");
    assert_eq!(r["trials"], 2000);
    assert_eq!(r["seed"], 1);
    assert!((r["exact"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    let (lo, hi) = (
        r["ci_low"].as_f64().unwrap(),
        r["ci_high"].as_f64().unwrap(),
    );
    assert!(lo <= r["estimate"].as_f64().unwrap() && r["estimate"].as_f64().unwrap() <= hi);
}

#[test]
fn odd_n_is_a_configuration_error() {
    let o = moe(&[
        "game",
        "moe-coset-identical",
        "--n",
        "3",
        "--strategy",
        "trivial",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("Theta_n"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_invocations_exit_1() {
    for args in [
        vec![
            "game",
            "moe-bb84-identical",
            "--strategy",
            "trivial",
            "--trials",
            "many",
            "--seed",
            "1",
        ],
        vec!["game", "moe-bb84-identical", "--strategy", "trivial"],
        vec![
            "game",
            "no-such-game",
            "--strategy",
            "trivial",
            "--seed",
            "1",
        ],
        vec![
            "game",
            "moe-bb84-identical",
            "--strategy",
            "no-such-strategy",
            "--seed",
            "1",
        ],
        vec![
            "game",
            "ue",
            "--strategy",
            "forward-to-bob",
            "--seed",
            "1",
            "--exact",
        ],
        vec!["frobnicate"],
        vec!["verify", "overlap", "--n", "5"],
        vec!["bound", "parallel", "--n", "16", "--kappa-max", "0"],
        vec![
            "game",
            "moe-bb84-identical",
            "--strategy",
            "trivial",
            "--seed",
            "1",
            "--n",
            "64",
        ],
    ] {
        let o = moe(&args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(moe(&["--help"]).status.code(), Some(0));
    assert_eq!(moe(&["game", "--help"]).status.code(), Some(0));
}

#[test]
fn strategy_failure_inside_a_trial_exits_2() {
    let o = moe(&[
        "game",
        "simul-predict",
        "--strategy",
        "echo-leak",
        "--trials",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("strategy"));
}

#[test]
fn overlap_sweep_passes() {
    let o = moe(&["verify", "overlap", "--n", "2", "--seeds", "100"]);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs.len(), 101);
    assert!(recs[..100]
        .iter()
        .all(|r| r["pass"] == true && r["check"] == "overlap"));
    let s = summary(&o);
    assert_eq!(s["passed"], 100);
    assert_eq!(s["pass"], true);
}

#[test]
fn family_n4_verifies() {
    let o = moe(&["verify", "family", "--n", "4"]);
    assert!(o.status.success());
    let recs = records(&o);
    let base = &recs[0];
    assert_eq!(base["size"], 6);
    let counts: Vec<u64> = base["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["found"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![1, 4, 1]);
    assert_eq!(recs[1]["size"], 12);
    assert_eq!(recs[1]["bit_rule"], true);
    assert_eq!(summary(&o)["pass"], true);
}

#[test]
fn family_beyond_capacity_is_rejected() {
    assert_eq!(
        moe(&["verify", "family", "--n", "6"]).status.code(),
        Some(1)
    );
}

#[test]
fn other_checks_pass() {
    for args in [
        vec!["verify", "tfkw", "--seeds", "20"],
        vec!["verify", "step2", "--seeds", "10"],
        vec!["verify", "enl-equality", "--seeds", "10"],
        vec!["verify", "coherent", "--seeds", "5", "--haar"],
        vec!["verify", "seesaw", "--n", "2", "--dim", "4"],
    ] {
        let o = moe(&args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(summary(&o)["pass"], true, "{args:?}");
    }
}

#[test]
fn bb84_bound_table() {
    let o = moe(&["bound", "bb84", "--n-max", "64"]);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs.len(), 33);
    let row = recs.iter().find(|r| r["n"] == 56).unwrap();
    assert!(row["value"].as_f64().unwrap() < 0.51);
    let first = &recs[0];
    assert!((first["value"].as_f64().unwrap() - 1.2036).abs() < 1e-4);
    assert_eq!(first["vacuous"], true);
    assert_eq!(recs[32]["pass"], true);
}

#[test]
fn parallel_bound_is_log_linear() {
    let o = moe(&["bound", "parallel", "--n", "16", "--kappa-max", "5"]);
    assert!(o.status.success());
    let recs = records(&o);
    let l1 = recs[0]["ln_value"].as_f64().unwrap();
    let l5 = recs[4]["ln_value"].as_f64().unwrap();
    assert!((l5 - 5.0 * l1).abs() < 1e-12);
}

#[test]
fn selftest_covers_every_construction() {
    let o = moe(&["selftest", "--rounds", "5"]);
    assert!(o.status.success());
    let names: Vec<String> = records(&o)
        .iter()
        .map(|r| r["selftest"].as_str().unwrap().to_string())
        .collect();
    for c in [
        "sd",
        "cp-prf",
        "cp-prf-trigger",
        "cp-pf",
        "ue",
        "ts",
        "summary",
    ] {
        assert!(names.iter().any(|n| n == c), "{c} missing from {names:?}");
    }
    assert!(records(&o).iter().all(|r| r["pass"] == true));
}

#[test]
fn crypto_profile_reports_constraints() {
    let o = moe(&["selftest", "--profile", "crypto"]);
    assert!(o.status.success());
    let r = &records(&o)[0];
    assert_eq!(r["simulable"], false);
    assert!(r["constraints"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["holds"] == true));
}

#[test]
fn config_file_supplies_missing_flags() {
    let cfg = scratch("game.conf");
    std::fs::write(
        &cfg,
        "# bb84 run\nstrategy = trivial\ntrials = 500\nseed = 9\nexact = true\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = moe(&["--config", cfg, "game", "moe-bb84-identical"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &records(&o)[0];
    assert_eq!(r["trials"], 500);
    assert_eq!(r["seed"], 9);
    assert!(r.get("exact").is_some());
    let o = moe(&[
        "--config",
        cfg,
        "game",
        "moe-bb84-identical",
        "--seed",
        "10",
    ]);
    assert_eq!(records(&o)[0]["seed"], 10);
}

#[test]
fn bad_config_files_exit_1() {
    let cfg = scratch("bad.conf");
    std::fs::write(&cfg, "this line has no equals sign\n").unwrap();
    let o = moe(&["--config", cfg.to_str().unwrap(), "selftest"]);
    assert_eq!(o.status.code(), Some(1));
    let o = moe(&["--config", "/nonexistent/moe.conf", "selftest"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_file_receives_the_records() {
    let path = scratch("out.jsonl");
    let o = moe(&[
        "-o",
        path.to_str().unwrap(),
        "bound",
        "parallel",
        "--n",
        "8",
        "--kappa-max",
        "2",
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
}
