use std::process::{Command, Output};

use cwgabor::harness::{preset, ExperimentConfig, CSV_HEADER};

fn cwgabor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwgabor")).args(args).env_remove("CWGABOR_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn print_config_round_trips() {
    let o = cwgabor(&["print-config", "--preset", "b65-n257"]);
    assert!(o.status.success());
    let cfg = ExperimentConfig::from_json(&stdout(&o)).unwrap();
    assert_eq!(cfg, preset("b65-n257").unwrap());
}

#[test]
fn unknown_preset_is_an_error() {
    let o = cwgabor(&["print-config", "--preset", "b1-n2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("known presets"));
}

#[test]
fn simulate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"scheme":"ura","code":{"q":64,"n_prime":5,"k_prime":3},"dictionary":{"n":31},
            "channel":{"model":"awgn","ebn0_db":[30.0,40.0]},"load":{"active_users":2},"trials":6,"seed":5}"#,
    )
    .unwrap();
    let o = cwgabor(&["simulate", "--config", path.to_str().unwrap(), "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains(",ura,30.0000,6,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"scheme":"ura","surprise":true}"#).unwrap();
    let o = cwgabor(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_zero_is_drawn_and_printed() {
    let o = cwgabor(&["phase-transition", "--n", "13", "--grid", "2x2", "--trials", "2", "--seed", "0"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    assert_ne!(seed, 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("delta,rho,m,k,successes,trials,rate"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn bisection_reports_saturation() {
    // One user at high SNR meets the target at the low edge already.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"scheme":"ura","code":{"q":64,"n_prime":5,"k_prime":3},"dictionary":{"n":31},
            "channel":{"model":"awgn","ebn0_db":[20.0]},"load":{"active_users":1},"trials":10,"seed":2}"#,
    )
    .unwrap();
    let o = cwgabor(&["sweep", "--config", path.to_str().unwrap(), "--bisect", "20,30"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("already at 20"));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn bad_bracket_is_rejected() {
    let o = cwgabor(&["sweep", "--preset", "b36-n149", "--bisect", "5"]);
    assert_eq!(o.status.code(), Some(2));
}
