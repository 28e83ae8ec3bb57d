use std::process::{Command, Output};

fn qcoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoin")).args(args).output().unwrap()
}

const SMALL_RUNS: &[&[&str]] = &[
    &["mint-verify", "--n", "2", "--trials", "5"],
    &["transfer-chain", "--n", "2", "--rounds", "5"],
    &["robustness", "--n", "2", "--trials", "20"],
    &["anonymity", "--n", "2", "--trials", "20", "--users", "2"],
    &["forge-retry", "--n", "2", "--trials", "5"],
    &["forge-grover", "--n", "3"],
    &["bound-table", "--n-max", "3"],
    &["scaling", "--n-min", "2", "--n-max", "4"],
    &["bb84-attack", "--n", "3", "--trials", "3", "--forged", "3"],
    &["bills-mint", "--count", "3"],
    &["bills-verify", "--count", "3"],
    &["bills-forge", "--trials", "10"],
    &["blind-verify", "--n", "2"],
    &["online-verify", "--n", "2"],
    &["blindness-check", "--n", "1"],
    &["workload", "--n-max", "2"],
];

#[test]
fn every_subcommand_succeeds_and_hides_the_secret() {
    for args in SMALL_RUNS {
        for format in ["json", "csv"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            let out = qcoin(&full);
            assert!(out.status.success(), "{full:?}: {}", String::from_utf8_lossy(&out.stderr));
            let text = String::from_utf8(out.stdout).unwrap();
            assert!(!text.contains("\"secret\":") && !text.contains("# secret:"), "{full:?} leaked the secret");
            assert!(text.contains("seed"));
        }
    }
}

#[test]
fn secret_only_with_flag() {
    let shown = String::from_utf8(qcoin(&["--reveal-secret", "robustness", "--n", "2", "--trials", "5"]).stdout).unwrap();
    assert!(shown.contains("\"secret\":"));
    let csv = String::from_utf8(qcoin(&["--reveal-secret", "--format", "csv", "forge-grover", "--n", "2"]).stdout).unwrap();
    assert!(csv.contains("# secret:"));
}

#[test]
fn exit_codes() {
    assert_eq!(qcoin(&["mint-verify", "--n", "0"]).status.code(), Some(2));
    assert_eq!(qcoin(&["scaling", "--n-min", "5", "--n-max", "4"]).status.code(), Some(2));
    assert_eq!(qcoin(&["bogus"]).status.code(), Some(2));
    assert_eq!(qcoin(&["--out", "/nonexistent/dir/r.json", "bound-table"]).status.code(), Some(2));
    assert_eq!(qcoin(&["bills-forge", "--k", "9"]).status.code(), Some(2));
    assert_eq!(qcoin(&["--help"]).status.code(), Some(0));
}

#[test]
fn tampered_replay_is_an_experiment_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let p = path.to_str().unwrap();
    assert!(qcoin(&["online-verify", "--runs", "2", "--record", p]).status.success());
    assert!(qcoin(&["online-verify", "--replay", p]).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("verdict", "verdict-x", 1)).unwrap();
    assert_eq!(qcoin(&["online-verify", "--replay", p]).status.code(), Some(3));
}

#[test]
fn valid_list_export_is_sorted_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("valid.txt");
    let p = path.to_str().unwrap();
    assert!(qcoin(&["bills-mint", "--count", "30", "--valid-list-out", p]).status.success());
    let ks: Vec<u64> = std::fs::read_to_string(&path).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert!(!ks.is_empty() && ks.windows(2).all(|w| w[0] < w[1]) && ks.iter().all(|&k| k < 8));
}
