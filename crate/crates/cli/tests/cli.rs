use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn foldlist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldlist")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.json");
    std::fs::write(
        &path,
        r#"{"tower":"gs","r":5,"e":2,"m":4,"n":25,"k":8,"s":2,"b":2,"zeta":[1,4],"field_seed":1,"key_seed":3}"#,
    )
    .unwrap();
    path
}

#[test]
fn params_reports_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let o = foldlist(&["params", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("D            28"), "{text}");
    assert!(text.contains("t_min        23"), "{text}");
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let o = foldlist(&["params", "--config", cfg.to_str().unwrap(), "--set", "n=24", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["config"]["n"].as_u64(), v["t_min"].as_u64()), (Some(24), Some(23)));
}

#[test]
fn keygen_encode_corrupt_decode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let c = cfg.to_str().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    assert!(foldlist(&["keygen", "--config", c, "--out", &p("key.txt")]).status.success());
    let enc = foldlist(&["encode", "--config", c, "--key", &p("key.txt"), "--message", "33 10", "--out", &p("cw.txt")]);
    assert!(enc.status.success(), "{}", String::from_utf8_lossy(&enc.stderr));
    let cor = foldlist(&["corrupt", "--config", c, "--input", &p("cw.txt"), "--errors", "2", "--seed", "9", "--out", &p("rx.txt")]);
    assert!(cor.status.success());
    let dec = foldlist(&["decode", "--config", c, "--key", &p("key.txt"), "--input", &p("rx.txt")]);
    assert!(dec.status.success());
    assert!(stdout(&dec).lines().any(|l| l == "33 10"), "{}", stdout(&dec));
    let ora = foldlist(&["oracle", "--config", c, "--key", &p("key.txt"), "--input", &p("rx.txt")]);
    assert_eq!(stdout(&ora).trim(), "33 10");
}

#[test]
fn pre_coding_round_trip_and_range_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let c = cfg.to_str().unwrap();
    let enc = foldlist(&["hse-encode", "--config", c, "--message", "33 10"]);
    assert!(enc.status.success());
    let word = stdout(&enc).trim().to_string();
    let dec = foldlist(&["hse-decode", "--config", c, "--word", &word]);
    assert_eq!(stdout(&dec).trim(), "33 10");
    let mut tampered: Vec<&str> = word.split(' ').collect();
    tampered[3] = if tampered[3] == "00" { "01" } else { "00" };
    let bad = foldlist(&["hse-decode", "--config", c, "--word", &tampered.join(" ")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unreachable_radius_exits_with_two() {
    let o = foldlist(&["plan", "--tower", "hermitian", "--r", "4", "--e", "2", "--s", "2", "--tau", "2/3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn word_for_other_parameters_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let c = cfg.to_str().unwrap();
    let cw = dir.path().join("cw.txt");
    assert!(foldlist(&["encode", "--config", c, "--random", "1", "--out", cw.to_str().unwrap()]).status.success());
    let o = foldlist(&["decode", "--config", c, "--set", "n=24", "--input", cw.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let o = foldlist(&["sweep", "--config", cfg.to_str().unwrap(), "--errors", "0,2", "--trials", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# foldlist sweep v1");
    assert!(lines[2].starts_with("0,2,1.0000"));
    assert!(lines[3].starts_with("2,2,1.0000"));
}

#[test]
fn baseline_recovers_planted_messages() {
    let o = foldlist(&["baseline-rs", "--trials", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("recovered 3/3"));
}
