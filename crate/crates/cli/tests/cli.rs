use std::path::Path;
use std::process::Command;

fn shearmhd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shearmhd"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "audit.toml",
        "[audit]\netas = [50.0]\nk_min = 1\nk_max = 2\nt_max = 100.0\nt_count = 101\n",
    );
    let out = tmp.path().join("out");
    let st = shearmhd()
        .args(["weights-audit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--threads", "1"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["kind"], "weights-audit");
    assert_eq!(s["passed"], true);
    assert!(out.join("weights_audit.csv").exists());
}

#[test]
fn failing_assertion_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "echo.toml",
        "[echo]\netas = [1e3, 8e3]\n[assertions]\ngain_factor = 1.0001\n",
    );
    let out = tmp.path().join("out");
    let st = shearmhd().arg("echo").arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(1));
    assert_eq!(summary(&out)["passed"], false);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "stab.toml",
        "seed = 5\n[grid]\nn_x = 16\nn_y = 32\n[time]\nt_end = { absolute = 0.3 }\n",
    );
    let out = tmp.path().join("out");
    let st = shearmhd()
        .arg("stability")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "9"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert_eq!(summary(&out)["seed"], 9);
}

#[test]
fn bad_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "epsilon = 0.5\n");
    let out = shearmhd().arg("stability").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    let mismatch = write(tmp.path(), "kind.toml", "kind = \"echo\"\n");
    let st = shearmhd().arg("stability").arg("--config").arg(&mismatch).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn print_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = shearmhd().args(["inflation", "--print-config"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("kind = \"inflation\""));
    let p = write(tmp.path(), "full.toml", &text);
    let again = shearmhd().args(["inflation", "--print-config", "--config"]).arg(&p).output().unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}
