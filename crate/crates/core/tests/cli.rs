//! The `cattforge` binary on the bundled scripts.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cattforge"))
}

fn script(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scripts").join(name)
}

#[test]
fn well_typed_scripts_exit_zero() {
    let out = bin().arg("check").arg(script("basics.catt")).arg("--stats").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("artifact\tchars\tnodes\tdistinct\tmax_dim\n"));
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn ill_typed_script_reports_position_and_fails() {
    let out = bin().arg("check").arg(script("ill_typed.catt")).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("ill_typed.catt:3:1:"), "{stderr}");
}

#[test]
fn generated_printout_checks_again() {
    let out = bin().args(["gen", "H", "2", "1", "0"]).output().unwrap();
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("cattforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("h210.catt");
    std::fs::write(&file, &out.stdout).unwrap();
    let again = bin().arg("check").arg(&file).output().unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
}

#[test]
fn padding_direction_only_for_hp() {
    assert!(!bin().args(["gen", "H", "2", "1", "0", "1"]).output().unwrap().status.success());
    assert!(!bin().args(["gen", "Hp", "3", "1", "0"]).output().unwrap().status.success());
    assert!(bin().args(["gen", "Hp", "3", "1", "0", "2"]).output().unwrap().status.success());
}

#[test]
fn exhausted_budget_is_reported() {
    let out = bin().args(["gen", "H", "4", "3", "1", "--budget", "10"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
