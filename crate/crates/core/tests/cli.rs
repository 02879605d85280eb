use std::path::Path;
use std::process::Command;

const SMALL: &str = "[grid]\nn = 4096\nx_min = -200.0\nx_max = 200.0\n[localisation]\nr_values = [10.0, 20.0, 40.0, 80.0]\n";

fn tdlab(mode: &str, config: &Path, out: Option<&Path>) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tdlab"));
    cmd.arg(mode).arg("--config").arg(config).env_remove("TDLAB_OUT");
    if let Some(out) = out {
        cmd.arg("--out").arg(out);
    }
    cmd
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "[state]\nk_min = 0.0\n");
    let out = tdlab("checks", &bad, Some(dir.path())).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold margin"));

    let typo = write_config(dir.path(), "typo.toml", "[grid]\nn = 4096\nxmin = 1.0\n");
    let out = tdlab("checks", &typo, Some(dir.path())).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing = dir.path().join("absent.toml");
    assert_eq!(tdlab("checks", &missing, None).status().unwrap().code(), Some(2));
}

#[test]
fn checks_pass_and_write_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "defaults.toml", "");
    let out_dir = dir.path().join("run");
    let out = tdlab("checks", &config, Some(&out_dir)).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["config_sha256"].as_str().unwrap().len(), 64);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["value"].is_string() && check["tolerance"].is_string());
        assert_eq!(check["pass"], true);
    }
    // only the persisted files remain
    let names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["report.json".to_string()]);
}

#[test]
fn env_override_and_bit_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "dw.toml",
        "[dispersion]\ntype = \"double_well\"\n[output]\nformats = [\"csv\"]\n",
    );
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let status = tdlab("kappa", &config, None).env("TDLAB_OUT", &first).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(tdlab("kappa", &config, Some(&second)).status().unwrap().code(), Some(0));
    let a = std::fs::read(first.join("kappa.csv")).unwrap();
    let b = std::fs::read(second.join("kappa.csv")).unwrap();
    assert_eq!(a, b);
    assert!(!first.join("report.json").exists());
}

#[test]
fn wrapped_excursions_are_named_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "small.toml", SMALL);
    let out = tdlab("checks", &config, Some(dir.path())).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL Weyl relation") && stdout.contains("boundary mass"), "{stdout}");
}

#[test]
fn numerical_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // smatrix needs the stationary solver, which requires omega = p^2
    let config = write_config(dir.path(), "dw.toml", "[dispersion]\ntype = \"double_well\"\n");
    let out_dir = dir.path().join("run");
    let out = tdlab("smatrix", &config, Some(&out_dir)).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["checks"][0]["name"].as_str().unwrap().contains("smatrix"));
}
