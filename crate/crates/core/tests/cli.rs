use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rpmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpmsim")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn generate(days: &str, seed: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = rpmsim(&["generate", "--days", days, "--seed", seed, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn verify(dir: &Path) -> Output {
    rpmsim(&["verify", dir.to_str().unwrap()])
}

fn edit(path: &Path, f: impl FnOnce(String) -> String) {
    let text = std::fs::read_to_string(path).unwrap();
    std::fs::write(path, f(text)).unwrap();
}

#[test]
fn generated_bundles_verify() {
    let dir = generate("40", "3");
    let out = verify(dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{text}");
}

#[test]
fn same_seed_same_bytes() {
    let a = generate("30", "11");
    let b = generate("30", "11");
    for name in rpmsim::dataset::ALL_FILES {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn missing_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = rpmsim(&["generate", "--days", "5", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&rpmsim(&["generate"])), 2);
    assert_eq!(code(&rpmsim(&["frobnicate"])), 2);
    assert_eq!(code(&rpmsim(&["generate", "--days", "many", "--out", "."])), 2);
}

#[test]
fn bad_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let toml = dir.path().join("c.toml");

    std::fs::write(&toml, "n_patients = [").unwrap();
    let out = rpmsim(&["generate", "--config", toml.to_str().unwrap(), "--out", out_dir]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));

    std::fs::write(&toml, "config_version = 1\n[messiness]\np_duplicate = 3.0\n").unwrap();
    let out = rpmsim(&["generate", "--config", toml.to_str().unwrap(), "--out", out_dir]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("messiness.p_duplicate"), "{}", stderr(&out));

    let out = rpmsim(&["generate", "--config", "/no/such/file.toml", "--out", out_dir]);
    assert_eq!(code(&out), 3);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("c.toml");
    std::fs::write(&toml, "config_version = 1\nn_patients = 3\nduration_days = 50\n").unwrap();
    let bundle = tempfile::tempdir().unwrap();
    let out = rpmsim(&[
        "generate",
        "--config",
        toml.to_str().unwrap(),
        "--days",
        "12",
        "--out",
        bundle.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(bundle.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["n_patients"], 3);
    assert_eq!(manifest["config"]["duration_days"], 12);
    assert_eq!(manifest["days_simulated"], 12);
}

#[test]
fn printed_default_config_round_trips() {
    let out = rpmsim(&["config"]);
    assert_eq!(code(&out), 0);
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("default.toml");
    std::fs::write(&toml, &out.stdout).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let with_file =
        rpmsim(&["generate", "--config", toml.to_str().unwrap(), "--days", "20", "--out", a.path().to_str().unwrap()]);
    let without = rpmsim(&["generate", "--days", "20", "--out", b.path().to_str().unwrap()]);
    assert_eq!(code(&with_file), 0);
    assert_eq!(code(&without), 0);
    assert_eq!(
        std::fs::read(a.path().join("measurements.csv")).unwrap(),
        std::fs::read(b.path().join("measurements.csv")).unwrap()
    );
}

#[test]
fn deleted_measurement_is_a_dangling_reference() {
    let dir = generate("60", "5");
    let alerts = std::fs::read_to_string(dir.path().join("alerts.csv")).unwrap();
    let target = alerts.lines().nth(1).unwrap().split(',').nth(2).unwrap().to_owned();
    edit(&dir.path().join("measurements.csv"), |text| {
        text.lines().filter(|l| !l.starts_with(&format!("{target},"))).map(|l| format!("{l}\n")).collect()
    });
    let out = verify(dir.path());
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("dangling"), "{}", stderr(&out));
}

#[test]
fn tampered_alert_rule_fails_the_oracle() {
    let dir = generate("60", "5");
    edit(&dir.path().join("alerts.csv"), |text| {
        let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
        let row = lines.iter().position(|l| l.contains(",threshold_high,")).expect("a threshold_high alert");
        lines[row] = lines[row].replace(",threshold_high,", ",threshold_low,");
        lines.iter().map(|l| format!("{l}\n")).collect()
    });
    let out = verify(dir.path());
    assert_eq!(code(&out), 5);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL oracle: oracle mismatch"), "{text}");
}

#[test]
fn missing_file_is_a_format_error() {
    let dir = generate("10", "5");
    std::fs::remove_file(dir.path().join("alerts.csv")).unwrap();
    let out = verify(dir.path());
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("alerts"), "{}", stderr(&out));
}

#[test]
fn unknown_format_version_is_rejected() {
    let dir = generate("10", "5");
    edit(&dir.path().join("manifest.json"), |text| text.replacen("\"format_version\": 1", "\"format_version\": 99", 1));
    let out = verify(dir.path());
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn stats_json_matches_the_imported_cohort() {
    let dir = generate("90", "8");
    let out = rpmsim(&["stats", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cohort = rpmsim::dataset::import(dir.path()).unwrap();
    let direct = serde_json::to_value(rpmsim::stats::cohort_stats(&cohort)).unwrap();
    assert_eq!(printed, direct);

    let store = rpmsim::service::Store::new();
    let id = store.insert(cohort).cohort_id;
    assert_eq!(serde_json::to_value(store.stats(&id).unwrap()).unwrap(), printed);

    let table = rpmsim(&["stats", dir.path().to_str().unwrap()]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains(&format!("alerts              {}", printed["alert_count"])), "{text}");
}
