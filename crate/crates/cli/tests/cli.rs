use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypball")).args(args).output().unwrap()
}

fn with_config(command: &str, name: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let dir = scratch(name);
    let cfg = dir.join("experiment.cfg");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (run(&args), out)
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&output.stdout));
    })
}

#[test]
fn malformed_config_names_the_missing_block() {
    let (output, out) = with_config("delta", "malformed", "[surface]\nkind = hyperbolic_disk\n", &[]);
    assert!(!output.status.success());
    let json = stdout_json(&output);
    assert_eq!(json["status"], "error");
    assert!(json["error"].as_str().unwrap().contains("missing block [metric]"), "{json}");
    assert!(out.join("failure.json").exists());
}

#[test]
fn unparsable_config_fails() {
    let (output, _) = with_config("build", "unparsable", "kind = = =\n[", &[]);
    assert!(!output.status.success());
    assert_eq!(stdout_json(&output)["status"], "error");
}

#[test]
fn missing_config_flag_fails() {
    let output = run(&["delta", "--out", scratch("noflag").to_str().unwrap()]);
    assert!(!output.status.success());
    assert!(stdout_json(&output)["error"].as_str().unwrap().contains("--config"));
}

#[test]
fn random_tree_delta_is_zero() {
    let (output, out) = with_config(
        "delta",
        "tree",
        "[metric]\nsource = random_tree\nnodes = 200\n",
        &["--seed", "5"],
    );
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stdout));
    let json = stdout_json(&output);
    assert_eq!(json["status"], "pass");
    assert_eq!(json["report"]["delta"]["delta"], 0.0);
    assert_eq!(json["report"]["points"], 200);
    let delta: Value = serde_json::from_slice(&std::fs::read(out.join("four_point.json")).unwrap()).unwrap();
    assert_eq!(delta["delta"], 0.0);
    assert!(out.join("metric.csv").exists());
}

#[test]
fn ball_profile_on_the_disk() {
    let (output, out) = with_config(
        "ball-profile",
        "profile",
        "[surface]\nkind = hyperbolic_disk\nradius = 3\nh = 0.1\n",
        &[],
    );
    let json = stdout_json(&output);
    assert!(output.status.success(), "{json}");
    let checks: Vec<&str> = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for name in ["ball-length", "ball-area", "fundamental", "top-estimate"] {
        assert!(checks.contains(&name), "missing {name} in {checks:?}");
    }
    assert_eq!(json["failures"].as_array().unwrap().len(), 0);
    let csv = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61, "header plus 60 radii");
}

#[test]
fn failing_checks_give_exit_status_one() {
    // an absurd tolerance makes the comparison checks fail
    let (output, _) = with_config(
        "ball-profile",
        "strict",
        "[surface]\nkind = flat_cylinder\ncircumference = 2\nheight = 6\nh = 0.2\n\n[profile]\nk = 3\n",
        &["--tol=-0.99"],
    );
    assert_eq!(output.status.code(), Some(1));
    let json = stdout_json(&output);
    assert_eq!(json["status"], "fail");
    assert!(!json["failures"].as_array().unwrap().is_empty());
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let config = "[metric]\nsource = random_tree\nnodes = 80\n";
    let (_, a) = with_config("delta", "repeat-a", config, &["--seed", "3"]);
    let (_, b) = with_config("delta", "repeat-b", config, &["--seed", "3"]);
    for file in ["delta.json", "four_point.json", "metric.csv"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn domain_scenario_passes() {
    let (output, _) = with_config(
        "domain",
        "domain",
        "[domain]\nouter = disk\nholes = 0.5 0 0.1; 0 -0.5 0\ngrid = 64\n\n[checks]\npolylines = 50\n",
        &[],
    );
    let json = stdout_json(&output);
    assert!(output.status.success(), "{json}");
}
