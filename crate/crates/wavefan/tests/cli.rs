use std::path::Path;
use std::process::{Command, Output};

use wavefan::io::read_profile;

fn wavefan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavefan"))
        .args(args)
        .env_remove("WAVEFAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_writes_a_readable_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("shock.csv");
    let out = wavefan(&["solve", "--ul", "1", "--ur", "-1", "--eps", "0.05", "--out", arg(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("xi,u,du"));
    let first = text.lines().nth(1).unwrap();
    let digits = first.split(',').next().unwrap().trim_start_matches('-');
    assert_eq!(digits.split('e').next().unwrap().replace('.', "").len(), 17, "{first}");

    let profile = read_profile(&csv).unwrap();
    assert!((profile.u[0] - 1.0).abs() < 1e-6);
    assert!(profile.eval(0.0).abs() < 1e-8);
}

#[test]
fn solve_output_is_deterministic() {
    let args = ["solve", "--flux", "poly:0,0,0,1", "--ul", "-1", "--ur", "1", "--eps", "0.1"];
    let a = wavefan(&args);
    let b = wavefan(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["solve", "--eps", "-0.1"][..],
        &["solve", "--flux", "cubic"],
        &["solve", "--unknown"],
        &["frobnicate"],
        &["verify", "--check", "no_such_check"],
        &["corner", "--xi-min", "-2"],
    ] {
        let out = wavefan(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failed_check_exits_with_one() {
    let coarse = ["verify", "--check", "shock_first_integral_spread", "--nodes-per-layer", "100"];
    let out = wavefan(&coarse);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["shock_first_integral_spread"]["pass"], false);

    let out = wavefan(&["verify", "--check", "shock_first_integral_spread"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(&config, "# rarefaction\nul = -1\nur=1\neps=0.05\n").unwrap();

    let from_file = wavefan(&["--config", arg(&config), "solve"]);
    let explicit = wavefan(&["solve", "--ul", "-1", "--ur", "1", "--eps", "0.05"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, explicit.stdout);

    let overridden = wavefan(&["--config", arg(&config), "solve", "--ur", "2"]);
    let last = stdout(&overridden).lines().last().unwrap().to_string();
    assert!(last.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 1.99, "{last}");

    std::fs::write(&config, "colour=blue\n").unwrap();
    assert_eq!(wavefan(&["--config", arg(&config), "solve"]).status.code(), Some(2));
}

#[test]
fn seed_defaults_to_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_wavefan"));
        cmd.args(["verify", "--check", "uniqueness_shock"]).args(extra).env_remove("WAVEFAN_SEED");
        if let Some(seed) = env {
            cmd.env("WAVEFAN_SEED", seed);
        }
        cmd.output().unwrap()
    };
    let from_env = run(Some("7"), &[]);
    let from_flag = run(None, &["--seed", "7"]);
    assert_eq!(from_env.status.code(), Some(0));
    assert_eq!(from_env.stdout, from_flag.stdout);
    assert_eq!(run(Some("not-a-seed"), &[]).status.code(), Some(2));
}

#[test]
fn corner_and_riemann_subcommands() {
    let out = wavefan(&["corner"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("xi,U,p,w,H"));
    assert!(text.lines().count() > 1000);

    let out = wavefan(&["riemann", "--ul", "1", "--ur", "-1", "--samples", "11", "--window", "-1,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).to_lowercase().contains("shock"));
}

#[test]
fn sweep_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let svg = dir.path().join("plot.svg");
    let out = wavefan(&["sweep", "--eps", "0.1,0.05", "--plot", arg(&plot), "--svg", arg(&svg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 3);
    let header = std::fs::read_to_string(&plot).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 4, "{header}");
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 3);
}
