use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stitlab"))
        .args(args)
        .env_remove("STITLAB_SEED")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stitlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<f64>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn simulate_writes_requested_jumps() {
    let out = scratch("stit.jsonl");
    let o = stitlab(&[
        "simulate", "--model", "stit", "--window", "unit-square", "--measure", "iso:1", "--jumps", "50",
        "--seed", "7", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let l = lines(&out);
    assert_eq!(l.len(), 51);
    assert!(l[0].contains("\"model_tag\":\"STIT\""));
    assert_eq!(l[1..].iter().filter(|e| e.contains("\"jump\":true")).count(), 50);
}

#[test]
fn simulate_is_reproducible_and_tagged() {
    let args = ["simulate", "--model", "mecke-continuous", "--t", "1.0", "--seed", "7"];
    let a = stitlab(&args);
    let b = stitlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let header = stdout(&a).lines().next().unwrap().to_string();
    assert!(header.contains("\"model_tag\":\"MeckeContinuous\""), "{header}");
    let c = stitlab(&["simulate", "--model", "mecke-continuous", "--t", "1.0", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_stitlab"))
            .args(["simulate", "--model", "cowan", "--jumps", "5"])
            .env("STITLAB_SEED", seed)
            .output()
            .unwrap()
    };
    let flag = stitlab(&["simulate", "--model", "cowan", "--jumps", "5", "--seed", "42"]);
    assert_eq!(run("42").stdout, flag.stdout);
    assert_eq!(run("not-a-seed").status.code(), Some(2));
}

#[test]
fn simulate_from_config_file() {
    let config = scratch("experiment.json");
    let out = scratch("from-config.jsonl");
    std::fs::write(
        &config,
        format!(
            r#"{{"window": "triangle", "measure": "dirs:0:1,1.5707963267948966:2",
                "model": "mecke-discrete", "stop": {{"decisions": 30}}, "seed": 3,
                "trace_out": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = stitlab(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let l = lines(&out);
    assert_eq!(l.len(), 31);
    assert!(l[0].contains("MeckeDiscrete"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(stitlab(&["simulate", "--model", "stit"]).status.code(), Some(2));
    assert_eq!(
        stitlab(&["simulate", "--model", "stit", "--jumps", "3", "--window", "hexagon"]).status.code(),
        Some(2)
    );
    assert_eq!(
        stitlab(&["simulate", "--model", "stit", "--jumps", "3", "--measure", "iso:-2"]).status.code(),
        Some(2)
    );
    assert_eq!(stitlab(&["simulate", "--model", "tiling", "--jumps", "3"]).status.code(), Some(2));
    let config = scratch("unknown-field.json");
    std::fs::write(
        &config,
        r#"{"window": "unit-square", "measure": "iso:1", "model": "stit", "stop": {"jumps": 2}, "color": 1}"#,
    )
    .unwrap();
    assert_eq!(stitlab(&["simulate", "--config", config.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(stitlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn render_draws_one_chord_per_jump() {
    let trace = scratch("render.jsonl");
    let o = stitlab(&["simulate", "--model", "stit", "--jumps", "9", "--seed", "1", "--out", trace.to_str().unwrap()]);
    assert!(o.status.success());
    let svg = stitlab(&["render", trace.to_str().unwrap()]);
    assert!(svg.status.success());
    let text = stdout(&svg);
    assert_eq!(text.matches("<polygon").count(), 1);
    assert_eq!(text.matches("<line").count(), 9);

    let events = lines(&trace);
    let fourth: serde_json::Value = serde_json::from_str(&events[4]).unwrap();
    let at = fourth["t"].as_f64().unwrap().to_string();
    let partial = stitlab(&["render", trace.to_str().unwrap(), "--at", &at]);
    assert_eq!(stdout(&partial).matches("<line").count(), 4);
}

#[test]
fn render_empty_and_malformed_traces() {
    let empty = scratch("empty.jsonl");
    let o = stitlab(&["simulate", "--model", "stit", "--jumps", "0", "--out", empty.to_str().unwrap()]);
    assert!(o.status.success());
    let svg = stitlab(&["render", empty.to_str().unwrap()]);
    assert!(svg.status.success());
    assert_eq!(stdout(&svg).matches("<line").count(), 0);
    assert_eq!(stdout(&svg).matches("<polygon").count(), 1);

    let bad = scratch("bad.jsonl");
    std::fs::write(&bad, "{\"not\": \"a header\"}\n").unwrap();
    assert_eq!(stitlab(&["render", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(stitlab(&["render", "/nonexistent/trace.jsonl"]).status.code(), Some(2));
}

#[test]
fn verify_identities_passes() {
    let o = stitlab(&["verify", "--suite", "identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_equivalence_is_deterministic() {
    let a = scratch("reports-a.json");
    let b = scratch("reports-b.json");
    for out in [&a, &b] {
        let o = stitlab(&["verify", "--suite", "equivalence", "--seed", "7", "--replicas", "4000", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let reports: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["seed"] == 7));
}

#[test]
fn verify_mutations_fail() {
    for mutation in ["poisson-clock", "wrong-rate"] {
        let o = stitlab(&["verify", "--suite", "equivalence", "--mutate", mutation]);
        assert_eq!(o.status.code(), Some(1), "{mutation}: {}", stdout(&o));
        assert!(stdout(&o).contains("FAIL"));
    }
}

#[test]
fn table_grids_and_values() {
    let o = stitlab(&["table", "stit-cdf", "--L", "1,1.5", "--t", "0:2:0.1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("t,cdf\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][1], 0.0);

    let rows = csv_rows(&stitlab(&["table", "cowan-pmf", "--rate", "1", "--t", "1", "--k", "0:10"]));
    assert_eq!(rows.len(), 11);
    assert!((rows[0][1] - (-1f64).exp()).abs() < 1e-15);
    let a = 1.0 - (-1f64).exp();
    assert!((rows[3][1] - (-1f64).exp() * a.powi(3)).abs() < 1e-15);

    let rows = csv_rows(&stitlab(&["table", "waiting-pmf", "--n", "3", "--Lk", "1.5", "--l", "1:5"]));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1], 0.5);

    for args in [
        &["table", "stit-pdf", "--L", "1,2", "--t", "0.5"][..],
        &["table", "nu-pmf", "--t", "0.3", "--k", "0,1,2"],
        &["table", "cowan-sum-cdf", "--n", "2", "--t", "0:1:0.5"],
        &["table", "jump-pmf", "--L", "1,1.5,2.2", "--n", "1:6"],
        &["table", "mecke-tail", "--L", "1,1.5", "--t", "0.5,1"],
    ] {
        let o = stitlab(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(csv_rows(&o).iter().all(|r| (0.0..=10.0).contains(&r[1])));
    }
}

#[test]
fn table_rejects_bad_parameters() {
    assert_eq!(stitlab(&["table", "stit-cdf", "--L", "1,0.5", "--t", "1"]).status.code(), Some(2));
    assert_eq!(stitlab(&["table", "stit-cdf", "--L", "1,1.5", "--t", "2:0:0.1"]).status.code(), Some(2));
    assert_eq!(stitlab(&["table", "waiting-pmf", "--n", "1", "--Lk", "3", "--l", "1"]).status.code(), Some(2));
}
