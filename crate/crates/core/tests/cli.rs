use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn snlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let o = snlab(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn ratio(v: &Value) -> f64 {
    let s = v.as_str().expect("exact values are strings");
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn harmonic_profile_quotients_are_k_over_n() {
    let o = snlab(&[
        "profile", "--space", "harmonic", "--k", "3", "--family", "nested", "--n-max", "200", "--format", "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 200);
    for r in &rows {
        let n: u64 = r[0].parse().unwrap();
        let q = &r[3];
        let (num, den) = q
            .split_once('/')
            .map(|(a, b)| (a.parse::<u64>().unwrap(), b.parse::<u64>().unwrap()))
            .unwrap_or_else(|| (q.parse().unwrap(), 1));
        assert_eq!(num * n, 3 * den, "row {n}: {q}");
    }
}

#[test]
fn tripod_file_is_not_embeddable() {
    let v = json(&["embed-check", "--file", data("tripod111.json").to_str().unwrap()]);
    assert_eq!(v["result"]["verdict"]["verdict"], "not-embeddable");
    assert!(v["result"]["min_eigenvalue"].as_f64().unwrap() < 0.0);
    assert_eq!(v["result"]["leading_minors"][2], "-4");
}

#[test]
fn free_group_zoom_stays_above_three() {
    let v = json(&["zoom", "--space", "free-group", "--rank", "2", "--k", "1", "--horizon", "10"]);
    assert!(ratio(&v["result"]["running_inf"]) >= 3.0);
    let scope = &v["result"]["scope"];
    for key in ["window", "horizon", "direction", "certified"] {
        assert!(scope.get(key).is_some(), "scope lacks {key}");
    }
}

#[test]
fn every_subcommand_runs_and_reports_scope() {
    let tripod = data("tripod111.json");
    let tripod = tripod.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate-graph", "--file", tripod],
        vec![
            "profile",
            "--space",
            "integer-lattice",
            "--dim",
            "1",
            "--family",
            "exhaustive",
            "--window-radius",
            "4",
            "--k",
            "1",
        ],
        vec!["sn-search", "--space", "tree-plus-ray", "--center", "ray50", "--n-max", "20"],
        vec!["amenability", "--test", "cgh", "--space", "integer-lattice", "--dim", "2", "--k", "1"],
        vec!["amenability", "--test", "bw", "--space", "integer-lattice", "--dim", "1", "--r", "2", "--n-max", "60"],
        vec!["tripod", "--space", "regular-tree", "--degree", "3"],
        vec!["embed-check", "--space", "integer-lattice", "--dim", "2", "--points", "(0,0);(1,0);(0,1);(1,1)"],
        vec!["doubling", "--space", "weighted-tree", "--t", "10,100"],
        vec!["growth-profile", "--space", "harmonic", "--horizon", "6"],
        vec!["ubg", "--space", "free-group"],
        vec!["sn-vs-doubling", "--space", "integer-lattice", "--dim", "2", "--r-min", "0", "--r-max", "2"],
        vec!["zoom", "--space", "integer-lattice", "--dim", "2", "--k", "1,2", "--horizon", "8"],
        vec!["growth-classify", "--space", "integer-lattice", "--dim", "2", "--horizon", "12"],
    ];
    for args in runs {
        let v = json(&args);
        assert_eq!(v["command"], args[0]);
        assert!(v["result"]["scope"]["horizon"].is_number() || v["result"]["scope"]["horizon"].is_null(), "{args:?}");
        assert!(v["result"]["scope"]["certified"].is_boolean(), "{args:?}: {}", v["result"]);
        assert!(v["config"]["parameters"].is_object());
    }
}

#[test]
fn zoo_list_names_every_kind() {
    let o = snlab(&["zoo", "list", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for kind in snlab::zoo::ZOO_KINDS {
        assert!(text.contains(kind.0), "{}", kind.0);
    }
}

#[test]
fn exit_codes_distinguish_failures() {
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "{\"type\": \"weighted_graph\", \"edges\": 3}").unwrap();
    let cases: [(&[&str], i32); 5] = [
        (&["profile", "--space", "hyperbolic-plane"], 2),
        (&["embed-check", "--file", bad.path().to_str().unwrap()], 2),
        (&["embed-check", "--file", "/nonexistent/space.json"], 2),
        (&["amenability", "--test", "cgh", "--space", "harmonic", "--k", "-1"], 2),
        (&["growth-classify", "--space", "free-group", "--rank", "3", "--horizon", "20", "--cap", "5000"], 3),
    ];
    for (args, code) in cases {
        let o = snlab(args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn outputs_and_plot_data_go_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("growth.json");
    let o = snlab(&[
        "growth-profile",
        "--space",
        "harmonic",
        "--horizon",
        "5",
        "--emit",
        "plot-data",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "growth-profile");
    let plot = std::fs::read_to_string(out.with_extension("plot.csv")).unwrap();
    let data_lines: Vec<&str> = plot.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data_lines.len(), 6);
    assert!(data_lines.iter().all(|l| l.split(',').count() == 2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "space = \"integer-lattice\"\ndim = 2\nhorizon = 5\nk = \"1\"\n").unwrap();
    let v = json(&["zoom", "--config", cfg.to_str().unwrap()]);
    assert_eq!(v["config"]["parameters"]["horizon"], 5);
    assert_eq!(v["config"]["space"]["dim"], 2);
    let v = json(&["zoom", "--config", cfg.to_str().unwrap(), "--horizon", "7"]);
    assert_eq!(v["config"]["parameters"]["horizon"], 7);
    assert_eq!(v["result"]["profiles"][0]["rows"].as_array().unwrap().len(), 7);
}

#[test]
fn repeated_runs_are_identical() {
    let args = [
        "sn-vs-doubling",
        "--space",
        "harmonic",
        "--r-min",
        "-3",
        "--r-max",
        "1",
        "--format",
        "csv",
        "--emit",
        "plot-data",
    ];
    let first = snlab(&args);
    assert!(first.status.success());
    for _ in 0..2 {
        assert_eq!(snlab(&args).stdout, first.stdout);
    }
}
