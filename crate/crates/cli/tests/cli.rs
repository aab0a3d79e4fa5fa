use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn semicz(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semicz"))
        .args(args)
        .current_dir(dir)
        .env_remove("OUTPUT_DIR")
        .output()
        .expect("spawn semicz")
}

fn run_config(dir: &Path, name: &str, config: &Value) -> Output {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    semicz(&["run", path.to_str().unwrap()], dir)
}

fn kclosed_config(count: usize, path: &str) -> Value {
    json!({
        "experiment": "kclosed",
        "grid": {"d": 1, "L": 6, "m": 2},
        "operator": "riesz",
        "t_grid": {"start": 1e-3, "stop": 1e3, "count": 7, "scale": "log"},
        "instances": {"count": count, "seed": 2024},
        "output": {"path": path, "plotdata": true}
    })
}

/// Data lines of a report, without the timestamp comment.
fn csv_body(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# generated_at_unix="));
    lines.map(str::to_string).collect()
}

#[test]
fn golden_kclosed_riesz() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "golden", &kclosed_config(20, "out/golden"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let body = csv_body(&dir.path().join("out/golden.csv"));
    assert_eq!(body.len(), 1 + 20 * 7);
    let joined = body.join("\n");
    let mut reader = csv::Reader::from_reader(joined.as_bytes());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (inst, value, ratio) = (col("instance"), col("value"), col("ratio"));
    let holds: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.ends_with("_holds"))
        .map(|(i, _)| i)
        .collect();
    assert!(holds.len() >= 6);
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    for (k, r) in records.iter().enumerate() {
        assert_eq!(&r[0], "kclosed");
        assert_eq!(&r[1], "riesz");
        assert_eq!(r[inst].parse::<usize>().unwrap(), k / 7);
        let t: f64 = r[value].parse().unwrap();
        let expected = 1e-3 * 1e6f64.powf((k % 7) as f64 / 6.0);
        assert!((t / expected - 1.0).abs() < 1e-12);
        let q: f64 = r[ratio].parse().unwrap();
        assert!(q.is_finite() && q >= 0.0);
        for &h in &holds {
            assert_eq!(&r[h], "true", "row {k} column {}", &header[h]);
        }
    }

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/golden.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "kclosed");
    assert_eq!(summary["rows"], 140);
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["grids"], json!([{"d": 1, "L": 6, "m": 2}]));
    assert_eq!(summary["seeds"].as_array().unwrap().len(), 20);
    let c = summary["C_emp"].as_f64().unwrap();
    let max_ratio = records.iter().map(|r| r[ratio].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert_eq!(c, max_ratio);
}

#[test]
fn identical_config_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = run_config(dir.path(), name, &kclosed_config(4, &format!("out/{name}")));
        assert_eq!(out.status.code(), Some(0));
    }
    let p = |f: &str| dir.path().join("out").join(f);
    assert_eq!(csv_body(&p("a.csv")), csv_body(&p("b.csv")));
    for f in ["summary.json", "_ratio.tsv"] {
        let sep = if f.starts_with('_') { "" } else { "." };
        let a = std::fs::read(p(&format!("a{sep}{f}"))).unwrap();
        let b = std::fs::read(p(&format!("b{sep}{f}"))).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn worker_count_does_not_change_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut one = kclosed_config(4, "out/one");
    let mut four = kclosed_config(4, "out/four");
    one["workers"] = json!(1);
    four["workers"] = json!(4);
    run_config(dir.path(), "one", &one);
    run_config(dir.path(), "four", &four);
    let p = |f: &str| dir.path().join("out").join(f);
    assert_eq!(csv_body(&p("one.csv")), csv_body(&p("four.csv")));
}

#[test]
fn empty_instance_count_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "empty", &kclosed_config(0, "empty"));
    assert_eq!(out.status.code(), Some(0));
    let body = csv_body(&dir.path().join("empty.csv"));
    assert_eq!(body.len(), 1);
    assert!(body[0].starts_with("experiment,operator,d,L,m,instance,seed,parameter,value"));
    let tsv = std::fs::read_to_string(dir.path().join("empty_ratio.tsv")).unwrap();
    assert_eq!(tsv, "t\tenvelope\n");
}

#[test]
fn nonpositive_threshold_exits_one_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "experiment": "weaktype",
        "grid": {"d": 1, "L": 5, "m": 2},
        "s_grid": {"start": 0.0, "stop": 4.0, "count": 3, "scale": "lin"},
        "instances": {"count": 2, "seed": 1},
        "output": {"path": "never"}
    });
    let out = run_config(dir.path(), "bad", &config);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("s_grid.start"), "{err}");
    assert!(!dir.path().join("never.csv").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = kclosed_config(1, "x");
    config["grid"]["n"] = json!(3);
    let out = run_config(dir.path(), "unknown", &config);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let mut config = kclosed_config(1, "x");
    config["colour"] = json!("red");
    let path = dir.path().join("unknown2.json");
    std::fs::write(&path, config.to_string()).unwrap();
    let out = semicz(&["validate", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mismatched_operator_and_missing_files_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = kclosed_config(1, "x");
    config["operator"] = json!("leray_12");
    assert_eq!(run_config(dir.path(), "op", &config).status.code(), Some(1));
    let out = semicz(&["run", "does-not-exist.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weaktype_plotdata_has_one_file_per_split_term() {
    let dir = tempfile::tempdir().unwrap();
    let config = json!({
        "experiment": "weaktype",
        "grid": {"d": 1, "L": 5, "m": 2},
        "s_grid": {"start": 0.25, "stop": 16.0, "count": 4, "scale": "log"},
        "instances": {"count": 3, "seed": 5},
        "output": {"path": "wt", "format": "json", "plotdata": true}
    });
    let out = run_config(dir.path(), "wt", &config);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for term in ["t_a", "t_left", "t_mixed", "t_pbp"] {
        let text = std::fs::read_to_string(dir.path().join(format!("wt_{term}.tsv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s\tL5_i0\tL5_i1\tL5_i2");
        assert_eq!(lines.len(), 5);
        assert!(lines[1..].iter().all(|l| l.split('\t').count() == 4));
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("wt.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 12);
}

#[test]
fn kclosed_plotdata_has_envelope() {
    let dir = tempfile::tempdir().unwrap();
    run_config(dir.path(), "k", &kclosed_config(3, "k"));
    let text = std::fs::read_to_string(dir.path().join("k_ratio.tsv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t\tL6_i0\tL6_i1\tL6_i2\tenvelope");
    for line in lines {
        let v: Vec<f64> = line.split('\t').map(|c| c.parse().unwrap()).collect();
        let env = v[1..4].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(v[4], env);
    }
}

#[test]
fn refine_reports_stability() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = kclosed_config(3, "r");
    config["refine"] = json!(true);
    run_config(dir.path(), "r", &config);
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["grids"].as_array().unwrap().len(), 2);
    let st = &summary["stability"];
    let ratio = st["fine"].as_f64().unwrap() / st["coarse"].as_f64().unwrap();
    assert!((st["ratio"].as_f64().unwrap() - ratio).abs() < 1e-12);
    assert_eq!(summary["rows"], 42);
}

#[test]
fn output_dir_override_applies_to_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let target = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, kclosed_config(1, "rel/out").to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_semicz"))
        .args(["run", path.to_str().unwrap()])
        .current_dir(dir.path())
        .env("OUTPUT_DIR", target.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.path().join("rel/out.csv").exists());
    assert!(!dir.path().join("rel").exists());
}

#[test]
fn every_experiment_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        json!({"experiment": "czd", "grid": {"d": 2, "L": 4, "m": 2},
               "s_grid": {"start": 0.1, "stop": 10.0, "count": 3, "scale": "log"},
               "instances": {"count": 2, "seed": 3}, "output": {"path": "czd"}}),
        json!({"experiment": "sobolev", "grid": {"d": 2, "L": 4, "m": 1},
               "t_grid": {"start": 0.01, "stop": 10.0, "count": 3, "scale": "log"},
               "instances": {"count": 2, "seed": 3}, "output": {"path": "sob"}}),
        json!({"experiment": "kernelcheck", "grid": {"d": 1, "L": 2, "m": 1},
               "s_grid": {"start": 0.01, "stop": 0.1, "count": 2, "scale": "log"},
               "instances": {"count": 2, "seed": 3}, "output": {"path": "ker"}}),
        json!({"experiment": "kclosed", "grid": {"d": 2, "L": 3, "m": 1}, "operator": "leray_complement",
               "t_grid": {"start": 0.1, "stop": 10.0, "count": 3, "scale": "log"},
               "instances": {"count": 2, "seed": 3, "freq_cutoff": 2}, "output": {"path": "lc"}}),
    ];
    for (k, c) in configs.iter().enumerate() {
        let out = run_config(dir.path(), &format!("c{k}"), c);
        assert_eq!(out.status.code(), Some(0), "{c}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn schema_and_version_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = semicz(&["schema"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let schema: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(schema["additionalProperties"], false);
    let out = semicz(&["version"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("semicz "));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let out = semicz(&["validate", path.to_str().unwrap()], &dir);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 5);
}
