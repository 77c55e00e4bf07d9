use std::path::Path;
use std::process::{Command, Output};

use cstk_cli::catalog::{catalog, Category};
use cstk_cli::config::{Config, ExperimentConfig, ExperimentKind};

fn cstk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstk")).args(args).output().expect("binary runs")
}

fn run_config(dir: &Path, toml: &str, extra: &[&str]) -> (Output, Option<serde_json::Value>) {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, toml).unwrap();
    let out = dir.join("out");
    let mut args = vec!["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend(extra);
    let o = cstk(&args);
    let report = std::fs::read_to_string(out.join("report.json")).ok().map(|s| serde_json::from_str(&s).unwrap());
    (o, report)
}

fn strip_clock(v: &mut serde_json::Value) {
    if let Some(rows) = v["rows"].as_array_mut() {
        for r in rows {
            r.as_object_mut().unwrap().remove("wall_clock_s");
        }
    }
}

#[test]
fn empty_experiment_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_config(dir.path(), "seed = 5\n", &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = report.unwrap();
    assert_eq!(r["rows"].as_array().unwrap().len(), 0);
    assert_eq!(r["summary"]["passed"], 0);
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn zero_tolerance_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_config(dir.path(), "[[experiment]]\nid = \"p\"\nkind = \"prequantum\"\ntolerance = 0.0\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ConfigInvalid"));
    assert!(report.is_none());
    let (o, _) = run_config(dir.path(), "[[experiment]]\nid = \"p\"\nkind = \"prequantum\"\n", &["--tol", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_configs_are_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    for toml in [
        "[[experiment]]\nid = \"p\"\nkind = \"prequantum\"\nbogus = 1\n",
        "[[experiment]]\nid = \"p\"\nkind = \"no-such-kind\"\n",
        "[[experiment]]\nid = \"p\"\nkind = \"gauge-defect\"\nwinding = \"cubes3.winding(7)\"\n",
        "[[experiment]]\nid = \"p\"\nkind = \"prequantum\"\n[[experiment]]\nid = \"p\"\nkind = \"pillowcase\"\n",
    ] {
        let (o, _) = run_config(dir.path(), toml, &[]);
        assert_eq!(o.status.code(), Some(2), "{toml}");
    }
    let o = cstk(&["run", "--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gauge_defect_of_degree_one_winding() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_config(
        dir.path(),
        "seed = 1\n[[experiment]]\nid = \"d1\"\nkind = \"gauge-defect\"\nwinding = \"cubes3.winding(1)\"\n",
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let row = &report.unwrap()["rows"][0];
    assert_eq!(row["values"]["defect"].as_f64().unwrap().abs(), 1.0);
    assert_eq!(row["pass"], true);
}

#[test]
fn failing_check_exits_one_and_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "[output]\ncsv = true\n[[experiment]]\nid = \"good\"\nkind = \"prequantum\"\n\
                [[experiment]]\nid = \"corrupted\"\nkind = \"prequantum\"\ncorruption = 0.3\n";
    let (o, report) = run_config(dir.path(), toml, &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("CheckFailed") && err.contains("corrupted"));
    let r = report.unwrap();
    assert_eq!(r["summary"]["passed"], 1);
    assert_eq!(r["summary"]["failed"], 1);
    assert!((r["rows"][1]["values"]["cocycle_deviation"].as_f64().unwrap() - 0.3).abs() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("out/prequantum.csv")).unwrap();
    assert!(csv.starts_with("id,pass,residual,tolerance,wall_clock_s,corruption,cocycle_deviation,holonomy_gap"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn reports_are_deterministic_in_config_and_seed() {
    let toml = "[[experiment]]\nid = \"search\"\nkind = \"flat-search\"\ntrials = 5\n\
                [[experiment]]\nid = \"pairs\"\nkind = \"prequantum\"\nsamples = 20\n\
                [[experiment]]\nid = \"mu\"\nkind = \"moment-map\"\nsamples = 3\n";
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let (o, report) = run_config(dir.path(), toml, &["--seed", seed]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut r = report.unwrap();
        strip_clock(&mut r);
        serde_json::to_string(&r).unwrap()
    };
    let a = run("11");
    assert_eq!(a, run("11"));
    assert_ne!(a, run("12"));
}

#[test]
fn overrides_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_config(
        dir.path(),
        "[[experiment]]\nid = \"sq\"\nkind = \"pillowcase\"\n",
        &["--quadrature-order", "6", "--fd-step", "1e-6", "--tol", "1e-3", "--seed", "4"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = report.unwrap();
    assert_eq!(r["config_echo"]["seed"], 4);
    let inputs = &r["rows"][0]["inputs"];
    assert_eq!(inputs["quadrature_order"], 6);
    assert_eq!(inputs["fd_step"], 1e-6);
    assert_eq!(r["rows"][0]["tolerance"], 1e-3);
}

#[test]
fn list_builtins_includes_required_names() {
    let o = cstk(&["list-builtins"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["torus2.fundamental", "cubes3.winding(1)", "cubes3.winding(2)", "SU2", "hopf", "p2"] {
        assert!(text.contains(name), "{name}");
    }
    let o = cstk(&["list-builtins", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), catalog().len());
}

#[test]
fn every_catalog_name_validates_in_a_config() {
    for e in catalog() {
        let mut x = ExperimentConfig::new("x", ExperimentKind::CsAction);
        let n = Some(e.name.clone());
        match e.category {
            Category::Chart => x.chart = n,
            Category::Cycle => x.cycle = n,
            Category::Group => x.group = n,
            Category::Polynomial => x.polynomial = n,
            Category::ToyBundle => {
                x.kind = ExperimentKind::EquivariantCheck;
                x.bundle = n
            }
            Category::WindingMap => {
                x.kind = ExperimentKind::GaugeDefect;
                x.winding = n
            }
            Category::Family => x.family = n,
        }
        let cfg = Config { experiments: vec![x], ..Default::default() };
        let text = toml::to_string(&cfg).unwrap();
        let back = Config::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        back.validate().unwrap_or_else(|err| panic!("{} {}: {err}", e.category.label(), e.name));
    }
}
