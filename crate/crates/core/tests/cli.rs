//! The `affsphere` binary: exit codes, determinism, config files and the
//! solve → verify pipeline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affsphere")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn out_arg(dir: &TempDir, sub: &str) -> String {
    dir.path().join(sub).to_str().unwrap().to_string()
}

#[test]
fn help_lists_exit_codes() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for line in ["2  usage error", "3  input/output error", "4  numerical failure", "5  verify ran"] {
        assert!(text.contains(line), "missing {line:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["--no-such-flag"]), 2);
    assert_eq!(code(&["solve-pde", "--out", &out]), 2);
    assert_eq!(code(&["solve-pde", "--boundary", "/no/such/file.csv", "--out", &out]), 2);
    assert_eq!(code(&["--config", "/no/such/config.toml", "painleve", "--out", &out]), 2);
    assert_eq!(code(&["solve-pde", "--preset", "liouville", "--grid", "2,2", "--out", &out]), 2);
    assert_eq!(code(&["painleve", "--refine", "9", "--out", &out]), 2);
}

#[test]
fn malformed_inputs_exit_3() {
    let d = TempDir::new().unwrap();
    let bad_csv = d.path().join("b.csv");
    fs::write(&bad_csv, "# nx=3\ni,j,x,y,psi\n0,0,0,0,oops\n").unwrap();
    let bad_toml = d.path().join("c.toml");
    fs::write(&bad_toml, "grid = [17,\n").unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["solve-pde", "--boundary", bad_csv.to_str().unwrap(), "--out", &out]), 3);
    assert_eq!(code(&["--config", bad_toml.to_str().unwrap(), "painleve", "--out", &out]), 3);
    assert_eq!(code(&["verify", "--psi", bad_csv.to_str().unwrap(), "--out", &out]), 3);
}

#[test]
fn solver_failures_exit_4() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["solve-pde", "--preset", "liouville", "--max-iter", "1", "--out", &out]), 4);
    // the k = −1 trajectory from H(1) = 1 runs into a pole near s = 1.36
    let o = run(&["painleve", "--preset", "reduction", "--n", "2", "--k", "-1", "--s-end", "3", "--out", &out]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
}

#[test]
fn outputs_are_deterministic() {
    let d = TempDir::new().unwrap();
    let (a, b) = (out_arg(&d, "a"), out_arg(&d, "b"));
    for out in [&a, &b] {
        assert_eq!(code(&["--seed", "7", "--grid", "33,33", "solve-pde", "--preset", "liouville", "--out", out]), 0);
    }
    for name in ["psi.csv", "residual.csv", "psi.svg", "solve_report.json"] {
        let (x, y) = (fs::read(Path::new(&a).join(name)).unwrap(), fs::read(Path::new(&b).join(name)).unwrap());
        assert!(x == y, "{name} differs between runs");
    }
    let c = out_arg(&d, "c");
    assert_eq!(code(&["--seed", "8", "--grid", "33,33", "solve-pde", "--preset", "liouville", "--out", &c]), 0);
    let r7 = report(Path::new(&a), "solve_report.json");
    let r8 = report(Path::new(&c), "solve_report.json");
    assert_ne!(r7["levels"][0]["residual_history"], r8["levels"][0]["residual_history"]);
}

#[test]
fn reports_carry_schema_and_csv_metadata() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["--grid", "17,17", "solve-pde", "--preset", "liouville", "--out", &out]), 0);
    let text = fs::read_to_string(Path::new(&out).join("solve_report.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let csv = fs::read_to_string(Path::new(&out).join("psi.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# ") && first.contains("nx=17") && first.contains("u=0"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("run.toml");
    fs::write(&cfg, "grid = [17, 17]\nrefine = 2\n\n[solve-pde]\npreset = \"liouville\"\n").unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["--config", cfg.to_str().unwrap(), "solve-pde", "--out", &out]), 0);
    let v = report(Path::new(&out), "solve_report.json");
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    assert_eq!(v["levels"][0]["nx"], 17);

    assert_eq!(code(&["--config", cfg.to_str().unwrap(), "--refine", "1", "solve-pde", "--out", &out]), 0);
    let v = report(Path::new(&out), "solve_report.json");
    assert_eq!(v["levels"].as_array().unwrap().len(), 1);

    fs::write(&cfg, "[solve-pde]\nno_such_key = 1\n").unwrap();
    assert_ne!(code(&["--config", cfg.to_str().unwrap(), "solve-pde", "--out", &out]), 0);
}

#[test]
fn refinement_recovers_second_order() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["--grid", "17,17", "--refine", "3", "solve-pde", "--preset", "liouville", "--out", &out]), 0);
    let v = report(Path::new(&out), "solve_report.json");
    for key in ["error_slope", "truncation_slope"] {
        let s = v[key].as_f64().unwrap();
        assert!((s - 2.0).abs() < 0.1, "{key} = {s}");
    }
}

#[test]
fn painleve_zetas_and_reduction_metadata() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["painleve", "--zetas", "1,i", "--out", &out]), 0);
    let v = report(Path::new(&out), "painleve_report.json");
    let iso = v["isomonodromy"].as_object().unwrap();
    assert_eq!(iso.len(), 2);
    assert!(iso.values().all(|r| r.as_f64().unwrap() <= 1e-8));

    assert_eq!(code(&["painleve", "--preset", "reduction", "--n", "2", "--k", "-1", "--out", &out]), 0);
    let csv = fs::read_to_string(Path::new(&out).join("trajectory.csv")).unwrap();
    let meta = csv.lines().next().unwrap();
    for kv in ["alpha=0.0", "beta=8.0", "gamma=16.0", "delta=0.0", "n=2", "k=-1"] {
        assert!(meta.contains(kv), "{meta}");
    }
    assert_eq!(code(&["painleve", "--preset", "reduction", "--n", "3", "--out", &out]), 2);
}

#[test]
fn solve_then_verify_and_corruption_is_caught() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    assert_eq!(code(&["solve-pde", "--preset", "liouville", "--out", &out]), 0);
    assert_eq!(code(&["verify", "--out", &out]), 0);
    let v = report(Path::new(&out), "verify_report.json");
    assert!(v["checks"].as_object().unwrap().values().all(|c| c["pass"] == true));

    // add 0.01 to ψ at one interior node
    let psi = Path::new(&out).join("psi.csv");
    let text = fs::read_to_string(&psi).unwrap();
    let bent: Vec<String> = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() == 5 && f[0] == "20" && f[1] == "30" {
                let v: f64 = f[4].parse().unwrap();
                format!("{},{},{},{},{:?}", f[0], f[1], f[2], f[3], v + 0.01)
            } else {
                l.to_string()
            }
        })
        .collect();
    let corrupt = d.path().join("bent.csv");
    fs::write(&corrupt, bent.join("\n") + "\n").unwrap();
    let out2 = out_arg(&d, "v");
    assert_eq!(code(&["verify", "--psi", corrupt.to_str().unwrap(), "--out", &out2]), 5);
    let v = report(Path::new(&out2), "verify_report.json");
    for check in ["pde_residual", "d_big_omega", "hitchin_residual"] {
        assert_eq!(v["checks"][check]["pass"], false, "{check}");
    }
    assert_eq!(v["checks"]["frame_gauge_defect"]["pass"], true);
}

#[test]
fn other_commands_write_reports() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "o");
    let p = Path::new(&out);
    assert_eq!(code(&["tzitzeica", "--refine", "2", "--out", &out]), 0);
    assert!(report(p, "tzitzeica_report.json")["schema"] == 1);
    assert_eq!(code(&["tzitzeica", "--system", "toda", "--eps1", "1", "--eps2", "-1", "--out", &out]), 0);
    assert_eq!(code(&["--grid", "17,17", "--refine", "2", "build-metric", "--preset", "liouville", "--out", &out]), 0);
    assert!(report(p, "metric_report.json")["schema"] == 1);
    assert_eq!(code(&["--grid", "17,17", "--refine", "2", "hessian", "--out", &out]), 0);
    assert!(report(p, "hessian_report.json")["schema"] == 1);
    assert_eq!(code(&["painleve", "--preset", "algebraic", "--out", &out]), 0);
    assert!(fs::metadata(p.join("trajectory.svg")).is_ok());
}
