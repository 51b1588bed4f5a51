use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dirichlet(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirichlet"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, file: &str, json: &str) -> PathBuf {
    let p = dir.join(file);
    fs::write(&p, json).unwrap();
    p
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_linear_data_on_unit_cube() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(tmp.path().join("solve/default/result.json"));
    assert_eq!(r["converged"], true);
    assert!(r["harmonicity_residual"].as_f64().unwrap() <= 1e-10);
    assert!(r["max_error"].as_f64().unwrap() < 1e-9);
    let m = read_json(tmp.path().join("solve/default/manifest.json"));
    assert_eq!(m["config"]["h"], 0.1);
    assert_eq!(m["files"], serde_json::json!(["result.json", "field.csv"]));
    let field = fs::read_to_string(tmp.path().join("solve/default/field.csv")).unwrap();
    assert_eq!(field.lines().count(), 1 + 11 * 11 * 11);
}

#[test]
fn solve_rejects_csv_missing_a_boundary_node() {
    let tmp = TempDir::new().unwrap();
    let mut csv = String::from("x,y,z,value\n");
    for i in 0..=4 {
        for j in 0..=4 {
            for k in 0..=4 {
                let on_face = [i, j, k].iter().any(|&c| c == 0 || c == 4);
                if on_face && (i, j, k) != (0, 2, 3) {
                    let (x, y, z) = (i as f64 * 0.25, j as f64 * 0.25, k as f64 * 0.25);
                    csv.push_str(&format!("{x},{y},{z},{x}\n"));
                }
            }
        }
    }
    let data = tmp.path().join("f.csv");
    fs::write(&data, csv).unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &format!(r#"{{"h":0.25,"solve":{{"boundary":{{"kind":"csv","path":{:?}}}}}}}"#, data),
    );
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("boundary node") && err.contains("i=0, j=2, k=3"), "{err}");
}

#[test]
fn external_pole_refinement_is_second_order() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"solve":{"boundary":{"kind":"external_pole","pole":[1.5,1.5,1.5]}}}"#,
    );
    let mut errors = Vec::new();
    for (name, h) in [("h1", "0.2"), ("h2", "0.1"), ("h3", "0.05")] {
        let cfg_n = write_config(
            tmp.path(),
            &format!("{name}.json"),
            &fs::read_to_string(&cfg).unwrap().replacen('{', &format!(r#"{{"name":"{name}","#), 1),
        );
        let o = dirichlet(tmp.path(), &["--config", cfg_n.to_str().unwrap(), "--h", h, "--tol", "1e-13", "solve"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let r = read_json(tmp.path().join(format!("solve/{name}/result.json")));
        errors.push(r["max_error"].as_f64().unwrap());
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    let rate = errors[1] / errors[2];
    assert!(rate > 3.0, "ratio {rate}, errors {errors:?}");
}

#[test]
fn pole_inside_grid_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"solve":{"boundary":{"kind":"external_pole","pole":[0.5,0.5,0.5]}}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_out_of_iterations_exits_3_with_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"solve":{"boundary":{"kind":"quadratic_harmonic"},"max_iter":2}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let r = read_json(tmp.path().join("solve/default/result.json"));
    assert_eq!(r["converged"], false);
    assert_eq!(read_json(tmp.path().join("solve/default/manifest.json"))["status"], "not_converged");
}

#[test]
fn verify_suite_passes() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["--h", "0.1", "--panels", "300", "verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = read_json(tmp.path().join("verify/default/report.json"));
    assert_eq!(report["pass"], true);
    let green = fs::read_to_string(tmp.path().join("verify/default/green.csv")).unwrap();
    assert!(green.starts_with("pair,h,lhs,rhs,residual,relative\n"));
    assert_eq!(green.lines().count(), 5);
}

#[test]
fn verify_with_zero_tolerance_fails() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["--h", "0.1", "--panels", "300", "--tol", "0", "verify"]);
    assert_eq!(code(&o), 4);
    let err = stderr(&o);
    assert!(err.contains("chain_gap_coarse") && err.contains("green_generic_fine"), "{err}");
}

#[test]
fn verify_rejects_field_with_nan() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["--h", "0.25", "solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let field = fs::read_to_string(tmp.path().join("solve/default/field.csv")).unwrap();
    let mut lines: Vec<String> = field.lines().map(String::from).collect();
    let row = &mut lines[40];
    let cut = row.rfind(',').unwrap();
    row.replace_range(cut + 1.., "NaN");
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{"verify":{{"field":{bad:?}}}}}"#));
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "--h", "0.25", "verify"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("non-finite"), "{}", stderr(&o));
}

#[test]
fn relax_two_charges_reach_antipodes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"relax":{"n":2}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "--seed", "1", "relax"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(tmp.path().join("relax/default/summary.json"));
    let sep = s["min_pair_distance"].as_f64().unwrap();
    assert!((sep - 2.0).abs() <= 1e-6, "separation {sep}");
    assert_eq!(s["on_boundary"], true);
    let trace = fs::read_to_string(tmp.path().join("relax/default/trace.csv")).unwrap();
    assert!(trace.lines().count() > 2);
}

#[test]
fn relax_three_charges_reach_triangle_energy() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["--seed", "7", "relax"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(tmp.path().join("relax/default/summary.json"));
    let e = s["final_energy"].as_f64().unwrap();
    assert!((e - 3f64.sqrt()).abs() <= 1e-3, "energy {e}");
}

#[test]
fn relax_with_one_step_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"relax":{"n":4,"max_steps":1}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "relax"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(tmp.path().join("relax/default/trace.csv").exists());
}

#[test]
fn relax_reads_charge_csv() {
    let tmp = TempDir::new().unwrap();
    let charges = tmp.path().join("q.csv");
    fs::write(&charges, "x,y,z,m\n0.1,0,0,1\n-0.1,0.05,0,1\n").unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{"relax":{{"charges":{charges:?}}}}}"#));
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "relax"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let finals = fs::read_to_string(tmp.path().join("relax/default/final_positions.csv")).unwrap();
    assert_eq!(finals.lines().count(), 3);
}

#[test]
fn energy_of_uniform_sphere() {
    let tmp = TempDir::new().unwrap();
    let o = dirichlet(tmp.path(), &["--h", "0.2", "--panels", "800", "energy"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e = read_json(tmp.path().join("energy/default/energy.json"));
    let total = e["total"].as_f64().unwrap();
    let exact = 8.0 * std::f64::consts::PI.powi(2);
    assert!((total - exact).abs() / exact < 0.01, "{total} vs {exact}");
    assert!(e["chain_gap"].as_f64().unwrap() < 0.1);
}

#[test]
fn recover_uniform_sphere_density() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"recover":{"delta":0.02}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "--h", "0.2", "--panels", "300", "recover"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(tmp.path().join("recover/default/summary.json"));
    for key in ["sigma_min", "sigma_max"] {
        let v = s[key].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{key} {v}");
    }
    let sigma = fs::read_to_string(tmp.path().join("recover/default/sigma.csv")).unwrap();
    assert!(sigma.lines().next().unwrap().ends_with("value"));
}

#[test]
fn recover_rejects_box_for_sphere_potential() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"domain":{"kind":"box","lo":[0,0,0],"hi":[1,1,1]}}"#);
    let o = dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "recover"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_typos_and_bad_numbers_exit_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"spacing":0.1}"#);
    assert_eq!(code(&dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "solve"])), 2);
    assert_eq!(code(&dirichlet(tmp.path(), &["--h", "-0.1", "solve"])), 2);
    assert_eq!(code(&dirichlet(tmp.path(), &["--h", "0.2", "--panels", "0", "energy"])), 2);
    let cfg = write_config(tmp.path(), "d.json", r#"{"relax":{"shrink":1.5}}"#);
    assert_eq!(code(&dirichlet(tmp.path(), &["--config", cfg.to_str().unwrap(), "relax"])), 2);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()));
    }
    out.sort();
    out
}

#[test]
fn runs_are_bit_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for tmp in [&a, &b] {
        let o = dirichlet(tmp.path(), &["--seed", "42", "--sequential", "relax"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let o = dirichlet(tmp.path(), &["--h", "0.25", "--panels", "200", "energy"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for sub in ["relax/default", "energy/default"] {
        assert_eq!(snapshot(&a.path().join(sub)), snapshot(&b.path().join(sub)), "{sub}");
    }
}
