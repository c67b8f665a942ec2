use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kdvb_core::io::Table;
use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kdvb-lab-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvb-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn zero_initial_data_gives_a_zero_field() {
    let out = scratch("ivp");
    let o = lab(&["solve-ivp", "--amplitude", "0", "--nx", "64", "--nt", "4"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::read(&out.join("solution.csv")).unwrap();
    assert_eq!(t.header, ["t", "x", "re", "im"]);
    assert_eq!(t.rows.len(), 64 * 4);
    assert!(t.rows.iter().all(|r| r[2] == 0.0 && r[3] == 0.0));
}

#[test]
fn carleman_runs_are_reproducible() {
    let (a, b) = (scratch("carleman-a"), scratch("carleman-b"));
    let args = ["carleman", "--L", "1", "--T", "2", "--draws", "3", "--seed", "11"];
    assert!(lab(&args, &a).status.success());
    assert!(lab(&args, &b).status.success());
    for f in ["scan.csv", "ratios.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (ma, mb) = (manifest(&a), manifest(&b));
    assert_eq!(ma["summary"], mb["summary"]);
    assert_eq!(ma["manifest_sha256"], mb["manifest_sha256"]);
    let s0 = ma["summary"]["s0"].as_f64().unwrap();
    assert!((s0 - 0.8409).abs() < 1e-4, "{s0}");
    assert!(ma["summary"]["c_fit"].as_f64().unwrap() > 0.0);
    let seeds: Vec<f64> = Table::read(&a.join("ratios.csv")).unwrap().rows.iter().map(|r| r[0]).collect();
    assert_eq!(seeds, [11.0, 12.0, 13.0]);
}

#[test]
fn modes_row_for_a_equal_one() {
    let out = scratch("modes");
    assert!(lab(&["modes", "--a", "1"], &out).status.success());
    let t = Table::read(&out.join("modes.csv")).unwrap();
    assert_eq!(t.rows.len(), 1);
    let row = &t.rows[0];
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 2.2360680).abs() < 1e-7);
    assert!((row[2] - 18.0).abs() < 1e-12);
}

#[test]
fn every_output_carries_the_manifest_hash() {
    let out = scratch("spectrum");
    let cfg = out.with_extension("toml");
    std::fs::create_dir_all(cfg.parent().unwrap()).unwrap();
    std::fs::write(&cfg, "command = \"spectrum\"\n\n[physics]\nL = 1.0\nn_max = 4\n").unwrap();
    let o = lab(&["spectrum", "--config", cfg.to_str().unwrap(), "--n-max", "6"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["config"]["physics"]["L"], 1.0);
    assert_eq!(m["config"]["physics"]["n_max"], 6);
    let hash = m["manifest_sha256"].as_str().unwrap();
    let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|f| f != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(on_disk, listed);
    for f in listed {
        assert_eq!(Table::read(&out.join(f)).unwrap().meta("manifest_sha256"), Some(hash));
    }
    let t = Table::read(&out.join("eigenvalues.csv")).unwrap();
    assert_eq!(t.rows.len(), 13);
    let gamma = m["summary"]["gamma"].as_f64().unwrap();
    assert!((gamma - 2.0 * std::f64::consts::PI.powi(3)).abs() < 1e-12);
}

#[test]
fn bad_input_exits_with_two() {
    let out = scratch("bad");
    assert_eq!(lab(&["spectrum", "--L", "-1"], &out).status.code(), Some(2));
    assert_eq!(lab(&["carleman", "--variant", "other", "--draws", "1"], &out).status.code(), Some(2));
    let o = lab(&["steer", "--variant", "forward"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("support"));

    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "[physics]\nLength = 2.0\n").unwrap();
    assert_eq!(lab(&["spectrum", "--config", cfg.to_str().unwrap()], &out).status.code(), Some(2));
    std::fs::write(&cfg, "command = \"modes\"\n").unwrap();
    assert_eq!(lab(&["spectrum", "--config", cfg.to_str().unwrap()], &out).status.code(), Some(2));
}

#[test]
fn divergent_iteration_exits_with_three() {
    let out = scratch("divergent");
    let o = lab(&["solve-nonlinear", "--amplitude", "50", "--nx", "128", "--nt", "17"], &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn half_line_traces_follow_the_data() {
    let out = scratch("ibvp");
    let o = lab(&["solve-ibvp", "--amplitude", "0", "--h-amp", "0.5", "--nx", "256", "--nt", "65"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert!(m["summary"]["max_trace_error_h"].as_f64().unwrap() < 1e-3, "{m}");
}
