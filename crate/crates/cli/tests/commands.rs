use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ads-null-flows"));
    c.env_remove("ADS_NULL_FLOWS_OUT");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run_in(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run_in(dir, args).status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&read(dir, name)).expect("valid json")
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

/// Numbers written as d.ddddddddddddddddde[-]x: 17 significant digits.
fn is_17_digit(field: &str) -> bool {
    let Some((mant, exp)) = field.split_once('e') else {
        return false;
    };
    let mant = mant.strip_prefix('-').unwrap_or(mant);
    let digits: Vec<&str> = mant.split('.').collect();
    digits.len() == 2
        && digits[0].len() == 1
        && digits[1].len() == 16
        && mant.chars().all(|c| c.is_ascii_digit() || c == '.')
        && exp.trim_start_matches(['-', '+']).parse::<u32>().is_ok()
}

const FAST: [&str; 2] = ["--set", "points_per_period=40"];

#[test]
fn hierarchy_text_lists_the_polynomials() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["hierarchy", "--n-max", "2"]);
    let t = read(d.path(), "hierarchy.txt");
    assert!(t.contains("p_0 = 1\n"));
    assert!(t.contains("p_1 = u\n"));
    assert!(t.contains("p_2 = u2 - 3*u^2\n"), "{t}");
    assert!(t.contains("h_1 = 1/2*u^2\n"));
    assert!(!t.contains("r_1"));
    let j = json(d.path(), "hierarchy.json");
    assert_eq!(j["orders"].as_array().unwrap().len(), 3);
    assert_eq!(j["orders"][2]["p"], "u2 - 3*u^2");
}

#[test]
fn hierarchy_order_zero_and_lien_terms() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["hierarchy", "--n-max", "0"]);
    let t = read(d.path(), "hierarchy.txt");
    assert!(t.contains("p_0 = 1\n") && !t.contains("p_1"));

    ok(d.path(), &["hierarchy", "--n-max", "1", "--lien", "--verify"]);
    let t = read(d.path(), "hierarchy.txt");
    assert!(t.contains("r_1 = 2*u - 4\n"), "{t}");
    assert!(t.contains("q_1 = 2*u + 4\n"));
    assert!(t.contains("u_t = -u3 + 6*u*u1\n"));
    let j = json(d.path(), "hierarchy.json");
    assert!(j["checks"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn floquet_spectrum_values() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["floquet", "--mu", "0.9", "--q", "2/5", "--count", "2"]);
    let j = json(d.path(), "floquet_spectrum.json");
    let ev = j["eigenvalues"].as_array().unwrap();
    let h: Vec<f64> = ev.iter().map(|e| e["h"].as_f64().unwrap()).collect();
    assert!((h[0] - 0.93003).abs() < 1e-4 && (h[1] - 2.22598).abs() < 1e-4, "{h:?}");
    for e in ev {
        assert!((e["tau"].as_f64().unwrap() - (0.4 * std::f64::consts::PI).cos()).abs() < 1e-8);
        assert_eq!(e["order"], "5");
    }
    let csv = read(d.path(), "floquet_spectrum.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "index,h,tau,order,m11,m12,m21,m22");
    assert_eq!(rows.len(), 3);
}

#[test]
fn constant_closed_pair_has_half_spin() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["constant", "--m", "7", "--n", "3"]);
    let j = json(d.path(), "constant_classification.json");
    assert_eq!(j["meta"]["kappa_exact"], "-29/20");
    assert_eq!(j["orbit"]["spin"], "1/2");
    assert_eq!(j["orbit"]["tag"], "(E,E)");
    assert_eq!(j["knot"], serde_json::json!([-2, 5]));
    assert!(j["checks"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    // a closed curve: first and last torical points agree
    let c = json(d.path(), "constant_curve.json");
    let s = c["samples"].as_array().unwrap();
    let (a, b) = (&s[0], &s[s.len() - 1]);
    for k in ["x", "y", "z"] {
        assert!((a[k].as_f64().unwrap() - b[k].as_f64().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn constant_kappa_regimes() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["constant", "--kappa", "-1"]);
    let j = json(d.path(), "constant_classification.json");
    assert_eq!((j["case"].as_u64(), j["case_tag"].as_str()), (Some(2), Some("(P,E)")));
    assert!(j["ideal_limit"].is_string());

    ok(d.path(), &["constant", "--kappa", "2", "--s-span", "3"]);
    let j = json(d.path(), "constant_classification.json");
    assert_eq!((j["case"].as_u64(), j["case_tag"].as_str()), (Some(5), Some("(H,H)")));
    assert!(j.get("ideal_limit").is_none());
    assert_eq!(j["orbit"]["closed"], false);
}

#[test]
fn usage_errors_exit_2() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    assert_eq!(code(p, &["--set", "tol=0", "hierarchy"]), 2);
    assert_eq!(code(p, &["--set", "nonsense=1", "hierarchy"]), 2);
    assert_eq!(code(p, &["--set", "eigen_tol=abc", "hierarchy"]), 2);
    assert_eq!(code(p, &["frobnicate"]), 2);
    assert_eq!(code(p, &["hierarchy", "--n-max", "9"]), 2);
    assert_eq!(code(p, &["floquet", "--mu", "1.5", "--q", "1/2"]), 2);
    assert_eq!(code(p, &["floquet", "--mu", "0.5", "--q", "3/2"]), 2);
    assert_eq!(code(p, &["constant", "--m", "6", "--n", "3"]), 2);
    assert_eq!(code(p, &["constant", "--kappa", "1", "--m", "3", "--n", "2"]), 2);
    assert_eq!(code(p, &["kksh", "--m", "2", "--n", "4", "--h", "1", "--mu", "0.5"]), 2);
    assert_eq!(code(p, &["stationary", "--mu", "0.9", "--q-plus", "2/5", "--q-minus", "2/5", "--indices", "2,1"]), 2);
    assert_eq!(code(p, &["stationary", "--mu", "0.9", "--q-plus", "2/5", "--q-minus", "2/5", "--indices", "1,2,3"]), 2);
}

#[test]
fn numeric_failure_exits_1() {
    let d = TempDir::new().unwrap();
    let out = run_in(d.path(), &["--set", "scan_ceiling=1", "floquet", "--mu", "0.6", "--q", "0", "--count", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    // finite differences on a coarse grid miss the invariant gates
    let mut args = FAST.to_vec();
    args.extend(["stationary", "--mu", "0.9", "--q-plus", "2/5", "--q-minus", "2/5"]);
    let out = run_in(d.path(), &args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [a.path(), b.path()] {
        ok(d, &["hierarchy", "--n-max", "3", "--lien"]);
        ok(d, &["floquet", "--mu", "0.4", "--q", "3/5", "--count", "1"]);
        ok(d, &["constant", "--m", "8", "--n", "3"]);
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert!(fs::read(x).unwrap() == fs::read(y).unwrap(), "{} differs", x.display());
    }
}

#[test]
fn every_file_carries_digest_and_recipe() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["hierarchy", "--n-max", "1"]);
    ok(d.path(), &["floquet", "--mu", "0.6", "--q", "1/2", "--count", "1"]);
    ok(d.path(), &["constant", "--kappa", "0.3", "--s-span", "2"]);
    let digest = json(d.path(), "hierarchy.json")["meta"]["config_digest"].as_str().unwrap().to_string();
    assert_eq!(digest.len(), 64);
    for f in files(d.path()) {
        let text = fs::read_to_string(&f).unwrap();
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        let recipe = name.split(['_', '.']).next().unwrap();
        if name.ends_with(".json") {
            let j: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(j["meta"]["config_digest"], digest.as_str(), "{name}");
            assert_eq!(j["meta"]["recipe"], recipe, "{name}");
            assert_eq!(j["meta"]["tool"], "ads-null-flows");
        } else {
            assert!(text.contains(&format!("# config_digest: {digest}\n")), "{name}");
            assert!(text.contains(&format!("# recipe: {recipe}\n")), "{name}");
        }
    }
}

#[test]
fn digest_tracks_numeric_settings_only() {
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(a.path(), &["hierarchy", "--n-max", "0"]);
    ok(b.path(), &["hierarchy", "--n-max", "0"]);
    ok(c.path(), &["--set", "eigen_tol=1e-9", "hierarchy", "--n-max", "0"]);
    let dg = |d: &TempDir| json(d.path(), "hierarchy.json")["meta"]["config_digest"].clone();
    assert_eq!(dg(&a), dg(&b));
    assert_ne!(dg(&a), dg(&c));
}

#[test]
fn config_file_and_environment() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# tolerances\n[solver]\neigen_tol = 1e-9   # looser\n").unwrap();
    let out_env = d.path().join("env_out");
    let out = bin().env("ADS_NULL_FLOWS_OUT", &out_env).arg("--config").arg(&cfg).args(["hierarchy", "--n-max", "0"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let file_digest = json(&out_env, "hierarchy.json")["meta"]["config_digest"].clone();

    let other = d.path().join("set");
    ok(&other, &["--set", "eigen_tol=1e-9", "hierarchy", "--n-max", "0"]);
    assert_eq!(file_digest, json(&other, "hierarchy.json")["meta"]["config_digest"]);

    fs::write(&cfg, "eigen_tol 1e-9\n").unwrap();
    assert_eq!(bin().arg("--config").arg(&cfg).arg("--out").arg(d.path()).arg("hierarchy").status().unwrap().code(), Some(2));
}

#[test]
fn numbers_have_17_significant_digits() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &FAST.iter().copied().chain(["constant", "--kappa", "-2", "--s-span", "1"]).collect::<Vec<_>>());
    ok(d.path(), &["floquet", "--mu", "0.6", "--q", "1/3", "--count", "1"]);
    for name in ["constant_curve.csv", "constant_curve_cousins.csv", "floquet_tau.csv"] {
        let text = read(d.path(), name);
        let mut rows = text.lines().filter(|l| !l.starts_with('#')).skip(1).peekable();
        assert!(rows.peek().is_some());
        for row in rows {
            for f in row.split(',').filter(|f| *f != "plus" && *f != "minus") {
                assert!(is_17_digit(f), "{name}: {f}");
            }
        }
    }
    for line in read(d.path(), "constant_curve.obj").lines().filter(|l| l.starts_with("v ")) {
        assert!(line[2..].split(' ').all(is_17_digit), "{line}");
    }
    let raw = read(d.path(), "floquet_spectrum.json");
    let h = raw.lines().find(|l| l.trim_start().starts_with("\"h\"")).unwrap();
    assert!(is_17_digit(h.split(':').nth(1).unwrap().trim().trim_end_matches(',')), "{h}");
}

#[test]
fn stationary_snapshot_at_zero_is_the_base_curve() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["stationary", "--mu", "0.9", "--q-plus", "2/5", "--q-minus", "2/5", "--indices", "1,2", "--t", "0,0.1"]);
    assert_eq!(read(d.path(), "stationary_t0.csv"), read(d.path(), "stationary_curve.csv"));
    let diag = json(d.path(), "stationary_diagnostics.json");
    assert!(diag["checks"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    assert_eq!(diag["orbit"]["closed"], true);
    // the evolved curve moves but stays on the quadric
    let moved = json(d.path(), "stationary_t1.json");
    assert_eq!(moved["t"].as_f64(), Some(0.1));
    for s in moved["samples"].as_array().unwrap() {
        let m: Vec<f64> = s["matrix"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((m[0] * m[3] - m[1] * m[2] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn kksh_run_passes_its_gates() {
    let d = TempDir::new().unwrap();
    let mut args = FAST.to_vec();
    args.extend(["kksh", "--m", "1", "--n", "6", "--h", "2", "--mu", "0.615", "--t", "0,0.3"]);
    ok(d.path(), &args);
    let j = json(d.path(), "kksh_summary.json");
    assert_eq!(j["meta"]["orbit"], "(H,E)");
    assert!(j["checks"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    assert!(j["meta"]["zeta1"].as_f64().unwrap() > 1.0);
    let inv = read(d.path(), "kksh_invariants.csv");
    assert_eq!(inv.lines().filter(|l| !l.starts_with('#')).count(), 11);
    assert!(d.path().join("kksh_t1.obj").exists());
}

#[test]
fn check_battery_passes() {
    let d = TempDir::new().unwrap();
    let out = run_in(d.path(), &["check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("monodromy preservation") && !stdout.contains("FAIL"));
    let j = json(d.path(), "check.json");
    assert_eq!(j["pass"], true);
    assert_eq!(j["meta"]["recipe"], "check");
}
