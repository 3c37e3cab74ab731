use std::path::PathBuf;

use ads_null_flows::config::RunConfig;
use ads_null_flows::error::CliError;

fn overrides(kv: &[&str]) -> Result<RunConfig, CliError> {
    RunConfig::load(None, &kv.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

#[test]
fn tol_sets_every_tolerance() {
    let c = overrides(&["tol=1e-7"]).unwrap();
    for v in [c.integrator_rel_tol, c.integrator_abs_tol, c.eigen_tol, c.rational_tol, c.mu_star_tol] {
        assert_eq!(v, 1e-7);
    }
    assert_eq!(c.scan_ceiling, RunConfig::default().scan_ceiling);
}

#[test]
fn later_overrides_win() {
    let c = overrides(&["tol=1e-7", "eigen_tol=1e-11"]).unwrap();
    assert_eq!((c.eigen_tol, c.rational_tol), (1e-11, 1e-7));
}

#[test]
fn invalid_settings_are_config_errors() {
    for kv in ["tol=0", "eigen_tol=-1", "points_per_period=3", "rational_cap=0", "scan_ceiling=nan", "what=1", "eigen_tol"] {
        let e = overrides(&[kv]).unwrap_err();
        assert!(matches!(e, CliError::Config { .. }), "{kv}: {e}");
        assert_eq!(e.exit_code(), 2);
    }
}

#[test]
fn digest_ignores_the_output_directory() {
    let a = RunConfig::default();
    let b = RunConfig { out_dir: PathBuf::from("/elsewhere"), ..RunConfig::default() };
    assert_eq!(a.digest(), b.digest());
    assert!(!a.canonical().contains("out_dir"));
    let c = RunConfig { rational_cap: 65, ..RunConfig::default() };
    assert_ne!(a.digest(), c.digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn canonical_form_is_sorted_lines() {
    let lines: Vec<String> = RunConfig::default().canonical().lines().map(str::to_string).collect();
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    assert!(lines.iter().all(|l| l.contains('=')));
}
