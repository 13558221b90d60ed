use std::fs;

use ddit::cli::run;
use ddit::io::parse_spectrum_csv;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ddit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ddit-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn spectrum_csv_on_stdout() {
    let (code, out, err) = call(&["spectrum", "--preset", "fig2a", "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.is_empty());
    let rows = parse_spectrum_csv(&out).unwrap();
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[1000][0], 0.0);
    assert!(rows[1000][4] < 0.01);
}

#[test]
fn grid_override_and_json() {
    let (code, out, _) = call(&["spectrum", "--preset", "fig2a", "--grid", "-1", "1", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["values"].as_array().unwrap().len(), 5);
    assert_eq!(v["grid"]["start"], -1.0);
    assert_eq!(v["kind"], "FreeSpace");
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = call(&["spectrum", "--preset", "fig4c"]).1;
    let b = call(&["spectrum", "--preset", "fig4c"]).1;
    assert_eq!(a, b);
}

#[test]
fn validate_reports_agreement() {
    let (code, out, err) = call(&["validate", "--preset", "fig2a", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["closed_vs_general"].as_f64().unwrap() <= 1e-10);
    let oracle = v["oracle_vs_general"].as_f64().unwrap();
    assert!(oracle > 0.0 && oracle < 0.05, "{oracle}");
}

#[test]
fn validate_notes_skipped_backends() {
    let (code, out, _) = call(&["validate", "--preset", "supp-fs-N7", "--grid", "-1", "1", "201"]);
    assert_eq!(code, 0);
    assert!(out.contains("closed_vs_general,skipped"));
    assert!(out.contains("oracle_vs_general,skipped"));
}

#[test]
fn rate_crossing_scan() {
    let (code, out, err) = call(&["rates", "--preset", "fig3b", "--scan-d", "0.05", "1.2", "200"]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "d,pairs,full");
    assert_eq!(rows.len(), 2);
    let d: f64 = rows[1].split(',').next().unwrap().parse().unwrap();
    assert!((d - 0.35355).abs() < 1e-5);
    assert!(rows[1].ends_with("true"));
}

#[test]
fn rates_and_eigen_tables() {
    let (code, out, _) = call(&["rates", "--preset", "fig3d", "--path", "closed", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rates = v["rates"].as_array().unwrap();
    assert_eq!(rates.len(), 5);
    assert!(rates.iter().all(|r| (r.as_f64().unwrap() - 0.2).abs() < 1e-12));
    assert_eq!(v["energies"].as_array().unwrap().len(), 5);

    let (code, out, _) = call(&["eigen", "--preset", "fig2b", "--detuning", "-0.5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "index,energy,v0,v1,v2");

    let (code, out, _) = call(&["rates", "--preset", "fig5a", "--prefactor", "1"]);
    assert_eq!(code, 0);
    let total: f64 = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn windows_command() {
    let (code, out, _) = call(&["windows", "--preset", "fig4a"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("window,")).count(), 2);
}

#[test]
fn config_file_and_out_flag() {
    let cfg = scratch("fig4a.cfg");
    fs::write(&cfg, "n = 2\nd0 = 0.8\nd = 0.4\ngamma0 = 1\ngamma = 1e-3\nomega_p = 0.03\ngrid.start = -2\ngrid.stop = 2\ngrid.count = 101\n").unwrap();
    let target = scratch("fig4a.csv");
    let (code, out, err) = call(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    assert_eq!(parse_spectrum_csv(&fs::read_to_string(&target).unwrap()).unwrap().len(), 101);
}

#[test]
fn presets_listed_and_printed() {
    let (code, out, _) = call(&["preset", "--list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 20);
    assert!(out.lines().any(|l| l.starts_with("supp-cav-N15")));
    let (code, out, _) = call(&["preset", "fig4b"]);
    assert_eq!(code, 0);
    assert!(out.contains("d0 = 2.5") && out.contains("tail.d = [5.0]"));
}

#[test]
fn input_errors_exit_one() {
    for args in [
        vec!["spectrum", "--preset", "fig9"],
        vec!["spectrum"],
        vec!["spectrum", "--preset", "fig2a", "--backend", "quantum"],
        vec!["spectrum", "--preset", "fig3b"],
        vec!["spectrum", "--preset", "supp-fs-N7", "--backend", "closed"],
        vec!["frobnicate"],
        vec!["spectrum", "--preset", "fig2a", "--grid", "1", "-1", "5"],
    ] {
        let (code, out, err) = call(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
    let cfg = scratch("broken.cfg");
    fs::write(&cfg, "n = 1\nd0 = 0.5\ngamma = 1e-3\nomega_p = 0.03\n").unwrap();
    let (code, _, err) = call(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("gamma0"), "{err}");
}

#[test]
fn solver_errors_exit_two() {
    // oracle on a chain whose tail is decoupled and lossless: stationary
    // state not unique
    let cfg = scratch("degenerate.cfg");
    fs::write(&cfg, "n = 1\nd0 = 0\ngamma0 = 1\ngamma = 0\nomega_p = 0.03\ngrid.start = -1\ngrid.stop = 1\ngrid.count = 3\n").unwrap();
    let (code, _, err) = call(&["spectrum", "--config", cfg.to_str().unwrap(), "--backend", "oracle"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("grid point 0"));
    // too coarse to resolve the window
    let (code, _, err) = call(&["windows", "--preset", "fig2a", "--grid", "-3", "3", "11"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("under-resolved"));
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("spectrum"));
}
