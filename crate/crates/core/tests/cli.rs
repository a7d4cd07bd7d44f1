mod common;

use std::fs;

use common::{check_golden, run, COMMANDS};

#[test]
fn command_goldens() {
    let failures: Vec<String> = COMMANDS
        .iter()
        .filter_map(|(n, a)| check_golden(n, a).err())
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn freq_first_line_reports_fundamental() {
    let out = run(&["freq", "--beta", "1", "--eta", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    let k1: f64 = first.strip_prefix("K1 = ").unwrap().parse().unwrap();
    let l2 = std::f64::consts::PI.powi(2);
    assert!(((k1 - (l2 - 1.0).powi(2)) / k1).abs() < 1e-8, "{first}");
}

#[test]
fn json_schema() {
    let out = run(&["freq", "--modes", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["problem"].is_object());
    let spectrum = v["spectrum"].as_array().unwrap();
    assert_eq!(spectrum.len(), 2);
    for (i, m) in spectrum.iter().enumerate() {
        assert_eq!(m["mode"], i + 1);
        for key in ["K", "omega_nd", "omega_rad_s"] {
            assert!(m[key].as_f64().unwrap() > 0.0);
        }
        assert_eq!(m["flag"], "bracketed");
    }
}

#[test]
fn modeshape_file_has_pinned_ends() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m1.csv");
    let out = run(&[
        "modeshape",
        "--mode",
        "1",
        "--samples",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0].1, 0.0);
    assert_eq!(rows[199].1, 0.0);
    assert_eq!(rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max), 1.0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["freq", "--bogus", "1"][..],
        &["freq", "--eta", "1", "--eta-nm2", "1"],
        &["sweep", "--param", "eta", "--steps", "1"],
        &["sweep", "--param", "height"],
        &["freq", "--crack-alpha", "0.5"],
        &["freq", "--n", "5"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["freq", "--bogus", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn runtime_errors_exit_1() {
    let out = run(&["freq", "--crack-psi", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["freq", "--beta", "9"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = run(&["freq", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_0() {
    for args in [&["--help"][..], &["--version"], &["sweep", "--help"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let presets = dir.path().join("p.toml");
    fs::write(
        &presets,
        "[armchair]\nyoungs_modulus_tpa = 2.0\ndiameter_nm = 1.0\nwall_thickness_nm = 0.34\n\
         mass_per_length_kg_per_m = 2e-15\narch_radius_nm = 20.0\n",
    )
    .unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "[geometry]\nbeta = 2.0\n[material]\nchirality = \"armchair\"\npresets = \"p.toml\"\n\
         [nonlocal]\neta = 0.0\n[crack]\nmodel = \"power-law\"\nkappa0 = 1.0\npsi = 0.5\nalpha_rad = 0.5\n\
         [search]\nmodes = 2\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let doc = |extra: &[&str]| {
        let mut args = vec!["freq", "--config", c, "--format", "json"];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let v = doc(&[]);
    assert_eq!(v["problem"]["beta_rad"], 2.0);
    assert_eq!(v["problem"]["radius_m"].as_f64().unwrap(), 20e-9);
    assert_eq!(v["problem"]["crack"]["alpha_rad"], 0.5);
    // theta = kappa0 (h / R) psi^2 / (1 - psi)^2 = 0.34 / 20
    assert!((v["problem"]["crack"]["theta"].as_f64().unwrap() - 0.017).abs() < 1e-15);
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 2);

    let v = doc(&["--beta", "1.5", "--modes", "1", "--crack-alpha", "0.7"]);
    assert_eq!(v["problem"]["beta_rad"], 1.5);
    assert_eq!(v["problem"]["crack"]["alpha_rad"], 0.7);
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 1);
}

#[test]
fn polynomial_model_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "[crack]\nmodel = \"polynomial\"\ncoefficients = [0.0, 0.0, 2.0]\nscale = 1.0\npsi = 0.5\n",
    )
    .unwrap();
    let out = run(&[
        "freq",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // 2 psi^2 (h / R) with h = 0.34 nm, R = 10 nm
    assert!((v["problem"]["crack"]["theta"].as_f64().unwrap() - 0.5 * 0.034).abs() < 1e-15);

    fs::write(
        &cfg,
        "[crack]\nmodel = \"polynomial\"\ncoefficients = [0.1, 1.0]\npsi = 0.5\n",
    )
    .unwrap();
    assert_eq!(
        run(&["freq", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn log_level_from_environment() {
    let args = [
        "sweep",
        "--param",
        "eta",
        "--steps",
        "2",
        "--chirality",
        "armchair",
    ];
    let quiet = run(&args);
    assert!(quiet.status.success());
    assert!(quiet.stderr.is_empty());
    let out = std::process::Command::new(common::BIN)
        .args(args)
        .env("ARCH_RESONANCE_LOG", "debug")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta sweep: 2 points"));
    assert_eq!(out.stdout, quiet.stdout);
}
