#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_arch-resonance");

/// Parameter sweeps over the presentation grids: golden name and arguments.
pub const SWEEPS: &[(&str, &[&str])] = &[
    ("beta_sweep.csv", &["sweep", "--param", "beta"]),
    ("eta_sweep.csv", &["sweep", "--param", "eta"]),
    (
        "radius_sweep.csv",
        &["sweep", "--param", "radius", "--eta-nm2", "1"],
    ),
    (
        "radius_armchair_eta0.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "armchair",
            "--eta-nm2",
            "0",
        ],
    ),
    (
        "radius_armchair_eta1.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "armchair",
            "--eta-nm2",
            "1",
        ],
    ),
    (
        "radius_armchair_eta2.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "armchair",
            "--eta-nm2",
            "2",
        ],
    ),
    (
        "radius_zigzag_eta0.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "zigzag",
            "--eta-nm2",
            "0",
        ],
    ),
    (
        "radius_zigzag_eta1.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "zigzag",
            "--eta-nm2",
            "1",
        ],
    ),
    (
        "radius_zigzag_eta2.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "zigzag",
            "--eta-nm2",
            "2",
        ],
    ),
    (
        "radius_chiral_eta0.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "chiral",
            "--eta-nm2",
            "0",
        ],
    ),
    (
        "radius_chiral_eta1.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "chiral",
            "--eta-nm2",
            "1",
        ],
    ),
    (
        "radius_chiral_eta2.csv",
        &[
            "sweep",
            "--param",
            "radius",
            "--chirality",
            "chiral",
            "--eta-nm2",
            "2",
        ],
    ),
];

/// One instance of each remaining command.
pub const COMMANDS: &[(&str, &[&str])] = &[
    (
        "freq.csv",
        &["freq", "--eta", "0", "--modes", "3", "--format", "csv"],
    ),
    (
        "freq_cracked.csv",
        &[
            "freq",
            "--crack-psi",
            "0.4",
            "--crack-alpha",
            "0.3",
            "--format",
            "csv",
        ],
    ),
    (
        "modeshape.csv",
        &["modeshape", "--mode", "1", "--samples", "200", "--eta", "0"],
    ),
    (
        "modeshape_cracked.csv",
        &[
            "modeshape",
            "--mode",
            "1",
            "--samples",
            "101",
            "--crack-psi",
            "0.5",
        ],
    ),
    (
        "validate.csv",
        &["validate", "--beta", "0.05", "--format", "csv"],
    ),
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("ARCH_RESONANCE_LOG")
        .output()
        .expect("spawn binary")
}

/// Runs `args` and compares standard output with the golden file. Set
/// `UPDATE_GOLDEN=1` to rewrite the file instead.
pub fn check_golden(name: &str, args: &[&str]) -> Result<(), String> {
    let out = run(args);
    if !out.status.success() {
        return Err(format!(
            "{name}: exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == out.stdout {
        Ok(())
    } else {
        let got = String::from_utf8_lossy(&out.stdout);
        let want = String::from_utf8_lossy(&expected);
        let first = got
            .lines()
            .zip(want.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| got.lines().count().min(want.lines().count()));
        Err(format!(
            "{name}: output differs from golden at line {}",
            first + 1
        ))
    }
}
