//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed; exits nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use arch_resonance::kernel::{det_sign_logmag, BoundaryMatrix};
use arch_resonance::model::{ArchProblem, ChiralityClass, Crack};
use arch_resonance::solver::{
    boundary_det, find_frequencies, mode_shape, ModeFunction, SearchConfig, Side,
};
use arch_resonance::sweep::{run_sweep, Nonlocal, SweepContext, SweepParameter, SweepSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Independent closed form of the uncracked simply supported arch.
fn closed_form(n: u32, beta: f64, eta: f64) -> f64 {
    let l2 = (n as f64 * PI / beta).powi(2);
    (l2 - 1.0).powi(2) / (1.0 + eta * l2)
}

fn roots(problem: &ArchProblem, modes: usize) -> Vec<f64> {
    find_frequencies(problem, &SearchConfig::with_modes(modes))
        .unwrap()
        .roots()
}

fn k1(beta: f64, eta: f64, crack: Option<Crack>) -> f64 {
    roots(&ArchProblem::new(beta, eta, crack).unwrap(), 1)[0]
}

fn oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0, PI / 2.0] {
        for eta in [0.0, 0.5, 1.0, 2.0] {
            let found = roots(&ArchProblem::uncracked(beta, eta).unwrap(), 5);
            let mut expected: Vec<f64> = (1..=8)
                .map(|n| closed_form(n, beta, eta))
                .filter(|&k| k > 1e-6)
                .collect();
            expected.sort_by(f64::total_cmp);
            expected.truncate(5);
            if found.len() != 5 {
                return Err(format!("beta={beta} eta={eta}: {} roots", found.len()));
            }
            let p = ArchProblem::uncracked(beta, eta).unwrap();
            for (k, e) in found.iter().zip(&expected) {
                worst = worst.max(rel(*k, *e));
                // the determinant itself must change sign across the oracle value
                let lo = boundary_det(&p, e * (1.0 - 1e-9)).unwrap().sign;
                let hi = boundary_det(&p, e * (1.0 + 1e-9)).unwrap().sign;
                if lo * hi != -1 {
                    return Err(format!(
                        "beta={beta} eta={eta}: no sign change across K = {e}"
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("max rel err {worst:.2e}, {:.2} s", elapsed.as_secs_f64());
    if worst <= 1e-8 && elapsed < Duration::from_secs(5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn straight_limit() -> Outcome {
    let beta = 0.05;
    let omega = k1(beta, 0.0, None).sqrt() * beta * beta;
    let exact = PI * PI - beta * beta;
    let err = rel(omega, exact);
    let detail = format!(
        "Omega = {omega:.8}, pi^2 - beta^2 = {exact:.8}, rel err {err:.2e}; reference table 9.75821 differs by {:.2}%",
        100.0 * rel(9.75821, omega)
    );
    if err <= 1e-8 && rel(omega, PI * PI) < 3e-4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn nonlocal_monotonicity() -> Outcome {
    let etas = [0.0, 0.5, 1.0, 2.0, 4.0];
    let beta = 1.0;
    for crack in [
        None,
        Some(Crack {
            alpha: beta / 2.0,
            theta: 1.0,
        }),
    ] {
        let ks: Vec<f64> = etas.iter().map(|&e| k1(beta, e, crack)).collect();
        if !ks.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!("crack {crack:?}: K1 = {ks:?}"));
        }
    }
    Ok("K1 strictly decreasing over eta in {0, 0.5, 1, 2, 4}, uncracked and cracked".into())
}

fn radius_monotonicity() -> Outcome {
    for class in ChiralityClass::ALL {
        let ctx = SweepContext {
            nonlocal: Nonlocal::Physical(0.0),
            ..SweepContext::default()
        };
        let spec = SweepSpec {
            chiralities: vec![class],
            ..SweepSpec::new(SweepParameter::Radius, ctx)
        };
        let rows = run_sweep(&spec).unwrap();
        let c0 = rows[0].omega_rad_s.unwrap() * rows[0].radius_m.powi(2);
        let worst = rows
            .iter()
            .map(|r| rel(r.omega_rad_s.unwrap() * r.radius_m.powi(2), c0))
            .fold(0.0, f64::max);
        if worst > 1e-10 {
            return Err(format!("{class}: omega R^2 varies by {worst:.2e}"));
        }

        for eta_nm2 in [0.5, 1.0, 2.0] {
            let ctx = SweepContext {
                nonlocal: Nonlocal::Physical(eta_nm2 * 1e-18),
                ..SweepContext::default()
            };
            let spec = SweepSpec {
                chiralities: vec![class],
                ..SweepSpec::new(SweepParameter::Radius, ctx)
            };
            let rows = run_sweep(&spec).unwrap();
            if !rows
                .windows(2)
                .all(|w| w[1].omega_rad_s.unwrap() < w[0].omega_rad_s.unwrap())
            {
                return Err(format!(
                    "{class}: not strictly decreasing at eta = {eta_nm2} nm^2"
                ));
            }
        }
    }
    Ok("omega R^2 constant within 1e-10 at eta = 0; strictly decreasing at eta > 0".into())
}

fn crack_reduction_and_symmetry() -> Outcome {
    let (beta, eta) = (1.2, 0.5);
    let plain = roots(&ArchProblem::uncracked(beta, eta).unwrap(), 5);
    let mut worst_zero: f64 = 0.0;
    for alpha in [0.2, 0.6, 0.9] {
        let zero = roots(
            &ArchProblem::new(beta, eta, Some(Crack { alpha, theta: 0.0 })).unwrap(),
            5,
        );
        for (a, b) in zero.iter().zip(&plain) {
            worst_zero = worst_zero.max(rel(*a, *b));
        }
    }
    let mut worst_sym: f64 = 0.0;
    for (alpha, theta) in [(0.3, 1.0), (0.45, 5.0), (0.1, 0.2)] {
        let left = roots(
            &ArchProblem::new(beta, eta, Some(Crack { alpha, theta })).unwrap(),
            5,
        );
        let right = roots(
            &ArchProblem::new(
                beta,
                eta,
                Some(Crack {
                    alpha: beta - alpha,
                    theta,
                }),
            )
            .unwrap(),
            5,
        );
        for (a, b) in left.iter().zip(&right) {
            worst_sym = worst_sym.max(rel(*a, *b));
        }
    }
    let ks: Vec<f64> = [0.0, 0.1, 0.5, 1.0, 5.0]
        .iter()
        .map(|&theta| k1(beta, eta, Some(Crack { alpha: 0.5, theta })))
        .collect();
    let monotone = ks.windows(2).all(|w| w[1] <= w[0]);
    let detail = format!(
        "theta=0 max rel diff {worst_zero:.2e}, mirror max rel diff {worst_sym:.2e}, K1(theta) = {:?}",
        ks.iter().map(|k| format!("{k:.6}")).collect::<Vec<_>>()
    );
    if worst_zero <= 1e-10 && worst_sym <= 1e-8 && monotone {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cofactor_det(a: &[Vec<f64>]) -> f64 {
    if a.len() == 1 {
        return a[0][0];
    }
    (0..a.len())
        .map(|j| {
            let minor: Vec<Vec<f64>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn determinant_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 3 + i % 2;
        // rows with mixed magnitudes, as in boundary matrices
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let scale = 10f64.powf(rng.gen_range(-6.0..6.0));
                (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
            })
            .collect();
        let oracle = cofactor_det(&rows);
        let got = det_sign_logmag(&BoundaryMatrix::new(n, rows.concat()));
        let sign = if oracle > 0.0 { 1 } else { -1 };
        if got.sign != sign {
            return Err(format!("matrix {i}: sign {} vs oracle {sign}", got.sign));
        }
        worst = worst.max((got.log_magnitude - oracle.abs().ln()).exp_m1().abs());
    }
    let detail = format!("50 matrices, exact signs, max rel magnitude err {worst:.2e}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mode_shapes() -> Outcome {
    let mut worst_sine: f64 = 0.0;
    let mut worst_end: f64 = 0.0;
    for (beta, eta) in [(1.0, 0.0), (2.0, 1.0), (0.5, 0.5), (1.5, 0.2)] {
        let p = ArchProblem::uncracked(beta, eta).unwrap();
        let s = find_frequencies(&p, &SearchConfig::with_modes(1)).unwrap();
        let shape = mode_shape(&p, &s.modes[0], 201);
        for &(phi, x) in &shape {
            worst_sine = worst_sine.max((x - (PI * phi / beta).sin()).abs());
        }
        worst_end = worst_end.max(shape[0].1.abs()).max(shape[200].1.abs());
    }
    let mut min_jump = f64::INFINITY;
    for theta in [0.1, 1.0, 10.0] {
        let alpha = 0.4;
        let p = ArchProblem::new(1.0, 0.5, Some(Crack { alpha, theta })).unwrap();
        let s = find_frequencies(&p, &SearchConfig::with_modes(1)).unwrap();
        let shape = mode_shape(&p, &s.modes[0], 201);
        worst_end = worst_end.max(shape[0].1.abs()).max(shape[200].1.abs());
        let f = ModeFunction::new(&p, &s.modes[0]);
        let peak = shape
            .iter()
            .map(|&(phi, _)| f.value(phi).abs())
            .fold(0.0, f64::max);
        let jump =
            (f.derivative(alpha, 1, Side::Right) - f.derivative(alpha, 1, Side::Left)).abs() / peak;
        min_jump = min_jump.min(jump);
    }
    let detail = format!("sine deviation {worst_sine:.2e}, boundary {worst_end:.2e}, smallest slope jump {min_jump:.2e}");
    if worst_sine <= 1e-8 && worst_end <= 1e-9 && min_jump > 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sweep_commands() -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for (name, args) in common::SWEEPS {
        let start = Instant::now();
        if let Err(e) = common::check_golden(name, args) {
            failures.push(e);
        }
        let t = start.elapsed();
        if t >= Duration::from_secs(30) {
            failures.push(format!("{name}: {:.1} s", t.as_secs_f64()));
        }
        slowest = slowest.max(t);
    }
    if failures.is_empty() {
        Ok(format!(
            "{} sweeps byte-identical, slowest {:.2} s",
            common::SWEEPS.len(),
            slowest.as_secs_f64()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 closed-form oracle suite", oracle_suite),
        ("2 classical straight limit", straight_limit),
        ("3 nonlocal monotonicity", nonlocal_monotonicity),
        ("4 radius monotonicity", radius_monotonicity),
        (
            "5 crack reduction and symmetry",
            crack_reduction_and_symmetry,
        ),
        ("6 determinant oracle", determinant_oracle),
        ("7 mode shapes", mode_shapes),
        ("8 sweep commands", sweep_commands),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
