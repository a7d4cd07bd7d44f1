//! Natural frequencies as zeros of the boundary determinant in `K`, and the
//! corresponding mode shapes.
//!
//! The determinant is sampled on a grid that merges a uniform grid in `K`, a
//! uniform grid in `sqrt(K)` and guide points at and around the closed-form
//! uncracked eigenvalues. Sign changes are refined by bisection. Grid points
//! where the determinant dips by six decades or more without changing sign,
//! or vanishes between two samples of equal sign, are reported as suspected
//! double roots.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{
    assemble_cracked, assemble_uncracked, characteristic_coefficients, det_sign_logmag,
    null_vector, quartic_roots, uncracked_K_closed_form, BoundaryMatrix, DetSign, ModeBasis,
    DEGENERACY_TOL,
};
use crate::model::ArchProblem;

/// Decades of determinant dip, relative to both neighbours, that flag a
/// suspected double root.
const DIP_DECADES: f64 = 6.0;

/// Relative offset of the guide points placed around closed-form eigenvalues.
const GUIDE_OFFSET: f64 = 1e-6;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub k_min: f64,
    /// Upper end of the scan; `None` picks ten times the largest closed-form
    /// eigenvalue among the first `max(5, max_modes)` modes.
    pub k_max: Option<f64>,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub max_modes: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k_min: 1e-6,
            k_max: None,
            grid_points: 2000,
            refine_tol: 1e-10,
            max_modes: 5,
        }
    }
}

impl SearchConfig {
    pub fn with_modes(max_modes: usize) -> Self {
        Self {
            max_modes,
            ..Self::default()
        }
    }

    /// Checks the invariants and resolves `k_max` for `problem`.
    pub fn resolve(&self, problem: &ArchProblem) -> Result<(f64, f64)> {
        let k_max = match self.k_max {
            Some(k) => k,
            None => {
                let modes = self.max_modes.max(5) as u32;
                let largest = (1..=modes)
                    .map(|n| uncracked_K_closed_form(n, problem.beta(), problem.eta_nd()))
                    .fold(0.0, f64::max);
                10.0 * largest
            }
        };
        if !(self.k_min >= 0.0 && self.k_min < k_max && k_max.is_finite()) {
            return Err(Error::InvalidSearch(format!(
                "need 0 <= k_min < k_max, got [{}, {k_max}]",
                self.k_min
            )));
        }
        if self.grid_points < 16 {
            return Err(Error::InvalidSearch(format!(
                "grid_points must be >= 16, got {}",
                self.grid_points
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol < 1e-3) {
            return Err(Error::InvalidSearch(format!(
                "refine_tol must lie in (0, 1e-3), got {}",
                self.refine_tol
            )));
        }
        if self.max_modes == 0 {
            return Err(Error::InvalidSearch("max_modes must be >= 1".into()));
        }
        Ok((self.k_min, k_max))
    }
}

/// Boundary matrix of `problem` at trial eigenvalue `k`.
pub fn boundary_matrix(problem: &ArchProblem, k: f64) -> Result<BoundaryMatrix> {
    let basis = basis_at(problem, k);
    match problem.crack() {
        None => Ok(assemble_uncracked(&basis, problem.beta())),
        Some(c) => assemble_cracked(&basis, problem.beta(), c.alpha, c.theta),
    }
}

pub fn basis_at(problem: &ArchProblem, k: f64) -> ModeBasis {
    quartic_roots(
        characteristic_coefficients(k, problem.eta_nd()),
        DEGENERACY_TOL,
    )
}

pub fn boundary_det(problem: &ArchProblem, k: f64) -> Result<DetSign> {
    Ok(det_sign_logmag(&boundary_matrix(problem, k)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScanResult {
    /// Intervals with opposite determinant signs at their ends, ascending.
    pub brackets: Vec<Bracket>,
    /// Grid points where the determinant is numerically zero between samples
    /// of opposite sign.
    pub exact: Vec<f64>,
    /// Grid points with a deep dip, or a numerical zero, and no sign change.
    pub suspected_doubles: Vec<f64>,
}

fn search_grid(problem: &ArchProblem, cfg: &SearchConfig, k_min: f64, k_max: f64) -> Vec<f64> {
    let n = cfg.grid_points;
    let mut grid = Vec::with_capacity(2 * n + 64);
    let (r_min, r_max) = (k_min.sqrt(), k_max.sqrt());
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        grid.push(k_min + (k_max - k_min) * t);
        let r = r_min + (r_max - r_min) * t;
        grid.push(r * r);
    }
    for n in 1.. {
        let k = uncracked_K_closed_form(n, problem.beta(), problem.eta_nd());
        if n as f64 * std::f64::consts::PI / problem.beta() > 1.0 && k > k_max {
            break;
        }
        for g in [k * (1.0 - GUIDE_OFFSET), k, k * (1.0 + GUIDE_OFFSET)] {
            if g > k_min && g < k_max {
                grid.push(g);
            }
        }
    }
    grid.retain(|&k| k >= k_min && k <= k_max);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Turns determinant samples on an ascending grid into brackets, exact zeros
/// and suspected double roots.
pub fn classify_samples(grid: &[f64], dets: &[DetSign], k_min: f64) -> ScanResult {
    let mut out = ScanResult::default();
    let dip = DIP_DECADES * std::f64::consts::LN_10;
    let nonzero_before = |i: usize| dets[..i].iter().rev().map(|d| d.sign).find(|&s| s != 0);
    let nonzero_after = |i: usize| dets[i + 1..].iter().map(|d| d.sign).find(|&s| s != 0);
    for i in 0..grid.len() {
        if dets[i].sign == 0 {
            if grid[i] <= k_min || (i > 0 && dets[i - 1].sign == 0) {
                continue;
            }
            // one report per run of zero samples
            match (nonzero_before(i), nonzero_after(i)) {
                (Some(a), Some(b)) if a == b => out.suspected_doubles.push(grid[i]),
                _ => out.exact.push(grid[i]),
            }
            continue;
        }
        if i + 1 < grid.len() && dets[i].sign * dets[i + 1].sign == -1 {
            out.brackets.push(Bracket {
                lo: grid[i],
                hi: grid[i + 1],
            });
        }
        if i > 0 && i + 1 < grid.len() {
            let (a, b, c) = (&dets[i - 1], &dets[i], &dets[i + 1]);
            if a.sign == b.sign
                && b.sign == c.sign
                && b.scaled_log_magnitude
                    <= a.scaled_log_magnitude.min(c.scaled_log_magnitude) - dip
            {
                out.suspected_doubles.push(grid[i]);
            }
        }
    }
    out
}

pub fn scan_and_bracket(problem: &ArchProblem, cfg: &SearchConfig) -> Result<ScanResult> {
    let (k_min, k_max) = cfg.resolve(problem)?;
    let grid = search_grid(problem, cfg, k_min, k_max);
    let dets: Vec<DetSign> = grid
        .par_iter()
        .map(|&k| boundary_det(problem, k))
        .collect::<Result<_>>()?;

    let out = classify_samples(&grid, &dets, k_min);
    if out.brackets.is_empty() && out.exact.is_empty() && out.suspected_doubles.is_empty() {
        return Err(Error::NoRootsInRange { k_min, k_max });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootFlag {
    Bracketed,
    SuspectedDouble,
}

impl RootFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootFlag::Bracketed => "bracketed",
            RootFlag::SuspectedDouble => "suspected-double",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedRoot {
    pub k: f64,
    /// Set when refinement stopped on a numerically zero determinant instead
    /// of reaching the width tolerance.
    pub lost_bracket: bool,
}

/// Bisects `bracket` until its width is at most `refine_tol * max(1, K)`.
pub fn refine_root(
    bracket: Bracket,
    problem: &ArchProblem,
    cfg: &SearchConfig,
) -> Result<RefinedRoot> {
    let lost = |k| {
        Ok(RefinedRoot {
            k,
            lost_bracket: true,
        })
    };
    let Bracket { mut lo, mut hi } = bracket;
    let s_lo = boundary_det(problem, lo)?.sign;
    if s_lo == 0 {
        return lost(lo);
    }
    let s_hi = boundary_det(problem, hi)?.sign;
    if s_hi == 0 {
        return lost(hi);
    }
    if s_lo * s_hi != -1 {
        return Err(Error::NotBracketed { lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= cfg.refine_tol * mid.max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        match boundary_det(problem, mid)?.sign {
            0 => return lost(mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(RefinedRoot {
        k: 0.5 * (lo + hi),
        lost_bracket: false,
    })
}

/// One eigenpair: eigenvalue and the basis coefficients of the mode.
///
/// Coefficients are 4 values for an uncracked arch, or 8 (left segment then
/// right segment) with a crack, in the column order of the boundary matrix.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub K: f64,
    pub coefficients: Vec<f64>,
    pub flag: RootFlag,
    /// Smallest pivot of the row-normalized boundary matrix at `K`.
    pub min_pivot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub modes: Vec<Mode>,
}

impl Spectrum {
    pub fn roots(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.K).collect()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

pub fn find_frequencies(problem: &ArchProblem, cfg: &SearchConfig) -> Result<Spectrum> {
    let (k_min, k_max) = cfg.resolve(problem)?;
    let scan = scan_and_bracket(problem, cfg)?;

    let refined: Vec<RefinedRoot> = scan
        .brackets
        .par_iter()
        .map(|&b| refine_root(b, problem, cfg))
        .collect::<Result<_>>()?;
    // a numerically zero determinant inside a sign-change bracket is still a simple root
    let mut roots: Vec<(f64, RootFlag)> = refined
        .into_iter()
        .map(|r| (r.k, RootFlag::Bracketed))
        .collect();
    roots.extend(scan.exact.iter().map(|&k| (k, RootFlag::Bracketed)));
    roots.extend(
        scan.suspected_doubles
            .iter()
            .map(|&k| (k, RootFlag::SuspectedDouble)),
    );
    roots.retain(|r| r.0 > k_min);
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|b, a| b.0 <= a.0);
    roots.truncate(cfg.max_modes);
    if roots.is_empty() {
        return Err(Error::NoRootsInRange { k_min, k_max });
    }

    let modes = roots
        .into_iter()
        .map(|(k, flag)| {
            let m = boundary_matrix(problem, k)?;
            let det = det_sign_logmag(&m);
            Ok(Mode {
                K: k,
                coefficients: null_vector(&m),
                flag,
                min_pivot: det.min_pivot,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { modes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Evaluates a mode and its derivatives anywhere on `[0, beta]`.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    basis: ModeBasis,
    beta: f64,
    alpha: Option<f64>,
    coefficients: Vec<f64>,
}

impl ModeFunction {
    pub fn new(problem: &ArchProblem, mode: &Mode) -> Self {
        let alpha = problem.crack().map(|c| c.alpha);
        let expected = if alpha.is_some() { 8 } else { 4 };
        assert_eq!(
            mode.coefficients.len(),
            expected,
            "mode does not belong to this problem"
        );
        Self {
            basis: basis_at(problem, mode.K),
            beta: problem.beta(),
            alpha,
            coefficients: mode.coefficients.clone(),
        }
    }

    /// `order`-th derivative at `phi`. At the crack, `side` picks the segment.
    pub fn derivative(&self, phi: f64, order: usize, side: Side) -> f64 {
        let (offset, start, span) = match self.alpha {
            None => (0, 0.0, self.beta),
            Some(a) if phi < a || (phi == a && side == Side::Left) => (0, 0.0, a),
            Some(a) => (4, a, self.beta - a),
        };
        let x = phi - start;
        (0..4)
            .map(|c| self.coefficients[offset + c] * self.basis.eval(c, order, x, span))
            .sum()
    }

    pub fn value(&self, phi: f64) -> f64 {
        self.derivative(phi, 0, Side::Left)
    }
}

/// Samples the mode on `samples` uniformly spaced points of `[0, beta]`,
/// normalized so the sample of largest magnitude equals exactly 1.
pub fn mode_shape(problem: &ArchProblem, mode: &Mode, samples: usize) -> Vec<(f64, f64)> {
    let f = ModeFunction::new(problem, mode);
    let beta = problem.beta();
    let mut out: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let phi = if samples == 1 {
                0.0
            } else if i + 1 == samples {
                beta
            } else {
                beta * i as f64 / (samples - 1) as f64
            };
            (phi, f.value(phi))
        })
        .collect();
    let peak = out
        .iter()
        .map(|&(_, x)| x)
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if peak != 0.0 {
        for p in &mut out {
            p.1 /= peak;
        }
    }
    out
}
