//! Parameter sweeps over central angle, nonlocal parameter and arch radius,
//! and the straight-limit comparison table.
//!
//! Sweep points are solved in parallel and reassembled in parameter-major
//! order (all chiralities for the first value, then the next value). A point
//! whose search finds no root becomes a row with blank frequency columns and
//! the note `no-root`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crack::ComplianceModel;
use crate::error::{Error, Result};
use crate::model::{
    nondimensionalize, omega_from_K, omega_nd, resolve_preset, ArchProblem, ChiralityClass,
    CrackSpec, PhysicalTube, PresetTable, NM,
};
use crate::solver::{find_frequencies, SearchConfig};

pub const CSV_HEADER: &str =
    "chirality,beta_rad,eta_nd,radius_m,alpha_rad,psi,mode,K,omega_nd,omega_rad_s,note";

/// Published straight-limit frequencies for `eta = 0, 1, 2, 3, 4` (nm^2):
/// the cracked-arch model and a nonlocal Euler beam (Thai).
pub const REFERENCE_PRESENT: [f64; 5] = [9.75821, 7.05584, 5.80188, 5.04192, 4.51883];
pub const REFERENCE_THAI: [f64; 5] = [9.2745, 8.8482, 8.4757, 8.1466, 7.8530];

/// Span used to turn the table's nonlocal parameter (nm^2) into `eta_nd`.
pub const DEFAULT_SPAN_NM: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Beta,
    Eta,
    Radius,
}

impl SweepParameter {
    /// Presentation grid `(from, to, steps)`; radius in metres.
    pub fn default_range(&self) -> (f64, f64, usize) {
        match self {
            SweepParameter::Beta => (0.1, 3.0, 59),
            SweepParameter::Eta => (0.0, 4.0, 41),
            SweepParameter::Radius => (5.0 * NM, 50.0 * NM, 41),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::Beta => "beta",
            SweepParameter::Eta => "eta",
            SweepParameter::Radius => "radius",
        })
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(SweepParameter::Beta),
            "eta" => Ok(SweepParameter::Eta),
            "radius" => Ok(SweepParameter::Radius),
            other => Err(Error::InvalidSpec(format!(
                "unknown sweep parameter '{other}'"
            ))),
        }
    }
}

/// Nonlocal parameter, either already scaled by `R^2` or physical in m^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlocal {
    Dimensionless(f64),
    Physical(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCrack {
    /// Crack angle; midspan `beta / 2` when unset, so it follows beta sweeps.
    pub alpha: Option<f64>,
    pub psi: f64,
    pub model: ComplianceModel,
}

/// Everything except the swept parameter and the chirality.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepContext {
    pub beta: f64,
    pub nonlocal: Nonlocal,
    pub crack: Option<SweepCrack>,
    pub presets: PresetTable,
    /// Overrides of the preset arch radius and tube diameter, metres.
    pub radius: Option<f64>,
    pub diameter: Option<f64>,
    pub search: SearchConfig,
}

impl Default for SweepContext {
    fn default() -> Self {
        Self {
            beta: 1.0,
            nonlocal: Nonlocal::Dimensionless(1.0),
            crack: None,
            presets: PresetTable::shipped(),
            radius: None,
            diameter: None,
            search: SearchConfig::default(),
        }
    }
}

/// A fully resolved point: tube, nondimensional problem and crack depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub chirality: ChiralityClass,
    pub tube: PhysicalTube,
    pub problem: ArchProblem,
    pub psi: Option<f64>,
}

impl SweepContext {
    pub fn resolve(&self, chirality: ChiralityClass) -> Result<Resolved> {
        let mut tube = resolve_preset(chirality, &self.presets)?;
        if let Some(d) = self.diameter {
            tube = tube.with_diameter(d)?;
        }
        if let Some(r) = self.radius {
            tube = tube.with_radius(r)?;
        }
        let eta_physical = match self.nonlocal {
            Nonlocal::Dimensionless(e) => e * tube.radius() * tube.radius(),
            Nonlocal::Physical(e) => e,
        };
        let crack = self.crack.as_ref().map(|c| CrackSpec {
            position_angle: c.alpha.unwrap_or(0.5 * self.beta),
            depth_ratio: c.psi,
            compliance_model: c.model.clone(),
        });
        let mut problem = nondimensionalize(&tube, self.beta, eta_physical, crack.as_ref())?;
        if let Nonlocal::Dimensionless(e) = self.nonlocal {
            // keep the exact value rather than e R^2 / R^2
            problem = ArchProblem::new(problem.beta(), e, problem.crack())?;
        }
        Ok(Resolved {
            chirality,
            tube,
            problem,
            psi: self.crack.as_ref().map(|c| c.psi),
        })
    }

    fn with_value(&self, parameter: SweepParameter, value: f64) -> Self {
        let mut ctx = self.clone();
        match parameter {
            SweepParameter::Beta => ctx.beta = value,
            SweepParameter::Eta => ctx.nonlocal = Nonlocal::Dimensionless(value),
            SweepParameter::Radius => ctx.radius = Some(value),
        }
        ctx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub context: SweepContext,
    pub chiralities: Vec<ChiralityClass>,
    /// One-based mode index.
    pub mode: usize,
}

impl SweepSpec {
    /// Spec over the presentation grid for `parameter`, all chiralities, mode 1.
    pub fn new(parameter: SweepParameter, context: SweepContext) -> Self {
        let (from, to, steps) = parameter.default_range();
        Self {
            parameter,
            from,
            to,
            steps,
            context,
            chiralities: ChiralityClass::ALL.to_vec(),
            mode: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * (i as f64 / last)
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::InvalidSpec(format!(
                "range must satisfy from < to, got {} .. {}",
                self.from, self.to
            )));
        }
        if self.mode == 0 {
            return Err(Error::InvalidSpec("mode index is one-based".into()));
        }
        if self.chiralities.is_empty() {
            return Err(Error::InvalidSpec("empty chirality set".into()));
        }
        Ok(())
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub chirality: ChiralityClass,
    pub beta: f64,
    pub eta_nd: f64,
    pub radius_m: f64,
    pub alpha_rad: Option<f64>,
    pub psi: Option<f64>,
    pub mode: usize,
    pub K: Option<f64>,
    pub omega_nd: Option<f64>,
    pub omega_rad_s: Option<f64>,
    pub note: String,
}

/// Solves mode `mode` (one-based) of a resolved point.
pub fn solve_point(point: &Resolved, mode: usize, search: &SearchConfig) -> SweepRow {
    let cfg = SearchConfig {
        max_modes: search.max_modes.max(mode),
        ..*search
    };
    let p = &point.problem;
    let k = match find_frequencies(p, &cfg) {
        Ok(s) => s.modes.get(mode - 1).map(|m| m.K),
        Err(e) => {
            warn!(
                "{} beta={} eta_nd={}: {e}",
                point.chirality,
                p.beta(),
                p.eta_nd()
            );
            None
        }
    };
    SweepRow {
        chirality: point.chirality,
        beta: p.beta(),
        eta_nd: p.eta_nd(),
        radius_m: point.tube.radius(),
        alpha_rad: p.crack().map(|c| c.alpha),
        psi: point.psi,
        mode,
        K: k,
        omega_nd: k.map(|k| omega_nd(k, p.beta())),
        omega_rad_s: k.map(|k| omega_from_K(k, &point.tube)),
        note: if k.is_some() {
            String::new()
        } else {
            "no-root".into()
        },
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.steps * spec.chiralities.len());
    for v in spec.values() {
        let ctx = spec.context.with_value(spec.parameter, v);
        for &class in &spec.chiralities {
            let point = ctx.resolve(class).map_err(|e| {
                Error::InvalidSpec(format!("{} = {v} for {class}: {e}", spec.parameter))
            })?;
            points.push(point);
        }
    }
    debug!(
        "{} sweep: {} points, mode {}",
        spec.parameter,
        points.len(),
        spec.mode
    );
    Ok(points
        .par_iter()
        .map(|p| solve_point(p, spec.mode, &spec.context.search))
        .collect())
}

/// Nine significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.chirality,
            format_number(r.beta),
            format_number(r.eta_nd),
            format_number(r.radius_m),
            opt(r.alpha_rad),
            opt(r.psi),
            r.mode,
            opt(r.K),
            opt(r.omega_nd),
            opt(r.omega_rad_s),
            r.note
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub mode: usize,
    /// Nonlocal parameter as listed in the table, nm^2.
    pub eta: f64,
    pub eta_nd: f64,
    pub omega: Option<f64>,
    pub present: Option<f64>,
    pub thai: Option<f64>,
}

/// Straight-limit comparison: fundamental `sqrt(K) beta^2` of an uncracked
/// arch of small angle `beta_small`, with `eta` (nm^2) scaled over a span
/// `span_nm`, i.e. `eta_nd = eta beta^2 / span^2`.
pub fn validation_table(beta_small: f64, etas: &[f64], span_nm: f64) -> Result<Vec<ValidationRow>> {
    if !(beta_small > 0.0 && beta_small <= 0.5) {
        return Err(Error::InvalidSpec(format!(
            "beta must lie in (0, 0.5], got {beta_small}"
        )));
    }
    if !(span_nm.is_finite() && span_nm > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "span must be positive, got {span_nm}"
        )));
    }
    let reference = |table: &[f64; 5], eta: f64| {
        let i = eta.round();
        (eta == i && (0.0..5.0).contains(&i)).then(|| table[i as usize])
    };
    etas.iter()
        .map(|&eta| {
            let eta_nd = eta * beta_small * beta_small / (span_nm * span_nm);
            let problem = ArchProblem::uncracked(beta_small, eta_nd)
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let omega = find_frequencies(&problem, &SearchConfig::with_modes(1))
                .ok()
                .and_then(|s| s.modes.first().map(|m| omega_nd(m.K, beta_small)));
            Ok(ValidationRow {
                mode: 1,
                eta,
                eta_nd,
                omega,
                present: reference(&REFERENCE_PRESENT, eta),
                thai: reference(&REFERENCE_THAI, eta),
            })
        })
        .collect()
}
