//! Physical and geometric inputs: chirality, tube properties, presets and the
//! nondimensional arch problem consumed by the solver.
//!
//! Internal units are SI. Helpers convert from nm / TPa at the boundary.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crack::{ComplianceModel, SectionGeometry};
use crate::error::{Error, Result};

pub const NM: f64 = 1e-9;
pub const TPA: f64 = 1e12;

/// Carbon-carbon bond length in nm.
pub const DEFAULT_BOND_LENGTH_NM: f64 = 0.142;

/// Presets shipped with the crate.
pub const DEFAULT_PRESETS: &str = include_str!("../presets/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiralityClass {
    Armchair,
    Zigzag,
    Chiral,
}

impl ChiralityClass {
    pub const ALL: [ChiralityClass; 3] = [
        ChiralityClass::Armchair,
        ChiralityClass::Zigzag,
        ChiralityClass::Chiral,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChiralityClass::Armchair => "armchair",
            ChiralityClass::Zigzag => "zigzag",
            ChiralityClass::Chiral => "chiral",
        }
    }
}

impl fmt::Display for ChiralityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChiralityClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "armchair" => Ok(ChiralityClass::Armchair),
            "zigzag" => Ok(ChiralityClass::Zigzag),
            "chiral" => Ok(ChiralityClass::Chiral),
            other => Err(format!(
                "unknown chirality `{other}` (armchair, zigzag, chiral)"
            )),
        }
    }
}

/// Roll-up indices `(n, m)` of a single-walled tube, stored with `m <= n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralitySpec {
    n: u32,
    m: u32,
    bond_length_nm: f64,
}

impl ChiralitySpec {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        Self::with_bond_length(n, m, DEFAULT_BOND_LENGTH_NM)
    }

    pub fn with_bond_length(n: u32, m: u32, bond_length_nm: f64) -> Result<Self> {
        let (n, m) = if m > n { (m, n) } else { (n, m) };
        if n == 0 {
            return Err(Error::InvalidChirality("n must be at least 1".into()));
        }
        if !(bond_length_nm.is_finite() && bond_length_nm > 0.0) {
            return Err(Error::InvalidChirality(format!(
                "bond length must be positive, got {bond_length_nm}"
            )));
        }
        Ok(Self {
            n,
            m,
            bond_length_nm,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn bond_length_nm(&self) -> f64 {
        self.bond_length_nm
    }
}

pub fn classify_chirality(spec: &ChiralitySpec) -> ChiralityClass {
    if spec.n == spec.m {
        ChiralityClass::Armchair
    } else if spec.m == 0 {
        ChiralityClass::Zigzag
    } else {
        ChiralityClass::Chiral
    }
}

/// Tube diameter in nm, `d = (sqrt(3) a_cc / pi) sqrt(n^2 + n m + m^2)`.
pub fn tube_diameter(spec: &ChiralitySpec) -> f64 {
    let (n, m) = (spec.n as f64, spec.m as f64);
    3f64.sqrt() * spec.bond_length_nm / PI * (n * n + n * m + m * m).sqrt()
}

/// Dimensional tube and arch properties, SI units throughout.
///
/// The moment of inertia is always recomputed from the diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalTube {
    youngs_modulus: f64,
    radius: f64,
    diameter: f64,
    wall_thickness: f64,
    mass_per_length: f64,
}

impl PhysicalTube {
    pub fn new(
        youngs_modulus: f64,
        radius: f64,
        diameter: f64,
        wall_thickness: f64,
        mass_per_length: f64,
    ) -> Result<Self> {
        let fields = [
            ("youngs_modulus", youngs_modulus),
            ("radius", radius),
            ("diameter", diameter),
            ("wall_thickness", wall_thickness),
            ("mass_per_length", mass_per_length),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTube(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if diameter >= 2.0 * radius {
            return Err(Error::InvalidTube(format!(
                "tube diameter {diameter:e} m must be smaller than the arch diameter {:e} m",
                2.0 * radius
            )));
        }
        Ok(Self {
            youngs_modulus,
            radius,
            diameter,
            wall_thickness,
            mass_per_length,
        })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn wall_thickness(&self) -> f64 {
        self.wall_thickness
    }

    pub fn mass_per_length(&self) -> f64 {
        self.mass_per_length
    }

    /// `I = pi d^4 / 64`.
    pub fn moment_of_inertia(&self) -> f64 {
        PI * self.diameter.powi(4) / 64.0
    }

    pub fn with_radius(self, radius: f64) -> Result<Self> {
        Self::new(
            self.youngs_modulus,
            radius,
            self.diameter,
            self.wall_thickness,
            self.mass_per_length,
        )
    }

    pub fn with_diameter(self, diameter: f64) -> Result<Self> {
        Self::new(
            self.youngs_modulus,
            self.radius,
            diameter,
            self.wall_thickness,
            self.mass_per_length,
        )
    }

    /// Scale `E I / (mu R^4)` converting the eigenvalue `K` into `omega^2`.
    pub fn frequency_scale(&self) -> f64 {
        self.youngs_modulus * self.moment_of_inertia()
            / (self.mass_per_length * self.radius.powi(4))
    }
}

/// One section of the presets file. Lengths in nm, modulus in TPa.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetEntry {
    pub youngs_modulus_tpa: Option<f64>,
    pub diameter_nm: Option<f64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub wall_thickness_nm: Option<f64>,
    pub mass_per_length_kg_per_m: Option<f64>,
    pub arch_radius_nm: Option<f64>,
}

/// Per-chirality presets, as read from a `[armchair]` / `[zigzag]` / `[chiral]` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PresetTable {
    entries: BTreeMap<ChiralityClass, PresetEntry>,
}

impl PresetTable {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidPreset(e.to_string()))
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_PRESETS).expect("shipped presets parse")
    }

    pub fn get(&self, class: ChiralityClass) -> Option<&PresetEntry> {
        self.entries.get(&class)
    }

    pub fn insert(&mut self, class: ChiralityClass, entry: PresetEntry) {
        self.entries.insert(class, entry);
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        Some(v) => Err(Error::InvalidPreset(format!(
            "{name} must be positive, got {v}"
        ))),
        None => Err(Error::InvalidPreset(format!("{name} is missing"))),
    }
}

pub fn resolve_preset(class: ChiralityClass, presets: &PresetTable) -> Result<PhysicalTube> {
    let entry = presets.get(class).ok_or(Error::MissingPreset(class))?;
    let e = positive("youngs_modulus_tpa", entry.youngs_modulus_tpa)?;
    let d_nm = match (entry.diameter_nm, entry.n, entry.m) {
        (Some(d), _, _) => positive("diameter_nm", Some(d))?,
        (None, Some(n), Some(m)) => {
            let spec = ChiralitySpec::new(n, m).map_err(|e| Error::InvalidPreset(e.to_string()))?;
            tube_diameter(&spec)
        }
        _ => {
            return Err(Error::InvalidPreset(format!(
                "[{class}] needs diameter_nm or both n and m"
            )))
        }
    };
    let h = positive("wall_thickness_nm", entry.wall_thickness_nm)?;
    let mu = positive("mass_per_length_kg_per_m", entry.mass_per_length_kg_per_m)?;
    let r = positive("arch_radius_nm", entry.arch_radius_nm)?;
    PhysicalTube::new(e * TPA, r * NM, d_nm * NM, h * NM, mu)
        .map_err(|e| Error::InvalidPreset(e.to_string()))
}

/// Physical crack description.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackSpec {
    /// Crack position along the arch, radians.
    pub position_angle: f64,
    /// Crack depth over wall thickness, in `[0, 1)`.
    pub depth_ratio: f64,
    pub compliance_model: ComplianceModel,
}

/// Crack as seen by the solver: location and rotational compliance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crack {
    pub alpha: f64,
    pub theta: f64,
}

/// Complete nondimensional eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchProblem {
    beta: f64,
    eta_nd: f64,
    crack: Option<Crack>,
}

impl ArchProblem {
    pub fn new(beta: f64, eta_nd: f64, crack: Option<Crack>) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0 && beta <= 2.0 * PI) {
            return Err(Error::InvalidProblem(format!(
                "central angle must lie in (0, 2pi], got {beta}"
            )));
        }
        if !(eta_nd.is_finite() && eta_nd >= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "nonlocal parameter must be >= 0, got {eta_nd}"
            )));
        }
        if let Some(c) = crack {
            if !(c.alpha > 0.0 && c.alpha < beta) {
                return Err(Error::InvalidProblem(format!(
                    "crack position {} must lie strictly inside (0, {beta})",
                    c.alpha
                )));
            }
            if !(c.theta.is_finite() && c.theta >= 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "crack compliance must be >= 0, got {}",
                    c.theta
                )));
            }
        }
        Ok(Self {
            beta,
            eta_nd,
            crack,
        })
    }

    pub fn uncracked(beta: f64, eta_nd: f64) -> Result<Self> {
        Self::new(beta, eta_nd, None)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta_nd(&self) -> f64 {
        self.eta_nd
    }

    pub fn crack(&self) -> Option<Crack> {
        self.crack
    }
}

/// Builds the nondimensional problem; `eta_physical` is `(e0 a)^2` in m^2 and
/// maps to `eta_physical / R^2`.
pub fn nondimensionalize(
    tube: &PhysicalTube,
    beta: f64,
    eta_physical: f64,
    crack: Option<&CrackSpec>,
) -> Result<ArchProblem> {
    if !(eta_physical.is_finite() && eta_physical >= 0.0) {
        return Err(Error::InvalidProblem(format!(
            "physical nonlocal parameter must be >= 0, got {eta_physical}"
        )));
    }
    let eta_nd = eta_physical / (tube.radius * tube.radius);
    let crack = crack.map(|c| crack_compliance(tube, c)).transpose()?;
    ArchProblem::new(beta, eta_nd, crack)
}

/// Converts a physical crack into position and compliance for `tube`.
pub fn crack_compliance(tube: &PhysicalTube, crack: &CrackSpec) -> Result<Crack> {
    let geometry = SectionGeometry::new(tube.wall_thickness, tube.radius);
    let theta = crack
        .compliance_model
        .compliance(crack.depth_ratio, geometry)?;
    Ok(Crack {
        alpha: crack.position_angle,
        theta,
    })
}

/// Angular frequency `omega = sqrt(K E I / (mu R^4))` in rad/s.
#[allow(non_snake_case)]
pub fn omega_from_K(K: f64, tube: &PhysicalTube) -> f64 {
    (K * tube.frequency_scale()).sqrt()
}

/// Straight-beam-comparable frequency parameter `sqrt(K) beta^2`.
#[allow(non_snake_case)]
pub fn omega_nd(K: f64, beta: f64) -> f64 {
    K.sqrt() * beta * beta
}
