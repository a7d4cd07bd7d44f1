//! Crack compliance models.
//!
//! A part-through crack of relative depth `psi = c / h` is represented in the
//! matching conditions as a rotational spring. The models here map `psi` to the
//! dimensionless spring flexibility `theta_c` that multiplies the local
//! curvature in the slope-jump condition.
//!
//! Two families are provided:
//!
//! * `PowerLaw`: `theta_c = kappa0 * (h / R) * psi^2 / (1 - psi)^2`
//! * `Polynomial`: `theta_c = scale * (h / R) * sum_i c_i psi^i`
//!
//! The polynomial form accepts transcribed flexibility fits from the
//! fracture-mechanics literature. Both are validated to vanish at `psi = 0` and
//! to be nonnegative and nondecreasing on the admissible range.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default gain of the power-law model.
pub const DEFAULT_KAPPA0: f64 = 6.0 * PI;

/// Number of points used when validating a polynomial model on `[0, 0.95]`.
const VALIDATION_POINTS: usize = 1000;
const VALIDATION_UPPER: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComplianceKind {
    PowerLaw { kappa0: f64 },
    Polynomial { coefficients: Vec<f64>, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceModel {
    pub name: String,
    pub kind: ComplianceKind,
}

/// Section depth and arch radius entering the `h / R` geometry factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionGeometry {
    pub depth: f64,
    pub radius: f64,
}

impl SectionGeometry {
    pub fn new(depth: f64, radius: f64) -> Self {
        Self { depth, radius }
    }

    /// Geometry factor of one, for purely nondimensional studies.
    pub fn unit() -> Self {
        Self {
            depth: 1.0,
            radius: 1.0,
        }
    }

    pub fn factor(&self) -> f64 {
        self.depth / self.radius
    }
}

impl Default for ComplianceModel {
    fn default() -> Self {
        Self {
            name: "power-law".to_string(),
            kind: ComplianceKind::PowerLaw {
                kappa0: DEFAULT_KAPPA0,
            },
        }
    }
}

impl ComplianceModel {
    pub fn power_law(kappa0: f64) -> Result<Self> {
        if !(kappa0.is_finite() && kappa0 >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "power-law gain must be finite and nonnegative, got {kappa0}"
            )));
        }
        Ok(Self {
            name: "power-law".to_string(),
            kind: ComplianceKind::PowerLaw { kappa0 },
        })
    }

    /// Builds a polynomial model `scale * sum_i coefficients[i] * psi^i`.
    ///
    /// Rejected with `InvalidModel` unless the polynomial vanishes at zero and
    /// is nonnegative and nondecreasing on a 1000-point grid of `[0, 0.95]`.
    pub fn polynomial(coefficients: Vec<f64>, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "polynomial scale must be finite and nonnegative, got {scale}"
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel(
                "non-finite polynomial coefficient".into(),
            ));
        }
        if coefficients.first().is_some_and(|&c0| c0 != 0.0) {
            return Err(Error::InvalidModel(
                "constant coefficient must be zero (intact section has no compliance)".into(),
            ));
        }
        let mut previous = 0.0;
        for i in 0..VALIDATION_POINTS {
            let psi = VALIDATION_UPPER * i as f64 / (VALIDATION_POINTS - 1) as f64;
            let value = scale * horner(&coefficients, psi);
            if value < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "polynomial is negative ({value:e}) at psi = {psi}"
                )));
            }
            if value < previous {
                return Err(Error::InvalidModel(format!(
                    "polynomial decreases near psi = {psi}"
                )));
            }
            previous = value;
        }
        Ok(Self {
            name: "polynomial".to_string(),
            kind: ComplianceKind::Polynomial {
                coefficients,
                scale,
            },
        })
    }

    /// Rotational compliance `theta_c` for depth ratio `psi`.
    pub fn compliance(&self, psi: f64, geometry: SectionGeometry) -> Result<f64> {
        if !(0.0..1.0).contains(&psi) {
            return Err(Error::OutOfRange(psi));
        }
        if psi == 0.0 {
            return Ok(0.0);
        }
        let g = geometry.factor();
        let theta = match &self.kind {
            ComplianceKind::PowerLaw { kappa0 } => {
                let r = psi / (1.0 - psi);
                kappa0 * g * r * r
            }
            ComplianceKind::Polynomial {
                coefficients,
                scale,
            } => scale * g * horner(coefficients, psi),
        };
        Ok(theta.max(0.0))
    }
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
