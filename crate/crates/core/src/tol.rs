//! Numerical thresholds. All of them are relative to unit-scale geometry.

use serde::{Deserialize, Serialize};

/// Tolerance bundle threaded through the algorithms that need it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Normalized Hermitian-form value below which a slope counts as critical.
    pub transv: f64,
    /// Wirtinger angle below which a tangent plane counts as complex.
    pub angle: f64,
    /// Normalized E-value below which a pair counts as critical.
    pub crit: f64,
    /// Threshold shared by the four exceptionality margins.
    pub exc: f64,
    /// Semi-legendrian defect threshold.
    pub legendrian: f64,
    /// Bidual round-trip distance.
    pub bidual: f64,
    /// Distance of a line to the dual hypersurface below which counts are not trusted.
    pub wall: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            transv: 1e-9,
            angle: 1e-7,
            crit: 1e-8,
            exc: 1e-6,
            legendrian: 1e-6,
            bidual: 1e-5,
            wall: 1e-3,
        }
    }
}

impl Tolerances {
    /// Rejects overrides outside the ranges where the algorithms were validated.
    pub fn validate(&self) -> crate::Result<()> {
        let checks: [(&str, f64, f64, f64); 7] = [
            ("transv", self.transv, 1e-14, 1e-3),
            ("angle", self.angle, 1e-12, 1e-2),
            ("crit", self.crit, 1e-14, 1e-3),
            ("exc", self.exc, 1e-12, 1e-2),
            ("legendrian", self.legendrian, 1e-14, 1e-2),
            ("bidual", self.bidual, 1e-12, 1e-1),
            ("wall", self.wall, 1e-8, 1e-1),
        ];
        for (name, v, lo, hi) in checks {
            if !(v >= lo && v <= hi) {
                return Err(crate::Error::InvalidInput(format!(
                    "tolerance {name} = {v:e} outside [{lo:e}, {hi:e}]"
                )));
            }
        }
        Ok(())
    }
}

/// Step used by the continuation predictor before adaptation.
pub const TRACE_STEP: f64 = 1e-2;
/// Upper bound for the adaptive continuation step.
pub const TRACE_STEP_MAX: f64 = 5e-2;
/// Radius under which a traced curve counts as closed.
pub const DEDUP_RADIUS: f64 = 1e-4;
/// Radius under which two intersection roots are merged.
pub const ROOT_DEDUP: f64 = 1e-6;
/// Divisors smaller than this raise a domain error.
pub const DIVISOR_FLOOR: f64 = 1e-14;
/// Smallest singular value of the Jacobian accepted as an immersion.
pub const IMMERSION_FLOOR: f64 = 1e-8;
