//! Linear-elastic textile sleeve packaging the clutch.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::units::{cm_to_mm, kpa_to_n_per_mm2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SleeveSpec {
    pub modulus_kpa: f64,
    pub thickness_mm: f64,
    pub layer_count: u32,
    pub width_cm: f64,
    pub rest_length_cm: f64,
}

impl Default for SleeveSpec {
    /// Two pieces of ~0.1 MPa textile, 1 mm thick, matched to the 4.5 cm
    /// muscle width and the 9 cm packaged clutch.
    fn default() -> Self {
        Self {
            modulus_kpa: 100.0,
            thickness_mm: 1.0,
            layer_count: 2,
            width_cm: 4.5,
            rest_length_cm: 9.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SleeveForce {
    pub force_n: f64,
    /// Stretch went beyond the rated maximum; the linear law is extrapolated.
    pub saturated: bool,
}

impl SleeveSpec {
    pub fn validate(&self) -> Result<()> {
        // Zero modulus is allowed: it is the idealized frictionless-release limit.
        if !(self.modulus_kpa.is_finite() && self.modulus_kpa >= 0.0) {
            return Err(Error::invalid("sleeve modulus_kpa must be finite and >= 0"));
        }
        check_positive("sleeve thickness_mm", self.thickness_mm)?;
        check_positive("sleeve width_cm", self.width_cm)?;
        check_positive("sleeve rest_length_cm", self.rest_length_cm)?;
        if self.layer_count < 1 {
            return Err(Error::invalid("sleeve layer_count must be at least 1"));
        }
        Ok(())
    }

    /// Axial stiffness `E * W * T * layers / L` in N/mm.
    pub fn stiffness_n_per_mm(&self, stretchable_length_cm: f64) -> f64 {
        kpa_to_n_per_mm2(self.modulus_kpa)
            * cm_to_mm(self.width_cm)
            * self.thickness_mm
            * self.layer_count as f64
            / cm_to_mm(stretchable_length_cm)
    }

    /// Resisting force at `stretch_mm`. The sleeve buckles in compression,
    /// so negative stretch carries no force.
    pub fn force(
        &self,
        stretch_mm: f64,
        stretchable_length_cm: f64,
        max_stretch_fraction: f64,
    ) -> SleeveForce {
        let s = stretch_mm.max(0.0);
        SleeveForce {
            force_n: self.stiffness_n_per_mm(stretchable_length_cm) * s,
            saturated: s > max_stretch_fraction * cm_to_mm(stretchable_length_cm),
        }
    }

    /// Elastic energy stored at `stretch_mm`, in joules.
    pub fn energy_j(&self, stretch_mm: f64, stretchable_length_cm: f64) -> f64 {
        let s = stretch_mm.max(0.0);
        0.5 * self.stiffness_n_per_mm(stretchable_length_cm) * s * s * 1e-3
    }
}
