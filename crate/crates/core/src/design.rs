//! Clutch and muscle sizing for a HASEL-clutch unit.
//!
//! Given the operating force and strain of the muscle and the friction force
//! density of the clutch, this computes the minimum clutch length, the extra
//! load from the clutch's elastic sleeve and the muscle width needed to
//! carry that load.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_range, Error, Result};
use crate::units::{kpa_to_n_per_cm2, mm_to_cm};

/// How much of the muscle length is kept once the clutch removes the need
/// for tendon slack.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Configuration {
    /// Half-length muscle; same absolute stroke as a full-length muscle
    /// working through slack.
    Compact,
    /// Full-length muscle; twice the usable stroke.
    #[default]
    Enhanced,
}

impl Configuration {
    pub fn length_fraction(self) -> f64 {
        match self {
            Configuration::Compact => 0.5,
            Configuration::Enhanced => 1.0,
        }
    }
}

/// Oversizing that turns the theoretical 0.404 mm clutch of the reference
/// design into the 5 cm electrode actually fabricated.
pub const DEFAULT_SAFETY_FACTOR: f64 = 5.0 * 5.5 * 4.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignInputs {
    pub operating_force_n: f64,
    pub operating_strain: f64,
    pub hasel_length_cm: f64,
    pub hasel_width_cm: f64,
    pub friction_density_n_per_cm2: f64,
    pub sleeve_modulus_kpa: f64,
    pub sleeve_thickness_mm: f64,
    #[serde(default = "one_layer")]
    pub sleeve_layers: u32,
    #[serde(default)]
    pub configuration: Configuration,
    #[serde(default = "default_safety_factor")]
    pub safety_factor: f64,
    /// Length that stretches in the sleeve force law. When absent the
    /// (oversized) clutch length is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sleeve_stretchable_length_cm: Option<f64>,
}

fn one_layer() -> u32 {
    1
}

fn default_safety_factor() -> f64 {
    DEFAULT_SAFETY_FACTOR
}

impl DesignInputs {
    /// Reference design: 16 cm x 4.5 cm muscle giving 1 N at 8% strain, a
    /// 5.5 N/cm² clutch and 1 mm of 100 kPa textile.
    pub fn reference() -> Self {
        Self {
            operating_force_n: 1.0,
            operating_strain: 0.08,
            hasel_length_cm: 16.0,
            hasel_width_cm: 4.5,
            friction_density_n_per_cm2: 5.5,
            sleeve_modulus_kpa: 100.0,
            sleeve_thickness_mm: 1.0,
            sleeve_layers: 1,
            configuration: Configuration::Enhanced,
            safety_factor: 1.0,
            sleeve_stretchable_length_cm: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("operating_force_n", self.operating_force_n)?;
        if !(self.operating_strain > 0.0 && self.operating_strain < 1.0) {
            return Err(Error::OutOfRange {
                name: "operating_strain",
                value: self.operating_strain,
                min: 0.0,
                max: 1.0,
            });
        }
        check_positive("hasel_length_cm", self.hasel_length_cm)?;
        check_positive("hasel_width_cm", self.hasel_width_cm)?;
        check_positive(
            "friction_density_n_per_cm2",
            self.friction_density_n_per_cm2,
        )?;
        check_positive("sleeve_modulus_kpa", self.sleeve_modulus_kpa)?;
        check_positive("sleeve_thickness_mm", self.sleeve_thickness_mm)?;
        if self.sleeve_layers < 1 {
            return Err(Error::invalid("sleeve_layers must be at least 1"));
        }
        check_range("safety_factor", self.safety_factor, 1.0, f64::MAX)?;
        if let Some(l) = self.sleeve_stretchable_length_cm {
            check_positive("sleeve_stretchable_length_cm", l)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub effective_length_cm: f64,
    pub theoretical_clutch_length_cm: f64,
    pub theoretical_clutch_area_cm2: f64,
    pub clutch_length_cm: f64,
    pub clutch_area_cm2: f64,
    pub sleeve_resisting_force_n: f64,
    pub adjusted_width_cm: f64,
    pub strain_penalty_if_width_unchanged: f64,
    pub applied_safety_factor: f64,
}

pub fn effective_hasel_length(config: Configuration, length_cm: f64) -> Result<f64> {
    check_positive("hasel_length_cm", length_cm)?;
    Ok(config.length_fraction() * length_cm)
}

/// Minimum clutch length `L_c = F_h / (P_c * W_h)` in cm.
pub fn required_clutch_length(
    force_n: f64,
    friction_density_n_per_cm2: f64,
    width_cm: f64,
) -> Result<f64> {
    check_positive("operating_force_n", force_n)?;
    check_positive("friction_density_n_per_cm2", friction_density_n_per_cm2)?;
    check_positive("width_cm", width_cm)?;
    Ok(force_n / (friction_density_n_per_cm2 * width_cm))
}

/// Sleeve parameters entering the resisting-force law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SleeveLoad {
    pub modulus_kpa: f64,
    pub width_cm: f64,
    pub thickness_mm: f64,
    pub layers: u32,
}

/// Resisting force of the antagonist sleeve when the muscle works through
/// strain `sigma`: `F_t = sigma * (L_h' / L_c) * E_t * W_h * T_t`, per layer.
pub fn sleeve_resisting_force(
    sigma: f64,
    effective_length_cm: f64,
    clutch_length_cm: f64,
    sleeve: SleeveLoad,
) -> Result<f64> {
    check_range("operating_strain", sigma, 0.0, 1.0)?;
    check_positive("effective_length_cm", effective_length_cm)?;
    check_positive("clutch_length_cm", clutch_length_cm)?;
    check_positive("sleeve modulus_kpa", sleeve.modulus_kpa)?;
    check_positive("sleeve width_cm", sleeve.width_cm)?;
    check_positive("sleeve thickness_mm", sleeve.thickness_mm)?;
    Ok(sigma
        * (effective_length_cm / clutch_length_cm)
        * kpa_to_n_per_cm2(sleeve.modulus_kpa)
        * sleeve.width_cm
        * mm_to_cm(sleeve.thickness_mm)
        * sleeve.layers as f64)
}

/// Muscle width restoring the force margin: `W_h' = W_h + F_t * W_h / F_h`.
pub fn adjusted_width(width_cm: f64, sleeve_force_n: f64, operating_force_n: f64) -> Result<f64> {
    check_positive("operating_force_n", operating_force_n)?;
    Ok(width_cm + sleeve_force_n * width_cm / operating_force_n)
}

pub fn size_design(inputs: &DesignInputs) -> Result<DesignReport> {
    inputs.validate()?;
    let effective = effective_hasel_length(inputs.configuration, inputs.hasel_length_cm)?;
    let theoretical = required_clutch_length(
        inputs.operating_force_n,
        inputs.friction_density_n_per_cm2,
        inputs.hasel_width_cm,
    )?;
    let clutch_length = theoretical * inputs.safety_factor;
    let stretch_length = inputs.sleeve_stretchable_length_cm.unwrap_or(clutch_length);
    let f_t = sleeve_resisting_force(
        inputs.operating_strain,
        effective,
        stretch_length,
        SleeveLoad {
            modulus_kpa: inputs.sleeve_modulus_kpa,
            width_cm: inputs.hasel_width_cm,
            thickness_mm: inputs.sleeve_thickness_mm,
            layers: inputs.sleeve_layers,
        },
    )?;
    let width = adjusted_width(inputs.hasel_width_cm, f_t, inputs.operating_force_n)?;
    Ok(DesignReport {
        effective_length_cm: effective,
        theoretical_clutch_length_cm: theoretical,
        theoretical_clutch_area_cm2: theoretical * inputs.hasel_width_cm,
        clutch_length_cm: clutch_length,
        clutch_area_cm2: clutch_length * inputs.hasel_width_cm,
        sleeve_resisting_force_n: f_t,
        adjusted_width_cm: width,
        // Strain left if the width is kept and the sleeve load is carried
        // out of the muscle's own force.
        strain_penalty_if_width_unchanged: inputs.operating_strain * f_t
            / (inputs.operating_force_n + f_t),
        applied_safety_factor: inputs.safety_factor,
    })
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: [(&str, f64, &str); 9] = [
            ("effective HASEL length", self.effective_length_cm, "cm"),
            (
                "theoretical clutch length",
                self.theoretical_clutch_length_cm,
                "cm",
            ),
            (
                "theoretical clutch area",
                self.theoretical_clutch_area_cm2,
                "cm²",
            ),
            ("clutch length (oversized)", self.clutch_length_cm, "cm"),
            ("clutch area (oversized)", self.clutch_area_cm2, "cm²"),
            ("sleeve resisting force", self.sleeve_resisting_force_n, "N"),
            ("adjusted HASEL width", self.adjusted_width_cm, "cm"),
            (
                "strain penalty (width kept)",
                self.strain_penalty_if_width_unchanged,
                "-",
            ),
            ("safety factor", self.applied_safety_factor, "-"),
        ];
        writeln!(f, "{:<30} {:>14}  unit", "quantity", "value")?;
        writeln!(f, "{}", "-".repeat(52))?;
        for (name, value, unit) in rows {
            writeln!(f, "{name:<30} {value:>14.6}  {unit}")?;
        }
        Ok(())
    }
}
