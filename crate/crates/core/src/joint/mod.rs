//! One-degree-of-freedom limb driven by an antagonistic pair of units
//! through tendons on a constant-radius lever.
//!
//! Sign convention: positive `theta` rotates the limb toward the right
//! unit. The right tendon therefore shortens by `r * theta` and the left one
//! is paid out by the same amount; right tension produces positive torque.

mod quasi_static;
pub mod series;
mod sim;
mod unit;

pub use quasi_static::{quasi_static_reach, AntagonistIdealization, ReachReport};
pub use series::{solve_series, IdealStroke, SeriesElement, SeriesSolution, TendonLaw};
pub use sim::{
    is_periodic, periodic_deviation_deg, range_of_motion, simulate, simulate_observed, step,
    JointState, SimOptions, StepOutcome, StepRecord, Trace, TraceRow,
};
pub use unit::{unit_tension, MuscleUnit, UnitDrive, UnitInternal, UnitSolution};

use serde::{Deserialize, Serialize};

use crate::actuator::SleeveSpec;
use crate::error::{check_positive, check_range, Error, Result};
use crate::units::{grams_to_kg, STANDARD_GRAVITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GravityMode {
    /// Limb hangs from the pivot; gravity pulls it back to `theta = 0`.
    #[default]
    VerticalHanging,
    Horizontal,
}

/// Amplitude halving, in full swings, used for the default damping.
pub const DEFAULT_HALVING_SWINGS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimbSpec {
    pub length_cm: f64,
    pub mass_g: f64,
    /// Optional point mass at the tip.
    pub tip_mass_g: f64,
    pub damping_n_m_s_per_rad: f64,
    pub gravity_mode: GravityMode,
}

impl Default for LimbSpec {
    fn default() -> Self {
        let mut limb = Self {
            length_cm: 12.0,
            mass_g: 3.8,
            tip_mass_g: 0.0,
            damping_n_m_s_per_rad: 0.0,
            gravity_mode: GravityMode::VerticalHanging,
        };
        let sleeve_k = SleeveSpec::default().stiffness_n_per_mm(9.0);
        limb.damping_n_m_s_per_rad = calibrate_damping(
            &limb,
            &TendonSpec::default(),
            sleeve_k,
            DEFAULT_HALVING_SWINGS,
        );
        limb
    }
}

impl LimbSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("limb length_cm", self.length_cm)?;
        check_positive("limb mass_g", self.mass_g)?;
        check_range("tip_mass_g", self.tip_mass_g, 0.0, f64::MAX)?;
        check_range(
            "damping_n_m_s_per_rad",
            self.damping_n_m_s_per_rad,
            0.0,
            f64::MAX,
        )?;
        Ok(())
    }

    fn length_m(&self) -> f64 {
        self.length_cm * 1e-2
    }

    /// Uniform rod about its end plus the tip mass, kg·m².
    pub fn inertia_kg_m2(&self) -> f64 {
        let l = self.length_m();
        grams_to_kg(self.mass_g) * l * l / 3.0 + grams_to_kg(self.tip_mass_g) * l * l
    }

    /// `m g l_com` summed over rod and tip, N·m; zero when horizontal.
    pub fn gravity_moment_n_m(&self) -> f64 {
        match self.gravity_mode {
            GravityMode::Horizontal => 0.0,
            GravityMode::VerticalHanging => {
                let l = self.length_m();
                STANDARD_GRAVITY
                    * (grams_to_kg(self.mass_g) * 0.5 * l + grams_to_kg(self.tip_mass_g) * l)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TendonSpec {
    pub lever_radius_mm: f64,
    pub slack_per_side_mm: f64,
    pub taut_stiffness_n_per_mm: f64,
    pub smoothing_mm: f64,
}

impl Default for TendonSpec {
    fn default() -> Self {
        Self {
            lever_radius_mm: 5.0,
            slack_per_side_mm: 0.0,
            taut_stiffness_n_per_mm: 200.0,
            smoothing_mm: 0.05,
        }
    }
}

impl TendonSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("lever_radius_mm", self.lever_radius_mm)?;
        check_range("slack_per_side_mm", self.slack_per_side_mm, 0.0, f64::MAX)?;
        check_positive("taut_stiffness_n_per_mm", self.taut_stiffness_n_per_mm)?;
        check_positive("smoothing_mm", self.smoothing_mm)?;
        Ok(())
    }

    pub fn law(&self) -> TendonLaw {
        TendonLaw {
            stiffness_n_per_mm: self.taut_stiffness_n_per_mm,
            smoothing_mm: self.smoothing_mm,
        }
    }
}

/// Length by which `side`'s tendon is paid out at angle `theta_rad`.
pub fn tendon_excursion(theta_rad: f64, lever_radius_mm: f64, side: Side) -> f64 {
    match side {
        Side::Right => -lever_radius_mm * theta_rad,
        Side::Left => lever_radius_mm * theta_rad,
    }
}

/// Net torque on the limb, N·m.
pub fn joint_torque(
    theta_rad: f64,
    theta_dot_rad_s: f64,
    left_tension_n: f64,
    right_tension_n: f64,
    limb: &LimbSpec,
    tendon: &TendonSpec,
) -> f64 {
    let r = tendon.lever_radius_mm * 1e-3;
    r * (right_tension_n - left_tension_n)
        - limb.gravity_moment_n_m() * theta_rad.sin()
        - limb.damping_n_m_s_per_rad * theta_dot_rad_s
}

/// Small-angle stiffness about `theta = 0` from gravity and one stretched
/// sleeve, N·m/rad.
pub fn linearized_stiffness(limb: &LimbSpec, tendon: &TendonSpec, sleeve_n_per_mm: f64) -> f64 {
    let r = tendon.lever_radius_mm * 1e-3;
    limb.gravity_moment_n_m() + r * r * sleeve_n_per_mm * 1e3
}

/// `sqrt(k_eff / I) / 2π` in Hz.
pub fn linearized_natural_frequency(
    limb: &LimbSpec,
    tendon: &TendonSpec,
    sleeve_n_per_mm: f64,
) -> f64 {
    (linearized_stiffness(limb, tendon, sleeve_n_per_mm) / limb.inertia_kg_m2()).sqrt()
        / (2.0 * std::f64::consts::PI)
}

/// Viscous coefficient for which a free swing halves in amplitude after
/// `halving_swings` full periods of the linearized pendulum.
pub fn calibrate_damping(
    limb: &LimbSpec,
    tendon: &TendonSpec,
    sleeve_n_per_mm: f64,
    halving_swings: f64,
) -> f64 {
    let zeta = std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI * halving_swings);
    let k = linearized_stiffness(limb, tendon, sleeve_n_per_mm);
    2.0 * zeta * (k * limb.inertia_kg_m2()).sqrt()
}

/// Limb, tendons and both units.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JointConfig {
    pub limb: LimbSpec,
    pub tendon: TendonSpec,
    pub left: MuscleUnit,
    pub right: MuscleUnit,
    /// Hold both clutches locked at the holding force of this voltage,
    /// ignoring clutch commands.
    pub forced_lock_voltage_v: Option<f64>,
}

impl JointConfig {
    pub fn validate(&self) -> Result<()> {
        self.limb.validate()?;
        self.tendon.validate()?;
        self.left.validate()?;
        self.right.validate()?;
        if let Some(v) = self.forced_lock_voltage_v {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "forced_lock_voltage_v must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }

    pub fn unit(&self, side: Side) -> &MuscleUnit {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Rod kinetic and gravitational energy plus the elastic energy in
    /// tendons, sleeves and HASEL shells, in joules.
    pub fn mechanical_energy_j(&self, state: &JointState) -> f64 {
        let kinetic = 0.5 * self.limb.inertia_kg_m2() * state.theta_dot_rad_s.powi(2);
        let gravity = self.limb.gravity_moment_n_m() * (1.0 - state.theta_rad.cos());
        let law = self.tendon.law();
        let elastic: f64 = [Side::Left, Side::Right]
            .into_iter()
            .map(|side| {
                let internal = state.internal(side);
                let e = tendon_excursion(state.theta_rad, self.tendon.lever_radius_mm, side);
                let stretch = e - self.tendon.slack_per_side_mm + internal.hasel_contraction_mm
                    - internal.clutch_stretch_mm;
                law.energy_j(stretch) + self.unit(side).stored_energy_j(internal)
            })
            .sum();
        kinetic + gravity + elastic
    }
}
