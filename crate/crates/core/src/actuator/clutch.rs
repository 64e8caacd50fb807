//! Electrostatic clutch: voltage-dependent holding force, lock/release
//! timing and Coulomb stick-slip in parallel with the elastic sleeve.
//!
//! While engaged the clutch behaves as a rigid-plastic element in parallel
//! with the sleeve spring: the electrodes stick at the lock anchor until the
//! friction needed exceeds the current capacity, then slide with kinetic
//! friction equal to the static value. Released, only the sleeve carries
//! load.

use serde::{Deserialize, Serialize};

use super::sleeve::SleeveSpec;
use crate::error::{check_positive, check_range, Error, Result};
use crate::units::{cm_to_mm, kgf_to_newton};

/// Slip speed below which a slipping clutch is captured back to stick.
pub const CAPTURE_VELOCITY_MM_S: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClutchSpec {
    pub electrode_overlap_area_cm2: f64,
    pub width_cm: f64,
    pub packaged_length_cm: f64,
    pub stretchable_length_cm: f64,
    pub max_stretch_fraction: f64,
    pub mass_g: f64,
    pub lock_time_ms: f64,
    pub release_time_ms: f64,
}

impl Default for ClutchSpec {
    fn default() -> Self {
        Self {
            electrode_overlap_area_cm2: 15.0,
            width_cm: 6.0,
            packaged_length_cm: 9.0,
            stretchable_length_cm: 9.0,
            max_stretch_fraction: 0.44,
            mass_g: 4.4,
            lock_time_ms: 5.0,
            release_time_ms: 15.0,
        }
    }
}

impl ClutchSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive(
            "electrode_overlap_area_cm2",
            self.electrode_overlap_area_cm2,
        )?;
        check_positive("width_cm", self.width_cm)?;
        check_positive("packaged_length_cm", self.packaged_length_cm)?;
        check_positive("stretchable_length_cm", self.stretchable_length_cm)?;
        check_range(
            "max_stretch_fraction",
            self.max_stretch_fraction,
            f64::MIN_POSITIVE,
            1.0,
        )?;
        check_positive("mass_g", self.mass_g)?;
        check_positive("lock_time_ms", self.lock_time_ms)?;
        check_positive("release_time_ms", self.release_time_ms)?;
        Ok(())
    }

    pub fn max_stretch_mm(&self) -> f64 {
        self.max_stretch_fraction * cm_to_mm(self.stretchable_length_cm)
    }
}

/// One measured `(voltage, maximum holding force)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutchAnchor {
    pub voltage_v: f64,
    pub force_n: f64,
}

impl ClutchAnchor {
    pub fn from_kgf(voltage_v: f64, kgf: f64) -> Self {
        Self {
            voltage_v,
            force_n: kgf_to_newton(kgf),
        }
    }

    /// Characterized holding forces: 4.25 kgf at 100 V and 8.41 kgf at 150 V.
    pub fn characterized() -> [ClutchAnchor; 2] {
        [Self::from_kgf(100.0, 4.25), Self::from_kgf(150.0, 8.41)]
    }
}

/// Power law `F = k * V^alpha` for the maximum holding force.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutchForceModel {
    pub coefficient_k_n: f64,
    pub exponent_alpha: f64,
    pub anchors: Vec<ClutchAnchor>,
    pub reference_voltage_v: f64,
    pub friction_density_n_per_cm2: f64,
    pub max_relative_residual: f64,
}

impl Default for ClutchForceModel {
    fn default() -> Self {
        ClutchForceModel::fit(
            &ClutchAnchor::characterized(),
            ClutchSpec::default().electrode_overlap_area_cm2,
        )
        .expect("characterized clutch anchors fit")
    }
}

/// Largest relative anchor error a fitted power law may leave.
pub const CLUTCH_FIT_TOLERANCE: f64 = 0.02;

impl ClutchForceModel {
    /// Fits the power law through the anchors: exactly through two of them,
    /// by log-log least squares through three or more.
    pub fn fit(anchors: &[ClutchAnchor], overlap_area_cm2: f64) -> Result<Self> {
        check_positive("electrode_overlap_area_cm2", overlap_area_cm2)
            .map_err(|e| Error::Fit(e.to_string()))?;
        if anchors.len() < 2 {
            return Err(Error::Fit(format!(
                "clutch fit needs at least 2 anchors, got {}",
                anchors.len()
            )));
        }
        for a in anchors {
            if !(a.voltage_v.is_finite() && a.voltage_v > 0.0) {
                return Err(Error::Fit(format!(
                    "anchor voltage {} V must be positive",
                    a.voltage_v
                )));
            }
            if !(a.force_n.is_finite() && a.force_n > 0.0) {
                return Err(Error::Fit(format!(
                    "anchor force {} N must be positive",
                    a.force_n
                )));
            }
        }
        let mut sorted = anchors.to_vec();
        sorted.sort_by(|a, b| a.voltage_v.total_cmp(&b.voltage_v));
        if sorted.windows(2).any(|w| w[0].voltage_v == w[1].voltage_v) {
            return Err(Error::Fit("clutch anchors have coincident voltages".into()));
        }

        let (alpha, ln_k) = if sorted.len() == 2 {
            let (a, b) = (sorted[0], sorted[1]);
            let alpha = (b.force_n / a.force_n).ln() / (b.voltage_v / a.voltage_v).ln();
            (alpha, a.force_n.ln() - alpha * a.voltage_v.ln())
        } else {
            let n = sorted.len() as f64;
            let xs: Vec<f64> = sorted.iter().map(|a| a.voltage_v.ln()).collect();
            let ys: Vec<f64> = sorted.iter().map(|a| a.force_n.ln()).collect();
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let alpha = sxy / sxx;
            (alpha, my - alpha * mx)
        };
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Fit(format!(
                "fitted exponent {alpha} does not give a force increasing with voltage"
            )));
        }
        let k = ln_k.exp();
        let max_relative_residual = sorted
            .iter()
            .map(|a| ((k * a.voltage_v.powf(alpha) - a.force_n) / a.force_n).abs())
            .fold(0.0, f64::max);
        if max_relative_residual > CLUTCH_FIT_TOLERANCE {
            return Err(Error::Fit(format!(
                "power law leaves a {:.2}% anchor residual (limit {:.0}%)",
                100.0 * max_relative_residual,
                100.0 * CLUTCH_FIT_TOLERANCE
            )));
        }
        let reference_voltage_v = sorted[sorted.len() - 1].voltage_v;
        Ok(Self {
            coefficient_k_n: k,
            exponent_alpha: alpha,
            anchors: sorted,
            reference_voltage_v,
            friction_density_n_per_cm2: k * reference_voltage_v.powf(alpha) / overlap_area_cm2,
            max_relative_residual,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("coefficient_k_n", self.coefficient_k_n)?;
        check_positive("exponent_alpha", self.exponent_alpha)?;
        Ok(())
    }

    pub fn holding_force(&self, voltage_v: f64) -> Result<f64> {
        check_range("clutch voltage_v", voltage_v, 0.0, f64::MAX)?;
        Ok(self.holding_force_unchecked(voltage_v))
    }

    pub(crate) fn holding_force_unchecked(&self, voltage_v: f64) -> f64 {
        if voltage_v <= 0.0 {
            0.0
        } else {
            self.coefficient_k_n * voltage_v.powf(self.exponent_alpha)
        }
    }

    /// Holding force per unit electrode overlap, N/cm².
    pub fn shear_stress(&self, voltage_v: f64, overlap_area_cm2: f64) -> Result<f64> {
        Ok(self.holding_force(voltage_v)? / check_positive("overlap area", overlap_area_cm2)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClutchMode {
    Released,
    Engaging,
    Locked,
    Slipping,
    Releasing,
}

impl ClutchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClutchMode::Released => "Released",
            ClutchMode::Engaging => "Engaging",
            ClutchMode::Locked => "Locked",
            ClutchMode::Slipping => "Slipping",
            ClutchMode::Releasing => "Releasing",
        }
    }
}

impl std::fmt::Display for ClutchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClutchEngagementState {
    pub mode: ClutchMode,
    /// Electrode position the clutch sticks at; meaningful while engaged.
    pub lock_anchor_mm: f64,
    /// Progress of the current Engaging/Releasing ramp in [0, 1].
    pub transition_progress: f64,
}

impl Default for ClutchEngagementState {
    fn default() -> Self {
        Self::released()
    }
}

impl ClutchEngagementState {
    pub fn released() -> Self {
        Self {
            mode: ClutchMode::Released,
            lock_anchor_mm: 0.0,
            transition_progress: 0.0,
        }
    }

    pub fn locked_at(anchor_mm: f64) -> Self {
        Self {
            mode: ClutchMode::Locked,
            lock_anchor_mm: anchor_mm,
            transition_progress: 0.0,
        }
    }

    /// Fraction of the voltage-dependent holding force currently available.
    pub fn capacity_fraction(&self) -> f64 {
        match self.mode {
            ClutchMode::Released => 0.0,
            ClutchMode::Engaging => self.transition_progress,
            ClutchMode::Locked | ClutchMode::Slipping => 1.0,
            ClutchMode::Releasing => 1.0 - self.transition_progress,
        }
    }
}

/// Inputs of one [`Clutch::transmit`] evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmitInput {
    pub commanded_on: bool,
    pub voltage_v: f64,
    pub applied_tension_n: f64,
    pub slip_velocity_mm_s: f64,
    /// Current clutch elongation (sleeve stretch).
    pub stretch_mm: f64,
    pub dt_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transmission {
    pub force_n: f64,
    pub state: ClutchEngagementState,
    pub capacity_n: f64,
    pub sleeve_force_n: f64,
    /// Some input was outside its physical range and was clamped.
    pub clamped: bool,
}

/// A packaged clutch: electrodes, force law and sleeve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Clutch {
    pub spec: ClutchSpec,
    pub force_model: ClutchForceModel,
    pub sleeve: SleeveSpec,
}

const RAMP_DONE: f64 = 1.0 - 1e-9;

impl Clutch {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.force_model.validate()?;
        self.sleeve.validate()
    }

    pub fn sleeve_stiffness_n_per_mm(&self) -> f64 {
        self.sleeve
            .stiffness_n_per_mm(self.spec.stretchable_length_cm)
    }

    pub fn sleeve_force_n(&self, stretch_mm: f64) -> f64 {
        self.sleeve_stiffness_n_per_mm() * stretch_mm.max(0.0)
    }

    pub fn holding_force(&self, voltage_v: f64) -> Result<f64> {
        self.force_model.holding_force(voltage_v)
    }

    /// Advances the lock/release ramps by `dt_ms`. Capacity rises linearly
    /// over the lock time and falls linearly over the release time; a ramp
    /// interrupted midway reverses from the capacity it had reached.
    pub fn advance_engagement(
        &self,
        state: &ClutchEngagementState,
        commanded_on: bool,
        dt_ms: f64,
        stretch_mm: f64,
    ) -> ClutchEngagementState {
        let lock_step = dt_ms / self.spec.lock_time_ms;
        let release_step = dt_ms / self.spec.release_time_ms;
        let engaging = |p: f64, anchor: f64| {
            if p >= RAMP_DONE {
                ClutchEngagementState::locked_at(anchor)
            } else {
                ClutchEngagementState {
                    mode: ClutchMode::Engaging,
                    lock_anchor_mm: anchor,
                    transition_progress: p,
                }
            }
        };
        let releasing = |p: f64, anchor: f64| {
            if p >= RAMP_DONE {
                ClutchEngagementState::released()
            } else {
                ClutchEngagementState {
                    mode: ClutchMode::Releasing,
                    lock_anchor_mm: anchor,
                    transition_progress: p,
                }
            }
        };
        let anchor = state.lock_anchor_mm;
        match (state.mode, commanded_on) {
            (ClutchMode::Released, false) => *state,
            (ClutchMode::Released, true) => engaging(lock_step, stretch_mm.max(0.0)),
            (ClutchMode::Engaging, true) => engaging(state.transition_progress + lock_step, anchor),
            (ClutchMode::Engaging, false) => {
                releasing(1.0 - state.transition_progress + release_step, anchor)
            }
            (ClutchMode::Locked | ClutchMode::Slipping, true) => *state,
            (ClutchMode::Locked | ClutchMode::Slipping, false) => releasing(release_step, anchor),
            (ClutchMode::Releasing, false) => {
                releasing(state.transition_progress + release_step, anchor)
            }
            (ClutchMode::Releasing, true) => {
                engaging(1.0 - state.transition_progress + lock_step, anchor)
            }
        }
    }

    /// Stick/slip classification once the tension through the clutch is
    /// known. `anchor_mm` is the stick position before the tension was
    /// applied.
    pub fn classify(
        &self,
        state: &ClutchEngagementState,
        tension_n: f64,
        anchor_mm: f64,
        capacity_n: f64,
        slip_velocity_mm_s: f64,
    ) -> ClutchMode {
        match state.mode {
            ClutchMode::Locked => {
                let friction = tension_n - self.sleeve_force_n(anchor_mm);
                if friction.abs() > capacity_n * (1.0 + 1e-12) + 1e-12 {
                    ClutchMode::Slipping
                } else {
                    ClutchMode::Locked
                }
            }
            ClutchMode::Slipping if slip_velocity_mm_s.abs() < CAPTURE_VELOCITY_MM_S => {
                ClutchMode::Locked
            }
            mode => mode,
        }
    }

    /// One evaluation of the clutch as a force-transmitting element.
    ///
    /// Released, it passes only the sleeve force. Engaged, it passes the
    /// applied tension up to capacity plus sleeve force; beyond that it
    /// slips and passes exactly that limit.
    pub fn transmit(&self, state: &ClutchEngagementState, input: &TransmitInput) -> Transmission {
        let mut clamped = false;
        let mut clamp_nonneg = |v: f64| {
            if v.is_finite() && v >= 0.0 {
                v
            } else {
                clamped = true;
                0.0
            }
        };
        let voltage = clamp_nonneg(input.voltage_v);
        let tension = clamp_nonneg(input.applied_tension_n);
        let stretch = clamp_nonneg(input.stretch_mm);
        let dt_ms = clamp_nonneg(input.dt_ms);
        let slip_velocity = if input.slip_velocity_mm_s.is_finite() {
            input.slip_velocity_mm_s
        } else {
            clamped = true;
            0.0
        };

        let mut next = self.advance_engagement(state, input.commanded_on, dt_ms, stretch);
        let capacity = self.force_model.holding_force_unchecked(voltage) * next.capacity_fraction();
        let sleeve = self.sleeve_force_n(stretch);
        if next.mode == ClutchMode::Released {
            return Transmission {
                force_n: sleeve,
                state: next,
                capacity_n: 0.0,
                sleeve_force_n: sleeve,
                clamped,
            };
        }
        next.mode = self.classify(&next, tension, stretch, capacity, slip_velocity);
        let force = tension.clamp((sleeve - capacity).max(0.0), sleeve + capacity);
        Transmission {
            force_n: force,
            state: next,
            capacity_n: capacity,
            sleeve_force_n: sleeve,
            clamped,
        }
    }

    /// Clutch elongation carrying `tension_n` when the electrodes stick at
    /// `anchor_mm` with `capacity_n` of friction available. Non-decreasing
    /// in tension, which the series solver relies on.
    pub(crate) fn stretch_at_tension(
        &self,
        tension_n: f64,
        anchor_mm: f64,
        capacity_n: f64,
    ) -> f64 {
        let k = self.sleeve_stiffness_n_per_mm();
        let s = if k > 0.0 {
            let lo = (tension_n - capacity_n) / k;
            let hi = (tension_n + capacity_n) / k;
            anchor_mm.max(lo).min(hi)
        } else if tension_n > capacity_n {
            f64::INFINITY
        } else {
            anchor_mm
        };
        s.max(0.0)
    }
}
