//! One HASEL-clutch unit: the HASEL pack, the clutch with its sleeve and the
//! tendon to the lever, resolved as a massless series chain each step.

use serde::{Deserialize, Serialize};

use super::series::{solve_series, SeriesElement, TendonLaw};
use super::TendonSpec;
use crate::actuator::{Clutch, ClutchEngagementState, ClutchMode, HaselModel};
use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuscleUnit {
    pub hasel: HaselModel,
    pub clutch: Clutch,
}

/// Internal coordinates of a unit carried between steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnitInternal {
    /// Active (oil-driven) contraction, lagging on re-extension.
    pub hasel_active_mm: f64,
    /// Active contraction plus passive shell deformation.
    pub hasel_contraction_mm: f64,
    pub clutch_stretch_mm: f64,
    pub engagement: ClutchEngagementState,
    pub tension_n: f64,
}

/// What drives a unit during one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDrive {
    pub hasel_kv: f64,
    pub clutch_v: f64,
    pub clutch_on: bool,
    /// Hold the clutch locked at full capacity regardless of `clutch_on`.
    pub forced_lock: bool,
}

impl UnitDrive {
    pub const OFF: UnitDrive = UnitDrive {
        hasel_kv: 0.0,
        clutch_v: 0.0,
        clutch_on: false,
        forced_lock: false,
    };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSolution {
    pub tension_n: f64,
    pub internal: UnitInternal,
    /// Friction available this step.
    pub capacity_n: f64,
    pub sleeve_force_n: f64,
    pub tendon_stretch_mm: f64,
    /// Clutch stretch beyond the sleeve's rated maximum.
    pub sleeve_saturated: bool,
    pub iterations: usize,
}

/// HASEL contraction with first-order lag on re-extension: contraction is
/// followed immediately, lengthening relaxes toward the quasi-static value
/// with `a = exp(-dt / tau)`.
pub(crate) struct HaselElement<'a> {
    pub model: &'a HaselModel,
    pub kv: f64,
    pub previous_active_mm: f64,
    pub retain: f64,
}

impl HaselElement<'_> {
    pub fn active_mm(&self, t: f64) -> f64 {
        let qs = self.model.active_contraction(t, self.kv);
        if qs >= self.previous_active_mm {
            qs
        } else {
            (1.0 - self.retain) * qs + self.retain * self.previous_active_mm
        }
    }

    pub fn contraction_mm(&self, t: f64) -> f64 {
        self.active_mm(t) + self.model.shell_contraction(t, self.kv)
    }
}

impl SeriesElement for HaselElement<'_> {
    fn elongation_mm(&self, t: f64) -> f64 {
        -self.contraction_mm(t)
    }
}

/// Clutch as a play element: sticks at its anchor inside the friction band,
/// slides with the sleeve outside it.
pub(crate) struct ClutchElement<'a> {
    pub clutch: &'a Clutch,
    pub anchor_mm: f64,
    pub capacity_n: f64,
}

impl SeriesElement for ClutchElement<'_> {
    fn elongation_mm(&self, t: f64) -> f64 {
        self.clutch
            .stretch_at_tension(t, self.anchor_mm, self.capacity_n)
    }
}

impl MuscleUnit {
    pub fn validate(&self) -> Result<()> {
        self.hasel.validate()?;
        self.clutch.validate()
    }

    /// Engagement after `dt_ms` under `drive`.
    pub fn next_engagement(
        &self,
        internal: &UnitInternal,
        drive: &UnitDrive,
        dt_ms: f64,
    ) -> ClutchEngagementState {
        if drive.forced_lock {
            let mut s = ClutchEngagementState::locked_at(internal.clutch_stretch_mm);
            if internal.engagement.mode == ClutchMode::Slipping {
                s.mode = ClutchMode::Slipping;
            }
            s
        } else {
            self.clutch.advance_engagement(
                &internal.engagement,
                drive.clutch_on,
                dt_ms,
                internal.clutch_stretch_mm,
            )
        }
    }

    /// Resolves the unit at tendon `excursion_mm` (positive = paid out)
    /// after a step of `dt_ms`, returning the common tension and updated
    /// internal coordinates.
    pub fn solve(
        &self,
        internal: &UnitInternal,
        excursion_mm: f64,
        tendon: &TendonSpec,
        drive: &UnitDrive,
        dt_ms: f64,
    ) -> Result<UnitSolution> {
        let kv = drive.hasel_kv.clamp(0.0, self.hasel.spec.rated_voltage_kv);
        let clutch_v = if drive.clutch_v.is_finite() {
            drive.clutch_v.max(0.0)
        } else {
            0.0
        };
        let engagement = self.next_engagement(internal, drive, dt_ms);
        let capacity = self.clutch.force_model.holding_force_unchecked(clutch_v)
            * engagement.capacity_fraction();

        let hasel = HaselElement {
            model: &self.hasel,
            kv,
            previous_active_mm: internal.hasel_active_mm,
            retain: (-dt_ms / self.hasel.relaxation_time_ms).exp(),
        };
        let anchor = internal.clutch_stretch_mm;
        let clutch = ClutchElement {
            clutch: &self.clutch,
            anchor_mm: anchor,
            capacity_n: capacity,
        };
        let law = TendonLaw {
            stiffness_n_per_mm: tendon.taut_stiffness_n_per_mm,
            smoothing_mm: tendon.smoothing_mm,
        };
        let gap = excursion_mm - tendon.slack_per_side_mm;
        let sol = solve_series(gap, &[&hasel, &clutch], &law)?;
        let t = sol.tension_n;

        let stretch = clutch.elongation_mm(t);
        let mut next = engagement;
        if next.mode != ClutchMode::Released {
            let slip_velocity = if dt_ms > 0.0 {
                (stretch - anchor) / dt_ms * 1e3
            } else {
                0.0
            };
            next.mode = self
                .clutch
                .classify(&next, t, anchor, capacity, slip_velocity);
            next.lock_anchor_mm = stretch;
        }
        let sleeve = self.clutch.sleeve.force(
            stretch,
            self.clutch.spec.stretchable_length_cm,
            self.clutch.spec.max_stretch_fraction,
        );
        let active = hasel.active_mm(t);
        Ok(UnitSolution {
            tension_n: t,
            internal: UnitInternal {
                hasel_active_mm: active,
                hasel_contraction_mm: active + self.hasel.shell_contraction(t, kv),
                clutch_stretch_mm: stretch,
                engagement: next,
                tension_n: t,
            },
            capacity_n: capacity,
            sleeve_force_n: sleeve.force_n,
            tendon_stretch_mm: sol.tendon_stretch_mm,
            sleeve_saturated: sleeve.saturated,
            iterations: sol.iterations,
        })
    }

    /// Elastic energy stored in the unit's passive springs (sleeve, shell),
    /// excluding the tendon, in joules.
    pub fn stored_energy_j(&self, internal: &UnitInternal) -> f64 {
        let shell = (internal.hasel_contraction_mm - internal.hasel_active_mm).min(0.0);
        let shell_j = 0.5 * self.hasel.shell_stiffness_n_per_mm * shell * shell * 1e-3;
        shell_j
            + self.clutch.sleeve.energy_j(
                internal.clutch_stretch_mm,
                self.clutch.spec.stretchable_length_cm,
            )
    }
}

/// Free-function form of [`MuscleUnit::solve`].
pub fn unit_tension(
    unit: &MuscleUnit,
    internal: &UnitInternal,
    excursion_mm: f64,
    tendon: &TendonSpec,
    drive: &UnitDrive,
    dt_ms: f64,
) -> Result<UnitSolution> {
    unit.solve(internal, excursion_mm, tendon, drive, dt_ms)
}
