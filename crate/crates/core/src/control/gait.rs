//! Alternating gait: each half period one side is the agonist (clutch
//! locked, HASEL ramping) and the other is fully released.

use serde::{Deserialize, Serialize};

use super::waveform::triangle;
use super::{CommandSource, PairCommand, UnitCommand};
use crate::error::{check_positive, check_range, Error, Result};
use crate::joint::Side;

/// Hardware limit of the clutch drive.
pub const CLUTCH_ABSOLUTE_MAX_V: f64 = 150.0;
/// Range the clutch was characterized over in operation.
pub const CLUTCH_DEFAULT_CAP_V: f64 = 100.0;

/// Braking during the agonist's relaxation: the antagonist clutch is
/// engaged with its HASEL off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Braking {
    /// Movement direction to brake; `None` brakes both directions.
    #[serde(default)]
    pub direction: Option<Side>,
    pub voltage_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaitParams {
    pub frequency_hz: f64,
    pub hasel_peak_kv: f64,
    pub clutch_amplitude_v: f64,
    pub clutch_ac_frequency_hz: f64,
    pub clutch_lead_time_ms: f64,
    pub rise_fraction: f64,
    pub clutch_voltage_cap_v: f64,
    pub braking: Option<Braking>,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            frequency_hz: 2.5,
            hasel_peak_kv: 8.0,
            clutch_amplitude_v: 100.0,
            clutch_ac_frequency_hz: 10.0,
            clutch_lead_time_ms: 20.0,
            rise_fraction: 0.5,
            clutch_voltage_cap_v: CLUTCH_DEFAULT_CAP_V,
            braking: None,
        }
    }
}

impl GaitParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("frequency_hz", self.frequency_hz)?;
        check_range("hasel_peak_kv", self.hasel_peak_kv, 0.0, f64::MAX)?;
        check_range(
            "clutch_voltage_cap_v",
            self.clutch_voltage_cap_v,
            0.0,
            CLUTCH_ABSOLUTE_MAX_V,
        )?;
        check_range(
            "clutch_amplitude_v",
            self.clutch_amplitude_v,
            0.0,
            self.clutch_voltage_cap_v,
        )?;
        check_positive("clutch_ac_frequency_hz", self.clutch_ac_frequency_hz)?;
        check_range("rise_fraction", self.rise_fraction, f64::MIN_POSITIVE, 1.0)?;
        let half_ms = 500.0 / self.frequency_hz;
        check_range(
            "clutch_lead_time_ms",
            self.clutch_lead_time_ms,
            0.0,
            f64::MAX,
        )?;
        if self.clutch_lead_time_ms >= half_ms {
            return Err(Error::invalid(format!(
                "clutch_lead_time_ms {} leaves no ramp within the {half_ms} ms half period",
                self.clutch_lead_time_ms
            )));
        }
        if let Some(b) = self.braking {
            check_range(
                "braking voltage_v",
                b.voltage_v,
                0.0,
                self.clutch_voltage_cap_v,
            )?;
        }
        Ok(())
    }

    pub fn period_s(&self) -> f64 {
        1.0 / self.frequency_hz
    }

    fn ac_polarity(&self, t: f64) -> i8 {
        if (t.max(0.0) * self.clutch_ac_frequency_hz).rem_euclid(1.0) < 0.5 {
            1
        } else {
            -1
        }
    }
}

/// Commands at `t_s`: the right side leads the first half of each period.
pub fn gait_controller(t_s: f64, p: &GaitParams) -> PairCommand {
    Gait::new(p.clone()).command(t_s)
}

/// Override that stops motion toward `moving`: the opposite unit goes to
/// S4 at `braking_voltage_v`.
pub fn brake_command(moving: Side, braking_voltage_v: f64) -> (Side, UnitCommand) {
    (
        moving.opposite(),
        UnitCommand {
            hasel_on: false,
            hasel_voltage_kv: 0.0,
            clutch_engaged: true,
            clutch_voltage_magnitude_v: braking_voltage_v.clamp(0.0, CLUTCH_ABSOLUTE_MAX_V),
            clutch_polarity: 1,
        },
    )
}

/// A gait as a command source. With `clutch_channels` off the clutch
/// outputs stay idle, which is how the slack-only arrangement is driven.
#[derive(Clone, Debug, PartialEq)]
pub struct Gait {
    pub params: GaitParams,
    pub clutch_channels: bool,
}

impl Gait {
    pub fn new(params: GaitParams) -> Self {
        Self {
            params,
            clutch_channels: true,
        }
    }

    pub fn without_clutches(params: GaitParams) -> Self {
        Self {
            params,
            clutch_channels: false,
        }
    }
}

impl CommandSource for Gait {
    fn command(&self, t_s: f64) -> PairCommand {
        let p = &self.params;
        let t = t_s.max(0.0);
        let period = p.period_s();
        let half = 0.5 * period;
        let phase = t.rem_euclid(period);
        let (agonist, tau) = if phase < half {
            (Side::Right, phase)
        } else {
            (Side::Left, phase - half)
        };
        let lead = p.clutch_lead_time_ms * 1e-3;
        let ramp_len = half - lead;
        let u = (tau - lead) / ramp_len;
        let level = triangle(u, p.rise_fraction);
        let polarity = p.ac_polarity(t);

        let mut cmd = PairCommand::OFF;
        cmd.left.clutch_polarity = polarity;
        cmd.right.clutch_polarity = polarity;
        *cmd.side_mut(agonist) = UnitCommand {
            hasel_on: true,
            hasel_voltage_kv: level * p.hasel_peak_kv,
            clutch_engaged: self.clutch_channels,
            clutch_voltage_magnitude_v: if self.clutch_channels {
                p.clutch_amplitude_v
            } else {
                0.0
            },
            clutch_polarity: polarity,
        };
        if let (Some(b), true) = (p.braking, self.clutch_channels) {
            let falling = u >= p.rise_fraction && u < 1.0;
            if falling && b.direction.map_or(true, |d| d == agonist) {
                let (side, mut unit) = brake_command(agonist, b.voltage_v);
                unit.clutch_polarity = polarity;
                *cmd.side_mut(side) = unit;
                cmd.brake = true;
            }
        }
        cmd
    }
}
