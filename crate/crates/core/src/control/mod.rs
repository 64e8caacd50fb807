//! Feedforward control of an antagonistic HASEL-clutch pair: the four unit
//! states, waveform generators, the alternating gait and a schedule checker.

mod gait;
mod schedule;
mod waveform;

pub use gait::{brake_command, gait_controller, Braking, Gait, GaitParams};
pub use schedule::{
    command_trace, validate_schedule, CommandRow, CommandTrace, Violation, ViolationKind,
};
pub use waveform::{waveform_value, Waveform};

use serde::{Deserialize, Serialize};

use crate::joint::{Side, UnitDrive};

/// Per-unit state as (HASEL, clutch).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairState {
    S1OnOff,
    S2OnOn,
    S3OffOff,
    S4OffOn,
}

impl PairState {
    pub const ALL: [PairState; 4] = [
        PairState::S1OnOff,
        PairState::S2OnOn,
        PairState::S3OffOff,
        PairState::S4OffOn,
    ];

    pub fn from_outputs(hasel_on: bool, clutch_on: bool) -> Self {
        match (hasel_on, clutch_on) {
            (true, false) => PairState::S1OnOff,
            (true, true) => PairState::S2OnOn,
            (false, false) => PairState::S3OffOff,
            (false, true) => PairState::S4OffOn,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PairState::S1OnOff => "S1",
            PairState::S2OnOn => "S2",
            PairState::S3OffOff => "S3",
            PairState::S4OffOn => "S4",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        PairState::ALL.into_iter().find(|p| p.label() == s)
    }
}

/// `(hasel_on, clutch_on)` for a state.
pub fn state_outputs(s: PairState) -> (bool, bool) {
    match s {
        PairState::S1OnOff => (true, false),
        PairState::S2OnOn => (true, true),
        PairState::S3OffOff => (false, false),
        PairState::S4OffOn => (false, true),
    }
}

/// Voltages sent to one unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCommand {
    pub hasel_on: bool,
    pub hasel_voltage_kv: f64,
    pub clutch_engaged: bool,
    pub clutch_voltage_magnitude_v: f64,
    /// Sign of the AC square drive at this instant (+1 or -1). Only the
    /// magnitude reaches the force law.
    pub clutch_polarity: i8,
}

impl UnitCommand {
    pub const OFF: UnitCommand = UnitCommand {
        hasel_on: false,
        hasel_voltage_kv: 0.0,
        clutch_engaged: false,
        clutch_voltage_magnitude_v: 0.0,
        clutch_polarity: 1,
    };

    pub fn state(&self) -> PairState {
        PairState::from_outputs(self.hasel_on, self.clutch_engaged)
    }

    /// Signed clutch channel voltage as it would appear on the amplifier.
    pub fn clutch_voltage_signed_v(&self) -> f64 {
        f64::from(self.clutch_polarity) * self.clutch_voltage_magnitude_v
    }

    pub fn drive(&self) -> UnitDrive {
        UnitDrive {
            hasel_kv: self.hasel_voltage_kv,
            clutch_v: if self.clutch_engaged {
                self.clutch_voltage_magnitude_v
            } else {
                0.0
            },
            clutch_on: self.clutch_engaged,
            forced_lock: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCommand {
    pub left: UnitCommand,
    pub right: UnitCommand,
    /// Segment deliberately engages the antagonist clutch to brake.
    pub brake: bool,
}

impl PairCommand {
    pub const OFF: PairCommand = PairCommand {
        left: UnitCommand::OFF,
        right: UnitCommand::OFF,
        brake: false,
    };

    pub fn side(&self, side: Side) -> &UnitCommand {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut UnitCommand {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// Time-indexed command source for the simulator.
pub trait CommandSource {
    fn command(&self, t_s: f64) -> PairCommand;
}

impl<F: Fn(f64) -> PairCommand> CommandSource for F {
    fn command(&self, t_s: f64) -> PairCommand {
        self(t_s)
    }
}

/// Source that keeps every channel off.
#[derive(Clone, Copy, Debug, Default)]
pub struct Idle;

impl CommandSource for Idle {
    fn command(&self, _t_s: f64) -> PairCommand {
        PairCommand::OFF
    }
}
